#pragma once

// Per-pixel estimators: the Poisson negative log-likelihood, the greedy
// union-of-subspaces pursuit, the matched-filter baseline and an exhaustive
// maximum-likelihood reference for small grids.
//
// Column indices here are 0-based; the background coordinate is N.

#include "spdepth/core_model.hpp"

#include <span>
#include <vector>

namespace spdepth {

struct SolverSettings {
  /// Stop once ||x(k-1) - x(k)||^2 drops below this.
  double convergence_delta = 1e-4;
  std::size_t max_iterations = 50;
  /// Reflectors per pixel.
  std::size_t order_k = 1;
  /// Lower clamp applied to rates inside the log.
  double nll_floor = 1e-12;

  void validate() const;
};

struct SolverTrace {
  std::size_t iterations = 0;
  double final_step_norm_sq = 0.0;
  /// Merged index set of each iteration.
  std::vector<std::vector<std::size_t>> support_history;
  /// NLL of each iterate.
  std::vector<double> objective_history;
  bool converged = false;
  bool no_signal = false;
};

struct SolveResult {
  SceneResponse x;
  SolverTrace trace;
};

/// sum_k (Ax)_k - y_k log(max((Ax)_k, floor)); bins with y_k = 0 contribute
/// only their rate.
double nll(const Eigen::VectorXd& x, const SensingMatrix& A,
           const PhotonHistogram& y, double floor = 1e-12);

/// A^T (1 - y / max(Ax, floor)), zero-count bins contributing A^T 1 only.
Eigen::VectorXd nll_gradient(const Eigen::VectorXd& x, const SensingMatrix& A,
                             const PhotonHistogram& y, double floor = 1e-12);

/// A^T * residual.
Eigen::VectorXd proxy(const Eigen::VectorXd& residual, const SensingMatrix& A);

/// Top-K reflector entries of the proxy (ties to the smallest index),
/// union the reflector support of `previous`, union the background index.
/// Sorted ascending.
std::vector<std::size_t> merge_support(const Eigen::VectorXd& proxy,
                                       const SceneResponse& previous,
                                       std::size_t order_k);

/// Minimum-norm least-squares fit of y on the columns in `support`;
/// singular values below 1e-10 * sigma_max are dropped. Entries outside
/// the support are zero and entries inside may be negative.
Eigen::VectorXd restricted_least_squares(const PhotonHistogram& y,
                                         const SensingMatrix& A,
                                         std::span<const std::size_t> support);

/// Keeps the K largest reflector entries (ties to the smallest index) and
/// the background, zeroes the rest and clamps negatives to zero. This is
/// the Euclidean projection onto the feasible set.
SceneResponse project_union_subspace(const Eigen::VectorXd& b,
                                     std::size_t order_k);

/// Greedy union-of-subspaces pursuit. An all-zero histogram returns x = 0
/// with no_signal set. Throws NumericalFailure on non-finite iterates.
SolveResult greedy_solve(const PhotonHistogram& y, const SensingMatrix& A,
                         const SolverSettings& settings = {});

/// Depth from argmax_j S_j^T y (the log is monotone and omitted). Values
/// within 1e-12 relative of the maximum are ties; the smallest index wins.
PixelEstimate log_matched_filter(const PhotonHistogram& y, const SensingMatrix& A,
                                 const AcquisitionConfig& config);

/// Largest number of reflector supports the oracle will enumerate.
inline constexpr double kOracleSupportLimit = 1e6;

/// Global minimizer of the NLL over non-negative vectors with at most K
/// reflectors, by enumerating every support and solving each convex
/// subproblem with a damped Newton method on every face of its orthant.
/// Throws InstanceTooLarge when C(N, K) exceeds kOracleSupportLimit.
SceneResponse exhaustive_ml_oracle(const PhotonHistogram& y,
                                   const SensingMatrix& A, std::size_t order_k,
                                   double floor = 1e-12);

/// Reads depth, amplitude and background out of a solved scene response.
/// The strongest reflector (ties to the nearer bin) sets depth_m.
PixelEstimate decode_estimate(const SceneResponse& x,
                              const AcquisitionConfig& config,
                              const SolverTrace& trace);

}  // namespace spdepth
