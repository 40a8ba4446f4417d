#include "spdepth/pursuit.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace spdepth {

namespace {

/// Indices of the k largest entries of values[0..n), ties to the smallest
/// index, in selection order.
std::vector<std::size_t> top_k(const Eigen::VectorXd& values, std::size_t n,
                               std::size_t k) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  k = std::min(k, n);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k),
                    order.end(), [&](std::size_t a, std::size_t b) {
                      const double va = values[static_cast<Eigen::Index>(a)];
                      const double vb = values[static_cast<Eigen::Index>(b)];
                      return va > vb || (va == vb && a < b);
                    });
  order.resize(k);
  return order;
}

void require_finite(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite())
    throw NumericalFailure(std::string("greedy_solve: non-finite ") + what);
}

// NLL restricted to a few columns of A, written over the non-zero bins of y
// only: sum_k (Cz)_k collapses to dot(z, column sums).
class FaceObjective {
 public:
  FaceObjective(const SensingMatrix& A, const PhotonHistogram& y, double floor)
      : floor_(floor) {
    for (std::size_t k = 0; k < y.size(); ++k) {
      if (y[k] > 0) {
        rows_.push_back(static_cast<Eigen::Index>(k));
        counts_.push_back(static_cast<double>(y[k]));
      }
    }
    dense_ = &A.dense();
  }

  void select(const std::vector<std::size_t>& columns) {
    const auto f = static_cast<Eigen::Index>(columns.size());
    const auto nnz = static_cast<Eigen::Index>(rows_.size());
    block_.resize(nnz, f);
    sums_.resize(f);
    for (Eigen::Index c = 0; c < f; ++c) {
      const auto col = static_cast<Eigen::Index>(columns[static_cast<std::size_t>(c)]);
      sums_[c] = dense_->col(col).sum();
      for (Eigen::Index r = 0; r < nnz; ++r) block_(r, c) = (*dense_)(rows_[static_cast<std::size_t>(r)], col);
    }
  }

  double value(const Eigen::VectorXd& z) const {
    const Eigen::VectorXd rates = block_ * z;
    double out = sums_.dot(z);
    for (Eigen::Index r = 0; r < rates.size(); ++r)
      out -= counts_[static_cast<std::size_t>(r)] * std::log(std::max(rates[r], floor_));
    return out;
  }

  void derivatives(const Eigen::VectorXd& z, Eigen::VectorXd& grad,
                   Eigen::MatrixXd& hess) const {
    const Eigen::VectorXd rates = block_ * z;
    Eigen::VectorXd w1 = Eigen::VectorXd::Zero(rates.size());
    Eigen::VectorXd w2 = Eigen::VectorXd::Zero(rates.size());
    for (Eigen::Index r = 0; r < rates.size(); ++r) {
      if (rates[r] > floor_) {
        const double yk = counts_[static_cast<std::size_t>(r)];
        w1[r] = yk / rates[r];
        w2[r] = yk / (rates[r] * rates[r]);
      }
    }
    grad = sums_ - block_.transpose() * w1;
    hess = block_.transpose() * w2.asDiagonal() * block_;
  }

  const Eigen::VectorXd& sums() const { return sums_; }

 private:
  double floor_;
  const Eigen::MatrixXd* dense_ = nullptr;
  std::vector<Eigen::Index> rows_;
  std::vector<double> counts_;
  Eigen::MatrixXd block_;
  Eigen::VectorXd sums_;
};

// Damped Newton over the open orthant of the selected face. Iterates stay
// strictly positive; when the face minimum sits on its boundary the result
// only approaches it, and a smaller face supplies the exact value.
double minimize_face(const FaceObjective& obj, double total_counts,
                     Eigen::VectorXd& z) {
  const Eigen::Index f = obj.sums().size();
  z.resize(f);
  for (Eigen::Index i = 0; i < f; ++i)
    z[i] = total_counts / (static_cast<double>(f) * obj.sums()[i]);

  double value = obj.value(z);
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  for (int iter = 0; iter < 200; ++iter) {
    obj.derivatives(z, grad, hess);
    const double ridge = 1e-12 * (hess.trace() / static_cast<double>(f) + 1.0);
    hess.diagonal().array() += ridge;
    const Eigen::VectorXd step = -hess.ldlt().solve(grad);
    const double decrement = -grad.dot(step);
    if (!std::isfinite(decrement) || decrement < 1e-12) break;

    double alpha = 1.0;
    for (Eigen::Index i = 0; i < f; ++i)
      if (step[i] < 0.0) alpha = std::min(alpha, -0.99 * z[i] / step[i]);

    bool moved = false;
    while (alpha > 1e-20) {
      const Eigen::VectorXd trial = z + alpha * step;
      const double trial_value = obj.value(trial);
      if (trial_value <= value - 1e-4 * alpha * decrement) {
        const double gain = value - trial_value;
        z = trial;
        value = trial_value;
        moved = gain > 1e-15 * (1.0 + std::abs(value));
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) break;
  }
  return value;
}

double binomial(std::size_t n, std::size_t k) {
  double out = 1.0;
  for (std::size_t i = 1; i <= k; ++i)
    out *= static_cast<double>(n - k + i) / static_cast<double>(i);
  return out;
}

bool next_combination(std::vector<std::size_t>& comb, std::size_t n) {
  const std::size_t k = comb.size();
  for (std::size_t i = k; i-- > 0;) {
    if (comb[i] < n - k + i) {
      ++comb[i];
      for (std::size_t j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

void SolverSettings::validate() const {
  if (!(convergence_delta > 0.0)) throw DomainError("delta must be positive");
  if (max_iterations < 1) throw DomainError("max_iterations must be >= 1");
  if (order_k < 1) throw DomainError("order K must be >= 1");
  if (!(nll_floor > 0.0)) throw DomainError("nll floor must be positive");
}

double nll(const Eigen::VectorXd& x, const SensingMatrix& A,
           const PhotonHistogram& y, double floor) {
  if (static_cast<std::size_t>(x.size()) != A.cols() || y.size() != A.rows())
    throw DomainError("nll: dimension mismatch");
  if ((x.array() < 0.0).any()) throw DomainError("nll: negative entry in x");
  const Eigen::VectorXd rates = A.apply(x);
  double out = 0.0;
  for (Eigen::Index k = 0; k < rates.size(); ++k) {
    out += rates[k];
    const int count = y[static_cast<std::size_t>(k)];
    if (count > 0) out -= count * std::log(std::max(rates[k], floor));
  }
  return out;
}

Eigen::VectorXd nll_gradient(const Eigen::VectorXd& x, const SensingMatrix& A,
                             const PhotonHistogram& y, double floor) {
  if (static_cast<std::size_t>(x.size()) != A.cols() || y.size() != A.rows())
    throw DomainError("nll_gradient: dimension mismatch");
  const Eigen::VectorXd rates = A.apply(x);
  Eigen::VectorXd weights(rates.size());
  for (Eigen::Index k = 0; k < rates.size(); ++k) {
    const int count = y[static_cast<std::size_t>(k)];
    weights[k] = 1.0 - (count > 0 && rates[k] > floor ? count / rates[k] : 0.0);
  }
  return A.apply_transpose(weights);
}

Eigen::VectorXd proxy(const Eigen::VectorXd& residual, const SensingMatrix& A) {
  return A.apply_transpose(residual);
}

std::vector<std::size_t> merge_support(const Eigen::VectorXd& proxy,
                                       const SceneResponse& previous,
                                       std::size_t order_k) {
  if (order_k < 1) throw DomainError("order K must be >= 1");
  if (proxy.size() != previous.values().size())
    throw DomainError("merge_support: dimension mismatch");
  const std::size_t n = previous.num_grid_bins();
  std::vector<std::size_t> out = top_k(proxy, n, order_k);
  for (std::size_t j : previous.support()) out.push_back(j);
  out.push_back(n);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Eigen::VectorXd restricted_least_squares(const PhotonHistogram& y,
                                         const SensingMatrix& A,
                                         std::span<const std::size_t> support) {
  if (y.size() != A.rows())
    throw DomainError("restricted_least_squares: dimension mismatch");
  if (support.empty()) throw DomainError("restricted_least_squares: empty support");
  if (support.size() > A.rows())
    throw DomainError("restricted_least_squares: support larger than M");
  const auto m = static_cast<Eigen::Index>(A.rows());
  Eigen::MatrixXd sub(m, static_cast<Eigen::Index>(support.size()));
  for (std::size_t c = 0; c < support.size(); ++c) {
    if (support[c] >= A.cols())
      throw DomainError("restricted_least_squares: index out of range");
    sub.col(static_cast<Eigen::Index>(c)) =
        A.dense().col(static_cast<Eigen::Index>(support[c]));
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  const Eigen::VectorXd coeffs = svd.solve(y.as_vector());

  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(A.cols()));
  for (std::size_t c = 0; c < support.size(); ++c)
    out[static_cast<Eigen::Index>(support[c])] = coeffs[static_cast<Eigen::Index>(c)];
  return out;
}

SceneResponse project_union_subspace(const Eigen::VectorXd& b,
                                     std::size_t order_k) {
  if (b.size() < 2) throw DomainError("project_union_subspace: need N >= 1");
  const auto n = static_cast<std::size_t>(b.size() - 1);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(b.size());
  for (std::size_t j : top_k(b, n, order_k)) {
    const auto idx = static_cast<Eigen::Index>(j);
    out[idx] = std::max(b[idx], 0.0);
  }
  out[b.size() - 1] = std::max(b[b.size() - 1], 0.0);
  return SceneResponse(std::move(out), order_k);
}

SolveResult greedy_solve(const PhotonHistogram& y, const SensingMatrix& A,
                         const SolverSettings& settings) {
  settings.validate();
  if (y.size() != A.rows()) throw DomainError("greedy_solve: histogram length != M");
  const std::size_t n = A.num_signal_columns();

  SolveResult result{SceneResponse::zero(n, settings.order_k), {}};
  if (y.is_zero()) {
    result.trace.no_signal = true;
    result.trace.converged = true;
    return result;
  }

  const Eigen::VectorXd counts = y.as_vector();
  Eigen::VectorXd residual = counts;
  for (std::size_t iter = 1; iter <= settings.max_iterations; ++iter) {
    const Eigen::VectorXd estimate = proxy(residual, A);
    require_finite(estimate, "proxy");
    const std::vector<std::size_t> support =
        merge_support(estimate, result.x, settings.order_k);
    const Eigen::VectorXd b = restricted_least_squares(y, A, support);
    require_finite(b, "least-squares solution");
    SceneResponse next = project_union_subspace(b, settings.order_k);

    residual = counts - A.apply(next.values());
    const double step = (result.x.values() - next.values()).squaredNorm();
    result.trace.iterations = iter;
    result.trace.final_step_norm_sq = step;
    result.trace.support_history.push_back(support);
    result.trace.objective_history.push_back(
        nll(next.values(), A, y, settings.nll_floor));
    result.x = std::move(next);
    if (step < settings.convergence_delta) {
      result.trace.converged = true;
      break;
    }
  }
  return result;
}

constexpr double kTieTolerance = 1e-12;

PixelEstimate log_matched_filter(const PhotonHistogram& y, const SensingMatrix& A,
                                 const AcquisitionConfig& config) {
  if (y.size() != A.rows()) throw DomainError("log_matched_filter: histogram length != M");
  const Eigen::VectorXd corr = A.correlate_signal(y.as_vector());
  // Correlations equal up to rounding count as ties; the smallest shift wins.
  const double peak = corr.maxCoeff();
  std::size_t best = 0;
  while (corr[static_cast<Eigen::Index>(best)] < peak - kTieTolerance * std::abs(peak)) ++best;

  PixelEstimate out;
  out.converged = true;
  if (!(corr[static_cast<Eigen::Index>(best)] > 0.0)) {
    out.no_signal = true;
    out.depth_m = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.depth_m = depth_from_bin(best + 1, config);
  // Poisson ML amplitude for a known shift and no background.
  out.amplitude = static_cast<double>(y.total()) / A.signal_column_sum();
  out.reflectors.push_back({out.depth_m, out.amplitude});
  return out;
}

SceneResponse exhaustive_ml_oracle(const PhotonHistogram& y,
                                   const SensingMatrix& A, std::size_t order_k,
                                   double floor) {
  if (order_k < 1) throw DomainError("order K must be >= 1");
  if (y.size() != A.rows()) throw DomainError("oracle: histogram length != M");
  const std::size_t n = A.num_signal_columns();
  const std::size_t k = std::min(order_k, n);
  if (binomial(n, k) > kOracleSupportLimit)
    throw InstanceTooLarge("oracle: C(" + std::to_string(n) + ", " +
                           std::to_string(k) + ") supports exceed the limit of " +
                           std::to_string(static_cast<long long>(kOracleSupportLimit)));
  if (k > 16) throw InstanceTooLarge("oracle: K above 16 is not supported");

  const auto bg = static_cast<Eigen::Index>(n);
  Eigen::VectorXd best = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n) + 1);
  if (y.is_zero()) return SceneResponse(best, order_k);

  // Background-only candidate has a closed form.
  const auto total = static_cast<double>(y.total());
  best[bg] = total / static_cast<double>(A.rows());
  double best_value = nll(best, A, y, floor);

  FaceObjective obj(A, y, floor);
  std::vector<std::size_t> comb(k);
  std::iota(comb.begin(), comb.end(), std::size_t{0});
  std::vector<std::size_t> columns;
  Eigen::VectorXd z;
  do {
    // Every face of the support's orthant containing a reflector.
    const std::size_t faces = std::size_t{1} << (k + 1);
    for (std::size_t mask = 1; mask < faces; ++mask) {
      if ((mask & ((std::size_t{1} << k) - 1)) == 0) continue;
      columns.clear();
      for (std::size_t i = 0; i < k; ++i)
        if (mask & (std::size_t{1} << i)) columns.push_back(comb[i]);
      if (mask & (std::size_t{1} << k)) columns.push_back(n);
      obj.select(columns);
      const double value = minimize_face(obj, total, z);
      if (value < best_value - 1e-12 * (1.0 + std::abs(best_value))) {
        best_value = value;
        best.setZero();
        for (std::size_t c = 0; c < columns.size(); ++c)
          best[static_cast<Eigen::Index>(columns[c])] = z[static_cast<Eigen::Index>(c)];
      }
    }
  } while (next_combination(comb, n));
  return SceneResponse(std::move(best), order_k);
}

PixelEstimate decode_estimate(const SceneResponse& x,
                              const AcquisitionConfig& config,
                              const SolverTrace& trace) {
  if (x.num_grid_bins() != config.num_grid_bins())
    throw DomainError("decode_estimate: grid size mismatch");
  PixelEstimate out;
  out.background_B = x.background();
  out.iterations = trace.iterations;
  out.converged = trace.converged;

  std::vector<std::size_t> support = x.support();
  const Eigen::VectorXd& v = x.values();
  std::stable_sort(support.begin(), support.end(), [&](std::size_t a, std::size_t b) {
    return v[static_cast<Eigen::Index>(a)] > v[static_cast<Eigen::Index>(b)];
  });
  for (std::size_t j : support)
    out.reflectors.push_back({depth_from_bin(j + 1, config), v[static_cast<Eigen::Index>(j)]});

  out.no_signal = trace.no_signal || support.empty();
  if (out.no_signal) {
    out.depth_m = std::numeric_limits<double>::quiet_NaN();
    out.amplitude = 0.0;
    out.reflectors.clear();
  } else {
    out.depth_m = out.reflectors.front().depth_m;
    out.amplitude = out.reflectors.front().amplitude;
  }
  return out;
}

}  // namespace spdepth
