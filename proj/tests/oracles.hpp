#pragma once

// Reference computations for the unit and acceptance suites. Everything
// here works from first principles in long double and never calls the
// library routine it is used to check.

#include "spdepth/core_model.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace spdepth::oracle {

using LongMatrix = std::vector<std::vector<long double>>;

/// S for equal grids straight from the definition:
/// S_{i,j} = N_s * eta * eps * (eps * s_{(i-j) mod N}).
inline LongMatrix sensing_from_pulse(const PulseWaveform& pulse,
                                     const AcquisitionConfig& config) {
  const std::size_t n = pulse.size();
  const long double eps = config.grid_bin_s();
  const long double scale =
      static_cast<long double>(config.num_pulses()) * config.quantum_efficiency() * eps;
  LongMatrix s(n, std::vector<long double>(n + 1, 1.0L));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      s[i][j] = scale * eps * pulse.samples()[(i + n - j) % n];
  return s;
}

inline LongMatrix from_dense(const Eigen::MatrixXd& a) {
  LongMatrix out(static_cast<std::size_t>(a.rows()),
                 std::vector<long double>(static_cast<std::size_t>(a.cols())));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = a(i, j);
  return out;
}

inline std::vector<long double> multiply(const LongMatrix& a, const Eigen::VectorXd& x) {
  std::vector<long double> out(a.size(), 0.0L);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j)
      out[i] += a[i][j] * static_cast<long double>(x[static_cast<Eigen::Index>(j)]);
  return out;
}

inline std::vector<long double> multiply_transpose(const LongMatrix& a,
                                                   const Eigen::VectorXd& u) {
  std::vector<long double> out(a.front().size(), 0.0L);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j)
      out[j] += a[i][j] * static_cast<long double>(u[static_cast<Eigen::Index>(i)]);
  return out;
}

inline long double poisson_nll(const LongMatrix& a, const Eigen::VectorXd& x,
                               const std::vector<int>& y, long double floor = 1e-12L) {
  const auto rates = multiply(a, x);
  long double out = 0.0L;
  for (std::size_t k = 0; k < rates.size(); ++k) {
    out += rates[k];
    if (y[k] > 0) out -= y[k] * std::log(std::max(rates[k], floor));
  }
  return out;
}

/// Solves the normal equations (A_S^T A_S) b = A_S^T y by Gaussian
/// elimination with partial pivoting.
inline std::vector<long double> normal_equations(const LongMatrix& a,
                                                 const std::vector<std::size_t>& cols,
                                                 const std::vector<int>& y) {
  const std::size_t f = cols.size();
  LongMatrix g(f, std::vector<long double>(f + 1, 0.0L));
  for (std::size_t p = 0; p < f; ++p) {
    for (std::size_t q = 0; q < f; ++q)
      for (std::size_t i = 0; i < a.size(); ++i) g[p][q] += a[i][cols[p]] * a[i][cols[q]];
    for (std::size_t i = 0; i < a.size(); ++i) g[p][f] += a[i][cols[p]] * y[i];
  }
  for (std::size_t p = 0; p < f; ++p) {
    std::size_t pivot = p;
    for (std::size_t r = p + 1; r < f; ++r)
      if (std::abs(g[r][p]) > std::abs(g[pivot][p])) pivot = r;
    std::swap(g[p], g[pivot]);
    for (std::size_t r = 0; r < f; ++r) {
      if (r == p) continue;
      const long double factor = g[r][p] / g[p][p];
      for (std::size_t c = p; c <= f; ++c) g[r][c] -= factor * g[p][c];
    }
  }
  std::vector<long double> out(f);
  for (std::size_t p = 0; p < f; ++p) out[p] = g[p][f] / g[p][p];
  return out;
}

/// Euclidean projection onto {x >= 0, at most K reflectors} by trying every
/// K-subset of reflector coordinates.
inline Eigen::VectorXd exhaustive_projection(const Eigen::VectorXd& b, std::size_t k) {
  const auto n = static_cast<std::size_t>(b.size() - 1);
  std::vector<int> pick(n, 0);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(std::min(k, n)), 1);
  Eigen::VectorXd best;
  long double best_dist = std::numeric_limits<long double>::infinity();
  do {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
    for (std::size_t j = 0; j < n; ++j)
      if (pick[j]) x[static_cast<Eigen::Index>(j)] = std::max(b[static_cast<Eigen::Index>(j)], 0.0);
    x[b.size() - 1] = std::max(b[b.size() - 1], 0.0);
    long double dist = 0.0L;
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      const long double d = static_cast<long double>(b[i]) - x[i];
      dist += d * d;
    }
    if (dist < best_dist) {
      best_dist = dist;
      best = x;
    }
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index size,
                                     double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) v[i] = u(rng);
  return v;
}

inline double relative_error(long double got, long double want) {
  return static_cast<double>(std::abs(got - want) /
                             std::max(std::abs(want), static_cast<long double>(1e-300)));
}

}  // namespace spdepth::oracle
