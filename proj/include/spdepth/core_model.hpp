#pragma once

// Domain types shared by every stage of the single-photon depth pipeline.
//
// Index conventions: public bin numbers (depth_from_bin, bin_from_depth and
// the file formats) are 1-based. Vector and matrix indices are 0-based, so
// grid bin j lives in column j-1 of the sensing matrix and the background
// coordinate is column N.

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace spdepth {

/// Speed of light used for every time-of-flight conversion [m/s].
inline constexpr double kLightSpeed = 2.998e8;

class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a request would enumerate more candidates than allowed.
class InstanceTooLarge : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Raised by samplers that need at least some positive rate.
class NoSignalError : public DomainError {
 public:
  using DomainError::DomainError;
};

class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Timing grid and detector constants for one acquisition.
///
/// The repetition period is split into M detector bins of width Delta and
/// N reconstruction grid bins of width epsilon. Both must tile the period
/// to within one part in 1e9.
class AcquisitionConfig {
 public:
  AcquisitionConfig(double pulse_repetition_period_s, double detector_bin_s,
                    double grid_bin_s, double num_pulses = 1.0,
                    double quantum_efficiency = 1.0,
                    double dark_count_rate_hz = 0.0);

  /// Equal detector and grid bins (N = M), the common configuration.
  static AcquisitionConfig uniform(double pulse_repetition_period_s,
                                   std::size_t num_bins,
                                   double num_pulses = 1.0,
                                   double quantum_efficiency = 1.0,
                                   double dark_count_rate_hz = 0.0);

  double pulse_repetition_period_s() const { return period_s_; }
  double detector_bin_s() const { return detector_bin_s_; }
  double grid_bin_s() const { return grid_bin_s_; }
  std::size_t num_detector_bins() const { return num_detector_bins_; }
  std::size_t num_grid_bins() const { return num_grid_bins_; }
  double num_pulses() const { return num_pulses_; }
  double quantum_efficiency() const { return quantum_efficiency_; }
  double dark_count_rate_hz() const { return dark_count_rate_hz_; }
  double light_speed_m_s() const { return kLightSpeed; }

  bool equal_grids() const { return num_detector_bins_ == num_grid_bins_; }
  /// Depth extent of one grid bin, c*epsilon/2.
  double depth_bin_width_m() const { return kLightSpeed * grid_bin_s_ / 2.0; }
  /// Largest unambiguous depth, c*T_r/2 (exclusive).
  double max_depth_m() const { return kLightSpeed * period_s_ / 2.0; }
  /// Expected counts per bin contributed by background flux b [photons/s]
  /// plus dark counts: N_s * Delta * (eta*b + b_d).
  double background_counts_per_bin(double background_flux) const;

 private:
  double period_s_;
  double detector_bin_s_;
  double grid_bin_s_;
  std::size_t num_detector_bins_;
  std::size_t num_grid_bins_;
  double num_pulses_;
  double quantum_efficiency_;
  double dark_count_rate_hz_;
};

/// Illumination pulse s(t) sampled on the reconstruction grid; each sample
/// is the (constant) photon flux over one grid bin starting at t = 0.
class PulseWaveform {
 public:
  PulseWaveform(double sample_period_s, std::vector<double> samples);

  double sample_period_s() const { return sample_period_s_; }
  const std::vector<double>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }

  /// Integral of s(t) over the sampled window [photons].
  double total_mass() const;
  /// Root-mean-square width T_p of the pulse, treating the normalized
  /// samples as a distribution over bin-center times.
  double rms_width_s() const;

 private:
  double sample_period_s_;
  std::vector<double> samples_;
};

/// A = [S, 1], an M x (N+1) non-negative matrix mapping the scene response
/// to expected counts per detector bin.
///
/// When the detector and grid bins coincide, S is circulant and products
/// with A^T are evaluated as circular correlations against the kernel taps.
class SensingMatrix {
 public:
  /// Validates non-negativity, the all-ones background column and equal
  /// signal column sums (1e-9 relative). `circulant` asserts that column j
  /// is column 0 shifted down by j rows, and is checked exactly.
  explicit SensingMatrix(Eigen::MatrixXd entries, bool circulant = false);

  std::size_t rows() const { return static_cast<std::size_t>(entries_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(entries_.cols()); }
  std::size_t num_signal_columns() const { return cols() - 1; }
  std::size_t background_index() const { return cols() - 1; }

  const Eigen::MatrixXd& dense() const { return entries_; }
  bool is_circulant() const { return circulant_; }
  /// Common column sum of the signal columns.
  double signal_column_sum() const { return column_sum_; }

  /// A * x, skipping zero coordinates of x.
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  /// A^T * u.
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& u) const;
  /// S^T * u (first N entries of A^T u).
  Eigen::VectorXd correlate_signal(const Eigen::VectorXd& u) const;

 private:
  struct Tap {
    Eigen::Index offset;
    double value;
  };

  Eigen::MatrixXd entries_;
  bool circulant_ = false;
  std::vector<Tap> taps_;
  double column_sum_ = 0.0;
};

/// Per-bin photon counts y for one pixel.
class PhotonHistogram {
 public:
  PhotonHistogram() = default;
  explicit PhotonHistogram(std::vector<int> counts);
  static PhotonHistogram zeros(std::size_t num_bins);

  std::size_t size() const { return counts_.size(); }
  const std::vector<int>& counts() const { return counts_; }
  int operator[](std::size_t i) const { return counts_[i]; }
  std::int64_t total() const;
  bool is_zero() const;
  Eigen::VectorXd as_vector() const;

  bool operator==(const PhotonHistogram&) const = default;

 private:
  std::vector<int> counts_;
};

/// Scene response x = [v; B]: at most K non-zero reflector coordinates among
/// the first N entries plus the background level B, all non-negative.
class SceneResponse {
 public:
  SceneResponse(Eigen::VectorXd values, std::size_t order_k = 1);
  static SceneResponse zero(std::size_t num_grid_bins, std::size_t order_k = 1);
  /// Single reflector of `amplitude` in grid bin `bin` (1-based).
  static SceneResponse single(std::size_t num_grid_bins, std::size_t bin,
                              double amplitude, double background);

  const Eigen::VectorXd& values() const { return values_; }
  std::size_t num_grid_bins() const {
    return static_cast<std::size_t>(values_.size()) - 1;
  }
  std::size_t order_k() const { return order_k_; }
  double background() const { return values_[values_.size() - 1]; }
  /// 0-based indices of the non-zero reflector coordinates, ascending.
  std::vector<std::size_t> support() const;

  bool operator==(const SceneResponse& other) const {
    return order_k_ == other.order_k_ && values_ == other.values_;
  }

 private:
  Eigen::VectorXd values_;
  std::size_t order_k_;
};

struct Reflector {
  double depth_m = 0.0;
  double amplitude = 0.0;
};

/// Physical read-out of a solved pixel.
struct PixelEstimate {
  /// NaN when no_signal is set.
  double depth_m = 0.0;
  /// Expected signal counts carried by the reflector coordinate.
  double amplitude = 0.0;
  /// Expected background counts per detector bin.
  double background_B = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool no_signal = false;
  /// All reflectors, strongest first; more than one only when K > 1.
  std::vector<Reflector> reflectors;
};

/// Bin-center depth c*epsilon*(bin - 1/2)/2 of grid bin `bin` (1-based).
double depth_from_bin(std::size_t bin, const AcquisitionConfig& config);

/// Grid bin (1-based) whose depth interval [(j-1), j) * c*epsilon/2 holds
/// `depth_m`.
std::size_t bin_from_depth(double depth_m, const AcquisitionConfig& config);

}  // namespace spdepth
