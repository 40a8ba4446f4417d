#include "spdepth/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace spdepth {

namespace {

std::size_t tile_count(double period, double width, const char* what) {
  if (!(width > 0.0) || !std::isfinite(width))
    throw DomainError(std::string(what) + " must be positive and finite");
  const double ratio = period / width;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(rounded * width - period) > 1e-9 * period)
    throw DomainError(std::string("repetition period is not divisible by ") +
                      what);
  return static_cast<std::size_t>(rounded);
}

}  // namespace

AcquisitionConfig::AcquisitionConfig(double pulse_repetition_period_s,
                                     double detector_bin_s, double grid_bin_s,
                                     double num_pulses,
                                     double quantum_efficiency,
                                     double dark_count_rate_hz)
    : period_s_(pulse_repetition_period_s),
      detector_bin_s_(detector_bin_s),
      grid_bin_s_(grid_bin_s),
      num_pulses_(num_pulses),
      quantum_efficiency_(quantum_efficiency),
      dark_count_rate_hz_(dark_count_rate_hz) {
  if (!(period_s_ > 0.0) || !std::isfinite(period_s_))
    throw DomainError("repetition period must be positive and finite");
  num_detector_bins_ = tile_count(period_s_, detector_bin_s_, "detector bin");
  num_grid_bins_ = tile_count(period_s_, grid_bin_s_, "grid bin");
  if (!(num_pulses_ >= 1.0) || !std::isfinite(num_pulses_))
    throw DomainError("number of pulses must be >= 1");
  if (!(quantum_efficiency_ > 0.0 && quantum_efficiency_ <= 1.0))
    throw DomainError("quantum efficiency must lie in (0, 1]");
  if (!(dark_count_rate_hz_ >= 0.0) || !std::isfinite(dark_count_rate_hz_))
    throw DomainError("dark count rate must be non-negative");
}

AcquisitionConfig AcquisitionConfig::uniform(double pulse_repetition_period_s,
                                             std::size_t num_bins,
                                             double num_pulses,
                                             double quantum_efficiency,
                                             double dark_count_rate_hz) {
  if (num_bins == 0) throw DomainError("number of bins must be positive");
  const double width = pulse_repetition_period_s / static_cast<double>(num_bins);
  return AcquisitionConfig(pulse_repetition_period_s, width, width, num_pulses,
                           quantum_efficiency, dark_count_rate_hz);
}

double AcquisitionConfig::background_counts_per_bin(
    double background_flux) const {
  return num_pulses_ * detector_bin_s_ *
         (quantum_efficiency_ * background_flux + dark_count_rate_hz_);
}

PulseWaveform::PulseWaveform(double sample_period_s, std::vector<double> samples)
    : sample_period_s_(sample_period_s), samples_(std::move(samples)) {
  if (!(sample_period_s_ > 0.0) || !std::isfinite(sample_period_s_))
    throw DomainError("pulse sample period must be positive and finite");
  if (samples_.empty()) throw DomainError("pulse has no samples");
  bool any_positive = false;
  for (double s : samples_) {
    if (!std::isfinite(s) || s < 0.0)
      throw DomainError("pulse samples must be finite and non-negative");
    any_positive = any_positive || s > 0.0;
  }
  if (!any_positive) throw DomainError("pulse has no positive sample");
}

double PulseWaveform::total_mass() const {
  return std::accumulate(samples_.begin(), samples_.end(), 0.0) *
         sample_period_s_;
}

double PulseWaveform::rms_width_s() const {
  double weight = 0.0, mean = 0.0;
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    weight += samples_[k];
    mean += samples_[k] * (static_cast<double>(k) + 0.5);
  }
  mean /= weight;
  double var = 0.0;
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    const double dt = static_cast<double>(k) + 0.5 - mean;
    var += samples_[k] * dt * dt;
  }
  return std::sqrt(var / weight) * sample_period_s_;
}

SensingMatrix::SensingMatrix(Eigen::MatrixXd entries, bool circulant)
    : entries_(std::move(entries)), circulant_(circulant) {
  const Eigen::Index m = entries_.rows();
  const Eigen::Index n = entries_.cols() - 1;
  if (m < 1 || n < 1) throw DomainError("sensing matrix is too small");
  if (!entries_.allFinite() || (entries_.array() < 0.0).any())
    throw DomainError("sensing matrix entries must be finite and non-negative");
  if ((entries_.col(n).array() != 1.0).any())
    throw DomainError("background column of the sensing matrix must be all ones");

  const Eigen::VectorXd sums = entries_.leftCols(n).colwise().sum().transpose();
  const double largest = sums.maxCoeff();
  if (!(largest > 0.0)) throw DomainError("sensing matrix has no signal");
  if ((sums.array() - largest).abs().maxCoeff() > 1e-9 * largest)
    throw DomainError("signal columns of the sensing matrix differ in total");
  column_sum_ = sums.mean();

  if (circulant_) {
    if (m != n) throw DomainError("circulant sensing matrix must have N = M");
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < m; ++i)
        if (entries_(i, j) != entries_((i - j + m) % m, 0))
          throw DomainError("sensing matrix columns are not circular shifts");
    for (Eigen::Index t = 0; t < m; ++t)
      if (entries_(t, 0) != 0.0) taps_.push_back({t, entries_(t, 0)});
  }
}

Eigen::VectorXd SensingMatrix::apply(const Eigen::VectorXd& x) const {
  const Eigen::Index m = entries_.rows();
  const Eigen::Index n = entries_.cols() - 1;
  if (x.size() != n + 1) throw DomainError("apply: dimension mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Constant(m, x[n]);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (x[j] == 0.0) continue;
    if (circulant_) {
      for (const Tap& tap : taps_) out[(j + tap.offset) % m] += tap.value * x[j];
    } else {
      out.noalias() += x[j] * entries_.col(j);
    }
  }
  return out;
}

Eigen::VectorXd SensingMatrix::correlate_signal(const Eigen::VectorXd& u) const {
  const Eigen::Index m = entries_.rows();
  const Eigen::Index n = entries_.cols() - 1;
  if (u.size() != m) throw DomainError("correlate: dimension mismatch");
  if (!circulant_) return entries_.leftCols(n).transpose() * u;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double acc = 0.0;
    for (const Tap& tap : taps_) acc += tap.value * u[(j + tap.offset) % m];
    out[j] = acc;
  }
  return out;
}

Eigen::VectorXd SensingMatrix::apply_transpose(const Eigen::VectorXd& u) const {
  const Eigen::Index n = entries_.cols() - 1;
  Eigen::VectorXd out(n + 1);
  out.head(n) = correlate_signal(u);
  out[n] = u.sum();
  return out;
}

PhotonHistogram::PhotonHistogram(std::vector<int> counts)
    : counts_(std::move(counts)) {
  for (int c : counts_)
    if (c < 0) throw DomainError("photon counts must be non-negative");
}

PhotonHistogram PhotonHistogram::zeros(std::size_t num_bins) {
  return PhotonHistogram(std::vector<int>(num_bins, 0));
}

std::int64_t PhotonHistogram::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

bool PhotonHistogram::is_zero() const {
  return std::all_of(counts_.begin(), counts_.end(), [](int c) { return c == 0; });
}

Eigen::VectorXd PhotonHistogram::as_vector() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(counts_.size()));
  for (std::size_t i = 0; i < counts_.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = counts_[i];
  return v;
}

SceneResponse::SceneResponse(Eigen::VectorXd values, std::size_t order_k)
    : values_(std::move(values)), order_k_(order_k) {
  if (values_.size() < 2) throw DomainError("scene response needs N >= 1");
  if (order_k_ < 1) throw DomainError("order K must be >= 1");
  if (!values_.allFinite() || (values_.array() < 0.0).any())
    throw DomainError("scene response entries must be finite and non-negative");
  const Eigen::Index n = values_.size() - 1;
  const auto nonzeros =
      static_cast<std::size_t>((values_.head(n).array() != 0.0).count());
  if (nonzeros > order_k_)
    throw DomainError("scene response has " + std::to_string(nonzeros) +
                      " reflectors, more than K = " + std::to_string(order_k_));
}

SceneResponse SceneResponse::zero(std::size_t num_grid_bins, std::size_t order_k) {
  return SceneResponse(
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_grid_bins) + 1),
      order_k);
}

SceneResponse SceneResponse::single(std::size_t num_grid_bins, std::size_t bin,
                                    double amplitude, double background) {
  if (bin < 1 || bin > num_grid_bins)
    throw DomainError("reflector bin out of range");
  Eigen::VectorXd x =
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_grid_bins) + 1);
  x[static_cast<Eigen::Index>(bin) - 1] = amplitude;
  x[static_cast<Eigen::Index>(num_grid_bins)] = background;
  return SceneResponse(std::move(x), 1);
}

std::vector<std::size_t> SceneResponse::support() const {
  std::vector<std::size_t> out;
  for (Eigen::Index j = 0; j + 1 < values_.size(); ++j)
    if (values_[j] != 0.0) out.push_back(static_cast<std::size_t>(j));
  return out;
}

double depth_from_bin(std::size_t bin, const AcquisitionConfig& config) {
  if (bin < 1 || bin > config.num_grid_bins())
    throw DomainError("depth_from_bin: bin " + std::to_string(bin) +
                      " outside 1.." + std::to_string(config.num_grid_bins()));
  return kLightSpeed * config.grid_bin_s() *
         (static_cast<double>(bin) - 0.5) / 2.0;
}

std::size_t bin_from_depth(double depth_m, const AcquisitionConfig& config) {
  if (!(depth_m >= 0.0) || !(depth_m < config.max_depth_m()))
    throw DomainError("bin_from_depth: depth outside the unambiguous range");
  const double bin = std::floor(depth_m / config.depth_bin_width_m()) + 1.0;
  return std::clamp(static_cast<std::size_t>(bin), std::size_t{1},
                    config.num_grid_bins());
}

}  // namespace spdepth
