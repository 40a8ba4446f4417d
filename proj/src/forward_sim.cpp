#include "spdepth/forward_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace spdepth {

namespace {

// Integral of the T_r-periodic, piecewise-constant pulse over [0, tau);
// `prefix[k]` holds the integral over the first k samples.
double cumulative_pulse(const PulseWaveform& pulse,
                        const std::vector<double>& prefix, double period,
                        double tau) {
  const auto& s = pulse.samples();
  const double eps = pulse.sample_period_s();
  const double wraps = std::floor(tau / period);
  const double local = tau - wraps * period;
  const auto k = std::min(static_cast<std::size_t>(std::max(local / eps, 0.0)),
                          s.size() - 1);
  return wraps * prefix.back() + prefix[k] +
         s[k] * (local - static_cast<double>(k) * eps);
}

void check_rates(const Eigen::VectorXd& rates) {
  for (Eigen::Index i = 0; i < rates.size(); ++i)
    if (!std::isfinite(rates[i]) || rates[i] < 0.0)
      throw DomainError("rate " + std::to_string(i + 1) +
                        " is negative or not finite");
}

double pulse_scale(const AcquisitionConfig& config, double column_sum,
                   double raw_sum) {
  const double eps = config.grid_bin_s();
  return column_sum /
         (config.num_pulses() * config.quantum_efficiency() * eps * eps * raw_sum);
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string pixel_tag(std::size_t row, std::size_t col) {
  return "pixel (" + std::to_string(row) + ", " + std::to_string(col) + "): ";
}

}  // namespace

SensingMatrix build_sensing_matrix(const PulseWaveform& pulse,
                                   const AcquisitionConfig& config) {
  const std::size_t m = config.num_detector_bins();
  const std::size_t n = config.num_grid_bins();
  if (pulse.size() != n)
    throw DomainError("pulse has " + std::to_string(pulse.size()) +
                      " samples but the grid has " + std::to_string(n));
  if (std::abs(pulse.sample_period_s() - config.grid_bin_s()) >
      1e-9 * config.grid_bin_s())
    throw DomainError("pulse sample period does not match the grid bin");

  const double eps = config.grid_bin_s();
  const double scale = config.num_pulses() * config.quantum_efficiency() * eps;
  const auto rows = static_cast<Eigen::Index>(m);
  const auto cols = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd entries(rows, cols + 1);
  entries.col(cols).setOnes();

  if (config.equal_grids()) {
    // Bin i integrates sample (i - j) mod N exactly.
    const auto& s = pulse.samples();
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i)
        entries(i, j) = scale * (s[static_cast<std::size_t>((i - j + rows) % rows)] * eps);
    return SensingMatrix(std::move(entries), true);
  }

  const double period = config.pulse_repetition_period_s();
  const double delta = config.detector_bin_s();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    prefix[k + 1] = prefix[k] + pulse.samples()[k] * eps;
  for (Eigen::Index j = 0; j < cols; ++j) {
    const double delay = static_cast<double>(j) * eps;
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double lo = static_cast<double>(i) * delta - delay;
      const double mass = cumulative_pulse(pulse, prefix, period, lo + delta) -
                          cumulative_pulse(pulse, prefix, period, lo);
      entries(i, j) = scale * std::max(mass, 0.0);
    }
  }
  return SensingMatrix(std::move(entries), false);
}

Eigen::VectorXd rate_vector(const SceneResponse& truth, const SensingMatrix& A) {
  if (static_cast<std::size_t>(truth.values().size()) != A.cols())
    throw DomainError("rate_vector: scene response and sensing matrix disagree");
  return A.apply(truth.values());
}

PhotonHistogram sample_histogram_dwell(const Eigen::VectorXd& rates,
                                       std::uint64_t seed) {
  check_rates(rates);
  std::mt19937_64 rng(seed);
  std::vector<int> counts(static_cast<std::size_t>(rates.size()), 0);
  for (Eigen::Index i = 0; i < rates.size(); ++i) {
    if (rates[i] == 0.0) continue;  // libstdc++ requires a positive mean
    std::poisson_distribution<int> draw(rates[i]);
    counts[static_cast<std::size_t>(i)] = draw(rng);
  }
  return PhotonHistogram(std::move(counts));
}

PhotonHistogram sample_histogram_fixed_count(const Eigen::VectorXd& rates,
                                             std::size_t detections,
                                             std::uint64_t seed) {
  check_rates(rates);
  if (detections < 1) throw DomainError("need at least one detection");
  if (!(rates.sum() > 0.0)) throw NoSignalError("all rates are zero");
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> draw(rates.data(),
                                               rates.data() + rates.size());
  std::vector<int> counts(static_cast<std::size_t>(rates.size()), 0);
  for (std::size_t k = 0; k < detections; ++k) ++counts[draw(rng)];
  return PhotonHistogram(std::move(counts));
}

PulseWaveform gaussian_pulse(const AcquisitionConfig& config, double rms_bins,
                             double center_bins, double column_sum) {
  if (!(rms_bins > 0.0)) throw DomainError("pulse RMS width must be positive");
  const std::size_t n = config.num_grid_bins();
  std::vector<double> samples(n, 0.0);
  double raw_sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dt = static_cast<double>(k) + 0.5 - center_bins;
    if (std::abs(dt) > 6.0 * rms_bins) continue;
    samples[k] = std::exp(-0.5 * dt * dt / (rms_bins * rms_bins));
    raw_sum += samples[k];
  }
  if (!(raw_sum > 0.0)) throw DomainError("pulse falls outside the grid");
  const double scale = pulse_scale(config, column_sum, raw_sum);
  for (double& s : samples) s *= scale;
  return PulseWaveform(config.grid_bin_s(), std::move(samples));
}

PulseWaveform triangular_pulse(const AcquisitionConfig& config,
                               std::size_t center_bin,
                               std::size_t half_width_bins,
                               double column_sum) {
  const std::size_t n = config.num_grid_bins();
  if (center_bin >= n) throw DomainError("triangle center outside the grid");
  std::vector<double> samples(n, 0.0);
  double raw_sum = 0.0;
  const auto h = static_cast<double>(half_width_bins + 1);
  for (std::size_t k = 0; k < n; ++k) {
    const double dist =
        std::abs(static_cast<double>(k) - static_cast<double>(center_bin));
    samples[k] = std::max(0.0, 1.0 - dist / h);
    raw_sum += samples[k];
  }
  const double scale = pulse_scale(config, column_sum, raw_sum);
  for (double& s : samples) s *= scale;
  return PulseWaveform(config.grid_bin_s(), std::move(samples));
}

std::uint64_t pixel_seed(std::uint64_t frame_seed, std::size_t pixel_index) {
  return splitmix64(frame_seed ^ splitmix64(static_cast<std::uint64_t>(pixel_index)));
}

SimulatedFrame simulate_frame(const SceneMaps& scene, const SensingMatrix& A,
                              const AcquisitionConfig& config,
                              const SimulationSettings& settings) {
  const std::size_t h = scene.depth_m.height();
  const std::size_t w = scene.depth_m.width();
  if (!scene.amplitude.same_shape(scene.depth_m) ||
      !scene.background.same_shape(scene.depth_m))
    throw DomainError("scene maps differ in shape");
  if (A.rows() != config.num_detector_bins() ||
      A.num_signal_columns() != config.num_grid_bins())
    throw DomainError("sensing matrix does not match the acquisition config");

  SimulatedFrame out;
  out.histograms = Image<PhotonHistogram>(h, w);
  out.truth.depth_m = scene.depth_m;
  out.truth.bin = Image<std::size_t>(h, w, 0);
  out.truth.amplitude = Image<double>(h, w, 0.0);
  out.truth.background = Image<double>(h, w, 0.0);

  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t index = r * w + c;
      try {
        const double amplitude = scene.amplitude.at(r, c);
        const double background = scene.background.at(r, c);
        if (!(amplitude >= 0.0) || !(background >= 0.0))
          throw DomainError("amplitude and background must be non-negative");
        const std::size_t bin = bin_from_depth(scene.depth_m.at(r, c), config);
        const SceneResponse x =
            SceneResponse::single(config.num_grid_bins(), bin, amplitude, background);
        const Eigen::VectorXd rates = rate_vector(x, A);
        const std::uint64_t seed = pixel_seed(settings.seed, index);

        double scale = 1.0;
        if (settings.mode == SamplingMode::dwell) {
          out.histograms[index] = sample_histogram_dwell(rates, seed);
        } else {
          out.histograms[index] =
              sample_histogram_fixed_count(rates, settings.detections, seed);
          scale = static_cast<double>(settings.detections) / rates.sum();
        }
        out.truth.bin[index] = bin;
        out.truth.amplitude[index] = amplitude * scale;
        out.truth.background[index] = background * scale;
      } catch (const NoSignalError& e) {
        throw NoSignalError(pixel_tag(r, c) + e.what());
      } catch (const DomainError& e) {
        throw DomainError(pixel_tag(r, c) + e.what());
      }
    }
  }
  return out;
}

}  // namespace spdepth
