#pragma once

// Poisson forward model: sensing-matrix construction, expected-count
// vectors and seeded photon samplers for single pixels and whole frames.

#include "spdepth/core_model.hpp"
#include "spdepth/image.hpp"

#include <cstdint>

namespace spdepth {

/// S_{i,j} = N_s * eta * epsilon * integral of s(t - (j-1)*epsilon) over
/// detector bin i, wrapped modulo T_r; A = [S, 1].
///
/// With equal grids column j is the bin-integrated pulse circularly shifted
/// by j-1 bins and the result is flagged circulant.
SensingMatrix build_sensing_matrix(const PulseWaveform& pulse,
                                   const AcquisitionConfig& config);

/// Expected counts per detector bin, A * x.
Eigen::VectorXd rate_vector(const SceneResponse& truth, const SensingMatrix& A);

/// Independent Poisson draw per bin.
PhotonHistogram sample_histogram_dwell(const Eigen::VectorXd& rates,
                                       std::uint64_t seed);

/// Exactly `detections` bin indices drawn i.i.d. with probabilities
/// proportional to `rates`, i.e. the Poisson law conditioned on the total.
PhotonHistogram sample_histogram_fixed_count(const Eigen::VectorXd& rates,
                                             std::size_t detections,
                                             std::uint64_t seed);

/// Gaussian pulse with the given RMS width and peak position, both in grid
/// bins, truncated to exact zeros beyond 6 RMS widths and scaled so every
/// signal column of the resulting sensing matrix sums to `column_sum`.
PulseWaveform gaussian_pulse(const AcquisitionConfig& config, double rms_bins,
                             double center_bins, double column_sum = 1.0);

/// Symmetric triangle of half-width `half_width_bins` peaking at
/// `center_bin` (0-based), scaled like gaussian_pulse.
PulseWaveform triangular_pulse(const AcquisitionConfig& config,
                               std::size_t center_bin,
                               std::size_t half_width_bins,
                               double column_sum = 1.0);

enum class SamplingMode { dwell, fixed_count };

struct SimulationSettings {
  SamplingMode mode = SamplingMode::dwell;
  /// Detections per pixel in fixed-count mode.
  std::size_t detections = 15;
  std::uint64_t seed = 0;
};

/// Ground-truth scene maps. Amplitudes are reflector coordinates of x (so a
/// pixel's expected signal counts are amplitude * column sum) and
/// backgrounds are B, expected counts per detector bin.
struct SceneMaps {
  Image<double> depth_m;
  Image<double> amplitude;
  Image<double> background;
};

struct GroundTruth {
  Image<double> depth_m;
  /// Grid bin (1-based) holding each depth.
  Image<std::size_t> bin;
  /// Amplitude and background as seen by the sampler. In fixed-count mode
  /// these are rescaled so the expected total equals the detection count.
  Image<double> amplitude;
  Image<double> background;
};

struct SimulatedFrame {
  Image<PhotonHistogram> histograms;
  GroundTruth truth;
};

/// Seed of pixel `pixel_index` (row-major) derived from the frame seed.
std::uint64_t pixel_seed(std::uint64_t frame_seed, std::size_t pixel_index);

/// Samples every pixel of a scene. Results depend only on the frame seed
/// and each pixel's row-major index.
SimulatedFrame simulate_frame(const SceneMaps& scene, const SensingMatrix& A,
                              const AcquisitionConfig& config,
                              const SimulationSettings& settings);

}  // namespace spdepth
