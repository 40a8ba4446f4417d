#pragma once

#include "spdepth/core_model.hpp"
#include "spdepth/image.hpp"
#include "spdepth/pursuit.hpp"

#include <optional>
#include <string>

namespace spdepth {

enum class Method { greedy, baseline, oracle };

std::string to_string(Method method);
/// Parses "greedy", "baseline" or "oracle".
Method parse_method(const std::string& name);

struct PixelFlags {
  bool converged = false;
  bool no_signal = false;
  /// Numerical failure inside the pixel solver.
  bool failed = false;

  /// Bit 0 converged, bit 1 no_signal, bit 2 failed.
  int code() const;
  static PixelFlags from_code(int code);
  /// No depth is available for this pixel.
  bool sentinel() const { return no_signal || failed; }
  bool operator==(const PixelFlags&) const = default;
};

/// Per-pixel maps of a reconstructed frame. Sentinel pixels carry NaN depth.
struct FrameResult {
  Image<double> depth_map;
  Image<double> amplitude_map;
  Image<double> background_map;
  Image<PixelFlags> flags_map;
  Image<std::size_t> iterations_map;
  double mean_iterations = 0.0;

  bool operator==(const FrameResult& other) const;
};

/// One pixel through the chosen estimator.
PixelEstimate reconstruct_pixel(const PhotonHistogram& y, const SensingMatrix& A,
                                const AcquisitionConfig& config,
                                const SolverSettings& settings, Method method);

/// Applies the estimator independently to every pixel on `workers` threads
/// (0 = hardware concurrency). Numerical failures are flagged per pixel.
FrameResult reconstruct_frame(const Image<PhotonHistogram>& histograms,
                              const SensingMatrix& A,
                              const AcquisitionConfig& config,
                              const SolverSettings& settings, Method method,
                              std::size_t workers = 0);

struct DepthErrorReport {
  /// Mean |estimate - truth| over pixels with a depth on both sides.
  double mae_m = 0.0;
  /// Absolute error per pixel, NaN where excluded.
  Image<double> error_map;
  std::size_t valid_pixels = 0;
  std::size_t excluded_pixels = 0;
  /// Same mean restricted to pixels whose solver also converged; NaN when
  /// no flags were supplied or no such pixel exists.
  double mae_converged_m = 0.0;
  std::size_t converged_pixels = 0;
};

/// Throws DomainError on shape mismatch or when no pixel is valid.
DepthErrorReport mean_absolute_depth_error(const Image<double>& estimate,
                                           const Image<double>& truth,
                                           const Image<PixelFlags>* flags = nullptr);
DepthErrorReport mean_absolute_depth_error(const FrameResult& estimate,
                                           const Image<double>& truth);

/// Mean estimated background over pixels that did not fail.
double aggregate_background(const FrameResult& result);

}  // namespace spdepth
