#include "spdepth/frame_pipeline.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace spdepth {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// NaN-aware equality so sentinel pixels compare equal.
bool same_values(const Image<double>& a, const Image<double>& b) {
  if (!a.same_shape(b)) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::isnan(a[i]) && std::isnan(b[i])) continue;
    if (a[i] != b[i]) return false;
  }
  return true;
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::greedy: return "greedy";
    case Method::baseline: return "baseline";
    case Method::oracle: return "oracle";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "greedy") return Method::greedy;
  if (name == "baseline") return Method::baseline;
  if (name == "oracle") return Method::oracle;
  throw DomainError("unknown method '" + name + "'");
}

int PixelFlags::code() const {
  return (converged ? 1 : 0) | (no_signal ? 2 : 0) | (failed ? 4 : 0);
}

PixelFlags PixelFlags::from_code(int code) {
  if (code < 0 || code > 7) throw DomainError("invalid pixel flag code");
  return {(code & 1) != 0, (code & 2) != 0, (code & 4) != 0};
}

bool FrameResult::operator==(const FrameResult& other) const {
  return same_values(depth_map, other.depth_map) &&
         same_values(amplitude_map, other.amplitude_map) &&
         same_values(background_map, other.background_map) &&
         flags_map == other.flags_map && iterations_map == other.iterations_map &&
         mean_iterations == other.mean_iterations;
}

PixelEstimate reconstruct_pixel(const PhotonHistogram& y, const SensingMatrix& A,
                                const AcquisitionConfig& config,
                                const SolverSettings& settings, Method method) {
  switch (method) {
    case Method::greedy: {
      const SolveResult solved = greedy_solve(y, A, settings);
      return decode_estimate(solved.x, config, solved.trace);
    }
    case Method::baseline:
      return log_matched_filter(y, A, config);
    case Method::oracle: {
      const SceneResponse x =
          exhaustive_ml_oracle(y, A, settings.order_k, settings.nll_floor);
      SolverTrace trace;
      trace.converged = true;
      trace.no_signal = y.is_zero();
      return decode_estimate(x, config, trace);
    }
  }
  throw DomainError("unknown method");
}

FrameResult reconstruct_frame(const Image<PhotonHistogram>& histograms,
                              const SensingMatrix& A,
                              const AcquisitionConfig& config,
                              const SolverSettings& settings, Method method,
                              std::size_t workers) {
  settings.validate();
  const std::size_t h = histograms.height();
  const std::size_t w = histograms.width();
  for (std::size_t i = 0; i < histograms.size(); ++i)
    if (histograms[i].size() != A.rows())
      throw DomainError("pixel " + std::to_string(i) + " histogram length " +
                        std::to_string(histograms[i].size()) + " != M = " +
                        std::to_string(A.rows()));
  if (method == Method::oracle)  // surface the size guard before spawning work
    (void)exhaustive_ml_oracle(PhotonHistogram::zeros(A.rows()), A,
                               settings.order_k, settings.nll_floor);

  FrameResult out;
  out.depth_map = Image<double>(h, w, kNaN);
  out.amplitude_map = Image<double>(h, w, 0.0);
  out.background_map = Image<double>(h, w, 0.0);
  out.flags_map = Image<PixelFlags>(h, w);
  out.iterations_map = Image<std::size_t>(h, w, 0);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < histograms.size(); i = next++) {
      try {
        const PixelEstimate est =
            reconstruct_pixel(histograms[i], A, config, settings, method);
        out.depth_map[i] = est.no_signal ? kNaN : est.depth_m;
        out.amplitude_map[i] = est.amplitude;
        out.background_map[i] = est.background_B;
        out.flags_map[i] = {est.converged, est.no_signal, false};
        out.iterations_map[i] = est.iterations;
      } catch (const NumericalFailure&) {
        out.flags_map[i].failed = true;
      }
    }
  };

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(histograms.size(), 1));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
  }

  double iterations = 0.0;
  for (std::size_t i = 0; i < out.iterations_map.size(); ++i)
    iterations += static_cast<double>(out.iterations_map[i]);
  out.mean_iterations =
      histograms.empty() ? 0.0 : iterations / static_cast<double>(histograms.size());
  return out;
}

DepthErrorReport mean_absolute_depth_error(const Image<double>& estimate,
                                           const Image<double>& truth,
                                           const Image<PixelFlags>* flags) {
  if (!estimate.same_shape(truth))
    throw DomainError("estimate and truth depth maps differ in shape");
  if (flags && !flags->same_shape(truth))
    throw DomainError("flags map differs in shape from the depth maps");

  DepthErrorReport report;
  report.error_map = Image<double>(truth.height(), truth.width(), kNaN);
  double sum = 0.0, sum_converged = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool sentinel = flags && (*flags)[i].sentinel();
    if (sentinel || std::isnan(estimate[i]) || std::isnan(truth[i])) {
      ++report.excluded_pixels;
      continue;
    }
    const double err = std::abs(estimate[i] - truth[i]);
    report.error_map[i] = err;
    sum += err;
    ++report.valid_pixels;
    if (flags && (*flags)[i].converged) {
      sum_converged += err;
      ++report.converged_pixels;
    }
  }
  if (report.valid_pixels == 0) throw DomainError("no valid pixels to score");
  report.mae_m = sum / static_cast<double>(report.valid_pixels);
  report.mae_converged_m =
      report.converged_pixels > 0
          ? sum_converged / static_cast<double>(report.converged_pixels)
          : kNaN;
  return report;
}

DepthErrorReport mean_absolute_depth_error(const FrameResult& estimate,
                                           const Image<double>& truth) {
  return mean_absolute_depth_error(estimate.depth_map, truth, &estimate.flags_map);
}

double aggregate_background(const FrameResult& result) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < result.background_map.size(); ++i) {
    if (result.flags_map[i].failed) continue;
    sum += result.background_map[i];
    ++count;
  }
  if (count == 0) throw DomainError("no valid pixels for the background aggregate");
  return sum / static_cast<double>(count);
}

}  // namespace spdepth
