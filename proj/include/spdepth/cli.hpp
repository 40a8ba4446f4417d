#pragma once

// Subcommands of the spdepth tool. Each returns the process exit code:
// 0 success, 2 input error, 3 numerical failure.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace spdepth::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitNumericalFailure = 3;

struct MakePulseOptions {
  std::filesystem::path out;
  double rep_period_s = 100e-9;
  std::size_t bins = 801;
  double rms_bins = 2.0;
  double center_bins = 12.0;
  /// Target sum of every sensing-matrix signal column.
  double column_sum = 1.0;
  double num_pulses = 1.0;
  double efficiency = 1.0;
};

struct SimulateOptions {
  std::filesystem::path pulse;
  /// Built-in scene name; ignored when depth_map is set.
  std::string scene = "step";
  std::size_t height = 100;
  std::size_t width = 100;
  std::optional<std::filesystem::path> depth_map;
  std::optional<std::filesystem::path> amplitude_map;
  std::optional<std::filesystem::path> background_map;
  /// Overrides the background with a uniform level at this SBR.
  std::optional<double> sbr;
  /// Fixed detections per pixel; 0 selects dwell-mode Poisson sampling.
  std::size_t photons = 0;
  /// Multiplies the amplitude map (dwell-mode signal level).
  double signal_scale = 1.0;
  std::uint64_t seed = 0;
  double num_pulses = 1.0;
  double efficiency = 1.0;
  /// Photon file; truth maps go to "<out>.truth-depth.csv",
  /// "<out>.truth-amplitude.csv" and "<out>.truth-background.csv".
  std::filesystem::path out;
};

struct ReconstructOptions {
  std::filesystem::path photons;
  std::filesystem::path pulse;
  std::string method = "greedy";
  double delta = 1e-4;
  std::size_t max_iterations = 50;
  std::size_t order_k = 1;
  std::size_t threads = 0;
  double num_pulses = 1.0;
  double efficiency = 1.0;
  /// When set, must agree with the pulse file's n * eps.
  std::optional<double> rep_period_s;
  /// Writes <prefix>.depth.csv, .depth.pgm (+ .meta), .amplitude.csv,
  /// .background.csv, .flags.csv and .summary.txt.
  std::string out_prefix;
};

struct EvaluateOptions {
  std::filesystem::path estimate;
  std::filesystem::path truth;
  std::optional<std::filesystem::path> flags;
  std::optional<std::filesystem::path> background;
  std::optional<std::filesystem::path> truth_background;
  std::optional<std::filesystem::path> error_map;
};

int run_make_pulse(const MakePulseOptions& opts, std::ostream& out, std::ostream& err);
int run_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err);
int run_reconstruct(const ReconstructOptions& opts, std::ostream& out, std::ostream& err);
int run_evaluate(const EvaluateOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace spdepth::cli
