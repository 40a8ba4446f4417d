#include "spdepth/cli.hpp"

#include "spdepth/forward_sim.hpp"
#include "spdepth/frame_pipeline.hpp"
#include "spdepth/io.hpp"
#include "spdepth/scenes.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

namespace spdepth::cli {

namespace {

template <class Fn>
int guarded(std::ostream& err, Fn fn) {
  try {
    return fn();
  } catch (const NumericalFailure& e) {
    err << "error: numerical failure: " << e.what() << '\n';
    return kExitNumericalFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

std::filesystem::path with_suffix(const std::filesystem::path& base, const char* suffix) {
  std::filesystem::path out = base;
  out += suffix;
  return out;
}

Image<double> load_or(const std::optional<std::filesystem::path>& path,
                      std::size_t height, std::size_t width, double fill) {
  if (path) {
    Image<double> image = io::load_csv(*path);
    if (image.height() != height || image.width() != width)
      throw DomainError(path->string() + ": map is " + std::to_string(image.height()) +
                        "x" + std::to_string(image.width()) + ", expected " +
                        std::to_string(height) + "x" + std::to_string(width));
    return image;
  }
  return Image<double>(height, width, fill);
}

}  // namespace

int run_make_pulse(const MakePulseOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto config = AcquisitionConfig::uniform(opts.rep_period_s, opts.bins,
                                                   opts.num_pulses, opts.efficiency);
    const PulseWaveform pulse =
        gaussian_pulse(config, opts.rms_bins, opts.center_bins, opts.column_sum);
    io::save_pulse(opts.out, pulse);
    out << "wrote " << opts.out.string() << " (n=" << pulse.size()
        << ", rms_width_s=" << io::format_decimal(pulse.rms_width_s()) << ")\n";
    return kExitOk;
  });
}

int run_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const PulseWaveform pulse = io::load_pulse(opts.pulse);
    const double period = pulse.sample_period_s() * static_cast<double>(pulse.size());
    const auto config =
        AcquisitionConfig::uniform(period, pulse.size(), opts.num_pulses, opts.efficiency);
    const SensingMatrix A = build_sensing_matrix(pulse, config);

    SceneMaps scene;
    if (opts.depth_map) {
      scene.depth_m = io::load_csv(*opts.depth_map);
      const std::size_t h = scene.depth_m.height(), w = scene.depth_m.width();
      scene.amplitude = load_or(opts.amplitude_map, h, w, 1.0);
      scene.background = load_or(opts.background_map, h, w, 0.0);
    } else {
      scene = builtin_scene(opts.scene, opts.height, opts.width);
    }
    for (double& a : scene.amplitude.data()) a *= opts.signal_scale;
    if (opts.sbr) set_background_for_sbr(scene, A, *opts.sbr);

    SimulationSettings settings;
    settings.mode = opts.photons > 0 ? SamplingMode::fixed_count : SamplingMode::dwell;
    settings.detections = opts.photons;
    settings.seed = opts.seed;
    const SimulatedFrame frame = simulate_frame(scene, A, config, settings);

    io::save_photons(opts.out, frame.histograms, config.num_detector_bins());
    io::save_csv(with_suffix(opts.out, ".truth-depth.csv"), frame.truth.depth_m);
    io::save_csv(with_suffix(opts.out, ".truth-amplitude.csv"), frame.truth.amplitude);
    io::save_csv(with_suffix(opts.out, ".truth-background.csv"), frame.truth.background);
    out << "wrote " << opts.out.string() << " (" << frame.histograms.height() << "x"
        << frame.histograms.width() << ", m=" << config.num_detector_bins() << ")\n";
    return kExitOk;
  });
}

int run_reconstruct(const ReconstructOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Image<PhotonHistogram> histograms = io::load_photons(opts.photons);
    const PulseWaveform pulse = io::load_pulse(opts.pulse);
    const double period = pulse.sample_period_s() * static_cast<double>(pulse.size());
    if (opts.rep_period_s && std::abs(*opts.rep_period_s - period) > 1e-9 * period)
      throw DomainError("dimension mismatch: --rep-period " +
                        io::format_decimal(*opts.rep_period_s) + " s but the pulse file spans " +
                        io::format_decimal(period) + " s");
    const std::size_t m = histograms[0].size();
    const AcquisitionConfig config(period, period / static_cast<double>(m),
                                   pulse.sample_period_s(), opts.num_pulses,
                                   opts.efficiency);
    const SensingMatrix A = build_sensing_matrix(pulse, config);

    SolverSettings settings;
    settings.convergence_delta = opts.delta;
    settings.max_iterations = opts.max_iterations;
    settings.order_k = opts.order_k;
    const Method method = parse_method(opts.method);
    const FrameResult result =
        reconstruct_frame(histograms, A, config, settings, method, opts.threads);

    const std::string& p = opts.out_prefix;
    io::save_csv(p + ".depth.csv", result.depth_map);
    const io::PgmScaling scaling = io::save_pgm(p + ".depth.pgm", result.depth_map);
    io::save_csv(p + ".amplitude.csv", result.amplitude_map);
    io::save_csv(p + ".background.csv", result.background_map);
    io::save_flags_csv(p + ".flags.csv", result.flags_map);

    std::size_t converged = 0, no_signal = 0, failed = 0;
    for (const PixelFlags& f : result.flags_map.data()) {
      converged += f.converged;
      no_signal += f.no_signal;
      failed += f.failed;
    }
    std::ofstream summary(p + ".summary.txt", std::ios::binary);
    if (!summary) throw io::FormatError(p + ".summary.txt: cannot open for writing");
    summary << "method=" << to_string(method) << '\n'
            << "height=" << histograms.height() << '\n'
            << "width=" << histograms.width() << '\n'
            << "m=" << m << '\n'
            << "n=" << pulse.size() << '\n'
            << "delta=" << io::format_decimal(settings.convergence_delta) << '\n'
            << "max_iterations=" << settings.max_iterations << '\n'
            << "order_k=" << settings.order_k << '\n'
            << "mean_iterations=" << io::format_decimal(result.mean_iterations) << '\n'
            << "background_aggregate=" << io::format_decimal(aggregate_background(result)) << '\n'
            << "converged_pixels=" << converged << '\n'
            << "no_signal_pixels=" << no_signal << '\n'
            << "failed_pixels=" << failed << '\n'
            << "pgm_min_depth_m=" << io::format_decimal(scaling.min_depth_m) << '\n'
            << "pgm_max_depth_m=" << io::format_decimal(scaling.max_depth_m) << '\n';

    out << "reconstructed " << histograms.size() << " pixels with " << to_string(method)
        << ": mean_iterations=" << io::format_decimal(result.mean_iterations)
        << " failed=" << failed << '\n';
    return failed > 0 ? kExitNumericalFailure : kExitOk;
  });
}

int run_evaluate(const EvaluateOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Image<double> estimate = io::load_csv(opts.estimate);
    const Image<double> truth = io::load_csv(opts.truth);
    if (!estimate.same_shape(truth))
      throw DomainError("shape mismatch: estimate is " + std::to_string(estimate.height()) +
                        "x" + std::to_string(estimate.width()) + ", truth is " +
                        std::to_string(truth.height()) + "x" + std::to_string(truth.width()));
    std::optional<Image<PixelFlags>> flags;
    if (opts.flags) flags = io::load_flags_csv(*opts.flags);

    const DepthErrorReport report =
        mean_absolute_depth_error(estimate, truth, flags ? &*flags : nullptr);
    out << "mae_m=" << io::format_decimal(report.mae_m) << '\n'
        << "mae_cm=" << io::format_decimal(report.mae_m * 100.0) << '\n'
        << "valid_pixels=" << report.valid_pixels << '\n'
        << "excluded_pixels=" << report.excluded_pixels << '\n';
    if (flags)
      out << "mae_converged_m=" << io::format_decimal(report.mae_converged_m) << '\n'
          << "converged_pixels=" << report.converged_pixels << '\n';
    if (opts.error_map) io::save_csv(*opts.error_map, report.error_map);

    if (opts.background && opts.truth_background) {
      const Image<double> bg = io::load_csv(*opts.background);
      const Image<double> bg_truth = io::load_csv(*opts.truth_background);
      if (!bg.same_shape(truth) || !bg_truth.same_shape(truth))
        throw DomainError("shape mismatch between background maps and depth maps");
      FrameResult partial;
      partial.background_map = bg;
      partial.flags_map = flags ? *flags : Image<PixelFlags>(bg.height(), bg.width());
      const double estimated = aggregate_background(partial);
      double true_mean = 0.0;
      for (double b : bg_truth.data()) true_mean += b;
      true_mean /= static_cast<double>(bg_truth.size());
      out << "background_estimate=" << io::format_decimal(estimated) << '\n'
          << "background_truth=" << io::format_decimal(true_mean) << '\n'
          << "background_relative_error="
          << io::format_decimal((estimated - true_mean) / true_mean) << '\n';
    } else if (opts.background || opts.truth_background) {
      throw DomainError("--background and --truth-background must be given together");
    }
    return kExitOk;
  });
}

}  // namespace spdepth::cli
