// Command-line front end: make-pulse, simulate, reconstruct, evaluate.

#include "spdepth/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace spdepth::cli;

  CLI::App app{"Single-photon depth, reflectivity and background reconstruction"};
  app.require_subcommand(1);

  MakePulseOptions pulse_opts;
  auto* make_pulse = app.add_subcommand("make-pulse", "Write a Gaussian pulse file");
  make_pulse->add_option("--out", pulse_opts.out, "Output pulse file")->required();
  make_pulse->add_option("--rep-period", pulse_opts.rep_period_s, "Repetition period [s]");
  make_pulse->add_option("--bins", pulse_opts.bins, "Grid bins per period");
  make_pulse->add_option("--rms-bins", pulse_opts.rms_bins, "RMS pulse width [bins]");
  make_pulse->add_option("--center-bins", pulse_opts.center_bins, "Pulse peak position [bins]");
  make_pulse->add_option("--column-sum", pulse_opts.column_sum,
                         "Expected counts per unit amplitude");
  make_pulse->add_option("--pulses", pulse_opts.num_pulses, "Pulses per pixel (N_s)");
  make_pulse->add_option("--efficiency", pulse_opts.efficiency, "Quantum efficiency");

  SimulateOptions sim_opts;
  auto* simulate = app.add_subcommand("simulate", "Sample photon histograms for a scene");
  simulate->add_option("--pulse", sim_opts.pulse, "Pulse file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--scene", sim_opts.scene, "Built-in scene: step or ramp");
  simulate->add_option("--height", sim_opts.height, "Built-in scene height");
  simulate->add_option("--width", sim_opts.width, "Built-in scene width");
  simulate->add_option("--depth-map", sim_opts.depth_map, "Depth CSV [m]");
  simulate->add_option("--amplitude-map", sim_opts.amplitude_map, "Amplitude CSV");
  simulate->add_option("--background-map", sim_opts.background_map, "Background CSV");
  simulate->add_option("--sbr", sim_opts.sbr, "Uniform background at this signal-to-background ratio");
  simulate->add_option("--photons", sim_opts.photons, "Detections per pixel (0 = dwell mode)");
  simulate->add_option("--signal-scale", sim_opts.signal_scale, "Amplitude multiplier");
  simulate->add_option("--seed", sim_opts.seed, "Random seed");
  simulate->add_option("--pulses", sim_opts.num_pulses, "Pulses per pixel (N_s)");
  simulate->add_option("--efficiency", sim_opts.efficiency, "Quantum efficiency");
  simulate->add_option("--out", sim_opts.out, "Output photon file")->required();

  ReconstructOptions rec_opts;
  auto* reconstruct = app.add_subcommand("reconstruct", "Estimate depth per pixel");
  reconstruct->add_option("--photons", rec_opts.photons, "Photon file")->required()->check(CLI::ExistingFile);
  reconstruct->add_option("--pulse", rec_opts.pulse, "Pulse file")->required()->check(CLI::ExistingFile);
  reconstruct->add_option("--method", rec_opts.method, "greedy, baseline or oracle")
      ->check(CLI::IsMember({"greedy", "baseline", "oracle"}));
  reconstruct->add_option("--delta", rec_opts.delta, "Convergence threshold");
  reconstruct->add_option("--max-iters", rec_opts.max_iterations, "Iteration cap");
  reconstruct->add_option("--order-k", rec_opts.order_k, "Reflectors per pixel");
  reconstruct->add_option("--threads", rec_opts.threads, "Worker threads (0 = all cores)");
  reconstruct->add_option("--pulses", rec_opts.num_pulses, "Pulses per pixel (N_s)");
  reconstruct->add_option("--efficiency", rec_opts.efficiency, "Quantum efficiency");
  reconstruct->add_option("--rep-period", rec_opts.rep_period_s, "Expected repetition period [s]");
  reconstruct->add_option("--out-prefix", rec_opts.out_prefix, "Output path prefix")->required();

  EvaluateOptions eval_opts;
  auto* evaluate = app.add_subcommand("evaluate", "Score a depth map against ground truth");
  evaluate->add_option("--estimate", eval_opts.estimate, "Estimated depth CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--truth", eval_opts.truth, "Ground-truth depth CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--flags", eval_opts.flags, "Flags CSV from reconstruct");
  evaluate->add_option("--background", eval_opts.background, "Estimated background CSV");
  evaluate->add_option("--truth-background", eval_opts.truth_background, "True background CSV");
  evaluate->add_option("--error-map", eval_opts.error_map, "Output absolute-error CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  if (*make_pulse) return run_make_pulse(pulse_opts, std::cout, std::cerr);
  if (*simulate) return run_simulate(sim_opts, std::cout, std::cerr);
  if (*reconstruct) return run_reconstruct(rec_opts, std::cout, std::cerr);
  return run_evaluate(eval_opts, std::cout, std::cerr);
}
