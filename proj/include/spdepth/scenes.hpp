#pragma once

// Built-in synthetic scenes for simulation runs and tests.

#include "spdepth/core_model.hpp"
#include "spdepth/forward_sim.hpp"

#include <string>

namespace spdepth {

/// Two flat planes at 2 m (left half) and 3 m (right half), unit amplitude,
/// zero background.
SceneMaps step_scene(std::size_t height, std::size_t width);

/// Piecewise-smooth depth ramp (3.8-4.2 m across columns with a gentle row
/// ripple) carrying 5-pixel-wide bars 15 cm in front of it, and a smoothly
/// varying amplitude with mean near 1. Background is zero.
SceneMaps ramp_scene(std::size_t height, std::size_t width);

/// Builds a named built-in scene ("step" or "ramp").
SceneMaps builtin_scene(const std::string& name, std::size_t height,
                        std::size_t width);

/// Sets a uniform background B so that total background counts per pixel
/// equal the mean total signal counts divided by `sbr`.
void set_background_for_sbr(SceneMaps& scene, const SensingMatrix& A, double sbr);

}  // namespace spdepth
