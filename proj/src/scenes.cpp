#include "spdepth/scenes.hpp"

#include <cmath>

namespace spdepth {

SceneMaps step_scene(std::size_t height, std::size_t width) {
  SceneMaps scene{Image<double>(height, width, 2.0), Image<double>(height, width, 1.0),
                  Image<double>(height, width, 0.0)};
  for (std::size_t r = 0; r < height; ++r)
    for (std::size_t c = width / 2; c < width; ++c) scene.depth_m.at(r, c) = 3.0;
  return scene;
}

SceneMaps ramp_scene(std::size_t height, std::size_t width) {
  SceneMaps scene{Image<double>(height, width), Image<double>(height, width),
                  Image<double>(height, width, 0.0)};
  const double span = width > 1 ? static_cast<double>(width - 1) : 1.0;
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const auto rf = static_cast<double>(r);
      const auto cf = static_cast<double>(c);
      double depth = 3.8 + 0.4 * cf / span + 0.1 * std::sin(rf / 15.0);
      // Bars occupy columns 20-24 of every 30 over the middle rows.
      const bool bar = (c % 30) >= 20 && (c % 30) < 25 && r >= height / 5 &&
                       r < height - height / 5;
      if (bar) depth -= 0.15;
      scene.depth_m.at(r, c) = depth;
      scene.amplitude.at(r, c) = 0.6 + 0.8 * (0.5 + 0.5 * std::cos(rf / 20.0 + cf / 25.0));
    }
  }
  return scene;
}

SceneMaps builtin_scene(const std::string& name, std::size_t height,
                        std::size_t width) {
  if (height == 0 || width == 0) throw DomainError("scene must have pixels");
  if (name == "step") return step_scene(height, width);
  if (name == "ramp") return ramp_scene(height, width);
  throw DomainError("unknown built-in scene '" + name + "'");
}

void set_background_for_sbr(SceneMaps& scene, const SensingMatrix& A, double sbr) {
  if (!(sbr > 0.0)) throw DomainError("SBR must be positive");
  double mean_signal = 0.0;
  for (double a : scene.amplitude.data()) mean_signal += a * A.signal_column_sum();
  mean_signal /= static_cast<double>(scene.amplitude.size());
  const double background = mean_signal / (sbr * static_cast<double>(A.rows()));
  for (double& b : scene.background.data()) b = background;
}

}  // namespace spdepth
