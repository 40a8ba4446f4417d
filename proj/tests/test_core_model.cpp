#include "spdepth/core_model.hpp"

#include <doctest.h>

#include <random>

using namespace spdepth;

TEST_CASE("acquisition config derives bin counts and validates ranges") {
  const auto cfg = AcquisitionConfig::uniform(100e-9, 801);
  CHECK(cfg.num_detector_bins() == 801);
  CHECK(cfg.num_grid_bins() == 801);
  CHECK(cfg.equal_grids());
  CHECK(cfg.grid_bin_s() * 801 == doctest::Approx(100e-9).epsilon(1e-12));

  const AcquisitionConfig split(100e-9, 1e-9, 0.5e-9, 10.0, 0.35, 100.0);
  CHECK(split.num_detector_bins() == 100);
  CHECK(split.num_grid_bins() == 200);
  CHECK_FALSE(split.equal_grids());
  // B = N_s * Delta * (eta * b + b_d)
  CHECK(split.background_counts_per_bin(1000.0) ==
        doctest::Approx(10.0 * 1e-9 * (0.35 * 1000.0 + 100.0)));

  CHECK_THROWS_AS(AcquisitionConfig(100e-9, 0.3e-9, 1e-9), DomainError);
  CHECK_THROWS_AS(AcquisitionConfig(100e-9, 1e-9, 1e-9, 0.5), DomainError);
  CHECK_THROWS_AS(AcquisitionConfig(100e-9, 1e-9, 1e-9, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(AcquisitionConfig(100e-9, 1e-9, 1e-9, 1.0, 1.5), DomainError);
  CHECK_THROWS_AS(AcquisitionConfig(100e-9, 1e-9, 1e-9, 1.0, 0.5, -1.0), DomainError);
}

TEST_CASE("depth_from_bin uses the bin-center convention") {
  const AcquisitionConfig two_ns(200e-9, 2e-9, 2e-9);
  // c * eps * (1 - 1/2) / 2
  CHECK(depth_from_bin(1, two_ns) == doctest::Approx(2.998e8 * 2e-9 * 0.5 / 2.0));
  CHECK(depth_from_bin(1, two_ns) == doctest::Approx(0.1499));

  const auto fine = AcquisitionConfig::uniform(100e-9, 801);
  const double eps = 100e-9 / 801.0;
  CHECK(depth_from_bin(401, fine) == doctest::Approx(2.998e8 * eps * 400.5 / 2.0));
  CHECK(depth_from_bin(401, fine) == doctest::Approx(7.4953).epsilon(1e-4));
  // One grid bin of depth on the 801-bin grid is ~1.87 cm.
  CHECK(fine.depth_bin_width_m() == doctest::Approx(0.018714).epsilon(1e-4));

  CHECK_THROWS_AS(depth_from_bin(0, fine), DomainError);
  CHECK_THROWS_AS(depth_from_bin(802, fine), DomainError);
}

TEST_CASE("bin_from_depth inverts depth_from_bin") {
  const auto cfg = AcquisitionConfig::uniform(100e-9, 801);
  CHECK(bin_from_depth(0.0, cfg) == 1);
  for (std::size_t k = 1; k <= cfg.num_grid_bins(); ++k)
    REQUIRE(bin_from_depth(depth_from_bin(k, cfg), cfg) == k);
  CHECK(bin_from_depth(std::nextafter(cfg.max_depth_m(), 0.0), cfg) == 801);
  // Interval edges belong to the upper bin.
  CHECK(bin_from_depth(cfg.depth_bin_width_m() * 3.0, cfg) == 4);

  CHECK_THROWS_AS(bin_from_depth(-1e-9, cfg), DomainError);
  CHECK_THROWS_AS(bin_from_depth(cfg.max_depth_m(), cfg), DomainError);
  CHECK_THROWS_AS(bin_from_depth(std::nan(""), cfg), DomainError);
}

TEST_CASE("pulse waveform validation and RMS width") {
  CHECK_THROWS_AS(PulseWaveform(1e-9, {}), DomainError);
  CHECK_THROWS_AS(PulseWaveform(1e-9, {0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(PulseWaveform(1e-9, {1.0, -0.1}), DomainError);
  CHECK_THROWS_AS(PulseWaveform(0.0, {1.0}), DomainError);

  const PulseWaveform single(1e-9, {0.0, 5.0, 0.0});
  CHECK(single.rms_width_s() == doctest::Approx(0.0));
  CHECK(single.total_mass() == doctest::Approx(5e-9));
  // Two equal samples one bin apart: RMS half a bin.
  const PulseWaveform pair(1e-9, {1.0, 1.0});
  CHECK(pair.rms_width_s() == doctest::Approx(0.5e-9));
}

TEST_CASE("scene response enforces the union-of-subspaces constraint") {
  Eigen::VectorXd ok(5);
  ok << 0.0, 2.0, 0.0, 0.0, 0.3;
  const SceneResponse x(ok);
  CHECK(x.support() == std::vector<std::size_t>{1});
  CHECK(x.background() == doctest::Approx(0.3));
  CHECK(x.num_grid_bins() == 4);

  Eigen::VectorXd two(5);
  two << 1.0, 2.0, 0.0, 0.0, 0.3;
  CHECK_THROWS_AS(SceneResponse(two, 1), DomainError);
  CHECK_NOTHROW(SceneResponse(two, 2));

  Eigen::VectorXd negative(5);
  negative << 0.0, 2.0, 0.0, 0.0, -0.1;
  CHECK_THROWS_AS(SceneResponse{negative}, DomainError);

  // Background-only and all-zero vectors are members.
  CHECK(SceneResponse::zero(4).support().empty());
  CHECK_NOTHROW(SceneResponse::single(4, 3, 0.0, 1.0));
  CHECK_THROWS_AS(SceneResponse::single(4, 5, 1.0, 0.0), DomainError);
}

TEST_CASE("scene response rejects random over-sparse vectors") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> count(0, 4);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(9);
    const int nonzeros = count(rng);
    for (int j = 0; j < nonzeros; ++j) v[j * 2] = 1.0 + j;
    const std::size_t k = 1 + static_cast<std::size_t>(trial % 3);
    if (static_cast<std::size_t>(nonzeros) > k)
      CHECK_THROWS_AS(SceneResponse(v, k), DomainError);
    else
      CHECK_NOTHROW(SceneResponse(v, k));
  }
}

TEST_CASE("photon histogram") {
  CHECK_THROWS_AS(PhotonHistogram({1, -1}), DomainError);
  const PhotonHistogram h({0, 3, 0, 2});
  CHECK(h.total() == 5);
  CHECK_FALSE(h.is_zero());
  CHECK(PhotonHistogram::zeros(4).is_zero());
  CHECK(h.as_vector()[1] == 3.0);
}

TEST_CASE("sensing matrix validation") {
  Eigen::MatrixXd bad_bg(2, 3);
  bad_bg << 1, 0, 1, 0, 1, 0.5;
  CHECK_THROWS_AS(SensingMatrix{bad_bg}, DomainError);

  Eigen::MatrixXd unequal(2, 3);
  unequal << 1, 0, 1, 0, 2, 1;
  CHECK_THROWS_AS(SensingMatrix{unequal}, DomainError);

  Eigen::MatrixXd negative(2, 3);
  negative << 1, 2, 1, 0, -1, 1;
  CHECK_THROWS_AS(SensingMatrix{negative}, DomainError);

  Eigen::MatrixXd not_shifted(3, 4);
  not_shifted << 1, 0, 1, 1,
                 0, 1, 0, 1,
                 0, 0, 0, 1;
  CHECK_NOTHROW(SensingMatrix(not_shifted, false));
  CHECK_THROWS_AS(SensingMatrix(not_shifted, true), DomainError);
}
