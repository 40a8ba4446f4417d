#include "spdepth/io.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

using namespace spdepth;

namespace {

std::uint64_t bits(double v) {
  std::uint64_t out;
  std::memcpy(&out, &v, sizeof out);
  return out;
}

double random_decimal(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-300, 300);
  return std::ldexp(mant(rng), expo(rng) / 3);
}

bool same_bits(const Image<double>& a, const Image<double>& b) {
  if (!a.same_shape(b)) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::isnan(a[i]) != std::isnan(b[i])) return false;
    if (!std::isnan(a[i]) && bits(a[i]) != bits(b[i])) return false;
  }
  return true;
}

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const io::FormatError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("decimal formatting") {
  CHECK(io::format_decimal(std::nan("")) == "nan");
  CHECK(io::format_decimal(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(io::format_decimal(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(io::format_decimal(0.5) == "0.5");
}

TEST_CASE("pulse files round trip bit-exactly") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1e9);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> samples(1 + rng() % 40);
    for (double& s : samples) s = u(rng);
    samples[0] = 1.0 + u(rng);
    const PulseWaveform p(std::ldexp(1.0 + u(rng) * 1e-9, -30), samples);
    std::stringstream ss;
    io::write_pulse(ss, p);
    const PulseWaveform q = io::read_pulse(ss, "mem");
    REQUIRE(bits(q.sample_period_s()) == bits(p.sample_period_s()));
    REQUIRE(q.samples().size() == p.samples().size());
    for (std::size_t k = 0; k < samples.size(); ++k)
      REQUIRE(bits(q.samples()[k]) == bits(p.samples()[k]));
  }
}

TEST_CASE("pulse parsing errors name the source and line") {
  std::istringstream v2("PULSE 2\neps_seconds=1e-9\nn=1\n1\n");
  CHECK(error_of([&] { io::read_pulse(v2, "p.txt"); }) ==
        "p.txt:1: unsupported PULSE version '2'");

  std::istringstream short_file("PULSE 1\neps_seconds=1e-9\nn=3\n1\n2\n");
  CHECK(error_of([&] { io::read_pulse(short_file, "p.txt"); }).rfind("p.txt:", 0) == 0);

  std::istringstream negative("PULSE 1\neps_seconds=1e-9\nn=2\n1\n-2\n");
  CHECK(error_of([&] { io::read_pulse(negative, "p.txt"); }).rfind("p.txt:5:", 0) == 0);

  std::istringstream trailing("PULSE 1\neps_seconds=1e-9\nn=1\n1\n7\n");
  CHECK(error_of([&] { io::read_pulse(trailing, "p.txt"); }).find("trailing") != std::string::npos);

  std::istringstream junk("PULSE 1\neps_seconds=abc\nn=1\n1\n");
  CHECK(error_of([&] { io::read_pulse(junk, "p.txt"); }).rfind("p.txt:2:", 0) == 0);
}

TEST_CASE("photon files round trip") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t h = 1 + rng() % 5, w = 1 + rng() % 5, m = 1 + rng() % 30;
    Image<PhotonHistogram> img(h, w, PhotonHistogram::zeros(m));
    for (std::size_t i = 0; i < img.size(); ++i) {
      std::vector<int> counts(m);
      for (int& c : counts) c = (rng() % 4 == 0) ? static_cast<int>(rng() % 50) : 0;
      img[i] = PhotonHistogram(counts);
    }
    std::stringstream ss;
    io::write_photons(ss, img, m);
    REQUIRE(io::read_photons(ss, "mem") == img);
  }
}

TEST_CASE("photon file layout and validation") {
  Image<PhotonHistogram> img(1, 2, PhotonHistogram::zeros(4));
  img[1] = PhotonHistogram({0, 3, 0, 1});
  std::stringstream ss;
  io::write_photons(ss, img, 4);
  CHECK(ss.str() == "PHD 1\nwidth=2 height=1 m=4\npx 0 0 :\npx 0 1 : 2:3 4:1\n");

  std::istringstream order("PHD 1\nwidth=2 height=1 m=4\npx 0 1 :\npx 0 0 :\n");
  CHECK(error_of([&] { io::read_photons(order, "h.phd"); }).rfind("h.phd:3:", 0) == 0);
  std::istringstream range("PHD 1\nwidth=1 height=1 m=4\npx 0 0 : 5:1\n");
  CHECK(error_of([&] { io::read_photons(range, "h.phd"); }).find("outside") != std::string::npos);
  std::istringstream repeated("PHD 1\nwidth=1 height=1 m=4\npx 0 0 : 2:1 2:1\n");
  CHECK(error_of([&] { io::read_photons(repeated, "h.phd"); }).find("repeated") != std::string::npos);
  std::istringstream version("PHD 3\n");
  CHECK(error_of([&] { io::read_photons(version, "h.phd"); }) ==
        "h.phd:1: unsupported PHD version '3'");
  std::istringstream missing("PHD 1\nwidth=1 height=2 m=4\npx 0 0 :\n");
  CHECK_FALSE(error_of([&] { io::read_photons(missing, "h.phd"); }).empty());
}

TEST_CASE("csv maps round trip bit-exactly with nan sentinels") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Image<double> img(1 + rng() % 6, 1 + rng() % 6, 0.0);
    for (std::size_t i = 0; i < img.size(); ++i)
      img[i] = (rng() % 7 == 0) ? std::nan("") : random_decimal(rng);
    std::stringstream ss;
    io::write_csv(ss, img);
    REQUIRE(same_bits(io::read_csv(ss, "mem"), img));
  }

  std::istringstream ragged("1,2\n3\n");
  CHECK(error_of([&] { io::read_csv(ragged, "d.csv"); }).rfind("d.csv:2:", 0) == 0);
  std::istringstream plus("+1,2\n");
  CHECK_FALSE(error_of([&] { io::read_csv(plus, "d.csv"); }).empty());
}

TEST_CASE("flag maps round trip") {
  Image<PixelFlags> flags(2, 4, PixelFlags{});
  for (int code = 0; code < 8; ++code) flags[static_cast<std::size_t>(code)] = PixelFlags::from_code(code);
  std::stringstream ss;
  io::write_flags_csv(ss, flags);
  CHECK(ss.str() == "0,1,2,3\n4,5,6,7\n");
  CHECK(io::read_flags_csv(ss, "mem") == flags);
  std::istringstream bad("9\n");
  CHECK(error_of([&] { io::read_flags_csv(bad, "f.csv"); }).rfind("f.csv:1:", 0) == 0);
}

TEST_CASE("pgm depth preview") {
  Image<double> depth(2, 2, 0.0);
  depth[0] = 2.0;
  depth[1] = 3.0;
  depth[2] = std::nan("");
  depth[3] = 2.5;
  std::stringstream ss;
  const io::PgmScaling scale = io::write_pgm(ss, depth);
  CHECK(scale.min_depth_m == 2.0);
  CHECK(scale.max_depth_m == 3.0);
  const std::string bytes = ss.str();
  const std::string header = "P5\n2 2\n65535\n";
  REQUIRE(bytes.size() == header.size() + 8);
  CHECK(bytes.substr(0, header.size()) == header);
  auto level = [&](std::size_t i) {
    const auto hi = static_cast<unsigned char>(bytes[header.size() + 2 * i]);
    const auto lo = static_cast<unsigned char>(bytes[header.size() + 2 * i + 1]);
    return (static_cast<unsigned>(hi) << 8) | lo;
  };
  CHECK(level(0) == 1);
  CHECK(level(1) == 65535);
  CHECK(level(2) == 0);
  CHECK(level(3) == 32768);

  std::stringstream meta;
  io::write_pgm_meta(meta, scale);
  CHECK(meta.str() == "min_depth_m=2\nmax_depth_m=3\nsentinel_level=0\nvalid_levels=1..65535\n");
}

TEST_CASE("path wrappers") {
  const auto dir = std::filesystem::temp_directory_path() / "spdepth_io_test";
  std::filesystem::create_directories(dir);
  Image<double> img(2, 3, 1.25);
  io::save_csv(dir / "a.csv", img);
  CHECK(io::load_csv(dir / "a.csv") == img);
  io::save_pgm(dir / "a.pgm", img);
  CHECK(std::filesystem::exists(dir / "a.pgm.meta"));
  const std::string msg = error_of([&] { io::load_csv(dir / "missing.csv"); });
  CHECK(msg.find("missing.csv") != std::string::npos);
  std::filesystem::remove_all(dir);
}
