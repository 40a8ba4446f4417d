#pragma once

// Portable text formats for pulses, photon histograms and per-pixel maps,
// plus the 16-bit PGM depth preview.
//
//   pulse   : "PULSE 1", "eps_seconds=<x>", "n=<int>", then n samples
//   photons : "PHD 1", "width=<w> height=<h> m=<m>", then one
//             "px <row> <col> :" line per pixel (row-major, 0-based) with
//             " <bin>:<count>" pairs for the non-zero 1-based bins
//   csv     : one image row per line, comma separated, "nan" for sentinels
//
// Decimals are written with 17 significant digits so reads are exact.

#include "spdepth/core_model.hpp"
#include "spdepth/frame_pipeline.hpp"
#include "spdepth/image.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace spdepth::io {

/// Malformed or unsupported input; the message names the source and line.
class FormatError : public DomainError {
 public:
  using DomainError::DomainError;
};

std::string format_decimal(double value);

void write_pulse(std::ostream& out, const PulseWaveform& pulse);
PulseWaveform read_pulse(std::istream& in, const std::string& source);

void write_photons(std::ostream& out, const Image<PhotonHistogram>& histograms,
                   std::size_t num_bins);
Image<PhotonHistogram> read_photons(std::istream& in, const std::string& source);

void write_csv(std::ostream& out, const Image<double>& image);
Image<double> read_csv(std::istream& in, const std::string& source);

void write_flags_csv(std::ostream& out, const Image<PixelFlags>& flags);
Image<PixelFlags> read_flags_csv(std::istream& in, const std::string& source);

/// Linear map of the valid depth range onto PGM levels.
struct PgmScaling {
  /// NaN when the image has no valid pixel.
  double min_depth_m = 0.0;
  double max_depth_m = 0.0;
};

/// Binary P5, maxval 65535, big-endian samples. Valid depths map linearly
/// from [min, max] onto levels 1..65535; sentinel pixels are level 0.
PgmScaling write_pgm(std::ostream& out, const Image<double>& depth);
void write_pgm_meta(std::ostream& out, const PgmScaling& scaling);

// Path wrappers; open failures raise FormatError naming the path.
void save_pulse(const std::filesystem::path& path, const PulseWaveform& pulse);
PulseWaveform load_pulse(const std::filesystem::path& path);
void save_photons(const std::filesystem::path& path,
                  const Image<PhotonHistogram>& histograms, std::size_t num_bins);
Image<PhotonHistogram> load_photons(const std::filesystem::path& path);
void save_csv(const std::filesystem::path& path, const Image<double>& image);
Image<double> load_csv(const std::filesystem::path& path);
void save_flags_csv(const std::filesystem::path& path, const Image<PixelFlags>& flags);
Image<PixelFlags> load_flags_csv(const std::filesystem::path& path);
/// Writes the PGM and its "<path>.meta" sidecar.
PgmScaling save_pgm(const std::filesystem::path& path, const Image<double>& depth);

}  // namespace spdepth::io
