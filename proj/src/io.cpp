#include "spdepth/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

namespace spdepth::io {

namespace {

class LineReader {
 public:
  LineReader(std::istream& in, std::string source)
      : in_(in), source_(std::move(source)) {}

  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    return true;
  }

  std::string expect(const char* what) {
    std::string line;
    if (!next(line)) fail(std::string("unexpected end of file, expected ") + what);
    return line;
  }

  void expect_end() {
    std::string line;
    while (next(line))
      if (!line.empty()) fail("unexpected trailing content");
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw FormatError(source_ + ":" + std::to_string(line_no_) + ": " + message);
  }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_no_ = 0;
};

template <class T>
bool parse_number(std::string_view text, T& value) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = first + text.size();
  if constexpr (std::is_floating_point_v<T>) {
    if (*first == '+') return false;
  }
  const auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last;
}

template <class T>
T parse_field(LineReader& reader, std::string_view text, const char* what) {
  T value{};
  if (!parse_number(text, value))
    reader.fail(std::string("invalid ") + what + " '" + std::string(text) + "'");
  return value;
}

std::string_view after_prefix(LineReader& reader, std::string_view line,
                              std::string_view prefix) {
  if (line.substr(0, prefix.size()) != prefix)
    reader.fail("expected '" + std::string(prefix) + "'");
  return line.substr(prefix.size());
}

void check_version(LineReader& reader, const std::string& line,
                   std::string_view magic) {
  const std::string expected = std::string(magic) + " 1";
  if (line == expected) return;
  if (line.rfind(std::string(magic) + " ", 0) == 0)
    reader.fail("unsupported " + std::string(magic) + " version '" +
                line.substr(magic.size() + 1) + "'");
  reader.fail("missing '" + expected + "' header");
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    out.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T, class Write>
void write_rows(std::ostream& out, const Image<T>& image, Write write) {
  for (std::size_t r = 0; r < image.height(); ++r) {
    for (std::size_t c = 0; c < image.width(); ++c) {
      if (c) out << ',';
      write(image.at(r, c));
    }
    out << '\n';
  }
}

template <class T, class Parse>
Image<T> read_rows(std::istream& in, const std::string& source, Parse parse) {
  LineReader reader(in, source);
  std::vector<std::vector<T>> rows;
  std::string line;
  bool ended = false;
  while (reader.next(line)) {
    if (line.empty()) {
      ended = true;
      continue;
    }
    if (ended) reader.fail("row after blank line");
    std::vector<T> row;
    for (std::string_view cell : split(line, ',')) row.push_back(parse(reader, cell));
    if (!rows.empty() && row.size() != rows.front().size())
      reader.fail("row has " + std::to_string(row.size()) + " columns, expected " +
                  std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) reader.fail("no rows");
  Image<T> image(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) image.at(r, c) = rows[r][c];
  return image;
}

template <class Fn>
void with_output(const std::filesystem::path& path, Fn fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path.string() + ": cannot open for writing");
  fn(out);
  if (!out) throw FormatError(path.string() + ": write failed");
}

template <class Fn>
auto with_input(const std::filesystem::path& path, Fn fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string() + ": cannot open for reading");
  return fn(in, path.string());
}

}  // namespace

std::string format_decimal(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_pulse(std::ostream& out, const PulseWaveform& pulse) {
  out << "PULSE 1\n"
      << "eps_seconds=" << format_decimal(pulse.sample_period_s()) << '\n'
      << "n=" << pulse.size() << '\n';
  for (double s : pulse.samples()) out << format_decimal(s) << '\n';
}

PulseWaveform read_pulse(std::istream& in, const std::string& source) {
  LineReader reader(in, source);
  check_version(reader, reader.expect("header"), "PULSE");
  const std::string eps_line = reader.expect("eps_seconds");
  const auto eps = parse_field<double>(
      reader, after_prefix(reader, eps_line, "eps_seconds="), "eps_seconds");
  const std::string n_line = reader.expect("n");
  const auto n = parse_field<std::size_t>(reader, after_prefix(reader, n_line, "n="), "n");
  std::vector<double> samples;
  samples.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = parse_field<double>(reader, reader.expect("pulse sample"), "sample");
    if (!(s >= 0.0) || !std::isfinite(s)) reader.fail("pulse sample must be non-negative");
    samples.push_back(s);
  }
  reader.expect_end();
  try {
    return PulseWaveform(eps, std::move(samples));
  } catch (const DomainError& e) {
    throw FormatError(source + ": " + e.what());
  }
}

void write_photons(std::ostream& out, const Image<PhotonHistogram>& histograms,
                   std::size_t num_bins) {
  out << "PHD 1\n"
      << "width=" << histograms.width() << " height=" << histograms.height()
      << " m=" << num_bins << '\n';
  for (std::size_t r = 0; r < histograms.height(); ++r) {
    for (std::size_t c = 0; c < histograms.width(); ++c) {
      const PhotonHistogram& h = histograms.at(r, c);
      if (h.size() != num_bins) throw DomainError("histogram length differs from m");
      out << "px " << r << ' ' << c << " :";
      for (std::size_t k = 0; k < h.size(); ++k)
        if (h[k] > 0) out << ' ' << (k + 1) << ':' << h[k];
      out << '\n';
    }
  }
}

Image<PhotonHistogram> read_photons(std::istream& in, const std::string& source) {
  LineReader reader(in, source);
  check_version(reader, reader.expect("header"), "PHD");
  const std::string dims = reader.expect("dimensions");
  const auto parts = split(dims, ' ');
  if (parts.size() != 3) reader.fail("expected 'width=<w> height=<h> m=<m>'");
  const auto width = parse_field<std::size_t>(reader, after_prefix(reader, parts[0], "width="), "width");
  const auto height = parse_field<std::size_t>(reader, after_prefix(reader, parts[1], "height="), "height");
  const auto m = parse_field<std::size_t>(reader, after_prefix(reader, parts[2], "m="), "m");
  if (width == 0 || height == 0 || m == 0) reader.fail("dimensions must be positive");

  Image<PhotonHistogram> out(height, width);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const std::string line = reader.expect("pixel line");
      const auto tokens = split(line, ' ');
      if (tokens.size() < 4 || tokens[0] != "px" || tokens[3] != ":")
        reader.fail("expected 'px <row> <col> :'");
      if (parse_field<std::size_t>(reader, tokens[1], "row") != r ||
          parse_field<std::size_t>(reader, tokens[2], "col") != c)
        reader.fail("pixel out of row-major order, expected " + std::to_string(r) +
                    " " + std::to_string(c));
      std::vector<int> counts(m, 0);
      for (std::size_t t = 4; t < tokens.size(); ++t) {
        const auto pair = split(tokens[t], ':');
        if (pair.size() != 2) reader.fail("expected '<bin>:<count>'");
        const auto bin = parse_field<std::size_t>(reader, pair[0], "bin");
        const auto count = parse_field<int>(reader, pair[1], "count");
        if (bin < 1 || bin > m) reader.fail("bin " + std::to_string(bin) + " outside 1..m");
        if (count < 0) reader.fail("negative count");
        if (counts[bin - 1] != 0) reader.fail("bin " + std::to_string(bin) + " repeated");
        counts[bin - 1] = count;
      }
      out.at(r, c) = PhotonHistogram(std::move(counts));
    }
  }
  reader.expect_end();
  return out;
}

void write_csv(std::ostream& out, const Image<double>& image) {
  write_rows(out, image, [&](double v) { out << format_decimal(v); });
}

Image<double> read_csv(std::istream& in, const std::string& source) {
  return read_rows<double>(in, source, [](LineReader& reader, std::string_view cell) {
    if (cell == "nan") return std::numeric_limits<double>::quiet_NaN();
    const double v = parse_field<double>(reader, cell, "decimal");
    if (std::isnan(v)) reader.fail("sentinel must be written as 'nan'");
    return v;
  });
}

void write_flags_csv(std::ostream& out, const Image<PixelFlags>& flags) {
  write_rows(out, flags, [&](const PixelFlags& f) { out << f.code(); });
}

Image<PixelFlags> read_flags_csv(std::istream& in, const std::string& source) {
  return read_rows<PixelFlags>(in, source, [](LineReader& reader, std::string_view cell) {
    const int code = parse_field<int>(reader, cell, "flag code");
    if (code < 0 || code > 7) reader.fail("flag code outside 0..7");
    return PixelFlags::from_code(code);
  });
}

PgmScaling write_pgm(std::ostream& out, const Image<double>& depth) {
  PgmScaling scaling{std::numeric_limits<double>::quiet_NaN(),
                     std::numeric_limits<double>::quiet_NaN()};
  for (double d : depth.data()) {
    if (std::isnan(d)) continue;
    if (std::isnan(scaling.min_depth_m) || d < scaling.min_depth_m) scaling.min_depth_m = d;
    if (std::isnan(scaling.max_depth_m) || d > scaling.max_depth_m) scaling.max_depth_m = d;
  }
  const double span = scaling.max_depth_m - scaling.min_depth_m;

  out << "P5\n" << depth.width() << ' ' << depth.height() << "\n65535\n";
  for (double d : depth.data()) {
    unsigned level = 0;
    if (!std::isnan(d))
      level = 1 + (span > 0.0 ? static_cast<unsigned>(
                                    std::lround((d - scaling.min_depth_m) / span * 65534.0))
                              : 0u);
    out.put(static_cast<char>((level >> 8) & 0xff));
    out.put(static_cast<char>(level & 0xff));
  }
  return scaling;
}

void write_pgm_meta(std::ostream& out, const PgmScaling& scaling) {
  out << "min_depth_m=" << format_decimal(scaling.min_depth_m) << '\n'
      << "max_depth_m=" << format_decimal(scaling.max_depth_m) << '\n'
      << "sentinel_level=0\n"
      << "valid_levels=1..65535\n";
}

void save_pulse(const std::filesystem::path& path, const PulseWaveform& pulse) {
  with_output(path, [&](std::ostream& out) { write_pulse(out, pulse); });
}

PulseWaveform load_pulse(const std::filesystem::path& path) {
  return with_input(path, read_pulse);
}

void save_photons(const std::filesystem::path& path,
                  const Image<PhotonHistogram>& histograms, std::size_t num_bins) {
  with_output(path, [&](std::ostream& out) { write_photons(out, histograms, num_bins); });
}

Image<PhotonHistogram> load_photons(const std::filesystem::path& path) {
  return with_input(path, read_photons);
}

void save_csv(const std::filesystem::path& path, const Image<double>& image) {
  with_output(path, [&](std::ostream& out) { write_csv(out, image); });
}

Image<double> load_csv(const std::filesystem::path& path) {
  return with_input(path, read_csv);
}

void save_flags_csv(const std::filesystem::path& path, const Image<PixelFlags>& flags) {
  with_output(path, [&](std::ostream& out) { write_flags_csv(out, flags); });
}

Image<PixelFlags> load_flags_csv(const std::filesystem::path& path) {
  return with_input(path, read_flags_csv);
}

PgmScaling save_pgm(const std::filesystem::path& path, const Image<double>& depth) {
  PgmScaling scaling;
  with_output(path, [&](std::ostream& out) { scaling = write_pgm(out, depth); });
  std::filesystem::path meta = path;
  meta += ".meta";
  with_output(meta, [&](std::ostream& out) { write_pgm_meta(out, scaling); });
  return scaling;
}

}  // namespace spdepth::io
