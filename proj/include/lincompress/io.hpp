#pragma once

// Dataset CSV format and the deterministic uniform sample generator.
//
// CSV: one row per point, d feature columns followed by the label column,
// optionally preceded by a header row `x1,...,xd,y`. Values are decimal
// floating-point literals; files are written with 17 significant digits so
// that a write/read cycle reproduces every double exactly.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "lincompress/core.hpp"

namespace lincompress::io {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, out);
  return res.ec == std::errc() && res.ptr == end && !s.empty();
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline Dataset parse_csv(std::istream& in) {
  std::vector<LabeledPoint> pts;
  std::size_t cols = 0;
  std::size_t line_no = 0;
  bool first = true;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = detail::trim(line);
    if (view.empty()) continue;
    const auto fields = detail::split(view);
    std::vector<double> values(fields.size());
    bool numeric = true;
    for (std::size_t k = 0; k < fields.size(); ++k) {
      if (!detail::parse_double(fields[k], values[k])) numeric = false;
    }
    if (first) {
      first = false;
      cols = fields.size();
      if (!numeric) continue;  // header row
    }
    if (fields.size() != cols) {
      throw ParseError(line_no, "expected " + std::to_string(cols) + " columns, found " +
                                    std::to_string(fields.size()));
    }
    if (!numeric) throw ParseError(line_no, "non-numeric value");
    for (double v : values) {
      if (!std::isfinite(v)) throw ParseError(line_no, "non-finite value");
    }
    LabeledPoint pt;
    pt.y = values.back();
    values.pop_back();
    pt.x = std::move(values);
    pts.push_back(std::move(pt));
  }
  if (pts.empty()) throw ParseError(line_no, "no data rows");
  return Dataset(std::move(pts), cols - 1);
}

inline Dataset read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path);
  return parse_csv(in);
}

inline void write_csv(std::ostream& out, const Dataset& data) {
  for (std::size_t j = 0; j < data.dim(); ++j) out << 'x' << (j + 1) << ',';
  out << "y\n";
  for (const auto& pt : data) {
    for (double v : pt.x) out << detail::format_double(v) << ',';
    out << detail::format_double(pt.y) << '\n';
  }
}

inline void write_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_csv(out, data);
}

/// Name of the generator behind gen_uniform, recorded in reports.
inline constexpr const char* kGeneratorName = "mt19937_64";
inline constexpr std::uint64_t kDefaultSeed = 7;

/// m points with every coordinate and label iid uniform on [0, 1).
/// std::mt19937_64 has a fully specified output sequence, and the mapping to
/// [0, 1) uses the top 53 bits directly, so datasets are identical across
/// platforms and standard libraries.
inline Dataset gen_uniform(std::size_t m, std::size_t d, std::uint64_t seed) {
  lincompress::detail::require(m >= 1, "gen_uniform: m must be >= 1");
  std::mt19937_64 rng(seed);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<LabeledPoint> pts(m);
  for (auto& pt : pts) {
    pt.x.resize(d);
    for (double& v : pt.x) v = unit();
    pt.y = unit();
  }
  return Dataset(std::move(pts), d);
}

}  // namespace lincompress::io
