#pragma once

// End-to-end runs of a scheme (select, reconstruct, verify) and their
// serialized forms: the structured JSON report and the plot-data blocks.

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstddef>
#include <map>
#include <ostream>
#include <string>

#include "lincompress/core.hpp"
#include "lincompress/io.hpp"
#include "lincompress/l1_scheme.hpp"
#include "lincompress/linf_scheme.hpp"
#include "lincompress/verification.hpp"

namespace lincompress {

struct RunReport {
  LossSpec scheme = LossSpec::l1();
  LinearModel model;
  CompressionSet compression;
  double optimum = 0.0;
  double achieved = 0.0;
  bool competitive = false;
  double tolerance = 1e-7;
  std::size_t sample_size = 0;
  std::map<std::string, double> timings_ms;
};

inline LossSpec parse_scheme(const std::string& name) {
  if (name == "l1") return LossSpec::l1();
  if (name == "linf") return LossSpec::linf();
  throw ContractViolation("unknown scheme '" + name + "' (expected l1 or linf)");
}

/// Compresses `data`, reconstructs from the compression set alone, and
/// checks the reconstruction against the LP infimum.
inline RunReport run_scheme(const Dataset& data, LossSpec scheme, double tol = 1e-7) {
  detail::require(scheme.is_l1() || scheme.is_infinity(), "run_scheme: scheme must be l1 or linf");
  using clock = std::chrono::steady_clock;
  auto ms = [](clock::time_point a, clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  };
  RunReport rep;
  rep.scheme = scheme;
  rep.tolerance = tol;
  rep.sample_size = data.size();

  auto t0 = clock::now();
  rep.compression = scheme.is_l1() ? compress_l1(data) : compress_linf(data);
  auto t1 = clock::now();
  rep.model = scheme.is_l1() ? reconstruct_l1(rep.compression) : reconstruct_linf(rep.compression);
  auto t2 = clock::now();
  rep.achieved = evaluate_loss(rep.model, data, scheme);
  rep.optimum = verification::optimal_loss(data, scheme);
  rep.competitive = std::abs(rep.achieved - rep.optimum) <= tol;
  auto t3 = clock::now();
  rep.timings_ms = {{"compress", ms(t0, t1)}, {"reconstruct", ms(t1, t2)}, {"verify", ms(t2, t3)}};
  return rep;
}

inline nlohmann::json to_json(const LinearModel& model) {
  return {{"a", model.a}, {"b", model.b}};
}

inline nlohmann::json to_json(const CompressionSet& cset) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : cset.selected) pts.push_back({{"x", p.x}, {"y", p.y}});
  std::string bits;
  for (bool b : cset.bits) bits.push_back(b ? '1' : '0');
  const std::size_t bound = cset.dim + (cset.loss_kind.is_infinity() ? 2 : 1);
  return {{"loss", cset.loss_kind.name()},
          {"dimension", cset.dim},
          {"size_bound", bound},
          {"selected", pts},
          {"bits", bits}};
}

inline CompressionSet compression_from_json(const nlohmann::json& j) {
  CompressionSet cset;
  cset.loss_kind = parse_scheme(j.at("loss").get<std::string>());
  cset.dim = j.at("dimension").get<std::size_t>();
  for (const auto& p : j.at("selected")) {
    LabeledPoint pt;
    pt.x = p.at("x").get<std::vector<double>>();
    pt.y = p.at("y").get<double>();
    detail::require(pt.x.size() == cset.dim, "compression set: point dimension mismatch");
    cset.selected.push_back(std::move(pt));
  }
  for (char c : j.value("bits", std::string{})) cset.bits.push_back(c == '1');
  return cset;
}

inline nlohmann::json to_json(const RunReport& rep) {
  return {{"scheme", rep.scheme.name()},
          {"sample_size", rep.sample_size},
          {"model", to_json(rep.model)},
          {"compression", to_json(rep.compression)},
          {"optimum", rep.optimum},
          {"achieved", rep.achieved},
          {"competitive", rep.competitive},
          {"tolerance", rep.tolerance},
          {"timings_ms", rep.timings_ms}};
}

inline void write_text(std::ostream& out, const RunReport& rep) {
  out << "scheme      " << rep.scheme.name() << "\n"
      << "points      " << rep.sample_size << "\n"
      << "selected    " << rep.compression.selected.size() << " (bound "
      << rep.compression.dim + (rep.scheme.is_infinity() ? 2 : 1) << ")\n";
  for (const auto& p : rep.compression.selected) {
    out << "  x=(";
    for (std::size_t j = 0; j < p.x.size(); ++j) out << (j ? ", " : "") << p.x[j];
    out << ") y=" << p.y << "\n";
  }
  out << "model       a=(";
  for (std::size_t j = 0; j < rep.model.a.size(); ++j) out << (j ? ", " : "") << rep.model.a[j];
  out << ") b=" << rep.model.b << "\n"
      << "optimum     " << io::detail::format_double(rep.optimum) << "\n"
      << "achieved    " << io::detail::format_double(rep.achieved) << "\n"
      << "competitive " << (rep.competitive ? "yes" : "no") << " (tol " << rep.tolerance << ")\n";
}

/// Three gnuplot-style blocks separated by two blank lines: every datapoint,
/// the fitted line at the ends of the x-range, and the selected points.
/// Planar samples only.
inline void emit_plot_data(std::ostream& out, const RunReport& rep, const Dataset& data) {
  detail::require(data.dim() == 1, "plot-data: only d = 1 samples can be plotted");
  detail::require(!rep.compression.selected.empty(), "plot-data: empty compression set");
  const auto fmt = [](double v) { return io::detail::format_double(v); };
  out << "# points: x y\n";
  double lo = data[0].x[0];
  double hi = lo;
  for (const auto& p : data) {
    out << fmt(p.x[0]) << ' ' << fmt(p.y) << '\n';
    lo = std::min(lo, p.x[0]);
    hi = std::max(hi, p.x[0]);
  }
  out << "\n\n# " << rep.scheme.name() << " fit: x y\n";
  for (double x : {lo, hi}) out << fmt(x) << ' ' << fmt(predict(rep.model, std::vector<double>{x})) << '\n';
  out << "\n\n# " << (rep.scheme.is_infinity() ? "support vectors" : "selected points") << ": x y\n";
  for (const auto& p : rep.compression.selected) out << fmt(p.x[0]) << ' ' << fmt(p.y) << '\n';
}

}  // namespace lincompress
