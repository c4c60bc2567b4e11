// Command-line front end: dataset generation, LP fits, compression runs,
// verification against the oracles, plot-data emission and the l_p
// counting demonstration.
//
// Exit codes: 0 success (and competitive), 1 ran but not competitive,
// 2 input or usage error, 3 internal solver error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "lincompress/lincompress.hpp"

namespace {

using namespace lincompress;

constexpr int kOk = 0;
constexpr int kNotCompetitive = 1;
constexpr int kInputError = 2;
constexpr int kSolverError = 3;

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const io::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kInputError;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kSolverError;
  } catch (const ContractViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

int cmd_gen(std::size_t m, std::size_t d, std::uint64_t seed, const std::string& out,
            const std::string& meta) {
  const Dataset data = io::gen_uniform(m, d, seed);
  if (out.empty() || out == "-") {
    io::write_csv(std::cout, data);
  } else {
    io::write_csv(out, data);
  }
  if (!meta.empty()) {
    write_json(meta, {{"generator", io::kGeneratorName}, {"seed", seed}, {"m", m}, {"d", d}});
  }
  return kOk;
}

int cmd_fit(const std::string& path, const std::string& loss_name, const std::string& out) {
  const Dataset data = io::read_csv(path);
  const LossSpec loss = parse_scheme(loss_name);
  const LpProblem lp = loss.is_l1() ? build_l1_lp(data) : build_linf_lp(data);
  const LpSolution sol = solve_regression_lp(lp);
  const LinearModel model = loss.is_l1() ? model_from_l1_vertex(sol.vertex, data.size(), data.dim())
                                         : model_from_linf_vertex(sol.vertex, data.dim());
  const double optimum = loss.is_l1() ? sol.objective_value / static_cast<double>(data.size())
                                      : sol.objective_value;
  std::cout << "loss       " << loss.name() << "\n"
            << "optimum    " << io::detail::format_double(optimum) << "\n"
            << "iterations " << sol.iterations << "\n"
            << "active     " << sol.active_set.size() << " of " << lp.constraints.size()
            << " constraints\n"
            << "model      a=(";
  for (std::size_t j = 0; j < model.a.size(); ++j) std::cout << (j ? ", " : "") << model.a[j];
  std::cout << ") b=" << model.b << "\n";
  if (!out.empty()) {
    write_json(out, {{"loss", loss.name()},
                     {"optimum", optimum},
                     {"lp_objective", sol.objective_value},
                     {"iterations", sol.iterations},
                     {"model", to_json(model)}});
  }
  return kOk;
}

int compress_one(const std::string& path, LossSpec loss, double tol, const std::string& out,
                 bool text) {
  const Dataset data = io::read_csv(path);
  const RunReport rep = run_scheme(data, loss, tol);
  if (text) write_text(std::cout, rep);
  if (!out.empty()) write_json(out, to_json(rep));
  return rep.competitive ? kOk : kNotCompetitive;
}

int cmd_compress(const std::vector<std::string>& inputs, const std::string& loss_name, double tol,
                 const std::string& out, bool suite) {
  const LossSpec loss = parse_scheme(loss_name);
  if (!suite) {
    if (inputs.size() != 1) throw ContractViolation("compress takes one input (use --suite for more)");
    return compress_one(inputs.front(), loss, tol, out, true);
  }
  // Batch mode: one task per dataset, reports written as <out>/<stem>.json.
  const std::filesystem::path dir = out.empty() ? std::filesystem::path(".") : std::filesystem::path(out);
  std::filesystem::create_directories(dir);
  std::vector<std::future<int>> jobs;
  for (const auto& in : inputs) {
    const std::string report = (dir / (std::filesystem::path(in).stem().string() + ".json")).string();
    jobs.push_back(std::async(std::launch::async, [=] {
      return guarded([&] { return compress_one(in, loss, tol, report, false); });
    }));
  }
  int worst = kOk;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const int code = jobs[i].get();
    std::cout << inputs[i] << ": " << (code == kOk ? "competitive" : "exit " + std::to_string(code))
              << "\n";
    worst = std::max(worst, code);
  }
  return worst;
}

int cmd_verify(const std::string& path, const std::string& loss_name, double tol,
               const std::string& report_path) {
  const Dataset data = io::read_csv(path);
  const LossSpec loss = parse_scheme(loss_name);
  CompressionSet cset;
  if (!report_path.empty()) {
    std::ifstream in(report_path);
    if (!in) throw io::ParseError(0, "cannot open " + report_path);
    const auto j = nlohmann::json::parse(in);
    cset = compression_from_json(j.contains("compression") ? j.at("compression") : j);
  } else {
    cset = loss.is_l1() ? compress_l1(data) : compress_linf(data);
  }
  const auto check = verification::check_competitive(cset, data, loss, tol);
  bool ok = check.competitive;
  std::cout << std::setprecision(17) << "competitive " << (check.competitive ? "yes" : "no")
            << " (achieved " << check.achieved << ", optimum " << check.optimum << ")\n";
  const double lp_summed = loss.is_l1() ? check.optimum * static_cast<double>(data.size())
                                        : check.optimum;
  if (data.dim() == 1) {
    const auto oracle = loss.is_l1() ? verification::brute_force_l1_d1(data)
                                     : verification::brute_force_linf_d1(data);
    const bool agree = std::abs(oracle.optimum - lp_summed) <= 1e-8 * std::max(1.0, lp_summed);
    ok = ok && agree;
    std::cout << "brute-force " << oracle.optimum << (agree ? " agrees" : " DISAGREES") << "\n";
  }
  if (data.size() <= 12 && data.dim() <= 2) {
    const auto exact = verification::exact_rational_check(data, loss);
    const bool agree = std::abs(exact.optimum - lp_summed) <= 1e-9;
    ok = ok && agree;
    std::cout << "exact       " << exact.exact_optimum << (agree ? " agrees" : " DISAGREES") << "\n";
  }
  return ok ? kOk : kNotCompetitive;
}

int cmd_plot(const std::string& path, const std::string& loss_name, double tol,
             const std::string& out) {
  const Dataset data = io::read_csv(path);
  if (data.dim() != 1) {
    std::cerr << "error: plot-data supports d = 1 only (got d = " << data.dim() << ")\n";
    return kInputError;
  }
  const RunReport rep = run_scheme(data, parse_scheme(loss_name), tol);
  if (out.empty() || out == "-") {
    emit_plot_data(std::cout, rep, data);
  } else {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write " + out);
    emit_plot_data(f, rep, data);
  }
  return rep.competitive ? kOk : kNotCompetitive;
}

int cmd_demo(std::size_t m, double p, unsigned k) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    std::cerr << "usage error: --p must lie in (1, inf)\n";
    return kInputError;
  }
  const auto rep = zero_dim::impossibility_demo(m, p, k);
  std::cout << "binary samples of size m=" << m << ", loss exponent p=" << p << "\n"
            << "  N0   N1   minimizer\n";
  for (std::size_t n0 = 0; n0 <= m; ++n0) {
    std::cout << std::setw(4) << n0 << ' ' << std::setw(4) << (m - n0) << "   "
              << std::setprecision(12) << rep.minimizers[n0] << "\n";
  }
  std::cout << "distinct minimizers       " << rep.num_minimizers
            << (rep.minimizers_distinct ? "" : " (numerically NOT distinct)") << "\n"
            << "sum k'*2^(k-k'), k=" << k << "    " << rep.representable_sum << "\n"
            << "bound 2^(k+1)-k           " << rep.representable << "\n"
            << "k < log2(m)               " << (rep.below_log_threshold ? "yes" : "no") << "\n"
            << "verdict: " << (rep.collision_forced ? "collision forced" : "not forced at this size")
            << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Agnostic sample compression for l1 and l-infinity linear regression"};
  app.require_subcommand(1);

  std::string loss = "l1";
  double tol = 1e-7;
  std::string out;

  auto* gen = app.add_subcommand("gen", "Write a uniform [0,1]^(d+1) sample as CSV");
  std::size_t m = 20;
  std::size_t d = 1;
  std::uint64_t seed = io::kDefaultSeed;
  std::string meta;
  gen->add_option("--m", m, "Number of points")->check(CLI::PositiveNumber);
  gen->add_option("--d", d, "Feature dimension");
  gen->add_option("--seed", seed, "Seed for mt19937_64");
  gen->add_option("--out", out, "Output CSV (default stdout)");
  gen->add_option("--meta", meta, "Also write generator metadata as JSON");

  auto* fit = app.add_subcommand("fit", "Solve the regression LP only");
  std::string input;
  fit->add_option("data", input, "Dataset CSV")->required();
  fit->add_option("--loss", loss, "l1 or linf")->check(CLI::IsMember({"l1", "linf"}));
  fit->add_option("--out", out, "Write the fit as JSON");

  auto* compress = app.add_subcommand("compress", "Compress, reconstruct and check competitiveness");
  std::vector<std::string> inputs;
  bool suite = false;
  compress->add_option("data", inputs, "Dataset CSV(s)")->required();
  compress->add_option("--loss", loss, "l1 or linf")->check(CLI::IsMember({"l1", "linf"}));
  compress->add_option("--tol", tol, "Competitiveness tolerance");
  compress->add_option("--out", out, "Report JSON (directory with --suite)");
  compress->add_flag("--suite", suite, "Process several datasets concurrently");

  auto* verify = app.add_subcommand("verify", "Check a compression against the LP and the oracles");
  std::string report;
  verify->add_option("data", input, "Dataset CSV")->required();
  verify->add_option("--loss", loss, "l1 or linf")->check(CLI::IsMember({"l1", "linf"}));
  verify->add_option("--tol", tol, "Competitiveness tolerance");
  verify->add_option("--report", report, "Verify the compression set stored in this report");

  auto* plot = app.add_subcommand("plot-data", "Emit points, fitted line and selected points");
  plot->add_option("data", input, "Dataset CSV (d = 1)")->required();
  plot->add_option("--loss", loss, "l1 or linf")->check(CLI::IsMember({"l1", "linf"}));
  plot->add_option("--tol", tol, "Competitiveness tolerance");
  plot->add_option("--out", out, "Output file (default stdout)");

  auto* demo = app.add_subcommand("demo-lp", "Counting demonstration for l_p, 1 < p < inf");
  std::size_t dm = 16;
  double p = 2.0;
  unsigned k = 3;
  demo->add_option("--m", dm, "Sample size")->check(CLI::PositiveNumber);
  demo->add_option("--p", p, "Loss exponent in (1, inf)");
  demo->add_option("--k", k, "Claimed compression size");
  demo->alias("demo-impossibility");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  if (*gen) return guarded([&] { return cmd_gen(m, d, seed, out, meta); });
  if (*fit) return guarded([&] { return cmd_fit(input, loss, out); });
  if (*compress) return guarded([&] { return cmd_compress(inputs, loss, tol, out, suite); });
  if (*verify) return guarded([&] { return cmd_verify(input, loss, tol, report); });
  if (*plot) return guarded([&] { return cmd_plot(input, loss, tol, out); });
  if (*demo) return guarded([&] { return cmd_demo(dm, p, k); });
  return kInputError;
}
