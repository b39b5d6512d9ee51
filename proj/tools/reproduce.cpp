#include "reproduce.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <vector>

#include "json.hpp"
#include "semisplit/catalog.hpp"
#include "semisplit/drs.hpp"
#include "semisplit/pppa.hpp"
#include "semisplit/trace_io.hpp"

namespace semisplit::cli {

namespace {

using nlohmann::json;

struct Summary {
  json checks = json::array();
  bool all_pass = true;

  void add(const std::string& name, bool pass, double value, double target, double slack) {
    checks.push_back({{"name", name},
                      {"pass", pass},
                      {"value", value},
                      {"target", target},
                      {"slack", slack}});
    all_pass = all_pass && pass;
  }

  void write(const std::string& problem, const std::string& outdir, bool verbose) const {
    json doc;
    doc["problem"] = problem;
    doc["checks"] = checks;
    doc["pass"] = all_pass;
    std::ofstream out(std::filesystem::path(outdir) / "summary.json");
    out << doc.dump(2) << "\n";
    if (verbose) {
      for (const auto& c : checks)
        std::cout << (c["pass"].get<bool>() ? "[PASS] " : "[FAIL] ") << c["name"].get<std::string>()
                  << " value=" << c["value"].get<double>() << "\n";
    }
  }
};

std::filesystem::path out_path(const ReproduceOptions& opts, const std::string& name) {
  std::filesystem::create_directories(opts.outdir);
  return std::filesystem::path(opts.outdir) / name;
}

std::vector<ScanRow> scan_rows(const StepMatrixBuilder& builder, double lo, double hi, double step,
                               double gamma) {
  std::vector<ScanRow> rows;
  for (double lam = lo; lam <= hi + 1e-12; lam += step) {
    const double rho = linalg::spectral_radius(builder(lam));
    rows.push_back({lam, gamma, rho, rho < 1.0});
  }
  return rows;
}

int reproduce_toy(const ReproduceOptions& opts) {
  Summary summary;
  const auto builder = [](double lam) { return toy_ppa_step_matrix(2.0, 1.0, lam); };

  const double flip = find_unit_radius_crossing(builder, 2.0, 2.8, 1e-9);
  summary.add("lambda_bar_flip", std::abs(flip - 2.4) <= 1e-6, flip, 2.4,
              1e-6 - std::abs(flip - 2.4));
  write_scan_csv(scan_rows(builder, 2.0, 2.8, 0.01, 1.0), out_path(opts, "scan.csv").string());

  // basin runs with the zero-band profile at lambda = 2.3
  const ToyProblem toy = toy_ppa_problem(2.0, 1.0, true);
  const Preconditioner p = Preconditioner::identity(2);
  std::mt19937_64 rng(opts.seed);
  auto unit = [&rng]() { return -2.0 + 4.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53); };

  std::ofstream basins(out_path(opts, "basins.csv"));
  basins << "init0,init1,status,iters,final_residual\n";
  double worst_residual = 0.0;
  bool first = true;
  for (int i = 0; i < 20; ++i) {
    PPPAConfig cfg;
    cfg.lambda = LambdaRule::fixed(2.3);
    cfg.max_iters = opts.max_iters;
    cfg.stop_tol = opts.tol;
    const Vec x0{unit(), unit()};
    const IterateTrace trace = run_pppa(toy.t, p, toy.cert, x0, cfg);
    const double res = zero_residual(toy.t, trace.xbar_final);
    worst_residual = std::max(worst_residual, res);
    basins << format_sig17(x0[0]) << "," << format_sig17(x0[1]) << ","
           << static_cast<int>(trace.status) << "," << trace.records.size() << ","
           << format_sig17(res) << "\n";
    if (first) {
      write_iterate_csv(trace, out_path(opts, "trace.csv").string());
      first = false;
    }
  }
  summary.add("basin_convergence", worst_residual <= 1e-6, worst_residual, 1e-6,
              1e-6 - worst_residual);

  // above the tight bound at least one run must blow past norm 1e3; the
  // divergence basin of the zero-band profile starts around |x0| ~ 3.5, so the
  // inits are drawn from the wider box [-5,5]^2 (the figure's divergent
  // trajectory leaves the frame)
  bool any_diverged = false;
  std::mt19937_64 rng2(opts.seed);
  auto unit2 = [&rng2]() { return -5.0 + 10.0 * (static_cast<double>(rng2() >> 11) * 0x1.0p-53); };
  for (int i = 0; i < 20 && !any_diverged; ++i) {
    PPPAConfig cfg;
    cfg.lambda = LambdaRule::fixed(2.5);
    cfg.max_iters = 10000;
    cfg.stop_tol = opts.tol;
    cfg.divergence_norm = 1e3;
    const Vec x0{unit2(), unit2()};
    any_diverged = run_pppa(toy.t, p, toy.cert, x0, cfg).status == RunStatus::Diverged;
  }
  summary.add("divergence_above_bar", any_diverged, any_diverged ? 1.0 : 0.0, 1.0, 0.0);

  summary.write("toy-ppa", opts.outdir, opts.verbose);
  return summary.all_pass ? 0 : 1;
}

int reproduce_saddle(const ReproduceOptions& opts) {
  Summary summary;
  const double gamma = 0.5;
  const auto builder = [gamma](double lam) {
    return saddle_drs_step_matrix(2.0, -1.0, gamma, lam);
  };
  const double flip = find_unit_radius_crossing(builder, 0.2, 0.6, 1e-9);
  summary.add("lambda_bar_flip", std::abs(flip - 0.4) <= 1e-6, flip, 0.4,
              1e-6 - std::abs(flip - 0.4));
  write_scan_csv(scan_rows(builder, 0.05, 0.6, 0.005, gamma), out_path(opts, "scan.csv").string());

  const auto rep = nonmonotonicity_report(2.0, -1.0);
  const double trace_dev = std::max({std::abs(rep.trace_primal + 2.0),
                                     std::abs(rep.trace_dual + 2.0),
                                     std::abs(rep.trace_primal_dual + 2.0)});
  summary.add("nonmonotone_traces", trace_dev <= 1e-12, rep.trace_primal, -2.0, 1e-12 - trace_dev);

  const DrsProblem sp = saddle_problem(2.0, -1.0, gamma);
  DRSConfig cfg;
  cfg.gamma = gamma;
  cfg.lambda = LambdaRule::fixed(0.3);
  cfg.max_iters = opts.max_iters;
  cfg.stop_tol = opts.tol;
  const DRSTrace trace = run_drs(sp.a, sp.b, sp.cert, Vec{1.0, -0.5}, cfg);
  write_drs_csv(trace, out_path(opts, "trace.csv").string());
  const double final_res = trace.records.back().residual;
  summary.add("converged_below_bar", trace.status == RunStatus::Converged, final_res, opts.tol,
              opts.tol - final_res);

  summary.write("saddle-drs", opts.outdir, opts.verbose);
  return summary.all_pass ? 0 : 1;
}

int reproduce_nonsmooth(const ReproduceOptions& opts) {
  Summary summary;
  const DrsProblem ns = nonsmooth_min_problem();

  const auto range = gamma_range_semi(*ns.params_a, *ns.params_b, ns.a, ns.b);
  const double upper = range.hi.value;
  summary.add("gamma_range_upper", std::abs(upper - 0.26146) <= 5e-5, upper, 0.26146,
              5e-5 - std::abs(upper - 0.26146));

  // sublinear rate bound with lambda = alpha (kappa = alpha^2)
  const double gamma = 0.13;
  const double alpha = alpha_drs(gamma, ns.cert.beta_p, ns.cert.beta_d);
  DRSConfig cfg;
  cfg.gamma = gamma;
  cfg.lambda = LambdaRule::fixed(alpha);
  cfg.max_iters = 501;
  cfg.stop_tol = 0.0;
  const DRSTrace trace = run_drs(ns.a, ns.b, ns.cert, Vec{2.0}, cfg);
  write_drs_csv(trace, out_path(opts, "trace.csv").string());
  double min_res_sq = std::numeric_limits<double>::infinity();
  double min_fejer = std::numeric_limits<double>::infinity();
  for (const auto& r : trace.records) {
    min_res_sq = std::min(min_res_sq, r.residual * r.residual);
    min_fejer = std::min(min_fejer, r.fejer_gap);
  }
  const double sstar = -3.0 * gamma;
  const double bound =
      (2.0 - sstar) * (2.0 - sstar) / (static_cast<double>(trace.records.size()) * alpha * alpha);
  summary.add("rate_bound", min_res_sq <= bound * (1.0 + 1e-9), min_res_sq, bound,
              bound - min_res_sq);
  summary.add("fejer_min", min_fejer >= -1e-9, min_fejer, -1e-9, min_fejer + 1e-9);

  DRSConfig ecfg;
  ecfg.gamma = gamma;
  ecfg.lambda = LambdaRule::fixed(0.8);
  const double dev = equivalence_check(ns.a, ns.b, ns.cert, Vec{2.0}, Vec{-1.0}, ecfg, 100);
  summary.add("equivalence", dev <= 1e-10, dev, 1e-10, 1e-10 - dev);

  summary.write("nonsmooth-min", opts.outdir, opts.verbose);
  return summary.all_pass ? 0 : 1;
}

int reproduce_stationary(const ReproduceOptions& opts) {
  Summary summary;
  const DrsProblem st = stationary_problem();

  const auto range = gamma_range_semi(*st.params_a, *st.params_b, st.a, st.b);
  const double range_dev =
      std::max(std::abs(range.lo - 1.0 / 6.0), std::abs(range.hi.value - 1.0 / 5.0));
  summary.add("gamma_range", range_dev <= 1e-12, range.lo, 1.0 / 6.0, 1e-12 - range_dev);

  const double gamma = 11.0 / 60.0;
  const double cap = 2.0 - 4.0 / (15.0 * gamma) - 12.0 * gamma / 5.0;
  DRSConfig cfg;
  cfg.gamma = gamma;
  cfg.lambda = LambdaRule::fixed(0.9 * cap);
  cfg.max_iters = opts.max_iters;
  cfg.stop_tol = opts.tol;
  cfg.selection.mode = ResolventSelection::Mode::UniformRandom;

  std::ofstream sweep(out_path(opts, "sweep.csv"));
  sweep << "s0,status,iters,final_residual,q,r2\n";
  double worst_res = 0.0;
  double worst_q = 0.0;
  double worst_r2 = 1.0;
  bool first = true;
  for (int i = 0; i < 200; ++i) {
    const double s0 = -5.0 + 10.0 * i / 199.0;
    cfg.selection.seed = opts.seed + static_cast<std::uint64_t>(i);
    const DRSTrace trace = run_drs(st.a, st.b, st.cert, Vec{s0}, cfg);
    const double res = trace.records.back().residual;
    worst_res = std::max(worst_res, res);
    double q = 0.0, r2 = 1.0;
    if (trace.records.size() >= 40) {
      std::vector<double> residuals;
      for (const auto& r : trace.records) residuals.push_back(r.residual);
      const RLinearFit fit = rlinear_fit(residuals, 0.5);
      q = fit.q;
      r2 = fit.r2;
      worst_q = std::max(worst_q, q);
      worst_r2 = std::min(worst_r2, r2);
    }
    sweep << format_sig17(s0) << "," << static_cast<int>(trace.status) << ","
          << trace.records.size() << "," << format_sig17(res) << "," << format_sig17(q) << ","
          << format_sig17(r2) << "\n";
    if (first) {
      write_drs_csv(trace, out_path(opts, "trace.csv").string());
      first = false;
    }
  }
  summary.add("sweep_convergence", worst_res <= 1e-6, worst_res, 1e-6, 1e-6 - worst_res);
  summary.add("rlinear_fit", worst_q < 1.0 && worst_r2 > 0.95, worst_q, 1.0, 1.0 - worst_q);

  summary.write("stationary", opts.outdir, opts.verbose);
  return summary.all_pass ? 0 : 1;
}

}  // namespace

int run_reproduce(const std::string& example, const ReproduceOptions& opts) {
  if (example == "toy-ppa") return reproduce_toy(opts);
  if (example == "saddle-drs") return reproduce_saddle(opts);
  if (example == "nonsmooth-min") return reproduce_nonsmooth(opts);
  if (example == "stationary") return reproduce_stationary(opts);
  std::cerr << "unknown example '" << example
            << "' (expected toy-ppa | saddle-drs | nonsmooth-min | stationary)\n";
  return 2;
}

}  // namespace semisplit::cli
