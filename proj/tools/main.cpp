#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "experiment.hpp"
#include "reproduce.hpp"
#include "semisplit/drs.hpp"
#include "semisplit/semiparams.hpp"

namespace {

using namespace semisplit;

std::string sig12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string interval_string(const GammaInterval& r) {
  if (r.is_empty()) return "(empty)";
  return "(" + sig12(r.lo) + ", " + (r.hi.is_inf ? "inf" : sig12(r.hi.value)) + ")";
}

int run_calc(const std::string& what, const std::vector<double>& pos, double mu_a, double rho_a,
             double mu_b, double rho_b, double mu, double rho, double gamma, double beta_p,
             double beta_d) {
  try {
    if (what == "parallel-sum") {
      if (pos.size() != 2) throw ConfigError("parallel-sum expects two positional numbers");
      std::cout << sig12(parallel_sum(pos[0], pos[1])) << "\n";
      return 0;
    }
    if (what == "gamma-range-semi") {
      std::cout << interval_string(gamma_range_semi({mu_a, rho_a}, {mu_b, rho_b})) << "\n";
      return 0;
    }
    if (what == "gamma-range-minty") {
      std::cout << interval_string(gamma_range_minty(beta_p, beta_d)) << "\n";
      return 0;
    }
    if (what == "embedding") {
      const auto e = monotone_embedding({mu, rho});
      std::cout << "(" << sig12(e.xi) << ", " << sig12(e.nu) << ")\n";
      return 0;
    }
    if (what == "sum") {
      const auto p = sum_params({mu_a, rho_a}, {mu_b, rho_b});
      std::cout << "(" << sig12(p.mu) << ", " << sig12(p.rho) << ")\n";
      return 0;
    }
    if (what == "parsum") {
      const auto p = parallel_sum_params({mu_a, rho_a}, {mu_b, rho_b});
      std::cout << "(" << sig12(p.mu) << ", " << sig12(p.rho) << ")\n";
      return 0;
    }
    if (what == "resolvent-range") {
      std::cout << interval_string(resolvent_gamma_range({mu, rho})) << "\n";
      return 0;
    }
    if (what == "lipschitz") {
      std::cout << sig12(resolvent_lipschitz({mu, rho}, gamma)) << "\n";
      return 0;
    }
    std::cerr << "unknown calc operation '" << what << "'\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semimonotone operator splitting toolkit"};
  app.require_subcommand(1);

  // calc
  auto* calc = app.add_subcommand("calc", "parameter calculus and stepsize ranges");
  std::string what;
  std::vector<double> positional;
  double mu_a = 0, rho_a = 0, mu_b = 0, rho_b = 0, mu = 0, rho = 0, gamma = 1.0;
  double beta_p = 0, beta_d = 0;
  calc->add_option("operation", what,
                   "parallel-sum | gamma-range-semi | gamma-range-minty | embedding | sum | "
                   "parsum | resolvent-range | lipschitz")
      ->required();
  calc->add_option("values", positional, "positional numeric arguments");
  calc->add_option("--muA", mu_a);
  calc->add_option("--rhoA", rho_a);
  calc->add_option("--muB", mu_b);
  calc->add_option("--rhoB", rho_b);
  calc->add_option("--mu", mu);
  calc->add_option("--rho", rho);
  calc->add_option("--gamma", gamma);
  calc->add_option("--betaP", beta_p);
  calc->add_option("--betaD", beta_d);

  // reproduce
  auto* rep = app.add_subcommand("reproduce", "rerun a shipped example and check it");
  std::string example;
  semisplit::cli::ReproduceOptions opts;
  rep->add_option("example", example, "toy-ppa | saddle-drs | nonsmooth-min | stationary")
      ->required();
  rep->add_option("--out", opts.outdir, "output directory");
  rep->add_option("--seed", opts.seed, "random seed");
  rep->add_option("--max-iters", opts.max_iters, "iteration cap per run");
  rep->add_option("--tol", opts.tol, "stopping tolerance on the residual");
  rep->add_flag("--verbose", opts.verbose, "print one line per check");

  // run
  auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
  std::string config_path;
  std::string run_out = ".";
  run->add_option("config", config_path, "path to the experiment JSON")->required();
  run->add_option("--out", run_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  if (calc->parsed())
    return run_calc(what, positional, mu_a, rho_a, mu_b, rho_b, mu, rho, gamma, beta_p, beta_d);
  if (rep->parsed()) return semisplit::cli::run_reproduce(example, opts);
  if (run->parsed()) return semisplit::cli::run_experiment(config_path, run_out);
  return 2;
}
