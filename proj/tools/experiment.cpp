#include "experiment.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <vector>

#include "json.hpp"
#include "semisplit/catalog.hpp"
#include "semisplit/drs.hpp"
#include "semisplit/pppa.hpp"
#include "semisplit/trace_io.hpp"

namespace semisplit::cli {

namespace {

using nlohmann::json;

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw SchemaError("unknown key '" + it.key() + "' in " + where);
}

double require_number(const json& j, const std::string& key) {
  if (!j.contains(key)) throw SchemaError("missing field '" + key + "'");
  if (!j[key].is_number()) throw SchemaError("field '" + key + "' must be a number");
  return j[key].get<double>();
}

LambdaRule parse_lambda(const json& j) {
  if (!j.contains("lambda")) throw SchemaError("missing field 'lambda'");
  const json& jl = j["lambda"];
  if (!jl.is_object()) throw SchemaError("field 'lambda' must be an object {rule, value}");
  reject_unknown_keys(jl, {"rule", "value"}, "'lambda'");
  const std::string rule = jl.at("rule").get<std::string>();
  const double value = require_number(jl, "value");
  if (rule == "fixed") return LambdaRule::fixed(value);
  if (rule == "fraction") {
    if (!(value > 0.0 && value < 1.0))
      throw SchemaError("field 'lambda.value' must lie in (0,1) for rule 'fraction'");
    return LambdaRule::fraction(value);
  }
  throw SchemaError("field 'lambda.rule' must be 'fixed' or 'fraction'");
}

std::string interval_string(const GammaInterval& r) {
  std::string hi = r.hi.is_inf ? "inf" : format_sig17(r.hi.value);
  return "(" + format_sig17(r.lo) + ", " + hi + ")";
}

int run_parsed(const json& cfg, const std::string& outdir) {
  reject_unknown_keys(cfg, {"problem", "gamma", "lambda", "s0", "init_grid", "max_iters",
                            "stop_tol", "seed"},
                      "the configuration");
  if (!cfg.contains("problem")) throw SchemaError("missing field 'problem'");
  const std::string problem = cfg["problem"].get<std::string>();
  const LambdaRule lambda = parse_lambda(cfg);
  const int max_iters = cfg.value("max_iters", 2000);
  const double stop_tol = cfg.value("stop_tol", 1e-9);
  const std::uint64_t seed = cfg.value("seed", static_cast<std::uint64_t>(0));
  if (max_iters <= 0) throw SchemaError("field 'max_iters' must be positive");
  if (!(stop_tol >= 0.0)) throw SchemaError("field 'stop_tol' must be nonnegative");

  if (cfg.contains("s0") == cfg.contains("init_grid"))
    throw SchemaError("exactly one of 's0' and 'init_grid' is required");

  std::filesystem::create_directories(outdir);

  if (problem == "toy-ppa") {
    if (cfg.contains("gamma"))
      throw SchemaError("field 'gamma' is not applicable to problem 'toy-ppa'");
    if (!cfg.contains("s0") || !cfg["s0"].is_array() || cfg["s0"].size() != 2)
      throw SchemaError("field 's0' must be a 2-vector for problem 'toy-ppa'");
    const ToyProblem toy = toy_ppa_problem(2.0, 1.0, true);
    PPPAConfig pcfg;
    pcfg.lambda = lambda;
    pcfg.max_iters = max_iters;
    pcfg.stop_tol = stop_tol;
    pcfg.selection.seed = seed;
    const Vec x0{cfg["s0"][0].get<double>(), cfg["s0"][1].get<double>()};
    const IterateTrace trace =
        run_pppa(toy.t, Preconditioner::identity(2), toy.cert, x0, pcfg);
    write_iterate_csv(trace, (std::filesystem::path(outdir) / "trace.csv").string());
    return 0;
  }

  const double gamma = require_number(cfg, "gamma");
  DrsProblem prob;
  if (problem == "saddle-drs") {
    if (!spectral_lambda_bar_saddle(2.0, -1.0, gamma).has_value())
      throw SchemaError("field 'gamma' outside the admissible window (0.25, 1) of 'saddle-drs'");
    prob = saddle_problem(2.0, -1.0, gamma);
    if (!cfg.contains("s0") || !cfg["s0"].is_array() || cfg["s0"].size() != 2)
      throw SchemaError("field 's0' must be a 2-vector for problem 'saddle-drs'");
    DRSConfig scfg;
    scfg.gamma = gamma;
    scfg.lambda = lambda;
    scfg.max_iters = max_iters;
    scfg.stop_tol = stop_tol;
    scfg.selection.seed = seed;
    const Vec s0{cfg["s0"][0].get<double>(), cfg["s0"][1].get<double>()};
    const DRSTrace trace = run_drs(prob.a, prob.b, prob.cert, s0, scfg);
    write_drs_csv(trace, (std::filesystem::path(outdir) / "trace.csv").string());
    return 0;
  } else {
    prob = drs_problem_by_id(problem);  // throws ConfigError on unknown ids
    const GammaInterval range =
        gamma_range_semi(*prob.params_a, *prob.params_b, prob.a, prob.b);
    if (!range.contains(gamma))
      throw SchemaError("field 'gamma' outside the certified range " + interval_string(range) +
                        " of '" + problem + "'");
  }

  DRSConfig dcfg;
  dcfg.gamma = gamma;
  dcfg.lambda = lambda;
  dcfg.max_iters = max_iters;
  dcfg.stop_tol = stop_tol;
  dcfg.selection.seed = seed;
  if (problem == "stationary") dcfg.selection.mode = ResolventSelection::Mode::UniformRandom;

  std::vector<double> inits;
  if (cfg.contains("s0")) {
    if (!cfg["s0"].is_number()) throw SchemaError("field 's0' must be a number for '" + problem + "'");
    inits.push_back(cfg["s0"].get<double>());
  } else {
    const json& grid = cfg["init_grid"];
    reject_unknown_keys(grid, {"lo", "hi", "count"}, "'init_grid'");
    const double lo = require_number(grid, "lo");
    const double hi = require_number(grid, "hi");
    const int count = grid.at("count").get<int>();
    if (count < 2) throw SchemaError("field 'init_grid.count' must be at least 2");
    for (int i = 0; i < count; ++i) inits.push_back(lo + (hi - lo) * i / (count - 1));
  }

  for (size_t i = 0; i < inits.size(); ++i) {
    dcfg.selection.seed = seed + static_cast<std::uint64_t>(i);
    const DRSTrace trace = run_drs(prob.a, prob.b, prob.cert, Vec{inits[i]}, dcfg);
    const std::string name = inits.size() == 1 ? "trace.csv" : "trace_" + std::to_string(i) + ".csv";
    write_drs_csv(trace, (std::filesystem::path(outdir) / name).string());
  }

  json meta;
  meta["config"] = cfg;
  meta["runs"] = inits.size();
  std::ofstream(std::filesystem::path(outdir) / "run.json") << meta.dump(2) << "\n";
  return 0;
}

}  // namespace

int run_experiment(const std::string& config_path, const std::string& outdir) {
  json cfg;
  try {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "cannot open config file '" << config_path << "'\n";
      return 2;
    }
    cfg = json::parse(in);
  } catch (const json::exception& e) {
    std::cerr << "config parse error: " << e.what() << "\n";
    return 2;
  }
  try {
    return run_parsed(cfg, outdir);
  } catch (const SchemaError& e) {
    std::cerr << "config validation error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "config validation error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config validation error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace semisplit::cli
