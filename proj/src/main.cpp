#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "scate/cli.hpp"

namespace {

// --config is applied before flag parsing so that flags override file values
std::string find_config_arg(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return "";
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Partial-identification bounds and sensitivity analysis for "
      "survivor-complier treatment effects under instrument-driven "
      "selection"};
  app.require_subcommand(1);

  scate::RunConfig cfg;
  const std::string config_path = find_config_arg(argc, argv);
  if (!config_path.empty()) {
    try {
      scate::apply_config_file(cfg, config_path);
    } catch (const std::exception& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    }
  }

  std::string covariates_csv, alpha_spec, psi_spec, config_sink;

  auto add_shared = [&](CLI::App* sub) {
    sub->add_option("--config", config_sink, "JSON config file (flags win)");
    sub->add_option("--seed", cfg.seed, "RNG seed (all randomness flows from it)");
    sub->add_option("--workers", cfg.workers,
                    "worker threads (0 = SCATE_WORKERS env, then hardware)");
    sub->add_option("--output-dir", cfg.output_dir, "output directory");
  };

  CLI::App* est = app.add_subcommand(
      "estimate", "estimate bounds and the sensitivity surface from a CSV");
  add_shared(est);
  est->add_option("--input", cfg.input, "input CSV file");
  est->add_option("--z-col", cfg.z_col, "instrument column");
  est->add_option("--s-col", cfg.s_col, "selection column");
  est->add_option("--a-col", cfg.a_col, "treatment column (NA when unselected)");
  est->add_option("--y-col", cfg.y_col, "outcome column (NA when unselected)");
  est->add_option("--covariates", covariates_csv,
                  "comma-separated covariate columns (omit for none)");
  est->add_option("--learner", cfg.learner,
                  "marginal-mean | logistic-irls | knn");
  est->add_option("--folds", cfg.folds, "cross-fitting folds (1 = diagnostic)");
  est->add_option("--clip-eps", cfg.clip_eps, "propensity clipping epsilon");
  est->add_option("--grid", cfg.grid, "sensitivity grid points per axis");
  est->add_option("--denominator-floor", cfg.denominator_floor,
                  "ratio denominator floor before truncation");

  CLI::App* sim = app.add_subcommand(
      "simulate", "replication study of bound length over (alpha, psi) cells");
  add_shared(sim);
  sim->add_option("--alpha-grid", alpha_spec, "lo:hi:step or comma list");
  sim->add_option("--psi-grid", psi_spec, "lo:hi:step or comma list");
  sim->add_option("--reps", cfg.reps, "replications per cell (0 = scale default)");
  sim->add_option("--n", cfg.n, "sample size per replication");
  sim->add_option("--mode", cfg.mode, "none | weak | strong | all");
  sim->add_option("--learner", cfg.learner,
                  "marginal-mean | logistic-irls | knn");
  sim->add_option("--folds", cfg.folds, "cross-fitting folds");
  sim->add_option("--clip-eps", cfg.clip_eps, "propensity clipping epsilon");
  sim->add_flag("--full-scale", cfg.full_scale,
                "0.01 grid steps and 1000 reps (long run)");

  CLI::App* chk = app.add_subcommand(
      "check", "exact-law verification battery and estimator agreement");
  add_shared(chk);
  chk->add_option("--dgp", cfg.dgp_file,
                  "JSON description of a discrete generating process to certify");
  chk->add_flag("--corrupt-denominator-rule", cfg.corrupt_denominator_rule,
                "negative-control fixture: flip the ratio denominator rule");

  CLI11_PARSE(app, argc, argv);

  if (!covariates_csv.empty()) cfg.covariates = split_commas(covariates_csv);
  try {
    if (!alpha_spec.empty()) cfg.alpha_grid = scate::parse_grid_spec(alpha_spec);
    if (!psi_spec.empty()) cfg.psi_grid = scate::parse_grid_spec(psi_spec);
  } catch (const std::exception& e) {
    std::cerr << "grid error: " << e.what() << "\n";
    return 2;
  }
  if (sim->parsed() && sim->count("--seed") > 0) cfg.seed_set = true;

  try {
    if (est->parsed()) return scate::cmd_estimate(cfg);
    if (sim->parsed()) return scate::cmd_simulate(cfg);
    return scate::cmd_check(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
