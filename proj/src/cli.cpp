#include "scate/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "scate/agreement.hpp"
#include "scate/bounds.hpp"
#include "scate/data.hpp"
#include "scate/nuisance.hpp"
#include "scate/rng.hpp"
#include "scate/sensitivity.hpp"
#include "scate/simulation.hpp"

namespace scate {
namespace {

using nlohmann::json;

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  return out;
}

std::filesystem::path out_path(const RunConfig& cfg, const char* name) {
  return std::filesystem::path(cfg.output_dir) / name;
}

void write_text(const std::filesystem::path& p, const std::string& body) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot open for writing: " + p.string());
  out << body;
  if (!out) throw std::runtime_error("write failed: " + p.string());
}

}  // namespace

std::vector<double> parse_grid_spec(const std::string& spec) {
  std::vector<double> vals;
  if (spec.empty()) return vals;
  if (spec.find(':') != std::string::npos) {
    double lo = 0, hi = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream is(spec);
    if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' ||
        !(step > 0) || hi < lo)
      throw std::invalid_argument("bad grid spec (want lo:hi:step): " + spec);
    const int k = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
    for (int i = 0; i <= k; ++i) vals.push_back(lo + i * step);
    return vals;
  }
  std::istringstream is(spec);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    if (tok.empty()) continue;
    vals.push_back(std::stod(tok));
  }
  if (vals.empty()) throw std::invalid_argument("empty grid spec: " + spec);
  return vals;
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  json j;
  in >> j;
  if (!j.is_object()) throw std::runtime_error("config must be a JSON object");
  for (const auto& [key, val] : j.items()) {
    if (key == "input") cfg.input = val.get<std::string>();
    else if (key == "output_dir") cfg.output_dir = val.get<std::string>();
    else if (key == "z_col") cfg.z_col = val.get<std::string>();
    else if (key == "s_col") cfg.s_col = val.get<std::string>();
    else if (key == "a_col") cfg.a_col = val.get<std::string>();
    else if (key == "y_col") cfg.y_col = val.get<std::string>();
    else if (key == "covariates") cfg.covariates = val.get<std::vector<std::string>>();
    else if (key == "learner") cfg.learner = val.get<std::string>();
    else if (key == "folds") cfg.folds = val.get<int>();
    else if (key == "clip_eps") cfg.clip_eps = val.get<double>();
    else if (key == "denominator_floor") cfg.denominator_floor = val.get<double>();
    else if (key == "grid") cfg.grid = val.get<std::size_t>();
    else if (key == "alpha_grid") {
      if (val.is_string()) cfg.alpha_grid = parse_grid_spec(val.get<std::string>());
      else cfg.alpha_grid = val.get<std::vector<double>>();
    } else if (key == "psi_grid") {
      if (val.is_string()) cfg.psi_grid = parse_grid_spec(val.get<std::string>());
      else cfg.psi_grid = val.get<std::vector<double>>();
    } else if (key == "reps") cfg.reps = val.get<int>();
    else if (key == "n") cfg.n = val.get<std::size_t>();
    else if (key == "mode") cfg.mode = val.get<std::string>();
    else if (key == "full_scale") cfg.full_scale = val.get<bool>();
    else if (key == "seed") {
      cfg.seed = val.get<std::uint64_t>();
      cfg.seed_set = true;
    } else if (key == "workers") cfg.workers = val.get<int>();
    else if (key == "corrupt_denominator_rule") cfg.corrupt_denominator_rule = val.get<bool>();
    else if (key == "dgp") cfg.dgp_file = val.get<std::string>();
    else if (key == "resolver_dgps") cfg.resolver_dgps = val.get<int>();
    else if (key == "resolver_n") cfg.resolver_n = val.get<std::size_t>();
    else throw std::runtime_error("unknown config key: " + key);
  }
}

DiscreteDGP load_dgp_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open DGP file: " + path);
  json j;
  in >> j;
  DiscreteDGP dgp;
  dgp.dim = j.value("dim", std::size_t{0});
  if (!j.contains("points") || !j["points"].is_array())
    throw std::runtime_error("DGP file needs a 'points' array");
  for (const auto& jp : j["points"]) {
    SupportPoint pt;
    pt.prob = jp.at("prob").get<double>();
    if (jp.contains("x")) pt.x = jp["x"].get<std::vector<double>>();
    pt.pi1 = jp.value("pi1", 0.5);
    const auto strata = jp.at("strata").get<std::vector<double>>();
    if (strata.size() != kNumStrata)
      throw std::runtime_error("strata must list 6 values (ns,sc0,sc1,nt,sc,at)");
    for (int st = 0; st < kNumStrata; ++st)
      pt.strata[static_cast<std::size_t>(st)] = strata[static_cast<std::size_t>(st)];
    const auto y1 = jp.at("y1").get<std::vector<std::vector<double>>>();
    if (y1.size() != kNumStrata)
      throw std::runtime_error("y1 must list 6 (z=0,z=1) pairs");
    for (int st = 0; st < kNumStrata; ++st) {
      if (y1[static_cast<std::size_t>(st)].size() != 2)
        throw std::runtime_error("each y1 entry must be a (z=0,z=1) pair");
      for (int z = 0; z < 2; ++z)
        pt.y1[static_cast<std::size_t>(st)][static_cast<std::size_t>(z)] =
            y1[static_cast<std::size_t>(st)][static_cast<std::size_t>(z)];
    }
    dgp.points.push_back(pt);
  }
  dgp.validate();
  return dgp;
}

int resolve_workers(const RunConfig& cfg) {
  if (cfg.workers > 0) return cfg.workers;
  if (const char* env = std::getenv("SCATE_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

int cmd_estimate(const RunConfig& cfg) {
  if (cfg.input.empty()) throw std::runtime_error("estimate needs --input");
  Schema sch;
  sch.z_col = cfg.z_col;
  sch.s_col = cfg.s_col;
  sch.a_col = cfg.a_col;
  sch.y_col = cfg.y_col;
  sch.covariate_cols = cfg.covariates;
  const Dataset ds = load_dataset(cfg.input, sch);
  const Summary sum = summarize(ds);
  const LearnerSpec spec = parse_learner(cfg.learner);
  const FoldAssignment folds = make_folds(ds.n(), cfg.folds, cfg.seed);
  const NuisanceSet ns = fit_nuisances(ds, spec, folds, cfg.clip_eps);
  const InfluenceComponents ic = influence_components(ns, ds);
  const BoundsReport rep = estimate_bounds(ic, cfg.denominator_floor);
  const MarginDiagnostics md = margin_diagnostics(ns);

  std::filesystem::create_directories(cfg.output_dir);

  std::vector<std::string> warnings = ns.warnings;
  if (ns.no_split_diagnostic)
    warnings.push_back("K=1: no cross-fitting (diagnostic mode)");
  if (rep.psi_l_floor_truncated)
    warnings.push_back("lower effect bound truncated to -1 (denominator at or below floor)");
  if (rep.psi_u_floor_truncated)
    warnings.push_back("upper effect bound truncated to +1 (denominator at or below floor)");
  if (rep.alpha_isotonized || rep.beta_isotonized)
    warnings.push_back("crossed bound pair isotonized to its midpoint");
  if (md.fragile)
    warnings.push_back("fragile margins: >25% of observations within 0.05 of an indicator boundary");

  std::string grid_note;
  bool have_grid = false;
  try {
    const SensitivityGrid grid =
        evaluate_grid(ic, cfg.grid, cfg.grid, cfg.denominator_floor);
    export_grid(grid, out_path(cfg, "sensitivity.csv").string());
    have_grid = true;
  } catch (const std::runtime_error& e) {
    grid_note = e.what();
    warnings.push_back(std::string("sensitivity grid skipped: ") + e.what());
  }

  std::ostringstream js;
  js << "{\n\"summary\": " << sum.to_json() << ",\n\"bounds\": "
     << rep.to_json() << ",\n\"margins\": " << md.to_json()
     << ",\n\"warnings\": [";
  for (std::size_t i = 0; i < warnings.size(); ++i)
    js << (i ? ", " : "") << '"' << json_escape(warnings[i]) << '"';
  js << "]\n}\n";
  write_text(out_path(cfg, "bounds.json"), js.str());

  std::ostringstream diag;
  diag << sum.to_text() << "\n" << md.to_text() << "\n";
  char line[256];
  std::snprintf(line, sizeof(line),
                "alpha_bounds=[%.6g, %.6g]\nbeta_bounds=[%.6g, %.6g]\n"
                "psi_bounds=[%.6g, %.6g]\n",
                rep.alpha_l, rep.alpha_u, rep.beta_l, rep.beta_u, rep.psi_l,
                rep.psi_u);
  diag << line;
  if (!have_grid) diag << "sensitivity_grid=skipped (" << grid_note << ")\n";
  for (const auto& w : warnings) diag << "warning: " << w << "\n";
  write_text(out_path(cfg, "diagnostics.txt"), diag.str());

  std::cout << "n=" << ds.n() << " covariates=" << ds.dim() << " learner="
            << cfg.learner << " folds=" << cfg.folds << "\n";
  std::cout << line;
  if (rep.psi_l_floor_truncated || rep.psi_u_floor_truncated)
    std::cout << "note: effect bounds truncated (weak instrument signal)\n";
  std::cout << "wrote " << out_path(cfg, "bounds.json").string();
  if (have_grid) std::cout << ", " << out_path(cfg, "sensitivity.csv").string();
  std::cout << ", " << out_path(cfg, "diagnostics.txt").string() << "\n";
  return 0;
}

int cmd_simulate(const RunConfig& cfg) {
  if (!cfg.seed_set) {
    std::cerr << "simulate requires an explicit seed (--seed or config key)\n";
    return 2;
  }
  std::vector<CovariateMode> modes;
  if (cfg.mode == "all")
    modes = {CovariateMode::None, CovariateMode::Weak, CovariateMode::Strong};
  else
    modes = {parse_mode(cfg.mode)};

  std::filesystem::create_directories(cfg.output_dir);
  std::size_t total_success = 0;
  for (const CovariateMode mode : modes) {
    StudyOptions opt;
    opt.alpha_grid = cfg.alpha_grid;
    opt.psi_grid = cfg.psi_grid;
    opt.reps = cfg.reps > 0 ? cfg.reps : (cfg.full_scale ? 1000 : 200);
    opt.n = cfg.n;
    opt.mode = mode;
    opt.seed = cfg.seed;
    opt.learner = parse_learner(cfg.learner);
    opt.folds = cfg.folds;
    opt.clip_epsilon = cfg.clip_eps;
    opt.denominator_floor = cfg.denominator_floor;
    opt.workers = resolve_workers(cfg);
    opt.full_scale = cfg.full_scale;
    const StudyResult res = run_study(opt);
    const std::string fname = std::string("study_") + mode_name(mode) + ".csv";
    write_study_table(res, out_path(cfg, fname.c_str()).string());
    total_success += res.cells_with_success;
    char line[200];
    std::snprintf(line, sizeof(line),
                  "mode=%s mean_length=%.6g cells_with_success=%zu/%zu "
                  "reps=%d n=%zu\n",
                  mode_name(mode), res.study_mean_length,
                  res.cells_with_success, res.rows.size(), opt.reps, opt.n);
    std::cout << line << "wrote " << out_path(cfg, fname.c_str()).string()
              << "\n";
  }
  if (total_success == 0) {
    std::cerr << "every cell failed\n";
    return 1;
  }
  return 0;
}

int cmd_check(const RunConfig& cfg) {
  bool all_pass = true;
  auto report = [&](const std::string& name, bool pass,
                    const std::string& detail) {
    all_pass = all_pass && pass;
    std::cout << (pass ? "[ OK ] " : "[FAIL] ") << name
              << (detail.empty() ? "" : " - " + detail) << "\n";
  };

  for (const CheckResult& c :
       run_check_battery(cfg.seed, cfg.corrupt_denominator_rule))
    report(c.name, c.pass, c.detail);

  if (!cfg.dgp_file.empty()) {
    const DiscreteDGP dgp = load_dgp_json(cfg.dgp_file);
    const OracleEstimands e = exact_estimands(dgp);
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "alpha=%.6g beta=%.6g psi=%.6g bounds a[%.6g,%.6g] "
                  "b[%.6g,%.6g] psi[%.6g,%.6g]",
                  e.alpha, e.beta, e.psi, e.alpha_l, e.alpha_u, e.beta_l,
                  e.beta_u, e.psi_l, e.psi_u);
    report("user-dgp-decomposition-identity",
           std::fabs(e.psi * e.alpha - e.beta * e.p_always) <= 1e-10, buf);
    report("user-dgp-bounds-contain-truth",
           e.alpha >= e.alpha_l - 1e-12 && e.alpha <= e.alpha_u + 1e-12 &&
               e.beta >= e.beta_l - 1e-12 && e.beta <= e.beta_u + 1e-12 &&
               e.psi >= e.psi_l - 1e-12 && e.psi <= e.psi_u + 1e-12,
           "");
  }

  if (cfg.resolver_dgps > 0) {
    const SignResolution sr = resolve_beta_l_sign(
        cfg.resolver_dgps, cfg.resolver_n, mix_seed(cfg.seed, 99, 0));
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%d processes at n=%zu", sr.dgps, sr.n);
    report("estimator-agreement-shipped-sign", sr.plus_all_pass,
           sr.plus_all_pass ? std::string(buf) : sr.failures_plus.front());
    report("sign-resolution-unique", sr.plus_all_pass && !sr.minus_all_pass,
           "flipped candidate fails on " +
               std::to_string(sr.failures_minus.size()) + " comparisons");
  }

  std::cout << (all_pass ? "all checks passed" : "SOME CHECKS FAILED") << "\n";
  return all_pass ? 0 : 1;
}

}  // namespace scate
