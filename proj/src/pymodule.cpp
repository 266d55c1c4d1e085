// Thin python veneer over the library: estimate / sensitivity / simulate /
// check, mirroring the CLI subcommands but returning plain dicts.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "scate/bounds.hpp"
#include "scate/cli.hpp"
#include "scate/data.hpp"
#include "scate/learners.hpp"
#include "scate/nuisance.hpp"
#include "scate/oracle.hpp"
#include "scate/sensitivity.hpp"
#include "scate/simulation.hpp"

namespace py = pybind11;
using namespace scate;

namespace {

py::object none_if_nan(double x) {
  if (!std::isfinite(x)) return py::none();
  return py::float_(x);
}

py::dict interval_dict(const IntervalEstimate& e) {
  py::dict d;
  d["est"] = none_if_nan(e.est);
  d["se"] = none_if_nan(e.se);
  d["lo"] = none_if_nan(e.lo);
  d["hi"] = none_if_nan(e.hi);
  d["zero_variance"] = e.zero_variance;
  return d;
}

InfluenceComponents components_from_file(const std::string& input,
                                         const std::vector<std::string>& covariates,
                                         const std::string& learner, int folds,
                                         double clip_eps, std::uint64_t seed) {
  Schema sch;
  sch.covariate_cols = covariates;
  const Dataset ds = load_dataset(input, sch);
  const NuisanceSet ns = fit_nuisances(ds, parse_learner(learner),
                                       make_folds(ds.n(), folds, seed),
                                       clip_eps);
  return influence_components(ns, ds);
}

py::dict estimate(const std::string& input,
                  const std::vector<std::string>& covariates,
                  const std::string& learner, int folds, double clip_eps,
                  double denominator_floor, std::uint64_t seed) {
  const InfluenceComponents ic =
      components_from_file(input, covariates, learner, folds, clip_eps, seed);
  const BoundsReport r = estimate_bounds(ic, denominator_floor);
  py::dict d;
  d["n"] = r.n;
  d["alpha_l"] = r.alpha_l;
  d["alpha_u"] = r.alpha_u;
  d["beta_l"] = r.beta_l;
  d["beta_u"] = r.beta_u;
  d["psi_l"] = r.psi_l;
  d["psi_u"] = r.psi_u;
  d["e_lambda0"] = r.e_lambda0;
  d["se_alpha_l"] = interval_dict(r.se_alpha_l);
  d["se_alpha_u"] = interval_dict(r.se_alpha_u);
  d["se_beta_l"] = interval_dict(r.se_beta_l);
  d["se_beta_u"] = interval_dict(r.se_beta_u);
  d["se_psi_l"] = interval_dict(r.se_psi_l);
  d["se_psi_u"] = interval_dict(r.se_psi_u);
  d["alpha_l_clamped"] = r.alpha_l_clamped;
  d["alpha_isotonized"] = r.alpha_isotonized;
  d["beta_isotonized"] = r.beta_isotonized;
  d["psi_l_floor_truncated"] = r.psi_l_floor_truncated;
  d["psi_u_floor_truncated"] = r.psi_u_floor_truncated;
  d["psi_l_range_clamped"] = r.psi_l_range_clamped;
  d["psi_u_range_clamped"] = r.psi_u_range_clamped;
  return d;
}

py::list sensitivity(const std::string& input,
                     const std::vector<std::string>& covariates,
                     const std::string& learner, int folds, double clip_eps,
                     double denominator_floor, std::uint64_t seed,
                     std::size_t grid) {
  const InfluenceComponents ic =
      components_from_file(input, covariates, learner, folds, clip_eps, seed);
  const SensitivityGrid g = evaluate_grid(ic, grid, grid, denominator_floor);
  py::list out;
  for (const SensitivityCell& c : g.cells) {
    py::dict d;
    d["delta1"] = c.delta1;
    d["delta2"] = c.delta2;
    d["alpha_star"] = none_if_nan(c.alpha_star);
    d["beta_star"] = none_if_nan(c.beta_star);
    d["psi_star"] = none_if_nan(c.psi_star);
    d["se"] = none_if_nan(c.se);
    d["ci_lo"] = none_if_nan(c.ci_lo);
    d["ci_hi"] = none_if_nan(c.ci_hi);
    d["rejects_zero"] = c.rejects_zero;
    d["defined"] = c.defined;
    out.append(d);
  }
  return out;
}

py::dict simulate(const std::vector<double>& alpha_grid,
                  const std::vector<double>& psi_grid, int reps, std::size_t n,
                  const std::string& mode, std::uint64_t seed,
                  const std::string& learner, int folds, int workers) {
  StudyOptions opt;
  opt.alpha_grid = alpha_grid;
  opt.psi_grid = psi_grid;
  opt.reps = reps;
  opt.n = n;
  opt.mode = parse_mode(mode);
  opt.seed = seed;
  opt.learner = parse_learner(learner);
  opt.folds = folds;
  opt.workers = workers;
  const StudyResult res = run_study(opt);
  py::list rows;
  for (const StudyRow& r : res.rows) {
    py::dict d;
    d["alpha"] = r.alpha;
    d["psi"] = r.psi;
    d["mode"] = mode_name(r.mode);
    d["mean_length"] = none_if_nan(r.mean_length);
    d["sign_informative_frac"] = none_if_nan(r.sign_informative_frac);
    d["trunc_rate"] = none_if_nan(r.trunc_rate);
    d["fail_rate"] = r.fail_rate;
    d["reps"] = r.reps;
    d["n"] = r.n;
    d["n_success"] = r.n_success;
    rows.append(d);
  }
  py::dict out;
  out["rows"] = rows;
  out["study_mean_length"] = none_if_nan(res.study_mean_length);
  out["cells_with_success"] = res.cells_with_success;
  return out;
}

py::dict check(std::uint64_t seed, bool corrupt_ratio_rule) {
  py::list items;
  bool all = true;
  for (const CheckResult& c : run_check_battery(seed, corrupt_ratio_rule)) {
    py::dict d;
    d["name"] = c.name;
    d["pass"] = c.pass;
    d["detail"] = c.detail;
    items.append(d);
    all = all && c.pass;
  }
  py::dict out;
  out["checks"] = items;
  out["all_pass"] = all;
  return out;
}

py::dict summary(const std::string& input,
                 const std::vector<std::string>& covariates) {
  Schema sch;
  sch.covariate_cols = covariates;
  const Dataset ds = load_dataset(input, sch);
  const Summary s = summarize(ds);
  py::dict d;
  d["n"] = ds.n();
  d["dim"] = ds.dim();
  d["json"] = s.to_json();
  d["text"] = s.to_text();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "IV bounds for the survivor-complier treatment effect under "
            "selection: estimation, sensitivity surface, simulation study, "
            "and the self-verification battery";

  m.def("estimate", &estimate, py::arg("input"),
        py::arg("covariates") = std::vector<std::string>{},
        py::arg("learner") = "logistic-irls", py::arg("folds") = 5,
        py::arg("clip_eps") = 0.01, py::arg("denominator_floor") = 0.01,
        py::arg("seed") = 20260825,
        "Estimate the bound set from a CSV file; returns a dict mirroring "
        "bounds.json");

  m.def("sensitivity", &sensitivity, py::arg("input"),
        py::arg("covariates") = std::vector<std::string>{},
        py::arg("learner") = "logistic-irls", py::arg("folds") = 5,
        py::arg("clip_eps") = 0.01, py::arg("denominator_floor") = 0.01,
        py::arg("seed") = 20260825, py::arg("grid") = 21,
        "Evaluate the sensitivity surface; returns a list of cell dicts in "
        "delta1-major order");

  m.def("simulate", &simulate, py::arg("alpha_grid") = std::vector<double>{},
        py::arg("psi_grid") = std::vector<double>{}, py::arg("reps") = 200,
        py::arg("n") = 1000, py::arg("mode") = "none",
        py::arg("seed") = 20260825, py::arg("learner") = "logistic-irls",
        py::arg("folds") = 5, py::arg("workers") = 1,
        "Run the Monte Carlo study over an (alpha, effect) grid; empty grids "
        "use the desk-scale defaults");

  m.def("check", &check, py::arg("seed") = 20260825,
        py::arg("corrupt_ratio_rule") = false,
        "Run the oracle verification battery; corrupt_ratio_rule=True is the "
        "negative control");

  m.def("summary", &summary, py::arg("input"),
        py::arg("covariates") = std::vector<std::string>{},
        "Per-arm descriptive margins of a dataset");
}
