// Acceptance gate: six go/no-go criteria with pinned tolerances. Prints one
// [PASS]/[FAIL] line per criterion plus indented sub-checks; exits 0 iff all
// six pass. Run from the repo root, or point --data-dir at the bundled data.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "helpers.hpp"
#include "scate/agreement.hpp"
#include "scate/bounds.hpp"
#include "scate/cli.hpp"
#include "scate/data.hpp"
#include "scate/learners.hpp"
#include "scate/nuisance.hpp"
#include "scate/oracle.hpp"
#include "scate/rng.hpp"
#include "scate/sensitivity.hpp"
#include "scate/simulation.hpp"

using namespace scate;

namespace {

// pinned tolerances
constexpr double kBatteryBudgetSec = 60;
constexpr double kConsistencyBudgetSec = 300;
constexpr double kCoverageBudgetSec = 900;
constexpr double kStudyBudgetSec = 1800;
constexpr int kCoverageReps = 1000;
constexpr std::size_t kCoverageN = 2000;
constexpr double kCoverageLo = 0.925, kCoverageHi = 0.975;
constexpr double kMeanLenTarget[3] = {0.91, 0.58, 0.06};
constexpr double kMeanLenTol[3] = {0.10, 0.10, 0.05};
constexpr double kSpotTol = 0.03;
constexpr double kRowMaxLenFloor = 1.9;
constexpr double kRowMaxAlphaCap = 0.35;
constexpr double kAppAlphaTol = 0.02, kAppBetaTol = 0.03;
constexpr std::uint64_t kSeed = 20260825;

struct Sub {
  bool pass = false;
  std::string text;
};

struct Criterion {
  std::string name;
  std::vector<Sub> subs;
  double secs = 0;
  bool pass() const {
    for (const Sub& s : subs)
      if (!s.pass) return false;
    return true;
  }
  void add(bool p, const std::string& t) { subs.push_back({p, t}); }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string num(double x, const char* f = "%.4g") {
  char b[64];
  std::snprintf(b, sizeof(b), f, x);
  return b;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int hw_workers() {
  const unsigned h = std::thread::hardware_concurrency();
  return h > 0 ? static_cast<int>(h) : 1;
}

// ---- criterion 1: the oracle verification battery -------------------------
Criterion oracle_battery() {
  Criterion c{"1 oracle-battery"};
  const auto t0 = std::chrono::steady_clock::now();
  for (const CheckResult& r : run_check_battery(kSeed))
    c.add(r.pass, r.name + ": " + r.detail);
  c.secs = seconds_since(t0);
  c.add(c.secs < kBatteryBudgetSec,
        "runtime " + num(c.secs) + "s (budget " + num(kBatteryBudgetSec) + "s)");
  return c;
}

// ---- criterion 2: estimator consistency and sign resolution ---------------
Criterion estimator_consistency() {
  Criterion c{"2 estimator-consistency-and-sign"};
  const auto t0 = std::chrono::steady_clock::now();
  const SignResolution sr = resolve_beta_l_sign(20, 100000, kSeed);
  std::string fails;
  for (const std::string& f : sr.failures_plus) fails += "; " + f;
  c.add(sr.plus_all_pass,
        "shipped sign: all 4 bound estimators within 3 MC SEs of the exact "
        "bounds on " + std::to_string(sr.dgps) + " processes at n=" +
            std::to_string(sr.n) + fails);
  c.add(!sr.minus_all_pass,
        "flipped sign candidate rejected (" +
            std::to_string(sr.failures_minus.size()) + " failing comparisons)");
  c.secs = seconds_since(t0);
  c.add(c.secs < kConsistencyBudgetSec,
        "runtime " + num(c.secs) + "s (budget " + num(kConsistencyBudgetSec) +
            "s)");
  return c;
}

// ---- criterion 3: confidence-interval coverage -----------------------------
Criterion ci_coverage() {
  Criterion c{"3 ci-coverage"};
  const auto t0 = std::chrono::steady_clock::now();
  const DiscreteDGP dgp = testhelp::healthy_margin_dgp();
  const OracleEstimands truth = exact_estimands(dgp);
  const double psi_star_truth =
      0.5 * (truth.beta_l + truth.beta_u) * truth.e_lambda0 /
      (0.5 * (truth.alpha_l + truth.alpha_u));
  const LearnerSpec spec = parse_learner("marginal-mean");

  int cov_au = 0, cov_bu = 0, cov_psi = 0;
  for (int r = 0; r < kCoverageReps; ++r) {
    const SampleDraw draw =
        sample_dataset(dgp, kCoverageN, mix_seed(kSeed, 301, r));
    const NuisanceSet ns =
        fit_nuisances(draw.ds, spec,
                      make_folds(kCoverageN, 5, mix_seed(kSeed, 302, r)), 0.01);
    const InfluenceComponents ic = influence_components(ns, draw.ds);
    const IntervalEstimate au = standard_errors(ic, BoundTarget::AlphaU);
    const IntervalEstimate bu = standard_errors(ic, BoundTarget::BetaU);
    const SensitivityCell mid = evaluate_at(ic, 0.5, 0.5);
    if (au.lo <= truth.alpha_u && truth.alpha_u <= au.hi) ++cov_au;
    if (bu.lo <= truth.beta_u && truth.beta_u <= bu.hi) ++cov_bu;
    if (mid.defined && mid.ci_lo <= psi_star_truth &&
        psi_star_truth <= mid.ci_hi)
      ++cov_psi;
  }
  const double denom = kCoverageReps;
  struct Item { const char* what; int hits; double truth; };
  for (const Item& it : {Item{"upper selection-complier proportion bound",
                              cov_au, truth.alpha_u},
                         Item{"upper ITT bound", cov_bu, truth.beta_u},
                         Item{"mid-surface effect value", cov_psi,
                              psi_star_truth}}) {
    const double rate = it.hits / denom;
    c.add(rate >= kCoverageLo && rate <= kCoverageHi,
          std::string(it.what) + ": coverage " + num(rate, "%.3f") + " of " +
              num(it.truth) + " (band [" + num(kCoverageLo, "%.3f") + ", " +
              num(kCoverageHi, "%.3f") + "], " +
              std::to_string(kCoverageReps) + " reps, n=" +
              std::to_string(kCoverageN) + ", K=5)");
  }
  c.secs = seconds_since(t0);
  c.add(c.secs < kCoverageBudgetSec,
        "runtime " + num(c.secs) + "s (budget " + num(kCoverageBudgetSec) +
            "s)");
  return c;
}

// ---- criterion 4: desk-scale replication of the simulation study ----------
std::pair<double, double> spot_mean(double a, double p, std::uint64_t tag,
                                    const LearnerSpec& spec) {
  SimScenario sc = design_scenario(a, p, 1000, CovariateMode::None, 0);
  double sl = 0, su = 0;
  int ok = 0;
  for (int r = 0; r < 200; ++r) {
    sc.seed = mix_seed(kSeed, tag, static_cast<std::uint64_t>(r));
    const Dataset ds = generate(sc);
    const FoldAssignment folds =
        make_folds(ds.n(), 5, mix_seed(sc.seed, 104729, 13));
    const NuisanceSet ns = fit_nuisances(ds, spec, folds, 0.01);
    const BoundsReport b = estimate_bounds(influence_components(ns, ds));
    sl += b.psi_l;
    su += b.psi_u;
    ++ok;
  }
  return {sl / ok, su / ok};
}

Criterion study_replication() {
  Criterion c{"4 simulation-study-desk-scale"};
  const auto t0 = std::chrono::steady_clock::now();
  const LearnerSpec spec = parse_learner("logistic-irls");

  StudyResult none_res;
  const CovariateMode modes[3] = {CovariateMode::None, CovariateMode::Weak,
                                  CovariateMode::Strong};
  for (int m = 0; m < 3; ++m) {
    StudyOptions opt;
    opt.reps = 200;
    opt.n = 1000;
    opt.mode = modes[m];
    opt.seed = kSeed;
    opt.learner = spec;
    opt.workers = hw_workers();
    const StudyResult res = run_study(opt);
    if (m == 0) none_res = res;
    const double lo = kMeanLenTarget[m] - kMeanLenTol[m];
    const double hi = kMeanLenTarget[m] + kMeanLenTol[m];
    c.add(res.study_mean_length >= lo && res.study_mean_length <= hi,
          std::string("mode=") + mode_name(modes[m]) + " study mean length " +
              num(res.study_mean_length, "%.4f") + " (target " +
              num(kMeanLenTarget[m]) + " +- " + num(kMeanLenTol[m]) + ", " +
              std::to_string(res.cells_with_success) + " cells)");
  }

  struct Spot { double a, p, want_l, want_u; };
  const Spot spots[3] = {{0.65, 0.10, 0.04, 0.26},
                         {0.75, 0.10, 0.04, 0.18},
                         {0.65, 0.20, 0.06, 0.42}};
  for (int k = 0; k < 3; ++k) {
    const auto [ml, mu] =
        spot_mean(spots[k].a, spots[k].p,
                  5000 + static_cast<std::uint64_t>(k), spec);
    const std::string cell = "(alpha=" + num(spots[k].a) + ", effect=" +
                             num(spots[k].p) + ")";
    c.add(std::fabs(ml - spots[k].want_l) <= kSpotTol,
          cell + " mean lower endpoint " + num(ml, "%.4f") +
              " (reference " + num(spots[k].want_l) + " +- " + num(kSpotTol) +
              ")");
    c.add(std::fabs(mu - spots[k].want_u) <= kSpotTol,
          cell + " mean upper endpoint " + num(mu, "%.4f") +
              " (reference " + num(spots[k].want_u) + " +- " + num(kSpotTol) +
              ")");
  }

  // near-total ambiguity region: each low-alpha row must reach length >= 1.9
  // somewhere along the effect grid (mode none)
  for (double arow = 0.05; arow <= kRowMaxAlphaCap + 1e-9; arow += 0.05) {
    double best = 0;
    for (const StudyRow& r : none_res.rows)
      if (std::fabs(r.alpha - arow) < 1e-9 && r.n_success > 0)
        best = std::max(best, r.mean_length);
    c.add(best >= kRowMaxLenFloor,
          "alpha=" + num(arow, "%.2f") + " row max mean length " +
              num(best, "%.4f") + " (floor " + num(kRowMaxLenFloor) + ")");
  }

  c.secs = seconds_since(t0);
  c.add(c.secs < kStudyBudgetSec,
        "runtime " + num(c.secs) + "s (budget " + num(kStudyBudgetSec) + "s)");
  return c;
}

// ---- criterion 5: calibrated application dataset regression ---------------
Criterion application_regression(const std::string& data_dir) {
  Criterion c{"5 application-dataset-regression"};
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset ds = load_dataset(data_dir + "/icu_synthetic.csv", Schema{});
  const NuisanceSet ns =
      fit_nuisances(ds, parse_learner("logistic-irls"),
                    make_folds(ds.n(), 5, kSeed), 0.01);
  const BoundsReport r = estimate_bounds(influence_components(ns, ds));

  c.add(std::fabs(r.alpha_l - 0.0) <= kAppAlphaTol &&
            std::fabs(r.alpha_u - 0.08) <= kAppAlphaTol,
        "proportion bounds (" + num(r.alpha_l, "%.4f") + ", " +
            num(r.alpha_u, "%.4f") + ") within +-" + num(kAppAlphaTol) +
            " of (0, 0.08)");
  c.add(std::fabs(r.beta_l - (-0.19)) <= kAppBetaTol &&
            std::fabs(r.beta_u - 0.06) <= kAppBetaTol,
        "ITT bounds (" + num(r.beta_l, "%.4f") + ", " + num(r.beta_u, "%.4f") +
            ") within +-" + num(kAppBetaTol) + " of (-0.19, 0.06)");
  c.add(r.psi_l == -1.0 && r.psi_u == 1.0 && r.psi_l_floor_truncated &&
            r.psi_u_floor_truncated,
        "effect bounds truncated to [-1, 1] with both truncation flags set");
  c.secs = seconds_since(t0);
  return c;
}

// ---- criterion 6: byte-identical reruns ------------------------------------
Criterion determinism(const std::string& data_dir) {
  Criterion c{"6 determinism"};
  const auto t0 = std::chrono::steady_clock::now();

  RunConfig est;
  est.input = data_dir + "/icu_synthetic.csv";
  est.output_dir = testhelp::scratch_dir("acc_est_a");
  RunConfig est2 = est;
  est2.output_dir = testhelp::scratch_dir("acc_est_b");
  bool est_ok = cmd_estimate(est) == 0 && cmd_estimate(est2) == 0;
  for (const char* f : {"bounds.json", "sensitivity.csv", "diagnostics.txt"})
    est_ok = est_ok && slurp(est.output_dir + "/" + f) ==
                           slurp(est2.output_dir + "/" + f) &&
             !slurp(est.output_dir + "/" + f).empty();
  c.add(est_ok, "estimate rerun: all three artifacts byte-identical");

  RunConfig sim;
  sim.output_dir = testhelp::scratch_dir("acc_sim_a");
  sim.alpha_grid = {0.3, 0.65};
  sim.psi_grid = {-0.1, 0.1};
  sim.reps = 2;
  sim.n = 300;
  sim.learner = "marginal-mean";
  sim.folds = 2;
  sim.seed = kSeed;
  sim.seed_set = true;
  sim.workers = 1;
  RunConfig sim2 = sim;
  sim2.output_dir = testhelp::scratch_dir("acc_sim_b");
  sim2.workers = 4;
  const bool sim_ok =
      cmd_simulate(sim) == 0 && cmd_simulate(sim2) == 0 &&
      slurp(sim.output_dir + "/study_none.csv") ==
          slurp(sim2.output_dir + "/study_none.csv") &&
      !slurp(sim.output_dir + "/study_none.csv").empty();
  c.add(sim_ok, "simulate rerun with different worker counts: byte-identical");
  c.secs = seconds_since(t0);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::string data_dir = "data";
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--data-dir") == 0 && i + 1 < argc)
      data_dir = argv[++i];
    else if (std::strncmp(argv[i], "--data-dir=", 11) == 0)
      data_dir = argv[i] + 11;
  }

  std::vector<Criterion> crits;
  crits.push_back(oracle_battery());
  crits.push_back(estimator_consistency());
  crits.push_back(ci_coverage());
  crits.push_back(study_replication());
  crits.push_back(application_regression(data_dir));
  crits.push_back(determinism(data_dir));

  bool all = true;
  for (const Criterion& c : crits) {
    const bool p = c.pass();
    all = all && p;
    std::printf("[%s] %s (%.1fs)\n", p ? "PASS" : "FAIL", c.name.c_str(),
                c.secs);
    for (const Sub& s : c.subs)
      std::printf("    %s %s\n", s.pass ? "ok  " : "FAIL", s.text.c_str());
  }
  std::printf("%s\n", all ? "ACCEPTANCE: all criteria passed"
                          : "ACCEPTANCE: some criteria FAILED");
  return all ? 0 : 1;
}
