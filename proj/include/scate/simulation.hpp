#ifndef SCATE_SIMULATION_HPP
#define SCATE_SIMULATION_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "scate/data.hpp"
#include "scate/learners.hpp"
#include "scate/oracle.hpp"

namespace scate {

enum class CovariateMode { None, Weak, Strong };

CovariateMode parse_mode(const std::string& name);
const char* mode_name(CovariateMode m);

// thrown when a scenario requests probabilities outside [0,1]
struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A fully designed generator cell. The user-facing knobs are (true_alpha,
// true_psi, n, mode, seed); everything else is derived by design_scenario:
// stratum masses, survivor-complier outcome rates, and for covariate modes
// the latent-threshold geometry (two covariates X_j = rho*L + noise, three
// selection classes cut from L at fixed Gaussian thresholds; rho calibrated
// by bisection against the target point-biserial corr(X_j, S), saturating at
// rho = 1 with a flag when the target is out of reach).
struct SimScenario {
  double true_alpha = 0.5;
  double true_psi = 0;
  std::size_t n = 1000;
  CovariateMode mode = CovariateMode::None;
  std::uint64_t seed = 1;

  // derived design
  double target_corr = 0;    // 0.50 weak, 0.85 strong, 0 none
  double rho = 0;            // latent loading actually used
  double achieved_corr = 0;  // population point-biserial at that rho
  bool rho_saturated = false;
  double t1 = 0, t2 = 0;               // latent class thresholds
  std::array<double, 6> strata{};      // stratum masses, Stratum order
  double p0 = 0.5, p1 = 0.5;           // survivor-complier outcome rates
  bool feasible = true;
  std::string infeasible_reason;
};

SimScenario design_scenario(double true_alpha, double true_psi,
                            std::size_t n, CovariateMode mode,
                            std::uint64_t seed);

// throws ScenarioError when the scenario is infeasible
Dataset generate(const SimScenario& sc);

// the covariate-free view of the generator as a one-point discrete law;
// marginals of (Z,S,A,Y) agree with every mode by construction
DiscreteDGP to_discrete_dgp(const SimScenario& sc);

// Exact population quantities of the generator, covariates included: the
// bound functionals average pointwise over the latent posterior, which is a
// one-dimensional integral evaluated by composite Simpson quadrature.
struct ScenarioTruth {
  double alpha = 0, beta = 0, psi = 0, p_always = 0;
  double alpha_l = 0, alpha_u = 0;
  double beta_l = 0, beta_u = 0;
  double psi_l = 0, psi_u = 0;
  bool psi_l_truncated = false, psi_u_truncated = false;
};
ScenarioTruth scenario_truth(const SimScenario& sc,
                             double denominator_floor = 0.01);

struct StudyOptions {
  std::vector<double> alpha_grid;  // empty -> default 0.05..0.95 step 0.05
  std::vector<double> psi_grid;    // empty -> default -1..1 step 0.05
  int reps = 200;
  std::size_t n = 1000;
  CovariateMode mode = CovariateMode::None;
  std::uint64_t seed = 20260825;
  LearnerSpec learner;  // logistic-irls default
  int folds = 5;
  double clip_epsilon = 0.01;
  double denominator_floor = 0.01;
  int workers = 1;
  bool full_scale = false;  // switches empty grids/reps to step 0.01, reps 1000
};

std::vector<double> default_alpha_grid(bool full_scale);
std::vector<double> default_psi_grid(bool full_scale);

struct StudyRow {
  double alpha = 0, psi = 0;
  CovariateMode mode = CovariateMode::None;
  double mean_length = 0;            // mean psi_u - psi_l over successes
  double sign_informative_frac = 0;  // both endpoints strictly same sign
  double trunc_rate = 0;             // either endpoint floor-truncated
  double fail_rate = 0;
  int reps = 0;
  std::size_t n = 0;
  int n_success = 0;
};

struct StudyResult {
  std::vector<StudyRow> rows;
  double study_mean_length = 0;  // over cells with at least one success
  std::size_t cells_with_success = 0;
};

// Per-replication seeds derive from (seed, cell index, rep index), and rows
// reduce in cell order after the parallel phase, so output is identical for
// any worker count.
StudyResult run_study(const StudyOptions& opt);

void write_study_table(const StudyResult& res, const std::string& path);

}  // namespace scate

#endif
