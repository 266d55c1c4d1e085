#ifndef SCATE_ORACLE_HPP
#define SCATE_ORACLE_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "scate/data.hpp"

namespace scate {

// The six principal strata admissible under monotonicity, ordered as in the
// stratum table: (S^0,S^1,A^0,A^1) with '.' = undefined.
//   ns  = (0,0,.,.)  never selected
//   sc0 = (0,1,.,0)  selection complier, untreated when selected
//   sc1 = (0,1,.,1)  selection complier, treated when selected
//   nt  = (1,1,0,0)  always selected, never treated
//   sc  = (1,1,0,1)  survivor-complier (the target stratum)
//   at  = (1,1,1,1)  always selected, always treated
enum Stratum : int { kNs = 0, kSc0 = 1, kSc1 = 2, kNt = 3, kSc = 4, kAt = 5 };
inline constexpr int kNumStrata = 6;
inline constexpr const char* kStratumNames[kNumStrata] = {"ns", "sc0", "sc1",
                                                          "nt", "sc", "at"};

// selection/treatment implied by (stratum, z); a = -1 when undefined
inline int stratum_s(int st, int z) {
  return (st >= kNt || (z == 1 && st >= kSc0)) ? 1 : 0;
}
inline int stratum_a(int st, int z) {
  if (stratum_s(st, z) == 0) return -1;
  switch (st) {
    case kSc0: return 0;
    case kSc1: return 1;
    case kNt: return 0;
    case kSc: return z;   // complies with the instrument
    case kAt: return 1;
    default: return -1;
  }
}

// Finite exact data-generating process: a small covariate support, and per
// support point the instrument propensity, the stratum mix, and per-(stratum,
// arm) outcome probabilities P(Y^z = 1 | stratum, x). Y is undefined for ns
// (never selected) and for sc0/sc1 under z=0; those entries are ignored.
// The exclusion restriction is structural: for nt and at the two arms must
// carry the same outcome probability (their treatment does not respond to z).
struct SupportPoint {
  double prob = 1.0;
  std::vector<double> x;  // may be empty (d = 0)
  double pi1 = 0.5;       // P(Z=1 | X=x)
  std::array<double, kNumStrata> strata{};         // sums to 1
  std::array<std::array<double, 2>, kNumStrata> y1{};  // y1[st][z]
};

struct DiscreteDGP {
  std::vector<SupportPoint> points;
  std::size_t dim = 0;

  void validate() const;  // throws std::invalid_argument
};

// Exact observed law: P(X=x_k, Z=z, S=s, A=a, Y=y) for each realizable cell.
struct LawCell {
  int point = 0;
  int z = 0;
  int s = 0;
  int a = -1;  // -1 = undefined
  int y = -1;
  double prob = 0.0;
};
std::vector<LawCell> exact_law(const DiscreteDGP& dgp);

// True nuisance functions at a support point.
struct OracleNuisance {
  double pi1 = 0;
  double lambda[2] = {0, 0};
  double mu[2] = {0, 0};
  double theta1[2] = {0, 0};
  double theta0[2] = {0, 0};
};
OracleNuisance exact_nuisances(const DiscreteDGP& dgp, int point);

// Population estimands and the closed-form bounds.
struct OracleEstimands {
  double alpha = 0;      // P(survivor-complier)
  double p_always = 0;   // P(S^0 = S^1 = 1)
  double psi = 0;        // SCATE (0 when alpha = 0)
  double beta = 0;       // survivor ITT effect (0 when p_always = 0)
  double e_lambda0 = 0;  // E{lambda_0(X)} = p_always under monotonicity
  double alpha_l = 0, alpha_u = 0;
  double beta_l = 0, beta_u = 0;
  double psi_l = -1, psi_u = 1;
  bool psi_l_truncated = false, psi_u_truncated = false;
};
OracleEstimands exact_estimands(const DiscreteDGP& dgp);

// Sampling and deterministic expansion to concrete datasets.
struct SampleDraw {
  Dataset ds;
  std::vector<int> point;  // support index per row
};
SampleDraw sample_dataset(const DiscreteDGP& dgp, std::size_t n,
                          std::uint64_t seed);
// Largest-remainder expansion of the exact law into n rows (no sampling
// noise; row order is deterministic).
SampleDraw expand_law(const DiscreteDGP& dgp, std::size_t n);

// Certification of the sharp mean bounds for one component of a binary-
// outcome two-component mixture H = p F + q G: bounds on the mean under F,
// attaining components, and an exhaustive grid check that no feasible mean
// violates them.
struct MixtureBoundsCert {
  double lower = 0, upper = 0;
  // attaining pairs as cdf-at-0 values: H = p F + q G pointwise
  double f0_for_lower = 0, g0_for_lower = 0;
  double f0_for_upper = 0, g0_for_upper = 0;
  bool mixture_identity_ok = false;  // p F* + q G* == H exactly
  bool grid_ok = false;              // no feasible mean outside the bounds
};
MixtureBoundsCert certify_mixture_mean_bounds(double h_bar, double p);

// Random DGPs for property batteries.
DiscreteDGP random_dgp(std::uint64_t seed, int max_points = 4);
DiscreteDGP random_perfect_prediction_dgp(std::uint64_t seed);  // S = g(X)
// The non-identification witness pair: two one-point DGPs with identical
// observed laws but SCATE psi and psi_other.
DiscreteDGP nonidentification_witness(double psi, double other_rate);

// Named check battery (the `check` subcommand and acceptance criterion 1).
struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};
std::vector<CheckResult> run_check_battery(std::uint64_t seed = 20260825,
                                           bool corrupt_ratio_rule = false);

}  // namespace scate

#endif
