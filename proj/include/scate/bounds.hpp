#ifndef SCATE_BOUNDS_HPP
#define SCATE_BOUNDS_HPP

#include <string>
#include <vector>

#include "scate/data.hpp"
#include "scate/nuisance.hpp"

namespace scate {

// Sign of the phi_0(S) term inside the lower-ITT-bound numerator. The
// displayed estimator in the source material subtracts it, but the plug-in
// target {mu_1 + lambda_0 - lambda_1}_+ requires adding lambda_0; the
// consistency battery against exact closed forms accepts only +1, which is
// therefore the shipped constant (see the sign-resolution test).
inline constexpr double kBetaLowerPhi0Sign = +1.0;

// Per-observation values of the four influence functions for the bounds,
// plus phi_0(S) (whose mean estimates E{lambda_0(X)} = P(always selected)).
// The beta entries are numerators: divide their means by mean(phi0_S).
struct InfluenceComponents {
  std::size_t n = 0;
  double clip_epsilon = 0.01;
  std::vector<double> alpha_l, alpha_u;          // varphi for the alpha bounds
  std::vector<double> beta_l_num, beta_u_num;    // numerator influence values
  std::vector<double> phi0_S;
};

InfluenceComponents influence_components(const NuisanceSet& ns,
                                         const Dataset& ds);
// test hook for the sign resolution; sign must be +1 or -1
InfluenceComponents influence_components_with_sign(const NuisanceSet& ns,
                                                   const Dataset& ds,
                                                   double beta_l_sign);

struct IntervalEstimate {
  double est = 0, se = 0, lo = 0, hi = 0;
  bool zero_variance = false;
};

enum class BoundTarget { AlphaL, AlphaU, BetaL, BetaU, PsiL, PsiU };

// SE conventions: alpha bounds use sd(varphi)/sqrt(n); beta bounds use the
// delta method for the ratio mean(num)/mean(phi0_S); psi bounds use the
// ratio-variance formula with the sign-selected alpha denominator.
IntervalEstimate standard_errors(const InfluenceComponents& ic,
                                 BoundTarget target);

struct BoundsReport {
  std::size_t n = 0;
  double denominator_floor = 0.01;
  double alpha_l = 0, alpha_u = 0;
  double beta_l = 0, beta_u = 0;
  double e_lambda0 = 0;  // mean of phi0_S
  double psi_l = -1, psi_u = 1;
  IntervalEstimate se_alpha_l, se_alpha_u, se_beta_l, se_beta_u, se_psi_l,
      se_psi_u;
  // post-processing flags
  bool alpha_l_clamped = false;
  bool alpha_isotonized = false, beta_isotonized = false;
  bool psi_l_floor_truncated = false, psi_u_floor_truncated = false;
  bool psi_l_range_clamped = false, psi_u_range_clamped = false;

  std::string to_json() const;
};

BoundsReport estimate_bounds(const InfluenceComponents& ic,
                             double denominator_floor = 0.01);

}  // namespace scate

#endif
