#ifndef SCATE_AGREEMENT_HPP
#define SCATE_AGREEMENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "scate/bounds.hpp"
#include "scate/oracle.hpp"

namespace scate {

// Exact nuisance values attached to each row of a sampled draw; lets the
// influence-function estimators run with zero nuisance-estimation error.
NuisanceSet exact_nuisance_set(const DiscreteDGP& dgp, const SampleDraw& draw);

struct AgreementLine {
  std::string name;  // alpha_l / alpha_u / beta_l / beta_u
  double est = 0, truth = 0, se = 0;
  bool pass = false;  // |est - truth| <= 3 se (se floored at 1e-12)
};

// One DGP, one sample: compare the four bound estimators against the exact
// population bounds within 3 Monte Carlo SEs, for a given beta-lower sign.
std::vector<AgreementLine> estimator_agreement(const DiscreteDGP& dgp,
                                               std::size_t n,
                                               std::uint64_t seed,
                                               double beta_l_sign);

struct SignResolution {
  int dgps = 0;
  std::size_t n = 0;
  bool plus_all_pass = false, minus_all_pass = false;
  std::vector<std::string> failures_plus, failures_minus;
};

// Runs estimator_agreement for both sign candidates over randomized DGPs
// (the same draws for both candidates). Exactly one candidate passing is the
// intended outcome; the shipped constant kBetaLowerPhi0Sign must be it.
SignResolution resolve_beta_l_sign(int n_dgps, std::size_t n,
                                   std::uint64_t seed);

}  // namespace scate

#endif
