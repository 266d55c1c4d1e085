#include "scate/agreement.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "scate/rng.hpp"

namespace scate {

NuisanceSet exact_nuisance_set(const DiscreteDGP& dgp, const SampleDraw& draw) {
  const std::size_t n = draw.ds.n();
  if (draw.point.size() != n)
    throw std::invalid_argument("draw point index size mismatch");
  NuisanceSet ns;
  ns.n = n;
  ns.clip_epsilon = 0.0;  // exact propensities are already interior
  ns.pi1.resize(n);
  for (int z = 0; z < 2; ++z) {
    ns.lambda[z].resize(n);
    ns.mu[z].resize(n);
    ns.theta1[z].resize(n);
    ns.theta0[z].resize(n);
  }
  std::vector<OracleNuisance> per_point(dgp.points.size());
  for (std::size_t k = 0; k < dgp.points.size(); ++k)
    per_point[k] = exact_nuisances(dgp, static_cast<int>(k));
  for (std::size_t i = 0; i < n; ++i) {
    const OracleNuisance& nu = per_point[static_cast<std::size_t>(draw.point[i])];
    ns.pi1[i] = nu.pi1;
    for (int z = 0; z < 2; ++z) {
      ns.lambda[z][i] = nu.lambda[z];
      ns.mu[z][i] = nu.mu[z];
      ns.theta1[z][i] = nu.theta1[z];
      ns.theta0[z][i] = nu.theta0[z];
    }
  }
  return ns;
}

std::vector<AgreementLine> estimator_agreement(const DiscreteDGP& dgp,
                                               std::size_t n,
                                               std::uint64_t seed,
                                               double beta_l_sign) {
  const SampleDraw draw = sample_dataset(dgp, n, seed);
  const NuisanceSet ns = exact_nuisance_set(dgp, draw);
  const InfluenceComponents ic =
      influence_components_with_sign(ns, draw.ds, beta_l_sign);
  const OracleEstimands e = exact_estimands(dgp);

  const struct {
    const char* name;
    BoundTarget target;
    double truth;
  } rows[4] = {{"alpha_l", BoundTarget::AlphaL, e.alpha_l},
               {"alpha_u", BoundTarget::AlphaU, e.alpha_u},
               {"beta_l", BoundTarget::BetaL, e.beta_l},
               {"beta_u", BoundTarget::BetaU, e.beta_u}};
  std::vector<AgreementLine> out;
  for (const auto& row : rows) {
    const IntervalEstimate iv = standard_errors(ic, row.target);
    AgreementLine line;
    line.name = row.name;
    line.est = iv.est;
    line.truth = row.truth;
    line.se = iv.se;
    line.pass = std::fabs(iv.est - row.truth) <= 3 * std::max(iv.se, 1e-12);
    out.push_back(line);
  }
  return out;
}

SignResolution resolve_beta_l_sign(int n_dgps, std::size_t n,
                                   std::uint64_t seed) {
  SignResolution res;
  res.dgps = n_dgps;
  res.n = n;
  res.plus_all_pass = true;
  res.minus_all_pass = true;
  for (int g = 0; g < n_dgps; ++g) {
    const DiscreteDGP dgp = random_dgp(mix_seed(seed, 21, g));
    const std::uint64_t draw_seed = mix_seed(seed, 22, g);
    for (const double sign : {+1.0, -1.0}) {
      const auto lines = estimator_agreement(dgp, n, draw_seed, sign);
      for (const auto& line : lines) {
        if (line.pass) continue;
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "dgp %d sign %+g: %s est %.6g truth %.6g se %.2g", g,
                      sign, line.name.c_str(), line.est, line.truth, line.se);
        if (sign > 0) {
          res.plus_all_pass = false;
          res.failures_plus.push_back(buf);
        } else {
          res.minus_all_pass = false;
          res.failures_minus.push_back(buf);
        }
      }
    }
  }
  return res;
}

}  // namespace scate
