#ifndef SCATE_NUISANCE_HPP
#define SCATE_NUISANCE_HPP

#include <array>
#include <string>
#include <vector>

#include "scate/data.hpp"
#include "scate/learners.hpp"

namespace scate {

// Cross-fitted nuisance evaluations for every observation, with the
// structural constraints enforced by construction:
//   theta1[z] + theta0[z] = lambda[z]   (treatment defined exactly when S=1)
//   0 <= mu[z] <= lambda[z]             (mu = E(Y*S | X, Z=z), binary Y)
//   pi1 clipped into [clip_epsilon, 1 - clip_epsilon]
struct NuisanceSet {
  std::size_t n = 0;
  double clip_epsilon = 0.01;
  bool no_split_diagnostic = false;  // K=1: no cross-fitting, flagged
  std::vector<double> pi1;
  std::array<std::vector<double>, 2> lambda, mu, theta1, theta0;
  std::vector<std::string> warnings;

  double pi(int z, std::size_t i) const { return z ? pi1[i] : 1.0 - pi1[i]; }
};

// Regressions: pi1 ~ 1(Z=1) on X over all rows; per arm z: lambda ~ S,
// mu ~ S*Y, and q ~ 1(A=1) fitted within {S=1, Z=z}; theta1 = lambda*q,
// theta0 = lambda*(1-q). All predictions are out-of-fold.
NuisanceSet fit_nuisances(const Dataset& ds, const LearnerSpec& spec,
                          const FoldAssignment& folds, double clip_epsilon);

// T in the uncentered influence component phi_z(T) =
//   1(Z=z)/pi_z(X) * {T - E(T|X,Z=z)} + E(T|X,Z=z)
enum class PhiTarget { S, SY, SYminus1, A1, Anot0 };

std::vector<double> phi(const NuisanceSet& ns, const Dataset& ds, int z,
                        PhiTarget target);

// Empirical mass near the three indicator boundaries:
//   gamma1 = theta_1(0|x) - theta_0(0|x)
//   gamma2 = mu_1 - (lambda_1 - lambda_0)
//   gamma3 = mu_1 - lambda_0
struct MarginDiagnostics {
  static constexpr double kTaus[3] = {0.01, 0.05, 0.10};
  double frac[3][3] = {};  // [gamma][tau]
  bool fragile = false;    // any 0.05-fraction above 0.25

  std::string to_text() const;
  std::string to_json() const;
};
MarginDiagnostics margin_diagnostics(const NuisanceSet& ns);

// per-observation eta-hat audit table (delimited text)
void write_nuisances(const NuisanceSet& ns, const std::string& path);

}  // namespace scate

#endif
