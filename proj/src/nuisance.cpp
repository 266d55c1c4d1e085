#include "scate/nuisance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace scate {

NuisanceSet fit_nuisances(const Dataset& ds, const LearnerSpec& spec,
                          const FoldAssignment& folds, double clip_epsilon) {
  validate(ds);
  if (!(clip_epsilon > 0 && clip_epsilon < 0.5))
    throw std::invalid_argument("clip_epsilon must be in (0, 0.5)");
  const std::size_t n = ds.n();
  if (folds.fold_of.size() != n)
    throw std::invalid_argument("fold assignment does not match dataset");

  NuisanceSet ns;
  ns.n = n;
  ns.clip_epsilon = clip_epsilon;
  ns.no_split_diagnostic = folds.K == 1;
  if (ns.no_split_diagnostic)
    ns.warnings.push_back(
        "no-split diagnostic mode (K=1): nuisances fitted on the full sample");

  const Features f = Features::from(ds);
  std::vector<double> zlab(n), slab(n), sylab(n), alab(n);
  std::array<std::vector<char>, 2> arm_mask, sel_mask;
  for (int z = 0; z < 2; ++z) {
    arm_mask[z].assign(n, 0);
    sel_mask[z].assign(n, 0);
  }
  std::size_t n_sel[2] = {0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    const Observation& o = ds.obs[i];
    zlab[i] = o.z;
    slab[i] = o.s;
    sylab[i] = o.sy();
    alab[i] = o.a == Tri::One ? 1.0 : 0.0;
    arm_mask[o.z][i] = 1;
    if (o.s == 1) {
      sel_mask[o.z][i] = 1;
      ++n_sel[o.z];
    }
  }
  for (int z = 0; z < 2; ++z)
    if (n_sel[z] == 0)
      throw std::runtime_error("no selected observations in instrument arm " +
                               std::to_string(z) +
                               ": treatment and outcome regressions impossible");

  auto fit_one = [&](const std::vector<double>& y, const std::vector<char>* mask,
                     const char* what) {
    CrossFitResult r = cross_fit(spec, f, y, nullptr, folds, mask);
    if (!r.all_converged)
      ns.warnings.push_back(std::string("IRLS did not converge for ") + what);
    return r.pred;
  };

  ns.pi1 = fit_one(zlab, nullptr, "the instrument propensity");
  for (double& p : ns.pi1)
    p = std::min(1.0 - clip_epsilon, std::max(clip_epsilon, p));

  for (int z = 0; z < 2; ++z) {
    const std::string arm = "arm z=" + std::to_string(z);
    ns.lambda[z] = fit_one(slab, &arm_mask[z], ("selection rate, " + arm).c_str());
    ns.mu[z] = fit_one(sylab, &arm_mask[z], ("outcome-and-selected rate, " + arm).c_str());
    const std::vector<double> q =
        fit_one(alab, &sel_mask[z], ("treated share among selected, " + arm).c_str());
    ns.theta1[z].resize(n);
    ns.theta0[z].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      ns.theta1[z][i] = ns.lambda[z][i] * q[i];
      ns.theta0[z][i] = ns.lambda[z][i] * (1.0 - q[i]);
      // projection keeps mu inside its structural range [0, lambda]
      ns.mu[z][i] = std::min(ns.mu[z][i], ns.lambda[z][i]);
    }
  }
  return ns;
}

std::vector<double> phi(const NuisanceSet& ns, const Dataset& ds, int z,
                        PhiTarget target) {
  if (ns.n != ds.n()) throw std::invalid_argument("nuisance/dataset mismatch");
  if (z != 0 && z != 1) throw std::invalid_argument("z must be 0 or 1");
  std::vector<double> out(ns.n);
  for (std::size_t i = 0; i < ns.n; ++i) {
    const Observation& o = ds.obs[i];
    double plug = 0, tval = 0;
    switch (target) {
      case PhiTarget::S:
        plug = ns.lambda[z][i];
        tval = o.s;
        break;
      case PhiTarget::SY:
        plug = ns.mu[z][i];
        tval = o.sy();
        break;
      case PhiTarget::SYminus1:
        plug = ns.mu[z][i] - ns.lambda[z][i];
        tval = o.sym1();
        break;
      case PhiTarget::A1:
        plug = ns.theta1[z][i];
        tval = o.a == Tri::One ? 1.0 : 0.0;
        break;
      case PhiTarget::Anot0:
        // 1(A != 0) is 1 for treated *and* for undefined treatment:
        // 1 - 1(A=0), and 1(A=0) = 0 when never selected
        plug = 1.0 - ns.theta0[z][i];
        tval = o.a == Tri::Zero ? 0.0 : 1.0;
        break;
    }
    out[i] = (o.z == z ? (tval - plug) / ns.pi(z, i) : 0.0) + plug;
  }
  return out;
}

MarginDiagnostics margin_diagnostics(const NuisanceSet& ns) {
  MarginDiagnostics md;
  if (ns.n == 0) return md;
  for (std::size_t i = 0; i < ns.n; ++i) {
    const double gv[3] = {ns.theta0[0][i] - ns.theta0[1][i],
                          ns.mu[1][i] - (ns.lambda[1][i] - ns.lambda[0][i]),
                          ns.mu[1][i] - ns.lambda[0][i]};
    for (int k = 0; k < 3; ++k)
      for (int t = 0; t < 3; ++t)
        if (std::fabs(gv[k]) < MarginDiagnostics::kTaus[t]) md.frac[k][t] += 1;
  }
  for (int k = 0; k < 3; ++k)
    for (int t = 0; t < 3; ++t) md.frac[k][t] /= static_cast<double>(ns.n);
  md.fragile = md.frac[0][1] > 0.25 || md.frac[1][1] > 0.25 || md.frac[2][1] > 0.25;
  return md;
}

namespace {
std::string num6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}
}  // namespace

std::string MarginDiagnostics::to_text() const {
  static const char* names[3] = {"gamma1_treated_share_contrast",
                                 "gamma2_lower_itt_boundary",
                                 "gamma3_upper_itt_boundary"};
  std::ostringstream os;
  for (int k = 0; k < 3; ++k)
    for (int t = 0; t < 3; ++t)
      os << names[k] << "_below_" << num6(kTaus[t]) << "=" << num6(frac[k][t])
         << "\n";
  os << "fragile=" << (fragile ? "true" : "false") << "\n";
  return os.str();
}

std::string MarginDiagnostics::to_json() const {
  std::ostringstream os;
  os << "{\"fractions\":[";
  for (int k = 0; k < 3; ++k) {
    os << (k ? ",[" : "[");
    for (int t = 0; t < 3; ++t) os << (t ? "," : "") << num6(frac[k][t]);
    os << "]";
  }
  os << "],\"taus\":[0.01,0.05,0.1],\"fragile\":" << (fragile ? "true" : "false")
     << "}";
  return os.str();
}

void write_nuisances(const NuisanceSet& ns, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "pi1,lambda0,lambda1,mu0,mu1,theta1_0,theta1_1,theta0_0,theta0_1\n";
  char buf[256];
  for (std::size_t i = 0; i < ns.n; ++i) {
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                  ns.pi1[i], ns.lambda[0][i], ns.lambda[1][i], ns.mu[0][i],
                  ns.mu[1][i], ns.theta1[0][i], ns.theta1[1][i],
                  ns.theta0[0][i], ns.theta0[1][i]);
    out << buf;
  }
}

}  // namespace scate
