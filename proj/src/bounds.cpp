#include "scate/bounds.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace scate {
namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// population-style variance (1/n), consistent with influence-function SEs
double sd_about(const std::vector<double>& v, double center) {
  double s = 0;
  for (double x : v) s += (x - center) * (x - center);
  return std::sqrt(s / static_cast<double>(v.size()));
}

std::string fmt(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void json_interval(std::ostringstream& os, const char* name,
                   const IntervalEstimate& e) {
  os << "\"" << name << "\": {\"est\": " << fmt(e.est)
     << ", \"se\": " << fmt(e.se) << ", \"lo\": " << fmt(e.lo)
     << ", \"hi\": " << fmt(e.hi)
     << ", \"zero_variance\": " << (e.zero_variance ? "true" : "false") << "}";
}

}  // namespace

InfluenceComponents influence_components_with_sign(const NuisanceSet& ns,
                                                   const Dataset& ds,
                                                   double beta_l_sign) {
  if (beta_l_sign != 1.0 && beta_l_sign != -1.0)
    throw std::invalid_argument("beta_l_sign must be +1 or -1");
  const std::size_t n = ds.n();
  if (ns.n != n) throw std::invalid_argument("nuisance/dataset size mismatch");

  const auto p1_anot0 = phi(ns, ds, 1, PhiTarget::Anot0);
  const auto p0_anot0 = phi(ns, ds, 0, PhiTarget::Anot0);
  const auto p1_a1 = phi(ns, ds, 1, PhiTarget::A1);
  const auto p0_a1 = phi(ns, ds, 0, PhiTarget::A1);
  const auto p1_sym1 = phi(ns, ds, 1, PhiTarget::SYminus1);
  const auto p1_sy = phi(ns, ds, 1, PhiTarget::SY);
  const auto p0_sy = phi(ns, ds, 0, PhiTarget::SY);
  const auto p0_s = phi(ns, ds, 0, PhiTarget::S);

  InfluenceComponents ic;
  ic.n = n;
  ic.clip_epsilon = ns.clip_epsilon;
  ic.alpha_l.resize(n);
  ic.alpha_u.resize(n);
  ic.beta_l_num.resize(n);
  ic.beta_u_num.resize(n);
  ic.phi0_S = p0_s;
  for (std::size_t i = 0; i < n; ++i) {
    // plug-in indicators; strict inequalities so exact ties contribute zero
    const bool never_gap = ns.theta0[0][i] > ns.theta0[1][i];
    const bool lower_margin = ns.mu[1][i] > ns.lambda[1][i] - ns.lambda[0][i];
    const bool upper_margin = ns.mu[1][i] > ns.lambda[0][i];
    ic.alpha_l[i] = never_gap ? (p1_anot0[i] - p0_anot0[i]) : 0.0;
    ic.alpha_u[i] = p1_a1[i] - p0_a1[i];
    ic.beta_l_num[i] =
        (lower_margin ? (p1_sym1[i] + beta_l_sign * p0_s[i]) : 0.0) - p0_sy[i];
    ic.beta_u_num[i] = (upper_margin ? (p0_s[i] - p1_sy[i]) : 0.0) +
                       p1_sy[i] - p0_sy[i];
  }
  return ic;
}

InfluenceComponents influence_components(const NuisanceSet& ns,
                                         const Dataset& ds) {
  return influence_components_with_sign(ns, ds, kBetaLowerPhi0Sign);
}

IntervalEstimate standard_errors(const InfluenceComponents& ic,
                                 BoundTarget target) {
  if (ic.n == 0) throw std::invalid_argument("empty influence components");
  const double rn = std::sqrt(static_cast<double>(ic.n));
  IntervalEstimate e;

  auto finish = [&](double est, double sd) {
    e.est = est;
    e.se = sd / rn;
    e.zero_variance = (sd == 0.0);
    e.lo = est - 1.96 * e.se;
    e.hi = est + 1.96 * e.se;
  };

  switch (target) {
    case BoundTarget::AlphaL:
    case BoundTarget::AlphaU: {
      const auto& v =
          target == BoundTarget::AlphaL ? ic.alpha_l : ic.alpha_u;
      const double m = mean_of(v);
      finish(m, sd_about(v, m));
      break;
    }
    case BoundTarget::BetaL:
    case BoundTarget::BetaU: {
      const auto& num =
          target == BoundTarget::BetaL ? ic.beta_l_num : ic.beta_u_num;
      const double p0s = mean_of(ic.phi0_S);
      if (!(p0s > 0))
        throw std::runtime_error(
            "estimated always-selected mass is nonpositive; ratio bounds "
            "undefined");
      const double b = mean_of(num) / p0s;
      std::vector<double> inf(ic.n);
      for (std::size_t i = 0; i < ic.n; ++i)
        inf[i] = (num[i] - b * ic.phi0_S[i]) / p0s;
      finish(b, sd_about(inf, 0.0));
      break;
    }
    case BoundTarget::PsiL:
    case BoundTarget::PsiU: {
      const auto& num =
          target == BoundTarget::PsiL ? ic.beta_l_num : ic.beta_u_num;
      const double nm = mean_of(num);
      // sign-selected alpha denominator, mirroring the ratio rule
      const bool lower = target == BoundTarget::PsiL;
      const auto& den = lower ? (nm > 0 ? ic.alpha_u : ic.alpha_l)
                              : (nm > 0 ? ic.alpha_l : ic.alpha_u);
      const double dm = mean_of(den);
      if (!(dm > 0)) {
        e.est = e.se = e.lo = e.hi = std::numeric_limits<double>::quiet_NaN();
        return e;
      }
      const double psi = nm / dm;
      std::vector<double> inf(ic.n);
      for (std::size_t i = 0; i < ic.n; ++i)
        inf[i] = (num[i] - psi * den[i]) / dm;
      finish(psi, sd_about(inf, 0.0));
      break;
    }
  }
  return e;
}

BoundsReport estimate_bounds(const InfluenceComponents& ic,
                             double denominator_floor) {
  if (ic.n == 0) throw std::invalid_argument("empty influence components");
  if (!(denominator_floor > 0))
    throw std::invalid_argument("denominator_floor must be positive");

  BoundsReport r;
  r.n = ic.n;
  r.denominator_floor = denominator_floor;
  r.e_lambda0 = mean_of(ic.phi0_S);
  if (!(r.e_lambda0 > 0))
    throw std::runtime_error(
        "estimated always-selected mass is nonpositive; ratio bounds "
        "undefined");

  // SEs are anchored at the raw (un-post-processed) estimates
  r.se_alpha_l = standard_errors(ic, BoundTarget::AlphaL);
  r.se_alpha_u = standard_errors(ic, BoundTarget::AlphaU);
  r.se_beta_l = standard_errors(ic, BoundTarget::BetaL);
  r.se_beta_u = standard_errors(ic, BoundTarget::BetaU);
  r.se_psi_l = standard_errors(ic, BoundTarget::PsiL);
  r.se_psi_u = standard_errors(ic, BoundTarget::PsiU);

  double al = r.se_alpha_l.est;
  double au = r.se_alpha_u.est;
  double bl = r.se_beta_l.est;
  double bu = r.se_beta_u.est;

  if (al < 0) {
    al = 0;
    r.alpha_l_clamped = true;
  } else if (al > 1) {
    al = 1;
    r.alpha_l_clamped = true;
  }
  if (al > au) {
    al = au = 0.5 * (al + au);
    r.alpha_isotonized = true;
  }
  if (bl > bu) {
    bl = bu = 0.5 * (bl + bu);
    r.beta_isotonized = true;
  }
  r.alpha_l = al;
  r.alpha_u = au;
  r.beta_l = bl;
  r.beta_u = bu;

  // ratio rule on the post-processed pieces: a positive numerator pairs with
  // the far alpha endpoint for the lower bound and the near one for the upper
  const double den_l = bl > 0 ? au : al;
  const double den_u = bu > 0 ? al : au;
  if (den_l <= denominator_floor) {
    r.psi_l = -1;
    r.psi_l_floor_truncated = true;
  } else {
    r.psi_l = bl * r.e_lambda0 / den_l;
    if (r.psi_l < -1) {
      r.psi_l = -1;
      r.psi_l_range_clamped = true;
    } else if (r.psi_l > 1) {
      r.psi_l = 1;
      r.psi_l_range_clamped = true;
    }
  }
  if (den_u <= denominator_floor) {
    r.psi_u = 1;
    r.psi_u_floor_truncated = true;
  } else {
    r.psi_u = bu * r.e_lambda0 / den_u;
    if (r.psi_u < -1) {
      r.psi_u = -1;
      r.psi_u_range_clamped = true;
    } else if (r.psi_u > 1) {
      r.psi_u = 1;
      r.psi_u_range_clamped = true;
    }
  }
  return r;
}

std::string BoundsReport::to_json() const {
  std::ostringstream os;
  os << "{\n";
  os << "  \"n\": " << n << ",\n";
  os << "  \"denominator_floor\": " << fmt(denominator_floor) << ",\n";
  os << "  \"alpha_l\": " << fmt(alpha_l) << ",\n";
  os << "  \"alpha_u\": " << fmt(alpha_u) << ",\n";
  os << "  \"beta_l\": " << fmt(beta_l) << ",\n";
  os << "  \"beta_u\": " << fmt(beta_u) << ",\n";
  os << "  \"e_lambda0\": " << fmt(e_lambda0) << ",\n";
  os << "  \"psi_l\": " << fmt(psi_l) << ",\n";
  os << "  \"psi_u\": " << fmt(psi_u) << ",\n";
  os << "  ";
  json_interval(os, "se_alpha_l", se_alpha_l);
  os << ",\n  ";
  json_interval(os, "se_alpha_u", se_alpha_u);
  os << ",\n  ";
  json_interval(os, "se_beta_l", se_beta_l);
  os << ",\n  ";
  json_interval(os, "se_beta_u", se_beta_u);
  os << ",\n  ";
  json_interval(os, "se_psi_l", se_psi_l);
  os << ",\n  ";
  json_interval(os, "se_psi_u", se_psi_u);
  os << ",\n";
  os << "  \"alpha_l_clamped\": " << (alpha_l_clamped ? "true" : "false")
     << ",\n";
  os << "  \"alpha_isotonized\": " << (alpha_isotonized ? "true" : "false")
     << ",\n";
  os << "  \"beta_isotonized\": " << (beta_isotonized ? "true" : "false")
     << ",\n";
  os << "  \"psi_l_floor_truncated\": "
     << (psi_l_floor_truncated ? "true" : "false") << ",\n";
  os << "  \"psi_u_floor_truncated\": "
     << (psi_u_floor_truncated ? "true" : "false") << ",\n";
  os << "  \"psi_l_range_clamped\": "
     << (psi_l_range_clamped ? "true" : "false") << ",\n";
  os << "  \"psi_u_range_clamped\": "
     << (psi_u_range_clamped ? "true" : "false") << "\n";
  os << "}\n";
  return os.str();
}

}  // namespace scate
