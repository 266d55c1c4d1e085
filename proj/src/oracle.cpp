#include "scate/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <tuple>

#include "scate/rng.hpp"

namespace scate {

namespace {

constexpr double kProbSlack = 1e-9;

bool outcome_defined(int st, int z) { return stratum_s(st, z) == 1; }

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

void DiscreteDGP::validate() const {
  if (points.empty()) throw std::invalid_argument("DGP has no support points");
  double total = 0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const SupportPoint& pt = points[k];
    if (pt.x.size() != dim)
      throw std::invalid_argument("support point covariate dimension mismatch");
    if (!(pt.prob >= 0)) throw std::invalid_argument("negative point probability");
    total += pt.prob;
    if (!(pt.pi1 > 0 && pt.pi1 < 1))
      throw std::invalid_argument("instrument propensity must be in (0,1)");
    double ssum = 0;
    for (int st = 0; st < kNumStrata; ++st) {
      if (!(pt.strata[st] >= 0))
        throw std::invalid_argument("negative stratum probability");
      ssum += pt.strata[st];
      for (int z = 0; z < 2; ++z)
        if (outcome_defined(st, z) && pt.strata[st] > 0 &&
            !(pt.y1[st][z] >= 0 && pt.y1[st][z] <= 1))
          throw std::invalid_argument("outcome probability outside [0,1]");
    }
    if (std::fabs(ssum - 1.0) > kProbSlack)
      throw std::invalid_argument("stratum probabilities must sum to 1");
    // exclusion restriction: for always-selected strata with instrument-fixed
    // treatment, the outcome cannot depend on the instrument arm
    for (int st : {kNt, kAt})
      if (pt.strata[st] > 0 && pt.y1[st][0] != pt.y1[st][1])
        throw std::invalid_argument(
            "exclusion restriction violated for an instrument-insensitive stratum");
  }
  if (std::fabs(total - 1.0) > kProbSlack)
    throw std::invalid_argument("point probabilities must sum to 1");
}

std::vector<LawCell> exact_law(const DiscreteDGP& dgp) {
  dgp.validate();
  std::map<std::tuple<int, int, int, int, int>, double> acc;
  for (std::size_t k = 0; k < dgp.points.size(); ++k) {
    const SupportPoint& pt = dgp.points[k];
    for (int z = 0; z < 2; ++z) {
      const double pz = pt.prob * (z == 1 ? pt.pi1 : 1 - pt.pi1);
      for (int st = 0; st < kNumStrata; ++st) {
        const double pst = pz * pt.strata[st];
        if (pst <= 0) continue;
        const int s = stratum_s(st, z);
        const int a = stratum_a(st, z);
        if (s == 0) {
          acc[{static_cast<int>(k), z, 0, -1, -1}] += pst;
        } else {
          const double py = pt.y1[st][z];
          acc[{static_cast<int>(k), z, 1, a, 1}] += pst * py;
          acc[{static_cast<int>(k), z, 1, a, 0}] += pst * (1 - py);
        }
      }
    }
  }
  std::vector<LawCell> law;
  for (const auto& [key, p] : acc) {
    if (p <= 0) continue;
    LawCell c;
    std::tie(c.point, c.z, c.s, c.a, c.y) = key;
    c.prob = p;
    law.push_back(c);
  }
  return law;
}

OracleNuisance exact_nuisances(const DiscreteDGP& dgp, int point) {
  const SupportPoint& pt = dgp.points.at(point);
  OracleNuisance nu;
  nu.pi1 = pt.pi1;
  for (int z = 0; z < 2; ++z) {
    double lam = 0, mu = 0, t1 = 0, t0 = 0;
    for (int st = 0; st < kNumStrata; ++st) {
      if (stratum_s(st, z) != 1) continue;
      lam += pt.strata[st];
      mu += pt.strata[st] * pt.y1[st][z];
      if (stratum_a(st, z) == 1) t1 += pt.strata[st];
      if (stratum_a(st, z) == 0) t0 += pt.strata[st];
    }
    nu.lambda[z] = lam;
    nu.mu[z] = mu;
    nu.theta1[z] = t1;
    nu.theta0[z] = t0;
  }
  return nu;
}

namespace {

// Sign-dependent denominator selection for the SCATE bounds: the lower bound
// divides by the larger alpha when its numerator is positive, the upper bound
// by the smaller one. `corrupt` flips the rule (negative-control fixture).
void psi_bounds_from(double a_l, double a_u, double num_l, double num_u,
                     double* psi_l, double* psi_u, bool* trunc_l, bool* trunc_u,
                     bool corrupt = false) {
  const double den_l = (num_l > 0) != corrupt ? a_u : a_l;
  const double den_u = (num_u > 0) != corrupt ? a_l : a_u;
  *trunc_l = !(den_l > 0);
  *trunc_u = !(den_u > 0);
  *psi_l = *trunc_l ? -1.0 : std::max(-1.0, std::min(1.0, num_l / den_l));
  *psi_u = *trunc_u ? 1.0 : std::max(-1.0, std::min(1.0, num_u / den_u));
}

OracleEstimands estimands_impl(const DiscreteDGP& dgp, bool corrupt) {
  dgp.validate();
  OracleEstimands e;
  double psi_num = 0, beta_num = 0;
  double pos_part = 0, min_part = 0, mu0_mean = 0;
  for (const SupportPoint& pt : dgp.points) {
    e.alpha += pt.prob * pt.strata[kSc];
    const double pa =
        pt.strata[kNt] + pt.strata[kSc] + pt.strata[kAt];
    e.p_always += pt.prob * pa;
    psi_num += pt.prob * pt.strata[kSc] * (pt.y1[kSc][1] - pt.y1[kSc][0]);
    for (int st : {kNt, kSc, kAt})
      beta_num += pt.prob * pt.strata[st] * (pt.y1[st][1] - pt.y1[st][0]);

    const OracleNuisance nu = exact_nuisances(dgp, static_cast<int>(
        &pt - dgp.points.data()));
    e.alpha_u += pt.prob * (nu.theta1[1] - nu.theta1[0]);
    e.alpha_l += pt.prob * std::max(0.0, nu.theta0[0] - nu.theta0[1]);
    e.e_lambda0 += pt.prob * nu.lambda[0];
    pos_part += pt.prob * std::max(0.0, nu.mu[1] + nu.lambda[0] - nu.lambda[1]);
    min_part += pt.prob * std::min(nu.mu[1], nu.lambda[0]);
    mu0_mean += pt.prob * nu.mu[0];
  }
  e.psi = e.alpha > 0 ? psi_num / e.alpha : 0.0;
  e.beta = e.p_always > 0 ? beta_num / e.p_always : 0.0;
  const double num_l = pos_part - mu0_mean;
  const double num_u = min_part - mu0_mean;
  if (e.e_lambda0 > 0) {
    e.beta_l = num_l / e.e_lambda0;
    e.beta_u = num_u / e.e_lambda0;
  }
  psi_bounds_from(e.alpha_l, e.alpha_u, num_l, num_u, &e.psi_l, &e.psi_u,
                  &e.psi_l_truncated, &e.psi_u_truncated, corrupt);
  return e;
}

}  // namespace

OracleEstimands exact_estimands(const DiscreteDGP& dgp) {
  return estimands_impl(dgp, false);
}

namespace {

Observation make_obs(const DiscreteDGP& dgp, int point, int st, int z, int y) {
  Observation o;
  o.x = dgp.points[point].x;
  o.z = z;
  o.s = stratum_s(st, z);
  const int a = stratum_a(st, z);
  o.a = a < 0 ? Tri::Undefined : (a == 1 ? Tri::One : Tri::Zero);
  o.y = o.s == 0 ? Tri::Undefined : (y == 1 ? Tri::One : Tri::Zero);
  return o;
}

std::vector<std::string> default_names(std::size_t d) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < d; ++j) names.push_back("x" + std::to_string(j + 1));
  return names;
}

}  // namespace

SampleDraw sample_dataset(const DiscreteDGP& dgp, std::size_t n,
                          std::uint64_t seed) {
  dgp.validate();
  std::mt19937_64 g(seed);
  std::vector<double> cum_pt;
  double c = 0;
  for (const SupportPoint& pt : dgp.points) cum_pt.push_back(c += pt.prob);
  SampleDraw out;
  out.ds.covariate_names = default_names(dgp.dim);
  for (std::size_t i = 0; i < n; ++i) {
    const int k = draw_discrete(g, cum_pt);
    const SupportPoint& pt = dgp.points[k];
    const int z = draw_bernoulli(g, pt.pi1);
    std::array<double, kNumStrata> cum_st{};
    double cs = 0;
    for (int st = 0; st < kNumStrata; ++st) cum_st[st] = (cs += pt.strata[st]);
    const int st = draw_discrete(g, cum_st);
    int y = 0;
    if (stratum_s(st, z) == 1) y = draw_bernoulli(g, pt.y1[st][z]);
    out.ds.obs.push_back(make_obs(dgp, k, st, z, y));
    out.point.push_back(k);
  }
  return out;
}

SampleDraw expand_law(const DiscreteDGP& dgp, std::size_t n) {
  const auto law = exact_law(dgp);
  // largest-remainder apportionment of n rows across law cells
  std::vector<std::size_t> cnt(law.size());
  std::vector<std::pair<double, std::size_t>> rem;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < law.size(); ++i) {
    const double target = law[i].prob * static_cast<double>(n);
    cnt[i] = static_cast<std::size_t>(std::floor(target));
    assigned += cnt[i];
    rem.push_back({target - std::floor(target), i});
  }
  std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;  // deterministic tie-break
  });
  for (std::size_t j = 0; assigned < n; ++j, ++assigned) ++cnt[rem[j % rem.size()].second];

  SampleDraw out;
  out.ds.covariate_names = default_names(dgp.dim);
  for (std::size_t i = 0; i < law.size(); ++i) {
    const LawCell& cell = law[i];
    Observation o;
    o.x = dgp.points[cell.point].x;
    o.z = cell.z;
    o.s = cell.s;
    o.a = cell.a < 0 ? Tri::Undefined : (cell.a == 1 ? Tri::One : Tri::Zero);
    o.y = cell.y < 0 ? Tri::Undefined : (cell.y == 1 ? Tri::One : Tri::Zero);
    for (std::size_t r = 0; r < cnt[i]; ++r) {
      out.ds.obs.push_back(o);
      out.point.push_back(cell.point);
    }
  }
  return out;
}

MixtureBoundsCert certify_mixture_mean_bounds(double h_bar, double p) {
  if (!(p > 0 && p < 1))
    throw std::invalid_argument("mixing weight must be inside (0,1)");
  if (!(h_bar >= 0 && h_bar <= 1))
    throw std::invalid_argument("mixture mean must be inside [0,1]");
  const double q = 1 - p;
  const double h0 = 1 - h_bar;  // cdf of the mixture at 0
  MixtureBoundsCert r;
  // cap at 1: (1 - q) can round above p, pushing the quotient past 1
  r.lower = std::min(1.0, std::max(0.0, h_bar - q) / p);
  r.upper = std::min(h_bar, p) / p;

  // attaining components: F-cdf-at-0 extremes with G = (H - pF)/q
  r.f0_for_lower = std::min(h0 / p, 1.0);
  r.g0_for_lower = (h0 - p * r.f0_for_lower) / q;
  r.f0_for_upper = std::max((h0 - q) / p, 0.0);
  r.g0_for_upper = (h0 - p * r.f0_for_upper) / q;

  auto valid = [](double v) { return v >= -1e-12 && v <= 1 + 1e-12; };
  r.mixture_identity_ok =
      valid(r.f0_for_lower) && valid(r.g0_for_lower) && valid(r.f0_for_upper) &&
      valid(r.g0_for_upper) &&
      std::fabs(p * r.f0_for_lower + q * r.g0_for_lower - h0) < 1e-12 &&
      std::fabs(p * r.f0_for_upper + q * r.g0_for_upper - h0) < 1e-12 &&
      std::fabs((1 - r.f0_for_lower) - r.lower) < 1e-12 &&
      std::fabs((1 - r.f0_for_upper) - r.upper) < 1e-12;

  // exhaustive feasibility scan over candidate F means at resolution 1e-3:
  // a mean m=1-f0 is feasible iff the complementary component is a valid cdf
  r.grid_ok = true;
  double best_lo = 1, best_hi = 0;
  for (int i = 0; i <= 1000; ++i) {
    const double f0 = i / 1000.0;
    const double g0 = (h0 - p * f0) / q;
    if (g0 < -1e-12 || g0 > 1 + 1e-12) continue;
    const double mean = 1 - f0;
    best_lo = std::min(best_lo, mean);
    best_hi = std::max(best_hi, mean);
    if (mean < r.lower - 1e-9 || mean > r.upper + 1e-9) r.grid_ok = false;
  }
  // the scan must also get within grid resolution of both endpoints
  if (best_lo > r.lower + 2e-3 || best_hi < r.upper - 2e-3) r.grid_ok = false;
  return r;
}

DiscreteDGP random_dgp(std::uint64_t seed, int max_points) {
  std::mt19937_64 g(seed);
  DiscreteDGP dgp;
  const int npt = 1 + static_cast<int>(g() % static_cast<std::uint64_t>(max_points));
  dgp.dim = npt > 1 ? 1 : 0;
  double total = 0;
  for (int k = 0; k < npt; ++k) {
    SupportPoint pt;
    pt.prob = 0.1 + unit_uniform(g);
    total += pt.prob;
    if (dgp.dim == 1) pt.x = {static_cast<double>(k)};
    pt.pi1 = 0.2 + 0.6 * unit_uniform(g);
    double ssum = 0;
    for (int st = 0; st < kNumStrata; ++st) ssum += (pt.strata[st] = 0.05 + unit_uniform(g));
    for (int st = 0; st < kNumStrata; ++st) pt.strata[st] /= ssum;
    for (int st = 0; st < kNumStrata; ++st)
      for (int z = 0; z < 2; ++z) pt.y1[st][z] = unit_uniform(g);
    pt.y1[kNt][0] = pt.y1[kNt][1];  // exclusion restriction
    pt.y1[kAt][0] = pt.y1[kAt][1];
    dgp.points.push_back(pt);
  }
  for (SupportPoint& pt : dgp.points) pt.prob /= total;
  return dgp;
}

DiscreteDGP random_perfect_prediction_dgp(std::uint64_t seed) {
  std::mt19937_64 g(seed);
  DiscreteDGP dgp;
  dgp.dim = 1;
  const int npt = 2 + static_cast<int>(g() % 3ULL);
  double total = 0;
  for (int k = 0; k < npt; ++k) {
    SupportPoint pt;
    pt.prob = 0.1 + unit_uniform(g);
    total += pt.prob;
    pt.x = {static_cast<double>(k)};
    pt.pi1 = 0.2 + 0.6 * unit_uniform(g);
    // selection is a deterministic function of x: the whole point is either
    // always-selected (mass on nt/sc/at) or never-selected (mass on ns)
    const bool selected = k == 0 || draw_bernoulli(g, 0.6) == 1;
    if (selected) {
      double ssum = 0;
      for (int st : {kNt, kSc, kAt}) ssum += (pt.strata[st] = 0.05 + unit_uniform(g));
      for (int st : {kNt, kSc, kAt}) pt.strata[st] /= ssum;
    } else {
      pt.strata[kNs] = 1.0;
    }
    for (int st = 0; st < kNumStrata; ++st)
      for (int z = 0; z < 2; ++z) pt.y1[st][z] = unit_uniform(g);
    pt.y1[kNt][0] = pt.y1[kNt][1];
    pt.y1[kAt][0] = pt.y1[kAt][1];
    dgp.points.push_back(pt);
  }
  for (SupportPoint& pt : dgp.points) pt.prob /= total;
  return dgp;
}

DiscreteDGP nonidentification_witness(double psi, double other_rate) {
  DiscreteDGP dgp;
  dgp.dim = 0;
  SupportPoint pt;
  pt.prob = 1.0;
  pt.pi1 = 0.5;
  pt.strata[kSc] = 0.5;   // survivor-compliers
  pt.strata[kSc1] = 0.5;  // selection compliers treated when selected
  pt.y1[kSc][0] = 0.0;    // Y^{a=0} never succeeds
  pt.y1[kSc][1] = psi;    // so the SCATE equals psi
  pt.y1[kSc1][1] = other_rate;
  dgp.points.push_back(pt);
  return dgp;
}

// ---------------------------------------------------------------------------
// check battery

namespace {

std::string fmt_val(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

bool law_equal(const std::vector<LawCell>& a, const std::vector<LawCell>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const LawCell &x = a[i], &y = b[i];
    if (x.point != y.point || x.z != y.z || x.s != y.s || x.a != y.a ||
        x.y != y.y || std::fabs(x.prob - y.prob) > 1e-15)
      return false;
  }
  return true;
}

}  // namespace

std::vector<CheckResult> run_check_battery(std::uint64_t seed,
                                           bool corrupt_ratio_rule) {
  std::vector<CheckResult> out;
  auto add = [&](const std::string& name, bool pass, const std::string& detail) {
    out.push_back({name, pass, detail});
  };

  {  // two generating processes, same observed law, different SCATE
    const DiscreteDGP w1 = nonidentification_witness(1.0, 0.0);
    const DiscreteDGP w2 = nonidentification_witness(0.0, 1.0);
    const bool same_law = law_equal(exact_law(w1), exact_law(w2));
    const OracleEstimands e1 = exact_estimands(w1), e2 = exact_estimands(w2);
    const bool pass = same_law && std::fabs(e1.psi - 1.0) < 1e-12 &&
                      std::fabs(e2.psi - 0.0) < 1e-12 &&
                      std::fabs(e1.psi_l - 0.0) < 1e-12 &&
                      std::fabs(e1.psi_u - 1.0) < 1e-12 &&
                      std::fabs(e2.psi_l - 0.0) < 1e-12 &&
                      std::fabs(e2.psi_u - 1.0) < 1e-12 &&
                      std::fabs(e1.alpha_l - 0.5) < 1e-12 &&
                      std::fabs(e1.alpha_u - 1.0) < 1e-12;
    add("nonidentification-witness", pass,
        same_law ? "identical laws, SCATE " + fmt_val(e1.psi) + " vs " +
                       fmt_val(e2.psi) + ", bounds [" + fmt_val(e1.psi_l) +
                       "," + fmt_val(e1.psi_u) + "]"
                 : "observed laws differ");
  }

  {  // psi * alpha = beta * P(always selected), exactly, on random DGPs
    bool pass = true;
    double worst = 0;
    for (int r = 0; r < 50; ++r) {
      const OracleEstimands e = exact_estimands(random_dgp(mix_seed(seed, 1, r)));
      const double gap = std::fabs(e.psi * e.alpha - e.beta * e.p_always);
      worst = std::max(worst, gap);
      if (gap > 1e-10) pass = false;
    }
    add("decomposition-identity", pass, "max |psi*alpha - beta*P(always)| = " + fmt_val(worst));
  }

  {  // population bounds contain the truth on random DGPs
    bool pass_ab = true, pass_psi = true;
    for (int r = 0; r < 200; ++r) {
      const OracleEstimands e = exact_estimands(random_dgp(mix_seed(seed, 2, r)));
      if (e.alpha < e.alpha_l - 1e-12 || e.alpha > e.alpha_u + 1e-12) pass_ab = false;
      if (e.beta < e.beta_l - 1e-12 || e.beta > e.beta_u + 1e-12) pass_ab = false;
      if (e.psi < e.psi_l - 1e-12 || e.psi > e.psi_u + 1e-12) pass_psi = false;
    }
    add("proportion-and-itt-bounds-contain-truth", pass_ab, "200 random processes");
    add("scate-bounds-contain-truth", pass_psi, "200 random processes");
  }

  {  // the sign-dependent denominator selection, all three cases
    bool pass = true;
    std::string detail;
    struct Case { double alpha, psi; const char* name; };
    // single-point processes with strata (1-a)/5 except the survivor-complier
    for (const Case& c : {Case{0.75, 0.4, "both-positive"},
                          Case{0.75, -0.4, "both-negative"},
                          Case{0.5, 0.0, "straddling-zero"}}) {
      DiscreteDGP dgp;
      dgp.dim = 0;
      SupportPoint pt;
      pt.prob = 1.0;
      pt.pi1 = 0.5;
      const double q = (1 - c.alpha) / 5;
      for (int st = 0; st < kNumStrata; ++st) pt.strata[st] = q;
      pt.strata[kSc] = c.alpha;
      for (int st = 0; st < kNumStrata; ++st)
        for (int z = 0; z < 2; ++z) pt.y1[st][z] = 0.5;
      pt.y1[kSc][0] = 0.5 - c.psi / 2;
      pt.y1[kSc][1] = 0.5 + c.psi / 2;
      dgp.points.push_back(pt);
      const OracleEstimands e = estimands_impl(dgp, corrupt_ratio_rule);
      const double num_l = e.beta_l * e.e_lambda0, num_u = e.beta_u * e.e_lambda0;
      const double want_l = num_l / (num_l > 0 ? e.alpha_u : e.alpha_l);
      const double want_u = num_u / (num_u > 0 ? e.alpha_l : e.alpha_u);
      const bool case_ok = std::fabs(e.psi_l - std::max(-1.0, std::min(1.0, want_l))) < 1e-12 &&
                           std::fabs(e.psi_u - std::max(-1.0, std::min(1.0, want_u))) < 1e-12;
      if (!case_ok) {
        pass = false;
        detail += std::string(detail.empty() ? "" : "; ") + c.name + " mismatched";
      }
    }
    add("denominator-case-analysis", pass, pass ? "3 sign cases" : detail);
  }

  {  // sharp mean bounds for a binary two-component mixture
    bool pass = true;
    for (int ih = 0; ih <= 20 && pass; ++ih)
      for (int ip = 1; ip <= 19 && pass; ++ip) {
        const double h = ih / 20.0, p = ip / 20.0;
        const MixtureBoundsCert r = certify_mixture_mean_bounds(h, p);
        if (!r.mixture_identity_ok || !r.grid_ok) pass = false;
        const double q = 1 - p;
        if (std::fabs(r.lower - std::max(0.0, h - q) / p) > 1e-12 ||
            std::fabs(r.upper - std::min(h, p) / p) > 1e-12)
          pass = false;
      }
    const MixtureBoundsCert frozen = certify_mixture_mean_bounds(0.5, 0.5);
    if (std::fabs(frozen.lower - 0.0) > 1e-15 || std::fabs(frozen.upper - 1.0) > 1e-15)
      pass = false;
    const MixtureBoundsCert near1 = certify_mixture_mean_bounds(0.5, 0.999);
    if (std::fabs(near1.lower - 0.5) > 2e-3 || std::fabs(near1.upper - 0.5) > 2e-3)
      pass = false;
    const MixtureBoundsCert deg = certify_mixture_mean_bounds(0.0, 0.6);
    if (deg.lower != 0.0 || deg.upper != 0.0) pass = false;
    add("binary-mixture-sharpness", pass, "21x19 (mean, weight) grid certified");
  }

  {  // selection a deterministic function of covariates: bounds collapse
    bool pass = true;
    double worst = 0;
    for (int r = 0; r < 25; ++r) {
      const OracleEstimands e =
          exact_estimands(random_perfect_prediction_dgp(mix_seed(seed, 3, r)));
      const double gap = std::max(std::fabs(e.alpha_u - e.alpha_l),
                                  std::fabs(e.beta_u - e.beta_l));
      worst = std::max(worst, gap);
      if (gap > 1e-12) pass = false;
    }
    add("perfect-prediction-collapse", pass, "max bound width " + fmt_val(worst));
  }

  {  // no selection at all: everything collapses to the Wald ratio
    bool pass = true;
    for (int r = 0; r < 25; ++r) {
      std::mt19937_64 g(mix_seed(seed, 4, r));
      DiscreteDGP dgp;
      dgp.dim = 0;
      SupportPoint pt;
      pt.prob = 1.0;
      pt.pi1 = 0.2 + 0.6 * unit_uniform(g);
      double ssum = 0;
      for (int st : {kNt, kSc, kAt}) ssum += (pt.strata[st] = 0.05 + unit_uniform(g));
      for (int st : {kNt, kSc, kAt}) pt.strata[st] /= ssum;
      for (int st = 0; st < kNumStrata; ++st)
        for (int z = 0; z < 2; ++z) pt.y1[st][z] = unit_uniform(g);
      pt.y1[kNt][0] = pt.y1[kNt][1];
      pt.y1[kAt][0] = pt.y1[kAt][1];
      dgp.points.push_back(pt);
      const OracleEstimands e = exact_estimands(dgp);
      const OracleNuisance nu = exact_nuisances(dgp, 0);
      const double wald = (nu.mu[1] - nu.mu[0]) / (nu.theta1[1] - nu.theta1[0]);
      const double w = clamp01(std::fabs(wald)) * (wald < 0 ? -1 : 1);
      if (std::fabs(e.psi_l - w) > 1e-12 || std::fabs(e.psi_u - w) > 1e-12)
        pass = false;
    }
    add("no-selection-wald-collapse", pass, "25 random no-selection processes");
  }

  return out;
}

}  // namespace scate
