#include "scate/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <thread>

#include "scate/bounds.hpp"
#include "scate/nuisance.hpp"
#include "scate/rng.hpp"

namespace scate {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double normal_pdf(double x) {
  if (std::isinf(x)) return 0;
  return 0.3989422804014326779 * std::exp(-0.5 * x * x);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

// Acklam's rational approximation plus one Halley step; good to ~1e-15
double normal_quantile(double p) {
  if (p <= 0) return -std::numeric_limits<double>::infinity();
  if (p >= 1) return std::numeric_limits<double>::infinity();
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1 - plow;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= phigh) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    const double q = std::sqrt(-2 * std::log(1 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
          c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2 * 3.14159265358979323846) *
                   std::exp(0.5 * x * x);
  x = x - u / (1 + 0.5 * x * u);
  return x;
}

// population point-biserial corr(X_j, S) as a function of the loading rho:
// E[X S] = rho * E[L S], with the class-2 half selected by the fair coin Z
double point_biserial(double rho, double t1, double t2, double w2, double w3) {
  const double els = normal_pdf(t2) + 0.5 * (normal_pdf(t1) - normal_pdf(t2));
  const double es = w3 + 0.5 * w2;
  const double v = es * (1 - es);
  if (v <= 0) return 0;
  return rho * els / std::sqrt(v);
}

struct ClassSplit {
  double u = 0;             // each minor stratum mass
  double w1 = 0, w2 = 0, w3 = 0;
};

ClassSplit class_split(double alpha) {
  ClassSplit cs;
  cs.u = (1 - alpha) / 5;
  cs.w1 = cs.u;
  cs.w2 = 2 * cs.u;
  cs.w3 = alpha + 2 * cs.u;
  return cs;
}

// pointwise bound integrands as functions of class posteriors (c2, c3)
struct Integrands {
  double a_over_w3, q0, q1;
  void eval(double c2, double c3, double out[5]) const {
    out[0] = std::max(c3 * a_over_w3 - 0.5 * c2, 0.0);      // alpha_l
    out[1] = 0.5 * c2 + c3 * a_over_w3;                      // alpha_u
    out[2] = std::max(c3 * q1 - 0.5 * c2, 0.0) - c3 * q0;    // beta_l num
    out[3] = std::min(0.5 * c2 + c3 * q1, c3) - c3 * q0;     // beta_u num
    out[4] = c3;                                             // E(lambda_0)
  }
};

}  // namespace

CovariateMode parse_mode(const std::string& name) {
  if (name == "none") return CovariateMode::None;
  if (name == "weak") return CovariateMode::Weak;
  if (name == "strong") return CovariateMode::Strong;
  throw std::invalid_argument("unknown covariate mode: " + name);
}

const char* mode_name(CovariateMode m) {
  switch (m) {
    case CovariateMode::None: return "none";
    case CovariateMode::Weak: return "weak";
    case CovariateMode::Strong: return "strong";
  }
  return "?";
}

SimScenario design_scenario(double true_alpha, double true_psi, std::size_t n,
                            CovariateMode mode, std::uint64_t seed) {
  if (!(true_alpha > 0) || !(true_alpha <= 1))
    throw std::invalid_argument("true_alpha must lie in (0,1]");
  if (!(true_psi >= -1) || !(true_psi <= 1))
    throw std::invalid_argument("true_psi must lie in [-1,1]");
  if (n == 0) throw std::invalid_argument("n must be positive");

  SimScenario sc;
  sc.true_alpha = true_alpha;
  sc.true_psi = true_psi;
  sc.n = n;
  sc.mode = mode;
  sc.seed = seed;

  const ClassSplit cs = class_split(true_alpha);
  sc.strata = {cs.u, cs.u, cs.u, cs.u, true_alpha, cs.u};
  sc.p0 = 0.5;
  sc.p1 = 0.5 + true_psi;  // treated survivor-complier outcome rate
  if (sc.p1 < 0 || sc.p1 > 1) {
    sc.feasible = false;
    sc.infeasible_reason =
        "survivor-complier treated outcome rate 0.5+psi lies outside [0,1]";
  }
  sc.t1 = normal_quantile(cs.w1);
  sc.t2 = normal_quantile(cs.w1 + cs.w2);

  if (mode == CovariateMode::None) return sc;
  sc.target_corr = mode == CovariateMode::Weak ? 0.50 : 0.85;
  const double cmax = point_biserial(1.0, sc.t1, sc.t2, cs.w2, cs.w3);
  if (cmax < sc.target_corr) {
    sc.rho = 1.0;
    sc.rho_saturated = true;
    sc.achieved_corr = cmax;
    return sc;
  }
  double lo = 0, hi = 1;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (point_biserial(mid, sc.t1, sc.t2, cs.w2, cs.w3) < sc.target_corr)
      lo = mid;
    else
      hi = mid;
  }
  sc.rho = 0.5 * (lo + hi);
  sc.achieved_corr = point_biserial(sc.rho, sc.t1, sc.t2, cs.w2, cs.w3);
  return sc;
}

Dataset generate(const SimScenario& sc) {
  if (!sc.feasible) throw ScenarioError(sc.infeasible_reason);
  std::mt19937_64 g(sc.seed);
  const bool with_x = sc.mode != CovariateMode::None;
  const ClassSplit cs = class_split(sc.true_alpha);

  // cumulative partitions, Stratum order ns,sc0,sc1,nt,sc,at
  std::array<double, 6> cum_all{};
  double acc = 0;
  for (int k = 0; k < 6; ++k) {
    acc += sc.strata[static_cast<std::size_t>(k)];
    cum_all[static_cast<std::size_t>(k)] = acc;
  }
  // class 3 = {nt, sc, at} with masses u, alpha, u
  std::array<double, 3> cum_c3{};
  if (cs.w3 > 0) {
    cum_c3 = {cs.u / cs.w3, (cs.u + sc.true_alpha) / cs.w3, 1.0};
  }
  const double noise = std::sqrt(std::max(0.0, 1 - sc.rho * sc.rho));

  Dataset ds;
  if (with_x) ds.covariate_names = {"x1", "x2"};
  ds.obs.reserve(sc.n);
  for (std::size_t i = 0; i < sc.n; ++i) {
    Observation o;
    o.z = draw_bernoulli(g, 0.5);
    int st;
    if (with_x) {
      const double l = gaussian(g);
      if (l <= sc.t1) {
        st = kNs;
      } else if (l <= sc.t2) {
        st = unit_uniform(g) < 0.5 ? kSc0 : kSc1;
      } else {
        st = kNt + draw_discrete(g, cum_c3);
      }
      o.x = {sc.rho * l + noise * gaussian(g),
             sc.rho * l + noise * gaussian(g)};
    } else {
      st = draw_discrete(g, cum_all);
    }
    o.s = stratum_s(st, o.z);
    const int a = stratum_a(st, o.z);
    o.a = a < 0 ? Tri::Undefined : (a == 1 ? Tri::One : Tri::Zero);
    if (o.s == 1) {
      const double rate =
          st == kSc ? (o.z == 1 ? sc.p1 : sc.p0) : 0.5;
      o.y = draw_bernoulli(g, rate) ? Tri::One : Tri::Zero;
    } else {
      o.y = Tri::Undefined;
    }
    ds.obs.push_back(std::move(o));
  }
  validate(ds);
  return ds;
}

DiscreteDGP to_discrete_dgp(const SimScenario& sc) {
  if (!sc.feasible) throw ScenarioError(sc.infeasible_reason);
  DiscreteDGP dgp;
  dgp.dim = 0;
  SupportPoint pt;
  pt.prob = 1;
  pt.pi1 = 0.5;
  for (int k = 0; k < 6; ++k) {
    pt.strata[static_cast<std::size_t>(k)] =
        sc.strata[static_cast<std::size_t>(k)];
    pt.y1[static_cast<std::size_t>(k)][0] = 0.5;
    pt.y1[static_cast<std::size_t>(k)][1] = 0.5;
  }
  pt.y1[kSc][0] = sc.p0;
  pt.y1[kSc][1] = sc.p1;
  dgp.points.push_back(pt);
  dgp.validate();
  return dgp;
}

ScenarioTruth scenario_truth(const SimScenario& sc, double denominator_floor) {
  if (!sc.feasible) throw ScenarioError(sc.infeasible_reason);
  const ClassSplit cs = class_split(sc.true_alpha);
  Integrands f;
  f.a_over_w3 = sc.true_alpha / cs.w3;
  f.q0 = (cs.u + sc.true_alpha * sc.p0) / cs.w3;
  f.q1 = (cs.u + sc.true_alpha * sc.p1) / cs.w3;

  double acc[5] = {0, 0, 0, 0, 0};
  if (sc.mode == CovariateMode::None || sc.rho == 0) {
    f.eval(cs.w2, cs.w3, acc);
  } else if (sc.rho >= 1) {
    // covariates reveal the class exactly: average the per-class values
    double v1[5], v2[5], v3[5];
    f.eval(0, 0, v1);
    f.eval(1, 0, v2);
    f.eval(0, 1, v3);
    for (int k = 0; k < 5; ++k)
      acc[k] = cs.w1 * v1[k] + cs.w2 * v2[k] + cs.w3 * v3[k];
  } else {
    // one-dimensional integral over the latent posterior mean M ~ N(0, sm^2),
    // with constant posterior variance v; composite Simpson over [-10, 10]
    const double r2 = sc.rho * sc.rho;
    const double v = (1 - r2) / (1 + r2);
    const double sm = sc.rho * std::sqrt(2 / (1 + r2));
    const double sv = std::sqrt(v);
    const int nseg = 20000;
    const double lo = -10, hi = 10, h = (hi - lo) / nseg;
    double wsum = 0;
    for (int i = 0; i <= nseg; ++i) {
      const double gpt = lo + h * i;
      const double simpson = (i == 0 || i == nseg) ? 1.0
                             : (i % 2 == 1)        ? 4.0
                                                   : 2.0;
      const double wt = simpson * normal_pdf(gpt);
      const double m = sm * gpt;
      const double c1 = normal_cdf((sc.t1 - m) / sv);
      const double c12 = normal_cdf((sc.t2 - m) / sv);
      double val[5];
      f.eval(c12 - c1, 1 - c12, val);
      for (int k = 0; k < 5; ++k) acc[k] += wt * val[k];
      wsum += wt;
    }
    for (int k = 0; k < 5; ++k) acc[k] /= wsum;  // normalizes the h/3 factor
  }

  ScenarioTruth t;
  t.alpha = sc.true_alpha;
  t.psi = sc.true_psi;
  t.p_always = cs.w3;
  t.beta = sc.true_psi * sc.true_alpha / cs.w3;
  t.alpha_l = acc[0];
  t.alpha_u = acc[1];
  const double num_l = acc[2], num_u = acc[3];
  t.beta_l = num_l / cs.w3;
  t.beta_u = num_u / cs.w3;
  const double den_l = num_l > 0 ? t.alpha_u : t.alpha_l;
  const double den_u = num_u > 0 ? t.alpha_l : t.alpha_u;
  if (den_l <= denominator_floor) {
    t.psi_l = -1;
    t.psi_l_truncated = true;
  } else {
    t.psi_l = std::clamp(num_l / den_l, -1.0, 1.0);
  }
  if (den_u <= denominator_floor) {
    t.psi_u = 1;
    t.psi_u_truncated = true;
  } else {
    t.psi_u = std::clamp(num_u / den_u, -1.0, 1.0);
  }
  return t;
}

std::vector<double> default_alpha_grid(bool full_scale) {
  std::vector<double> g;
  if (full_scale) {
    for (int i = 1; i <= 99; ++i) g.push_back(i / 100.0);
  } else {
    for (int i = 5; i <= 95; i += 5) g.push_back(i / 100.0);
  }
  return g;
}

std::vector<double> default_psi_grid(bool full_scale) {
  std::vector<double> g;
  const int step = full_scale ? 1 : 5;
  for (int i = -100; i <= 100; i += step) g.push_back(i / 100.0);
  return g;
}

StudyResult run_study(const StudyOptions& opt) {
  if (opt.reps < 1) throw std::invalid_argument("reps must be >= 1");
  if (opt.n == 0) throw std::invalid_argument("n must be positive");
  if (opt.folds < 1) throw std::invalid_argument("folds must be >= 1");
  const auto alpha_grid =
      opt.alpha_grid.empty() ? default_alpha_grid(opt.full_scale)
                             : opt.alpha_grid;
  const auto psi_grid =
      opt.psi_grid.empty() ? default_psi_grid(opt.full_scale) : opt.psi_grid;
  if (alpha_grid.empty() || psi_grid.empty())
    throw std::invalid_argument("empty study grid");

  const std::size_t ncell = alpha_grid.size() * psi_grid.size();
  StudyResult res;
  res.rows.resize(ncell);

  auto run_cell = [&](std::size_t ci) {
    const double a = alpha_grid[ci / psi_grid.size()];
    const double p = psi_grid[ci % psi_grid.size()];
    StudyRow row;
    row.alpha = a;
    row.psi = p;
    row.mode = opt.mode;
    row.reps = opt.reps;
    row.n = opt.n;
    SimScenario sc;
    bool designed = false;
    try {
      sc = design_scenario(a, p, opt.n, opt.mode, 0);
      designed = true;
    } catch (const std::exception&) {
      // out-of-range cell parameters count as a whole-cell failure
    }
    int n_fail = 0, n_trunc = 0, n_sign = 0;
    double len_sum = 0;
    if (!designed || !sc.feasible) {
      n_fail = opt.reps;
    } else {
      for (int r = 0; r < opt.reps; ++r) {
        sc.seed = mix_seed(opt.seed, ci, static_cast<std::uint64_t>(r));
        try {
          const Dataset ds = generate(sc);
          const FoldAssignment folds =
              make_folds(ds.n(), opt.folds, mix_seed(sc.seed, 104729, 13));
          const NuisanceSet ns =
              fit_nuisances(ds, opt.learner, folds, opt.clip_epsilon);
          const InfluenceComponents ic = influence_components(ns, ds);
          const BoundsReport b = estimate_bounds(ic, opt.denominator_floor);
          len_sum += b.psi_u - b.psi_l;
          if ((b.psi_l > 0 && b.psi_u > 0) || (b.psi_l < 0 && b.psi_u < 0))
            ++n_sign;
          if (b.psi_l_floor_truncated || b.psi_u_floor_truncated) ++n_trunc;
        } catch (const std::exception&) {
          ++n_fail;
        }
      }
    }
    row.n_success = opt.reps - n_fail;
    row.fail_rate = static_cast<double>(n_fail) / opt.reps;
    if (row.n_success > 0) {
      row.mean_length = len_sum / row.n_success;
      row.sign_informative_frac =
          static_cast<double>(n_sign) / row.n_success;
      row.trunc_rate = static_cast<double>(n_trunc) / row.n_success;
    } else {
      row.mean_length = kNaN;
      row.sign_informative_frac = kNaN;
      row.trunc_rate = kNaN;
    }
    res.rows[ci] = row;
  };

  const int workers =
      std::max(1, std::min<int>(opt.workers, static_cast<int>(ncell)));
  if (workers == 1) {
    for (std::size_t ci = 0; ci < ncell; ++ci) run_cell(ci);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t ci = next.fetch_add(1); ci < ncell;
             ci = next.fetch_add(1))
          run_cell(ci);
      });
    for (auto& th : pool) th.join();
  }

  double s = 0;
  for (const auto& row : res.rows)
    if (row.n_success > 0) {
      s += row.mean_length;
      ++res.cells_with_success;
    }
  res.study_mean_length =
      res.cells_with_success > 0 ? s / res.cells_with_success : kNaN;
  return res;
}

void write_study_table(const StudyResult& res, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "alpha,psi,mode,mean_length,sign_informative_frac,trunc_rate,"
         "fail_rate,reps,n\n";
  char buf[64];
  auto put = [&](double x) {
    if (std::isfinite(x)) {
      std::snprintf(buf, sizeof(buf), "%.10g", x);
      out << buf;
    } else {
      out << "NA";
    }
  };
  for (const auto& r : res.rows) {
    put(r.alpha);
    out << ',';
    put(r.psi);
    out << ',' << mode_name(r.mode) << ',';
    put(r.mean_length);
    out << ',';
    put(r.sign_informative_frac);
    out << ',';
    put(r.trunc_rate);
    out << ',';
    put(r.fail_rate);
    out << ',' << r.reps << ',' << r.n << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace scate
