#include "scate/sensitivity.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace scate {
namespace {

// means and second moments of (alpha_l, alpha_u, beta_l_num, beta_u_num);
// every grid cell is then O(1), and the accumulation order is fixed, so the
// surface is byte-stable regardless of how callers schedule work
struct Moments {
  double n = 0;
  double e_lambda0 = 0;
  double m[4] = {0, 0, 0, 0};
  double s[4][4] = {};
};

Moments collect(const InfluenceComponents& ic) {
  Moments mo;
  mo.n = static_cast<double>(ic.n);
  const std::vector<double>* cols[4] = {&ic.alpha_l, &ic.alpha_u,
                                        &ic.beta_l_num, &ic.beta_u_num};
  double sl = 0;
  for (std::size_t i = 0; i < ic.n; ++i) {
    double v[4];
    for (int k = 0; k < 4; ++k) v[k] = (*cols[k])[i];
    for (int k = 0; k < 4; ++k) {
      mo.m[k] += v[k];
      for (int l = k; l < 4; ++l) mo.s[k][l] += v[k] * v[l];
    }
    sl += ic.phi0_S[i];
  }
  for (int k = 0; k < 4; ++k) {
    mo.m[k] /= mo.n;
    for (int l = k; l < 4; ++l) {
      mo.s[k][l] /= mo.n;
      mo.s[l][k] = mo.s[k][l];
    }
  }
  mo.e_lambda0 = sl / mo.n;
  return mo;
}

SensitivityCell cell_from(const Moments& mo, double delta1, double delta2,
                          double floor_) {
  SensitivityCell c;
  c.delta1 = delta1;
  c.delta2 = delta2;
  const double wa[4] = {1 - delta1, delta1, 0, 0};
  const double wb[4] = {0, 0, 1 - delta2, delta2};
  double den = 0, num = 0;
  for (int k = 0; k < 4; ++k) {
    den += wa[k] * mo.m[k];
    num += wb[k] * mo.m[k];
  }
  c.alpha_star = den;
  c.beta_star = mo.e_lambda0 > 0
                    ? num / mo.e_lambda0
                    : std::numeric_limits<double>::quiet_NaN();
  if (!(den > floor_)) {
    c.defined = false;
    c.psi_star = c.se = c.ci_lo = c.ci_hi =
        std::numeric_limits<double>::quiet_NaN();
    return c;
  }
  c.defined = true;
  const double psi = num / den;
  double pnn = 0, pnd = 0, pdd = 0;
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l) {
      pnn += wb[k] * wb[l] * mo.s[k][l];
      pnd += wb[k] * wa[l] * mo.s[k][l];
      pdd += wa[k] * wa[l] * mo.s[k][l];
    }
  double var = (pnn - 2 * psi * pnd + psi * psi * pdd) / (den * den);
  if (var < 0) var = 0;  // guard against round-off
  c.psi_star = psi;
  c.se = std::sqrt(var / mo.n);
  c.ci_lo = psi - 1.96 * c.se;
  c.ci_hi = psi + 1.96 * c.se;
  c.rejects_zero = c.ci_lo > 0 || c.ci_hi < 0;
  return c;
}

}  // namespace

SensitivityCell evaluate_at(const InfluenceComponents& ic, double delta1,
                            double delta2, double denominator_floor) {
  if (ic.n == 0) throw std::invalid_argument("empty influence components");
  if (delta1 < 0 || delta1 > 1 || delta2 < 0 || delta2 > 1)
    throw std::invalid_argument("delta coordinates must lie in [0,1]");
  return cell_from(collect(ic), delta1, delta2, denominator_floor);
}

SensitivityGrid evaluate_grid(const InfluenceComponents& ic, std::size_t m1,
                              std::size_t m2, double denominator_floor) {
  if (ic.n == 0) throw std::invalid_argument("empty influence components");
  if (m1 < 2 || m2 < 2)
    throw std::invalid_argument("grid needs at least 2 points per axis");
  if (!(denominator_floor > 0))
    throw std::invalid_argument("denominator_floor must be positive");

  const Moments mo = collect(ic);
  SensitivityGrid g;
  g.m1 = m1;
  g.m2 = m2;
  g.n = ic.n;
  g.denominator_floor = denominator_floor;
  g.cells.reserve(m1 * m2);
  for (std::size_t i1 = 0; i1 < m1; ++i1) {
    const double d1 = static_cast<double>(i1) / static_cast<double>(m1 - 1);
    for (std::size_t i2 = 0; i2 < m2; ++i2) {
      const double d2 = static_cast<double>(i2) / static_cast<double>(m2 - 1);
      g.cells.push_back(cell_from(mo, d1, d2, denominator_floor));
      if (g.cells.back().defined) ++g.n_defined;
    }
  }
  if (g.n_defined == 0)
    throw std::runtime_error(
        "sensitivity surface undefined everywhere: every mixture denominator "
        "falls at or below the floor");
  return g;
}

void export_grid(const SensitivityGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "delta1,delta2,alpha_star,beta_star,psi_star,se,ci_lo,ci_hi,"
         "rejects_zero,defined\n";
  char buf[64];
  auto put = [&](double x, bool last = false) {
    if (std::isfinite(x)) {
      std::snprintf(buf, sizeof(buf), "%.10g", x);
      out << buf;
    } else {
      out << "NA";
    }
    if (!last) out << ',';
  };
  for (const auto& c : grid.cells) {
    put(c.delta1);
    put(c.delta2);
    put(c.alpha_star);
    put(c.beta_star);
    put(c.psi_star);
    put(c.se);
    put(c.ci_lo);
    put(c.ci_hi);
    out << (c.rejects_zero ? 1 : 0) << ',' << (c.defined ? 1 : 0) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace scate
