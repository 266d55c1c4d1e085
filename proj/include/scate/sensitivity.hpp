#ifndef SCATE_SENSITIVITY_HPP
#define SCATE_SENSITIVITY_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "scate/bounds.hpp"

namespace scate {

// One grid cell of the sensitivity surface. delta1 mixes the two alpha
// influence functions (0 = lower endpoint, 1 = upper); delta2 mixes the two
// beta numerators. psi_star is the raw ratio mean(num*)/mean(den*), left
// unclamped so that the grid extremes reproduce the un-truncated bound pair.
struct SensitivityCell {
  double delta1 = 0, delta2 = 0;
  double alpha_star = 0, beta_star = 0;
  double psi_star = 0, se = 0, ci_lo = 0, ci_hi = 0;
  bool rejects_zero = false;
  bool defined = false;
};

struct SensitivityGrid {
  std::size_t m1 = 0, m2 = 0;  // grid sizes along delta1 / delta2
  std::size_t n = 0;           // sample size behind the surface
  std::size_t n_defined = 0;
  double denominator_floor = 0.01;
  std::vector<SensitivityCell> cells;  // delta1-major order

  const SensitivityCell& at(std::size_t i1, std::size_t i2) const {
    return cells[i1 * m2 + i2];
  }
};

SensitivityCell evaluate_at(const InfluenceComponents& ic, double delta1,
                            double delta2, double denominator_floor = 0.01);

// Evenly spaced inclusive grids on [0,1]^2. Throws if every cell lands below
// the denominator floor (the surface carries no information in that case).
SensitivityGrid evaluate_grid(const InfluenceComponents& ic,
                              std::size_t m1 = 21, std::size_t m2 = 21,
                              double denominator_floor = 0.01);

// CSV with header
// delta1,delta2,alpha_star,beta_star,psi_star,se,ci_lo,ci_hi,rejects_zero,defined
// Undefined cells carry NA in the numeric psi/se/ci columns.
void export_grid(const SensitivityGrid& grid, const std::string& path);

}  // namespace scate

#endif
