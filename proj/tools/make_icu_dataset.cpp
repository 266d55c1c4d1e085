// Regenerates data/icu_synthetic.csv: a covariate-free synthetic dataset
// calibrated so the closed-form population bounds are alpha [0, 0.08],
// survivor-ITT [-0.19, 0.06], and effect bounds truncated to [-1, 1]
// (the lower alpha bound sits at 0, which floors both ratio denominators).
// The file is a deterministic largest-remainder expansion of the exact law,
// so re-running this tool reproduces it byte for byte.

#include <cstdio>
#include <string>

#include "scate/data.hpp"
#include "scate/oracle.hpp"

int main(int argc, char** argv) {
  const std::string out = argc > 1 ? argv[1] : "data/icu_synthetic.csv";
  const std::size_t n = argc > 2 ? std::stoul(argv[2]) : 20000;

  scate::DiscreteDGP dgp;
  dgp.dim = 0;
  scate::SupportPoint pt;
  pt.prob = 1.0;
  pt.pi1 = 0.5;
  pt.strata = {0.55, 0.05, 0.04, 0.16, 0.04, 0.16};  // ns sc0 sc1 nt sc at
  pt.y1[scate::kNs] = {0.5, 0.5};    // unused (never selected)
  pt.y1[scate::kSc0] = {0.5, 0.20};  // z=0 entry unused
  pt.y1[scate::kSc1] = {0.5, 0.24};
  pt.y1[scate::kNt] = {0.50, 0.50};
  pt.y1[scate::kSc] = {0.30, 0.35};
  pt.y1[scate::kAt] = {0.54, 0.54};
  dgp.points.push_back(pt);

  const scate::OracleEstimands e = scate::exact_estimands(dgp);
  std::printf("population: alpha[%g, %g] itt[%g, %g] effect[%g, %g]%s\n",
              e.alpha_l, e.alpha_u, e.beta_l, e.beta_u, e.psi_l, e.psi_u,
              e.psi_l_truncated || e.psi_u_truncated ? " (truncated)" : "");

  const scate::SampleDraw draw = scate::expand_law(dgp, n);
  scate::write_dataset(draw.ds, out);
  std::printf("wrote %s (%zu rows)\n", out.c_str(), draw.ds.n());
  return 0;
}
