#ifndef SCATE_TESTS_HELPERS_HPP
#define SCATE_TESTS_HELPERS_HPP

#include <cstdlib>
#include <filesystem>
#include <string>

#include "scate/oracle.hpp"

namespace scate::testhelp {

// S==1 one-point law whose Wald ratio is exactly 0.4: always-selected strata
// only, theta_1(1)-theta_0(1) = 0.5 and mu_1-mu_0 = 0.2.
inline DiscreteDGP wald_dgp() {
  DiscreteDGP dgp;
  SupportPoint pt;
  pt.strata = {0.0, 0.0, 0.0, 0.3, 0.5, 0.2};
  pt.y1[kNs] = {0.5, 0.5};
  pt.y1[kSc0] = {0.5, 0.5};
  pt.y1[kSc1] = {0.5, 0.5};
  pt.y1[kNt] = {0.5, 0.5};
  pt.y1[kSc] = {0.5, 0.9};  // treated rate - control rate = SCATE = 0.4
  pt.y1[kAt] = {0.5, 0.5};
  dgp.points.push_back(pt);
  return dgp;
}

// One-point law with every indicator margin at least 0.11 and both alpha
// bounds well above the denominator floor; closed forms used by the coverage
// tests: alpha bounds (0.2, 0.4), beta numerators (0.08, 0.28),
// E{lambda_0} = 0.7, psi*(0.5, 0.5) = 0.18 / 0.30 = 0.6.
inline DiscreteDGP healthy_margin_dgp() {
  DiscreteDGP dgp;
  SupportPoint pt;
  pt.strata = {0.1, 0.1, 0.1, 0.2, 0.3, 0.2};
  pt.y1[kNs] = {0.5, 0.5};
  pt.y1[kSc0] = {0.6, 0.6};
  pt.y1[kSc1] = {0.7, 0.7};
  pt.y1[kNt] = {0.5, 0.5};
  pt.y1[kSc] = {0.3, 0.8};
  pt.y1[kAt] = {0.6, 0.6};
  dgp.points.push_back(pt);
  return dgp;
}

inline std::string data_dir() {
  const char* e = std::getenv("SCATE_DATA_DIR");
  return e ? std::string(e) : std::string("data");
}

// fresh scratch directory per call; never reused across assertions
inline std::string scratch_dir(const std::string& tag) {
  static int counter = 0;
  const auto base = std::filesystem::temp_directory_path() /
                    ("scate_test_" + tag + "_" + std::to_string(counter++));
  std::filesystem::remove_all(base);
  std::filesystem::create_directories(base);
  return base.string();
}

}  // namespace scate::testhelp

#endif
