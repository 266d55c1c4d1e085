#ifndef SCATE_CLI_HPP
#define SCATE_CLI_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "scate/oracle.hpp"

namespace scate {

// Everything a run needs, resolvable from a JSON config file with flag
// overrides (flags win). Field names match the config keys.
struct RunConfig {
  // io
  std::string input;
  std::string output_dir = ".";
  std::string z_col = "z", s_col = "s", a_col = "a", y_col = "y";
  std::vector<std::string> covariates;
  // estimation
  std::string learner = "logistic-irls";
  int folds = 5;
  double clip_eps = 0.01;
  double denominator_floor = 0.01;
  std::size_t grid = 21;  // sensitivity grid points per axis
  // simulation
  std::vector<double> alpha_grid, psi_grid;
  int reps = 0;  // 0 = scale default (200 desk, 1000 full)
  std::size_t n = 1000;
  std::string mode = "none";  // none | weak | strong | all
  bool full_scale = false;
  // shared
  std::uint64_t seed = 20260825;
  bool seed_set = false;  // simulate refuses to run without an explicit seed
  int workers = 0;        // 0 = env SCATE_WORKERS, then hardware count
  // check
  bool corrupt_denominator_rule = false;  // negative-control fixture
  std::string dgp_file;                   // optional DGP JSON to certify
  int resolver_dgps = 20;
  std::size_t resolver_n = 100000;
};

// "lo:hi:step" or comma-separated values
std::vector<double> parse_grid_spec(const std::string& spec);

// JSON DGP description: {"dim": d, "points": [{"prob", "x", "pi1",
// "strata" (6, order ns,sc0,sc1,nt,sc,at), "y1" (6 pairs, per arm)}]}
DiscreteDGP load_dgp_json(const std::string& path);

// applies config-file values onto cfg (only keys present in the file)
void apply_config_file(RunConfig& cfg, const std::string& path);

int resolve_workers(const RunConfig& cfg);

int cmd_estimate(const RunConfig& cfg);
int cmd_simulate(const RunConfig& cfg);
int cmd_check(const RunConfig& cfg);

}  // namespace scate

#endif
