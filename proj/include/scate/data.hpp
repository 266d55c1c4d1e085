#ifndef SCATE_DATA_HPP
#define SCATE_DATA_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace scate {

// Tri-state value for treatment (undefined when not selected) and outcome.
// A dedicated type, never a numeric sentinel: downstream code must decide
// explicitly what an undefined treatment means (e.g. 1(A!=0) = 1).
enum class Tri : std::int8_t { Zero = 0, One = 1, Undefined = 2 };

inline bool defined(Tri t) { return t != Tri::Undefined; }

// One subject: covariates x, binary instrument z, binary selection s,
// treatment a (defined iff s=1), outcome y (defined when s=1).
struct Observation {
  std::vector<double> x;
  int z = 0;
  int s = 0;
  Tri a = Tri::Undefined;
  Tri y = Tri::Undefined;

  // products used by every estimator; both are 0 by definition when s=0
  double sy() const { return (s == 1 && y == Tri::One) ? 1.0 : 0.0; }
  double sym1() const { return sy() - static_cast<double>(s); }  // s*(y-1)
};

struct Dataset {
  std::vector<Observation> obs;
  std::vector<std::string> covariate_names;

  std::size_t n() const { return obs.size(); }
  std::size_t dim() const { return covariate_names.size(); }
};

// Throws std::invalid_argument naming the first violated invariant and row.
void validate(const Dataset& ds);

struct Schema {
  std::string z_col = "z";
  std::string s_col = "s";
  std::string a_col = "a";
  std::string y_col = "y";
  std::vector<std::string> covariate_cols;  // empty means d=0
  char delimiter = ',';
  std::string missing_token = "NA";
};

Dataset load_dataset(const std::string& path, const Schema& schema);
void write_dataset(const Dataset& ds, const std::string& path,
                   const Schema& schema = Schema{});

// Descriptive margins per instrument arm. The treatment rate is reported on
// both denominators (all subjects / selected subjects) because observational
// summaries are quoted both ways in practice.
struct Summary {
  std::size_t n = 0;
  std::size_t n_arm[2] = {0, 0};
  double p_s1[2] = {0, 0};      // P(S=1 | Z=z)
  double p_a1_all[2] = {0, 0};  // P(A=1 | Z=z), undefined counted as not-1
  double p_a1_sel[2] = {0, 0};  // P(A=1 | S=1, Z=z)
  double p_y1_sel[2] = {0, 0};  // P(Y=1 | S=1, Z=z)

  std::string to_text() const;  // key=value lines
  std::string to_json() const;
};

Summary summarize(const Dataset& ds);

}  // namespace scate

#endif
