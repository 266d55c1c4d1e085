#ifndef SCATE_LEARNERS_HPP
#define SCATE_LEARNERS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "scate/data.hpp"

namespace scate {

enum class LearnerKind { MarginalMean, LogisticIrls, Knn };

struct LearnerSpec {
  LearnerKind kind = LearnerKind::LogisticIrls;
  int knn_k = 20;          // neighbors
  int max_iter = 100;      // IRLS iterations
  double tol = 1e-8;       // IRLS convergence tolerance on the step
  double ridge = 1e-6;     // ridge stabilizer on the information matrix

  void validate() const;  // throws std::invalid_argument on bad ranges
};

LearnerSpec parse_learner(const std::string& name);  // "marginal-mean" etc.
std::string learner_name(LearnerKind k);

// row-major flat copy of the covariates; d may be 0
struct Features {
  std::vector<double> v;
  std::size_t n = 0, d = 0;
  double at(std::size_t i, std::size_t j) const { return v[i * d + j]; }
  static Features from(const Dataset& ds);
};

// Self-contained fitted state; predictions are deterministic and in [0,1].
struct FittedLearner {
  LearnerKind kind = LearnerKind::MarginalMean;
  bool converged = true;      // false = IRLS hit max_iter (prediction kept)
  double constant = 0.5;      // marginal mean / degenerate fallback
  bool degenerate = false;    // constant fit because labels were all equal
  // logistic: coefficients on standardized features, intercept first
  std::vector<double> beta, center, scale;
  // knn: standardized training block
  std::vector<double> train_x;  // row-major, standardized
  std::vector<double> train_y, train_w;
  int k = 1;

  double predict_point(const double* x, std::size_t d) const;
  double predict(const Features& f, std::size_t row) const;
};

// weights may be null (all-1); rows lists the training row indices
FittedLearner fit(const LearnerSpec& spec, const Features& f,
                  const std::vector<double>& y, const std::vector<double>* w,
                  const std::vector<std::uint32_t>& rows);

struct FoldAssignment {
  std::vector<int> fold_of;  // fold index per observation
  int K = 5;
  std::uint64_t seed = 0;
};
FoldAssignment make_folds(std::size_t n, int K, std::uint64_t seed);

struct CrossFitResult {
  std::vector<double> pred;    // out-of-fold prediction per observation
  bool all_converged = true;
  int degenerate_folds = 0;    // folds that fell back to a constant
};

// Out-of-fold predictions for every observation. Only rows with
// train_mask[i] != 0 are used for fitting; predictions cover all rows.
// K=1 is the flagged no-split diagnostic mode (fit and predict on the full
// training set).
CrossFitResult cross_fit(const LearnerSpec& spec, const Features& f,
                         const std::vector<double>& y,
                         const std::vector<double>* w,
                         const FoldAssignment& folds,
                         const std::vector<char>* train_mask = nullptr);

}  // namespace scate

#endif
