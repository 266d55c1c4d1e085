#include "scate/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "scate/rng.hpp"

namespace scate {

void LearnerSpec::validate() const {
  if (knn_k < 1) throw std::invalid_argument("knn neighbors must be >= 1");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be > 0");
  if (!(ridge >= 0)) throw std::invalid_argument("ridge must be >= 0");
}

LearnerSpec parse_learner(const std::string& name) {
  LearnerSpec spec;
  if (name == "marginal-mean") spec.kind = LearnerKind::MarginalMean;
  else if (name == "logistic-irls") spec.kind = LearnerKind::LogisticIrls;
  else if (name == "knn") spec.kind = LearnerKind::Knn;
  else throw std::invalid_argument("unknown learner '" + name + "'");
  return spec;
}

std::string learner_name(LearnerKind k) {
  switch (k) {
    case LearnerKind::MarginalMean: return "marginal-mean";
    case LearnerKind::LogisticIrls: return "logistic-irls";
    case LearnerKind::Knn: return "knn";
  }
  return "?";
}

Features Features::from(const Dataset& ds) {
  Features f;
  f.n = ds.n();
  f.d = ds.dim();
  f.v.reserve(f.n * f.d);
  for (const Observation& o : ds.obs)
    f.v.insert(f.v.end(), o.x.begin(), o.x.end());
  return f;
}

namespace {

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// Cholesky solve of (A + effectively already-regularized) small SPD system.
// A is (p x p) row-major, b length p; returns false if not positive definite.
bool chol_solve(std::vector<double>& A, std::vector<double>& b, std::size_t p) {
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) {
      double sum = A[i * p + j];
      for (std::size_t k = 0; k < i; ++k) sum -= A[i * p + k] * A[j * p + k];
      if (i == j) {
        if (sum <= 0) return false;
        A[i * p + i] = std::sqrt(sum);
      } else {
        A[j * p + i] = sum / A[i * p + i];
      }
    }
  }
  for (std::size_t i = 0; i < p; ++i) {  // forward
    double sum = b[i];
    for (std::size_t k = 0; k < i; ++k) sum -= A[i * p + k] * b[k];
    b[i] = sum / A[i * p + i];
  }
  for (std::size_t i = p; i-- > 0;) {  // backward
    double sum = b[i];
    for (std::size_t k = i + 1; k < p; ++k) sum -= A[k * p + i] * b[k];
    b[i] = sum / A[i * p + i];
  }
  return true;
}

void standardization(const Features& f, const std::vector<std::uint32_t>& rows,
                     std::vector<double>* center, std::vector<double>* scale) {
  const std::size_t d = f.d;
  center->assign(d, 0.0);
  scale->assign(d, 1.0);
  if (rows.empty()) return;
  for (std::uint32_t i : rows)
    for (std::size_t j = 0; j < d; ++j) (*center)[j] += f.at(i, j);
  for (std::size_t j = 0; j < d; ++j) (*center)[j] /= static_cast<double>(rows.size());
  std::vector<double> ss(d, 0.0);
  for (std::uint32_t i : rows)
    for (std::size_t j = 0; j < d; ++j) {
      const double c = f.at(i, j) - (*center)[j];
      ss[j] += c * c;
    }
  for (std::size_t j = 0; j < d; ++j) {
    const double sd = std::sqrt(ss[j] / static_cast<double>(rows.size()));
    (*scale)[j] = sd > 0 ? sd : 1.0;
  }
}

FittedLearner fit_constant(double rate, bool degenerate) {
  FittedLearner m;
  m.kind = LearnerKind::MarginalMean;
  m.constant = rate;
  m.degenerate = degenerate;
  return m;
}

FittedLearner fit_logistic(const LearnerSpec& spec, const Features& f,
                           const std::vector<double>& y,
                           const std::vector<double>* w,
                           const std::vector<std::uint32_t>& rows) {
  FittedLearner m;
  m.kind = LearnerKind::LogisticIrls;
  standardization(f, rows, &m.center, &m.scale);
  const std::size_t d = f.d, p = d + 1;
  m.beta.assign(p, 0.0);
  std::vector<double> xi(p);
  for (int it = 0; it < spec.max_iter; ++it) {
    std::vector<double> H(p * p, 0.0), g(p, 0.0);
    for (std::uint32_t i : rows) {
      const double wi = w ? (*w)[i] : 1.0;
      if (wi <= 0) continue;
      xi[0] = 1.0;
      for (std::size_t j = 0; j < d; ++j)
        xi[j + 1] = (f.at(i, j) - m.center[j]) / m.scale[j];
      double eta = 0;
      for (std::size_t j = 0; j < p; ++j) eta += m.beta[j] * xi[j];
      const double mu = sigmoid(eta);
      const double wq = wi * std::max(mu * (1 - mu), 1e-10);
      for (std::size_t j = 0; j < p; ++j) {
        g[j] += wi * (y[i] - mu) * xi[j];
        for (std::size_t k = j; k < p; ++k) H[j * p + k] += wq * xi[j] * xi[k];
      }
    }
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = 0; k < j; ++k) H[j * p + k] = H[k * p + j];
    for (std::size_t j = 1; j < p; ++j) {  // intercept unpenalized
      H[j * p + j] += spec.ridge;
      g[j] -= spec.ridge * m.beta[j];
    }
    std::vector<double> step = g;
    if (!chol_solve(H, step, p)) {
      m.converged = false;
      break;
    }
    double max_step = 0;
    for (std::size_t j = 0; j < p; ++j) {
      m.beta[j] += step[j];
      max_step = std::max(max_step, std::fabs(step[j]));
    }
    if (max_step < spec.tol) return m;
  }
  m.converged = false;  // best iterate kept
  return m;
}

FittedLearner fit_knn(const LearnerSpec& spec, const Features& f,
                      const std::vector<double>& y,
                      const std::vector<double>* w,
                      const std::vector<std::uint32_t>& rows) {
  FittedLearner m;
  m.kind = LearnerKind::Knn;
  m.k = std::min<int>(spec.knn_k, static_cast<int>(rows.size()));
  standardization(f, rows, &m.center, &m.scale);
  const std::size_t d = f.d;
  m.train_x.reserve(rows.size() * d);
  for (std::uint32_t i : rows) {
    for (std::size_t j = 0; j < d; ++j)
      m.train_x.push_back((f.at(i, j) - m.center[j]) / m.scale[j]);
    m.train_y.push_back(y[i]);
    m.train_w.push_back(w ? (*w)[i] : 1.0);
  }
  return m;
}

}  // namespace

FittedLearner fit(const LearnerSpec& spec, const Features& f,
                  const std::vector<double>& y, const std::vector<double>* w,
                  const std::vector<std::uint32_t>& rows) {
  spec.validate();
  if (rows.empty()) throw std::invalid_argument("fit requires at least one row");
  double wsum = 0, ysum = 0;
  for (std::uint32_t i : rows) {
    const double wi = w ? (*w)[i] : 1.0;
    if (wi < 0) throw std::invalid_argument("negative weight");
    if (y[i] != 0.0 && y[i] != 1.0)
      throw std::invalid_argument("labels must be binary");
    wsum += wi;
    ysum += wi * y[i];
  }
  if (wsum <= 0) throw std::invalid_argument("all training weights are zero");
  const double rate = ysum / wsum;

  // all-0 or all-1 labels: every learner degenerates to the constant rate
  // (kept exact so that structural cases like S==1 collapse exactly)
  if (rate == 0.0 || rate == 1.0) return fit_constant(rate, true);

  switch (spec.kind) {
    case LearnerKind::MarginalMean: return fit_constant(rate, false);
    case LearnerKind::LogisticIrls: return fit_logistic(spec, f, y, w, rows);
    case LearnerKind::Knn: return fit_knn(spec, f, y, w, rows);
  }
  throw std::logic_error("unreachable learner kind");
}

double FittedLearner::predict_point(const double* x, std::size_t d) const {
  switch (kind) {
    case LearnerKind::MarginalMean:
      return constant;
    case LearnerKind::LogisticIrls: {
      double eta = beta[0];
      for (std::size_t j = 0; j < d; ++j)
        eta += beta[j + 1] * (x[j] - center[j]) / scale[j];
      return sigmoid(eta);
    }
    case LearnerKind::Knn: {
      const std::size_t ntr = train_y.size();
      std::vector<std::pair<double, std::uint32_t>> dist(ntr);
      for (std::size_t i = 0; i < ntr; ++i) {
        double s = 0;
        for (std::size_t j = 0; j < d; ++j) {
          const double c = (x[j] - center[j]) / scale[j] - train_x[i * d + j];
          s += c * c;
        }
        dist[i] = {s, static_cast<std::uint32_t>(i)};
      }
      const std::size_t kk = static_cast<std::size_t>(k);
      std::partial_sort(dist.begin(), dist.begin() + kk, dist.end());
      double nw = 0, ny = 0;
      for (std::size_t i = 0; i < kk; ++i) {
        const double wi = train_w[dist[i].second];
        nw += wi;
        ny += wi * train_y[dist[i].second];
      }
      return nw > 0 ? ny / nw : 0.5;
    }
  }
  return constant;
}

double FittedLearner::predict(const Features& f, std::size_t row) const {
  return predict_point(f.d ? &f.v[row * f.d] : nullptr, f.d);
}

FoldAssignment make_folds(std::size_t n, int K, std::uint64_t seed) {
  if (K < 1) throw std::invalid_argument("folds must be >= 1");
  if (static_cast<std::size_t>(K) > n)
    throw std::invalid_argument("more folds than observations");
  FoldAssignment fa;
  fa.K = K;
  fa.seed = seed;
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  // manual Fisher-Yates: std::shuffle is implementation-defined
  std::mt19937_64 g(seed);
  for (std::size_t i = n; i-- > 1;)
    std::swap(perm[i], perm[g() % (i + 1)]);
  fa.fold_of.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    fa.fold_of[perm[i]] = static_cast<int>(i % static_cast<std::size_t>(K));
  return fa;
}

CrossFitResult cross_fit(const LearnerSpec& spec, const Features& f,
                         const std::vector<double>& y,
                         const std::vector<double>* w,
                         const FoldAssignment& folds,
                         const std::vector<char>* train_mask) {
  const std::size_t n = f.n;
  if (folds.fold_of.size() != n)
    throw std::invalid_argument("fold assignment does not match dataset");
  CrossFitResult res;
  res.pred.assign(n, 0.0);

  auto trainable = [&](std::size_t i) {
    return !train_mask || (*train_mask)[i] != 0;
  };

  for (int fold = 0; fold < folds.K; ++fold) {
    std::vector<std::uint32_t> rows;
    for (std::size_t i = 0; i < n; ++i)
      if (trainable(i) && (folds.K == 1 || folds.fold_of[i] != fold))
        rows.push_back(static_cast<std::uint32_t>(i));
    FittedLearner fl;
    if (rows.empty()) {
      // empty training complement (tiny subsets): neutral constant fallback
      fl = FittedLearner{};
      fl.degenerate = true;
      ++res.degenerate_folds;
    } else {
      fl = fit(spec, f, y, w, rows);
      if (fl.degenerate) ++res.degenerate_folds;
      if (!fl.converged) res.all_converged = false;
    }
    for (std::size_t i = 0; i < n; ++i)
      if (folds.fold_of[i] == fold) res.pred[i] = fl.predict(f, i);
  }
  return res;
}

}  // namespace scate
