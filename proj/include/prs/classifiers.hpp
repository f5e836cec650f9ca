#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "prs/common.hpp"
#include "prs/feature_matrix.hpp"

namespace prs {

enum class ClassifierKind { LR, LDA, QDA, SVM_POLY };

inline constexpr std::array<ClassifierKind, 4> kAllClassifiers = {ClassifierKind::LR, ClassifierKind::SVM_POLY,
                                                                  ClassifierKind::LDA, ClassifierKind::QDA};

inline std::string_view to_string(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::LR: return "LR";
    case ClassifierKind::LDA: return "LDA";
    case ClassifierKind::QDA: return "QDA";
    case ClassifierKind::SVM_POLY: return "SVM_POLY";
  }
  return "?";
}

inline ClassifierKind parse_classifier(std::string_view s) {
  for (auto k : kAllClassifiers)
    if (to_string(k) == s) return k;
  if (s == "SVM") return ClassifierKind::SVM_POLY;
  throw ArgumentError("unknown classifier '" + std::string(s) + "'");
}

struct LogisticParams {
  double learning_rate{0.1};  // initial step of each backtracking line search
  int max_iter{5000};
  double tol{1e-8};           // stop when the loss decrease falls below this
};

struct DiscriminantParams {
  // Ridge added to each covariance: ridge_scale * trace(Sigma) / f.
  double ridge_scale{1e-6};
};

struct SvmParams {
  int degree{3};
  double C{1.0};
  double gamma{1.0};
  double coef0{1.0};  // K(x, z) = (gamma * x.z + coef0)^degree
  double tol{1e-6};   // maximal violating pair gap at termination
  long max_iter{10'000'000};
};

struct ClassifierSpec {
  ClassifierKind kind{ClassifierKind::LR};
  LogisticParams logistic{};
  DiscriminantParams discriminant{};
  SvmParams svm{};
};

struct LogisticModel {
  Eigen::VectorXd weights;
  double bias{0.0};
  std::vector<double> loss_history;  // mean negative log-likelihood per iteration

  double probability(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    const double z = x.dot(weights) + bias;
    return 1.0 / (1.0 + std::exp(-z));
  }
};

struct LinearDiscriminantModel {
  Eigen::VectorXd weights;  // Sigma^-1 (mu2 - mu1)
  double bias{0.0};         // decision: x.w + bias >= 0 -> C2
};

struct QuadraticDiscriminantModel {
  std::array<Eigen::VectorXd, 2> means;
  std::array<Eigen::MatrixXd, 2> precisions;
  std::array<double, 2> log_dets{};
  std::array<double, 2> log_priors{};

  double discriminant(int k, const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    const Eigen::VectorXd d = x.transpose() - means[k];
    return -0.5 * d.dot(precisions[k] * d) - 0.5 * log_dets[k] + log_priors[k];
  }
};

struct SvmModel {
  SvmParams params;
  Eigen::MatrixXd support_vectors;
  Eigen::VectorXd coef;        // alpha_i * y_i per support vector
  double rho{0.0};             // decision: sum coef_i K(sv_i, x) - rho
  Eigen::VectorXd alpha;       // full dual solution over training rows
  double dual_objective{0.0};  // 1/2 a'Qa - e'a at the solution
  double gap{0.0};             // violating-pair gap at termination
  long iterations{0};
  bool converged{false};
};

struct TrainedModel {
  ClassifierKind kind{ClassifierKind::LR};
  Eigen::Index n_features{0};
  std::variant<LogisticModel, LinearDiscriminantModel, QuadraticDiscriminantModel, SvmModel> model;
};

namespace detail {

inline void check_training_input(const Eigen::MatrixXd& x, std::span<const int> y) {
  if (x.rows() != static_cast<Eigen::Index>(y.size())) throw ShapeError("train: label count does not match rows");
  if (x.cols() < 1) throw ShapeError("train: need at least one feature");
  if (!x.allFinite()) throw DataError("train: non-finite features");
  bool has0 = false;
  bool has1 = false;
  for (int v : y) {
    if (v != 0 && v != 1) throw ArgumentError("train: labels must be class indices 0/1");
    (v == 0 ? has0 : has1) = true;
  }
  if (!has0 || !has1) throw DataError("train: single class");
}

// log(1 + e^z) without overflow.
inline double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

inline double logistic_loss(const Eigen::MatrixXd& x, const Eigen::VectorXd& yv, const Eigen::VectorXd& w,
                            double b) {
  const Eigen::VectorXd z = (x * w).array() + b;
  double s = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) s += softplus(z[i]) - yv[i] * z[i];
  return s / static_cast<double>(z.size());
}

inline LogisticModel fit_logistic(const Eigen::MatrixXd& x, std::span<const int> y, const LogisticParams& p) {
  if (!(p.learning_rate > 0) || p.max_iter < 0 || !(p.tol >= 0))
    throw ArgumentError("logistic regression: invalid hyperparameters");
  const auto m = x.rows();
  const auto f = x.cols();
  Eigen::VectorXd yv(m);
  for (Eigen::Index i = 0; i < m; ++i) yv[i] = y[i];

  LogisticModel model;
  model.weights = Eigen::VectorXd::Zero(f);
  double loss = logistic_loss(x, yv, model.weights, model.bias);
  model.loss_history.push_back(loss);
  for (int it = 0; it < p.max_iter; ++it) {
    const Eigen::VectorXd z = (x * model.weights).array() + model.bias;
    Eigen::VectorXd r(m);
    for (Eigen::Index i = 0; i < m; ++i) r[i] = 1.0 / (1.0 + std::exp(-z[i])) - yv[i];
    const Eigen::VectorXd gw = x.transpose() * r / static_cast<double>(m);
    const double gb = r.sum() / static_cast<double>(m);
    const double gnorm2 = gw.squaredNorm() + gb * gb;
    if (gnorm2 == 0.0) break;

    // Armijo backtracking keeps the loss non-increasing.
    double step = p.learning_rate;
    Eigen::VectorXd w_new;
    double b_new = 0.0;
    double loss_new = loss;
    bool accepted = false;
    for (int k = 0; k < 60; ++k) {
      w_new = model.weights - step * gw;
      b_new = model.bias - step * gb;
      loss_new = logistic_loss(x, yv, w_new, b_new);
      if (loss_new <= loss - 0.5 * step * gnorm2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    model.weights = std::move(w_new);
    model.bias = b_new;
    const double decrease = loss - loss_new;
    loss = loss_new;
    model.loss_history.push_back(loss);
    if (decrease < p.tol) break;
  }
  return model;
}

inline Eigen::MatrixXd scatter(const Eigen::MatrixXd& x, std::span<const int> y, int cls, const Eigen::VectorXd& mu) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(x.cols(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (y[i] != cls) continue;
    const Eigen::VectorXd d = x.row(i).transpose() - mu;
    s.noalias() += d * d.transpose();
  }
  return s;
}

inline std::array<Eigen::VectorXd, 2> class_means(const Eigen::MatrixXd& x, std::span<const int> y,
                                                  std::array<double, 2>& counts) {
  std::array<Eigen::VectorXd, 2> mu = {Eigen::VectorXd::Zero(x.cols()), Eigen::VectorXd::Zero(x.cols())};
  counts = {0.0, 0.0};
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    mu[y[i]] += x.row(i).transpose();
    counts[y[i]] += 1.0;
  }
  for (int k = 0; k < 2; ++k) mu[k] /= counts[k];
  return mu;
}

inline void add_ridge(Eigen::MatrixXd& cov, double scale) {
  const double eps = scale * cov.trace() / static_cast<double>(cov.rows());
  cov.diagonal().array() += eps;
}

inline LinearDiscriminantModel fit_lda(const Eigen::MatrixXd& x, std::span<const int> y, const DiscriminantParams& p) {
  if (!(p.ridge_scale >= 0)) throw ArgumentError("LDA: ridge scale must be >= 0");
  std::array<double, 2> n{};
  const auto mu = class_means(x, y, n);
  const double dof = std::max(1.0, static_cast<double>(x.rows()) - 2.0);
  Eigen::MatrixXd cov = (scatter(x, y, 0, mu[0]) + scatter(x, y, 1, mu[1])) / dof;
  add_ridge(cov, p.ridge_scale);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw DegenerateError("LDA: singular covariance");
  LinearDiscriminantModel model;
  model.weights = llt.solve(mu[1] - mu[0]);
  model.bias = -0.5 * (mu[1] + mu[0]).dot(model.weights) + std::log(n[1] / n[0]);
  if (!model.weights.allFinite() || !std::isfinite(model.bias)) throw DegenerateError("LDA: singular covariance");
  return model;
}

inline QuadraticDiscriminantModel fit_qda(const Eigen::MatrixXd& x, std::span<const int> y,
                                          const DiscriminantParams& p) {
  if (!(p.ridge_scale >= 0)) throw ArgumentError("QDA: ridge scale must be >= 0");
  std::array<double, 2> n{};
  QuadraticDiscriminantModel model;
  model.means = class_means(x, y, n);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(x.cols(), x.cols());
  for (int k = 0; k < 2; ++k) {
    Eigen::MatrixXd cov = scatter(x, y, k, model.means[k]) / std::max(1.0, n[k] - 1.0);
    add_ridge(cov, p.ridge_scale);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw DegenerateError("QDA: singular covariance");
    const Eigen::MatrixXd l = llt.matrixL();
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) log_det += 2.0 * std::log(l(i, i));
    model.precisions[k] = llt.solve(eye);
    model.log_dets[k] = log_det;
    model.log_priors[k] = std::log(n[k] / (n[0] + n[1]));
    if (!std::isfinite(log_det) || !model.precisions[k].allFinite())
      throw DegenerateError("QDA: singular covariance");
  }
  return model;
}

inline Eigen::MatrixXd poly_kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const SvmParams& p) {
  Eigen::MatrixXd k = (p.gamma * (a * b.transpose())).array() + p.coef0;
  return k.array().pow(static_cast<double>(p.degree));
}

// Soft-margin C-SVC dual, min 1/2 a'Qa - e'a s.t. y'a = 0, 0 <= a <= C,
// solved by SMO with second-order working set selection.
inline SvmModel fit_svm(const Eigen::MatrixXd& x, std::span<const int> labels, const SvmParams& p) {
  if (p.degree < 1 || !(p.C > 0) || !(p.gamma > 0) || !(p.coef0 >= 0) || !(p.tol > 0))
    throw ArgumentError("SVM: invalid hyperparameters");
  constexpr double tau = 1e-12;
  const Eigen::Index m = x.rows();
  const Eigen::MatrixXd kmat = poly_kernel(x, x, p);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) y[i] = labels[i] == 1 ? 1.0 : -1.0;
  const double c = p.C;

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(m, -1.0);
  const auto upper = [&](Eigen::Index t) { return alpha[t] >= c; };
  const auto lower = [&](Eigen::Index t) { return alpha[t] <= 0.0; };
  const auto q = [&](Eigen::Index i, Eigen::Index j) { return y[i] * y[j] * kmat(i, j); };

  SvmModel model;
  model.params = p;
  long iter = 0;
  for (; iter < p.max_iter; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmax2 = -std::numeric_limits<double>::infinity();
    Eigen::Index i = -1;
    for (Eigen::Index t = 0; t < m; ++t) {
      if (y[t] > 0) {
        if (!upper(t) && -grad[t] >= gmax) { gmax = -grad[t]; i = t; }
      } else {
        if (!lower(t) && grad[t] >= gmax) { gmax = grad[t]; i = t; }
      }
    }
    Eigen::Index j = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < m && i >= 0; ++t) {
      double diff = 0.0;
      double quad = 0.0;
      if (y[t] > 0) {
        if (lower(t)) continue;
        gmax2 = std::max(gmax2, grad[t]);
        diff = gmax + grad[t];
        quad = kmat(i, i) + kmat(t, t) - 2.0 * y[i] * q(i, t);
      } else {
        if (upper(t)) continue;
        gmax2 = std::max(gmax2, -grad[t]);
        diff = gmax - grad[t];
        quad = kmat(i, i) + kmat(t, t) + 2.0 * y[i] * q(i, t);
      }
      if (diff <= 0) continue;
      const double obj = -(diff * diff) / (quad > 0 ? quad : tau);
      if (obj <= best) { best = obj; j = t; }
    }
    model.gap = gmax + gmax2;
    if (i < 0 || j < 0 || model.gap < p.tol) {
      model.converged = true;
      break;
    }

    const double old_i = alpha[i];
    const double old_j = alpha[j];
    if (y[i] != y[j]) {
      double quad = kmat(i, i) + kmat(j, j) + 2.0 * q(i, j);
      if (quad <= 0) quad = tau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = diff; }
      } else if (alpha[i] < 0) {
        alpha[i] = 0; alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > c) { alpha[i] = c; alpha[j] = c - diff; }
      } else if (alpha[j] > c) {
        alpha[j] = c; alpha[i] = c + diff;
      }
    } else {
      double quad = kmat(i, i) + kmat(j, j) - 2.0 * q(i, j);
      if (quad <= 0) quad = tau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) { alpha[i] = c; alpha[j] = sum - c; }
        if (alpha[j] > c) { alpha[j] = c; alpha[i] = sum - c; }
      } else {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = sum; }
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = sum; }
      }
    }
    const double di = alpha[i] - old_i;
    const double dj = alpha[j] - old_j;
    for (Eigen::Index t = 0; t < m; ++t) grad[t] += q(i, t) * di + q(j, t) * dj;
  }
  model.iterations = iter;

  // rho from free vectors, or the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -ub;
  double sum_free = 0.0;
  int n_free = 0;
  for (Eigen::Index t = 0; t < m; ++t) {
    const double yg = y[t] * grad[t];
    if (upper(t)) {
      if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  model.rho = n_free > 0 ? sum_free / n_free : 0.5 * (ub + lb);

  model.dual_objective = 0.5 * alpha.dot(grad - Eigen::VectorXd::Ones(m));
  model.alpha = alpha;
  std::vector<Eigen::Index> sv;
  for (Eigen::Index t = 0; t < m; ++t)
    if (alpha[t] > 0) sv.push_back(t);
  model.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), x.cols());
  model.coef.resize(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t k = 0; k < sv.size(); ++k) {
    model.support_vectors.row(static_cast<Eigen::Index>(k)) = x.row(sv[k]);
    model.coef[static_cast<Eigen::Index>(k)] = alpha[sv[k]] * y[sv[k]];
  }
  return model;
}

}  // namespace detail

inline Eigen::MatrixXd to_eigen(const FeatureMatrix& m) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m.rows), static_cast<Eigen::Index>(m.cols));
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t c = 0; c < m.cols; ++c) out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m(r, c);
  return out;
}

// Labels are class indices: 0 = C1, 1 = C2.
inline TrainedModel train(const ClassifierSpec& spec, const Eigen::MatrixXd& x, std::span<const int> y) {
  detail::check_training_input(x, y);
  TrainedModel tm;
  tm.kind = spec.kind;
  tm.n_features = x.cols();
  switch (spec.kind) {
    case ClassifierKind::LR: tm.model = detail::fit_logistic(x, y, spec.logistic); break;
    case ClassifierKind::LDA: tm.model = detail::fit_lda(x, y, spec.discriminant); break;
    case ClassifierKind::QDA: tm.model = detail::fit_qda(x, y, spec.discriminant); break;
    case ClassifierKind::SVM_POLY: tm.model = detail::fit_svm(x, y, spec.svm); break;
  }
  return tm;
}

inline TrainedModel train(const ClassifierSpec& spec, const FeatureMatrix& m) {
  return train(spec, to_eigen(m), m.labels);
}

// Signed score per row; >= 0 predicts C2. For LR this is the log-odds.
inline Eigen::VectorXd decision_function(const TrainedModel& tm, const Eigen::MatrixXd& x) {
  if (x.cols() != tm.n_features)
    throw ShapeError("predict: model expects " + std::to_string(tm.n_features) + " features, got " +
                     std::to_string(x.cols()));
  const Eigen::Index m = x.rows();
  Eigen::VectorXd score(m);
  std::visit(
      [&](const auto& model) {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, LogisticModel>) {
          score = (x * model.weights).array() + model.bias;
        } else if constexpr (std::is_same_v<T, LinearDiscriminantModel>) {
          score = (x * model.weights).array() + model.bias;
        } else if constexpr (std::is_same_v<T, QuadraticDiscriminantModel>) {
          for (Eigen::Index i = 0; i < m; ++i) score[i] = model.discriminant(1, x.row(i)) - model.discriminant(0, x.row(i));
        } else {
          score = detail::poly_kernel(x, model.support_vectors, model.params) * model.coef;
          score.array() -= model.rho;
        }
      },
      tm.model);
  return score;
}

// Ties (probability exactly 0.5, equal discriminants, zero SVM margin) go to C2.
inline std::vector<int> predict(const TrainedModel& tm, const Eigen::MatrixXd& x) {
  const auto score = decision_function(tm, x);
  std::vector<int> out(static_cast<std::size_t>(score.size()));
  for (Eigen::Index i = 0; i < score.size(); ++i) out[static_cast<std::size_t>(i)] = score[i] >= 0.0 ? 1 : 0;
  return out;
}

inline std::vector<int> predict(const TrainedModel& tm, const FeatureMatrix& m) { return predict(tm, to_eigen(m)); }

}  // namespace prs
