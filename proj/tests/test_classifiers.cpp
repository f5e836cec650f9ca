#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "prs/classifiers.hpp"

using namespace prs;

namespace {

struct Data {
  Eigen::MatrixXd x;
  std::vector<int> y;
};

double accuracy_of(const std::vector<int>& pred, const std::vector<int>& y) {
  int ok = 0;
  for (std::size_t i = 0; i < y.size(); ++i) ok += pred[i] == y[i];
  return static_cast<double>(ok) / y.size();
}

Data two_gaussians(std::mt19937_64& rng, int per_class, double sd = 0.07) {
  std::normal_distribution<double> g(0, sd);
  Data d;
  d.x.resize(2 * per_class, 2);
  for (int i = 0; i < 2 * per_class; ++i) {
    const int k = i < per_class ? 0 : 1;
    const double mu = k == 0 ? 0.2 : 0.8;
    d.x(i, 0) = mu + g(rng);
    d.x(i, 1) = mu + g(rng);
    d.y.push_back(k);
  }
  return d;
}

Data xor_cloud(std::mt19937_64& rng, int per_corner) {
  std::normal_distribution<double> g(0, 0.05);
  Data d;
  d.x.resize(4 * per_corner, 2);
  int row = 0;
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int i = 0; i < per_corner; ++i) {
        d.x(row, 0) = sx + g(rng);
        d.x(row, 1) = sy + g(rng);
        d.y.push_back(sx * sy > 0 ? 1 : 0);
        ++row;
      }
  return d;
}

ClassifierSpec spec_for(ClassifierKind k) {
  ClassifierSpec s;
  s.kind = k;
  return s;
}

}  // namespace

TEST(ClassifierNames, RoundTrip) {
  for (auto k : kAllClassifiers) EXPECT_EQ(parse_classifier(to_string(k)), k);
  EXPECT_EQ(parse_classifier("SVM"), ClassifierKind::SVM_POLY);
  EXPECT_THROW(parse_classifier("KNN"), ArgumentError);
}

TEST(Classifiers, SeparableOneDimensional) {
  Eigen::MatrixXd x(8, 1);
  x << 0.0, 0.1, 0.2, 0.3, 0.7, 0.8, 0.9, 1.0;
  std::vector<int> y = {0, 0, 0, 0, 1, 1, 1, 1};
  for (auto k : kAllClassifiers) {
    auto m = train(spec_for(k), x, y);
    EXPECT_EQ(predict(m, x), y) << to_string(k);
    Eigen::MatrixXd probe(2, 1);
    probe << -5.0, 5.0;
    if (k != ClassifierKind::QDA) {
      EXPECT_EQ(predict(m, probe), (std::vector<int>{0, 1})) << to_string(k);
    }
  }
}

TEST(Classifiers, SingleClassRejected) {
  Eigen::MatrixXd x(4, 1);
  x << 0, 1, 2, 3;
  std::vector<int> y(4, 1);
  for (auto k : kAllClassifiers) {
    try {
      train(spec_for(k), x, y);
      FAIL() << "expected DataError";
    } catch (const DataError& e) {
      EXPECT_NE(std::string(e.what()).find("single class"), std::string::npos);
    }
  }
}

TEST(Classifiers, NonFiniteAndShapeErrors) {
  Eigen::MatrixXd x(4, 2);
  x << 0, 1, 2, 3, 4, 5, 6, 7;
  std::vector<int> y = {0, 0, 1, 1};
  auto m = train(spec_for(ClassifierKind::LDA), x, y);
  EXPECT_THROW(predict(m, Eigen::MatrixXd::Zero(3, 3)), ShapeError);
  x(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(train(spec_for(ClassifierKind::LR), x, y), DataError);
  EXPECT_THROW(train(spec_for(ClassifierKind::LR), x, std::vector<int>{0, 1}), ShapeError);
}

TEST(Classifiers, ZeroLogisticModelPredictsSecondClass) {
  TrainedModel tm;
  tm.kind = ClassifierKind::LR;
  tm.n_features = 3;
  LogisticModel lm;
  lm.weights = Eigen::VectorXd::Zero(3);
  tm.model = lm;
  EXPECT_EQ(predict(tm, Eigen::MatrixXd::Random(5, 3)), std::vector<int>(5, 1));
  EXPECT_DOUBLE_EQ(lm.probability(Eigen::RowVectorXd::Ones(3)), 0.5);
}

TEST(Classifiers, XorNeedsTheKernel) {
  std::mt19937_64 rng(5);
  auto d = xor_cloud(rng, 10);
  ClassifierSpec svm = spec_for(ClassifierKind::SVM_POLY);
  svm.svm.degree = 2;
  svm.svm.C = 10;
  auto m = train(svm, d.x, d.y);
  EXPECT_EQ(accuracy_of(predict(m, d.x), d.y), 1.0);

  std::vector<std::array<double, 2>> pts;
  for (Eigen::Index i = 0; i < d.x.rows(); ++i) pts.push_back({d.x(i, 0), d.x(i, 1)});
  const double linear_bound = oracle::best_linear_accuracy(pts, d.y);
  EXPECT_LE(linear_bound, 0.75 + 1e-12);
  for (auto k : {ClassifierKind::LR, ClassifierKind::LDA}) {
    auto lm = train(spec_for(k), d.x, d.y);
    EXPECT_LE(accuracy_of(predict(lm, d.x), d.y), linear_bound + 1e-12) << to_string(k);
  }
}

TEST(Classifiers, TrainingAccuracyOnTwoGaussians) {
  std::mt19937_64 rng(6);
  auto train_set = two_gaussians(rng, 200);
  auto test_set = two_gaussians(rng, 500);
  for (auto k : kAllClassifiers) {
    auto m = train(spec_for(k), train_set.x, train_set.y);
    EXPECT_GE(accuracy_of(predict(m, train_set.x), train_set.y), 0.99) << to_string(k);
    EXPECT_GE(accuracy_of(predict(m, test_set.x), test_set.y), 0.99) << to_string(k);
  }
}

TEST(Logistic, LossIsNonIncreasing) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    auto d = two_gaussians(rng, 30, 0.3);  // overlapping
    auto tm = train(spec_for(ClassifierKind::LR), d.x, d.y);
    const auto& lm = std::get<LogisticModel>(tm.model);
    ASSERT_GE(lm.loss_history.size(), 2u);
    EXPECT_NEAR(lm.loss_history.front(), std::log(2.0), 1e-15);
    for (std::size_t i = 1; i < lm.loss_history.size(); ++i)
      EXPECT_LE(lm.loss_history[i], lm.loss_history[i - 1]);
  }
}

// LDA without ridge is invariant to invertible affine maps of the inputs.
TEST(Lda, AffineInvariance) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-2, 2);
  ClassifierSpec s = spec_for(ClassifierKind::LDA);
  s.discriminant.ridge_scale = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    auto d = two_gaussians(rng, 40, 0.25);
    Eigen::Matrix2d a;
    do {
      a << u(rng), u(rng), u(rng), u(rng);
    } while (std::abs(a.determinant()) < 0.3);
    Eigen::RowVector2d b(u(rng), u(rng));
    Eigen::MatrixXd xt = (d.x * a.transpose()).rowwise() + b;
    auto m1 = train(s, d.x, d.y);
    auto m2 = train(s, xt, d.y);
    Eigen::MatrixXd probe = Eigen::MatrixXd::Random(50, 2);
    Eigen::MatrixXd probe_t = (probe * a.transpose()).rowwise() + b;
    auto s1 = decision_function(m1, probe);
    auto s2 = decision_function(m2, probe_t);
    for (Eigen::Index i = 0; i < s1.size(); ++i) EXPECT_NEAR(s1[i], s2[i], 1e-8 * (1 + std::abs(s1[i])));
  }
}

// Dual feasibility, complementary slackness within tolerance, and the dual
// objective recomputed from scratch.
TEST(Svm, KktAtSolution) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 8; ++trial) {
    auto d = two_gaussians(rng, 25, 0.2);
    ClassifierSpec s = spec_for(ClassifierKind::SVM_POLY);
    s.svm.C = trial % 2 ? 1.0 : 10.0;
    auto tm = train(s, d.x, d.y);
    const auto& m = std::get<SvmModel>(tm.model);
    ASSERT_TRUE(m.converged);
    EXPECT_LE(m.gap, 1e-6);
    const Eigen::Index n = d.x.rows();
    std::vector<double> yy(n);
    for (Eigen::Index i = 0; i < n; ++i) yy[i] = d.y[i] == 1 ? 1.0 : -1.0;
    double eq = 0, obj = 0;
    std::vector<double> grad(n, -1.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      EXPECT_GE(m.alpha[i], 0.0);
      EXPECT_LE(m.alpha[i], s.svm.C);
      eq += m.alpha[i] * yy[i];
      for (Eigen::Index j = 0; j < n; ++j) {
        const double k = std::pow(d.x(i, 0) * d.x(j, 0) + d.x(i, 1) * d.x(j, 1) + 1.0, 3);
        grad[i] += yy[i] * yy[j] * k * m.alpha[j];
        obj += 0.5 * m.alpha[i] * m.alpha[j] * yy[i] * yy[j] * k;
      }
      obj -= m.alpha[i];
    }
    EXPECT_NEAR(eq, 0.0, 1e-9);
    EXPECT_NEAR(m.dual_objective, obj, 1e-8 * (1 + std::abs(obj)));
    // y_i f(x_i) vs the bound state of alpha_i
    auto score = decision_function(tm, d.x);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double margin = yy[i] * score[i];
      if (m.alpha[i] <= 0) {
        EXPECT_GE(margin, 1 - 1e-5);
      } else if (m.alpha[i] >= s.svm.C) {
        EXPECT_LE(margin, 1 + 1e-5);
      } else {
        EXPECT_NEAR(margin, 1.0, 1e-5);
      }
    }
  }
}

TEST(Svm, InvalidHyperparameters) {
  Eigen::MatrixXd x(4, 1);
  x << 0, 1, 2, 3;
  std::vector<int> y = {0, 0, 1, 1};
  ClassifierSpec s = spec_for(ClassifierKind::SVM_POLY);
  s.svm.C = 0;
  EXPECT_THROW(train(s, x, y), ArgumentError);
}

TEST(Qda, HandlesUnequalSpreads) {
  // inner class surrounded by outer ring: quadratic boundary needed
  std::mt19937_64 rng(10);
  std::normal_distribution<double> g(0, 1);
  Data d;
  d.x.resize(400, 2);
  for (int i = 0; i < 400; ++i) {
    const double sd = i < 200 ? 0.1 : 1.0;
    d.x(i, 0) = sd * g(rng);
    d.x(i, 1) = sd * g(rng);
    d.y.push_back(i < 200 ? 0 : 1);
  }
  auto q = train(spec_for(ClassifierKind::QDA), d.x, d.y);
  auto l = train(spec_for(ClassifierKind::LDA), d.x, d.y);
  EXPECT_GE(accuracy_of(predict(q, d.x), d.y), 0.9);
  EXPECT_LT(accuracy_of(predict(l, d.x), d.y), 0.8);
}
