#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "prs/common.hpp"
#include "prs/feature_matrix.hpp"

namespace prs {

// Positive class is C2 (class index 1).
struct ConfusionCounts {
  std::size_t tp{0};
  std::size_t fp{0};
  std::size_t tn{0};
  std::size_t fn{0};

  std::size_t total() const { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

inline ConfusionCounts confusion(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) throw ShapeError("confusion: size mismatch");
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (predicted[i] == 1) (truth[i] == 1 ? c.tp : c.fp)++;
    else (truth[i] == 0 ? c.tn : c.fn)++;
  }
  return c;
}

inline double accuracy(const ConfusionCounts& c) {
  if (c.total() == 0) throw ArgumentError("accuracy of an empty test set");
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

struct AnovaResult {
  double f{0.0};
  std::size_t df_between{0};
  std::size_t df_within{0};
  bool infinite{false};  // zero within-group variance with nonzero between-group variance
};

inline AnovaResult anova_oneway(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) throw ArgumentError("anova: need at least 2 groups");
  double grand = 0.0;
  std::size_t n = 0;
  for (const auto& g : groups) {
    if (g.size() < 2) throw ArgumentError("anova: each group needs at least 2 values");
    for (double v : g) grand += v;
    n += g.size();
  }
  grand /= static_cast<double>(n);
  double ss_between = 0.0;
  double ss_within = 0.0;
  for (const auto& g : groups) {
    double mu = 0.0;
    for (double v : g) mu += v;
    mu /= static_cast<double>(g.size());
    ss_between += static_cast<double>(g.size()) * (mu - grand) * (mu - grand);
    for (double v : g) ss_within += (v - mu) * (v - mu);
  }
  AnovaResult r;
  r.df_between = groups.size() - 1;
  r.df_within = n - groups.size();
  const double ms_between = ss_between / static_cast<double>(r.df_between);
  const double ms_within = ss_within / static_cast<double>(r.df_within);
  if (ms_within == 0.0) {
    r.infinite = ms_between > 0.0;
    r.f = r.infinite ? std::numeric_limits<double>::infinity() : 0.0;
  } else {
    r.f = ms_between / ms_within;
  }
  return r;
}

struct CorrelationReport {
  std::vector<std::string> names;
  std::size_t size{0};
  std::vector<double> r;          // row-major size x size
  std::vector<bool> constant;     // per column: correlation undefined

  double operator()(std::size_t i, std::size_t j) const { return r[i * size + j]; }
};

// Pairwise Pearson r. Constant columns are flagged and correlate 0 with every
// other column; the diagonal is always 1.
inline CorrelationReport correlation_matrix(const FeatureMatrix& m) {
  if (m.rows < 3) throw ArgumentError("correlation_matrix: need at least 3 rows");
  const std::size_t n = m.cols;
  CorrelationReport rep;
  rep.names = m.names;
  rep.size = n;
  rep.r.assign(n * n, 0.0);
  rep.constant.assign(n, false);
  std::vector<std::vector<double>> centered(n);
  std::vector<double> norm(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    centered[c] = m.column(c);
    double mu = 0.0;
    for (double v : centered[c]) mu += v;
    mu /= static_cast<double>(m.rows);
    for (double& v : centered[c]) {
      v -= mu;
      norm[c] += v * v;
    }
    norm[c] = std::sqrt(norm[c]);
    rep.constant[c] = !(norm[c] > 0.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    rep.r[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = 0.0;
      if (!rep.constant[i] && !rep.constant[j]) {
        double dot = 0.0;
        for (std::size_t k = 0; k < m.rows; ++k) dot += centered[i][k] * centered[j][k];
        v = std::clamp(dot / (norm[i] * norm[j]), -1.0, 1.0);
      }
      rep.r[i * n + j] = v;
      rep.r[j * n + i] = v;
    }
  }
  return rep;
}

inline double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Sample standard deviation (n - 1); 0 for fewer than 2 values.
inline double sample_std(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace prs
