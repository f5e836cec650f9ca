#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "prs/common.hpp"
#include "prs/feature_matrix.hpp"

namespace prs {

struct ColumnBounds {
  double min{0.0};
  double max{0.0};
  bool degenerate() const { return !(max > min); }
  friend bool operator==(const ColumnBounds&, const ColumnBounds&) = default;
};

struct NormalizedFeatureMatrix {
  FeatureMatrix matrix;
  std::vector<ColumnBounds> bounds;  // original per-column (min, max)
  std::vector<bool> degenerate;      // max == min; column mapped to all zeros
};

struct SplitResult {
  std::vector<int> assignment;  // per row: 0 = lower set, 1 = upper set
  std::array<double, 2> centers{};
  double sse{0.0};
};

struct SortedFeatureMatrix {
  NormalizedFeatureMatrix normalized;  // columns in sorted (position) order
  std::vector<std::size_t> permutation;  // position -> original column
  std::vector<double> gains;             // per position
};

inline std::vector<ColumnBounds> fit_minmax_bounds(const FeatureMatrix& m) {
  std::vector<ColumnBounds> b(m.cols);
  for (std::size_t c = 0; c < m.cols; ++c) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t r = 0; r < m.rows; ++r) {
      lo = std::min(lo, m(r, c));
      hi = std::max(hi, m(r, c));
    }
    b[c] = {lo, hi};
  }
  return b;
}

// Maps each column through (v - min) / (max - min). Values outside the
// bounds (e.g. test rows under train bounds) are not clamped. Degenerate
// columns map to 0.
inline FeatureMatrix apply_minmax(const FeatureMatrix& m, std::span<const ColumnBounds> bounds) {
  if (bounds.size() != m.cols) throw ShapeError("apply_minmax: bounds/column count mismatch");
  FeatureMatrix out = m;
  for (std::size_t c = 0; c < m.cols; ++c) {
    const auto& b = bounds[c];
    for (std::size_t r = 0; r < m.rows; ++r)
      out(r, c) = b.degenerate() ? 0.0 : (m(r, c) - b.min) / (b.max - b.min);
  }
  return out;
}

inline NormalizedFeatureMatrix minmax_normalize(const FeatureMatrix& m) {
  NormalizedFeatureMatrix out;
  out.bounds = fit_minmax_bounds(m);
  out.matrix = apply_minmax(m, out.bounds);
  out.degenerate.resize(m.cols);
  for (std::size_t c = 0; c < m.cols; ++c) {
    out.degenerate[c] = out.bounds[c].degenerate();
    if (out.degenerate[c]) continue;
    // Pin the extremes exactly; rounding in (v - min) / (max - min) can miss 1.
    for (std::size_t r = 0; r < m.rows; ++r) {
      if (m(r, c) == out.bounds[c].max) out.matrix(r, c) = 1.0;
      if (m(r, c) == out.bounds[c].min) out.matrix(r, c) = 0.0;
    }
  }
  return out;
}

// Two-means clustering of a 1D column. Each restart seeds the two centers
// with distinct data values drawn uniformly without replacement, then runs
// Lloyd iterations until the assignment is stable. The restart with the
// smallest within-cluster SSE wins; equal SSE keeps the earlier restart.
inline SplitResult kmeans_binary_split(std::span<const double> values, int restarts = 25,
                                       std::uint64_t seed = 0) {
  if (restarts < 1) throw ArgumentError("kmeans_binary_split: restarts must be >= 1");
  std::vector<double> distinct(values.begin(), values.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) throw DegenerateError("kmeans_binary_split: all values identical");

  const std::size_t m = values.size();
  std::mt19937_64 rng(seed);
  SplitResult best;
  best.sse = std::numeric_limits<double>::infinity();
  std::vector<int> assign(m);

  for (int rep = 0; rep < restarts; ++rep) {
    std::uniform_int_distribution<std::size_t> pick(0, distinct.size() - 1);
    std::size_t a = pick(rng);
    std::size_t b = pick(rng);
    while (b == a) b = pick(rng);
    std::array<double, 2> c = {distinct[std::min(a, b)], distinct[std::max(a, b)]};

    std::fill(assign.begin(), assign.end(), -1);
    for (int iter = 0; iter < 1000; ++iter) {
      bool changed = false;
      for (std::size_t i = 0; i < m; ++i) {
        // ties go to the lower-indexed center
        int k = std::abs(values[i] - c[1]) < std::abs(values[i] - c[0]) ? 1 : 0;
        if (k != assign[i]) {
          assign[i] = k;
          changed = true;
        }
      }
      if (!changed) break;
      std::array<double, 2> sum{};
      std::array<std::size_t, 2> cnt{};
      for (std::size_t i = 0; i < m; ++i) {
        sum[assign[i]] += values[i];
        ++cnt[assign[i]];
      }
      for (int k = 0; k < 2; ++k)
        if (cnt[k] > 0) c[k] = sum[k] / static_cast<double>(cnt[k]);
    }

    std::array<std::size_t, 2> cnt{};
    double sse = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      ++cnt[assign[i]];
      const double d = values[i] - c[assign[i]];
      sse += d * d;
    }
    if (cnt[0] == 0 || cnt[1] == 0) continue;
    if (sse < best.sse) {
      best.sse = sse;
      best.centers = c;
      best.assignment = assign;
    }
  }
  if (best.assignment.empty()) throw DegenerateError("kmeans_binary_split: no restart produced two sets");
  if (best.centers[0] > best.centers[1]) {
    std::swap(best.centers[0], best.centers[1]);
    for (auto& k : best.assignment) k = 1 - k;
  }
  return best;
}

// Binary Shannon entropy in bits, 0 * log 0 := 0.
inline double entropy(std::span<const int> labels) {
  if (labels.empty()) throw ArgumentError("entropy of an empty label set");
  const auto n2 = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  const auto n = static_cast<double>(labels.size());
  double h = 0.0;
  for (double p : {(n - n2) / n, n2 / n})
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

// Info(all) - sum_i |s_i|/m * Info(s_i) for the two split sets.
inline double information_gain(std::span<const int> labels, std::span<const int> assignment) {
  if (labels.size() != assignment.size()) throw ShapeError("information_gain: split does not cover all rows");
  const double total = entropy(labels);
  double expected = 0.0;
  for (int set = 0; set < 2; ++set) {
    std::vector<int> sub;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (assignment[i] == set) sub.push_back(labels[i]);
    if (sub.empty()) continue;
    expected += static_cast<double>(sub.size()) / static_cast<double>(labels.size()) * entropy(sub);
  }
  return std::max(0.0, total - expected);
}

// Gain of every column of a normalized matrix. The k-means RNG for column c
// is derive_seed(seed, c), so the result does not depend on evaluation order.
inline std::vector<double> column_gains(const NormalizedFeatureMatrix& nm, std::uint64_t seed,
                                        int restarts = 25) {
  const auto& m = nm.matrix;
  if (m.labels.size() != m.rows) throw ShapeError("column_gains: matrix has no labels");
  std::vector<double> gains(m.cols, 0.0);
  for (std::size_t c = 0; c < m.cols; ++c) {
    if (c < nm.degenerate.size() && nm.degenerate[c]) continue;
    auto col = m.column(c);
    try {
      auto split = kmeans_binary_split(col, restarts, derive_seed(seed, c));
      gains[c] = information_gain(m.labels, split.assignment);
    } catch (const DegenerateError&) {
      gains[c] = 0.0;
    }
  }
  return gains;
}

// Placement order for n positions: center first, then alternating right,
// left. For n = 12 (1-based): 6, 7, 5, 8, 4, 9, 3, 10, 2, 11, 1, 12.
inline std::vector<std::size_t> center_out_positions(std::size_t n) {
  std::vector<std::size_t> order;
  if (n == 0) return order;
  const std::size_t center = (n - 1) / 2;
  order.push_back(center);
  for (std::size_t d = 1; order.size() < n; ++d) {
    if (center + d < n) order.push_back(center + d);
    if (d <= center && order.size() < n) order.push_back(center - d);
  }
  return order;
}

// Position -> original column such that gains decrease center-out. Ties
// keep the lower original column index first.
inline std::vector<std::size_t> center_out_permutation(std::span<const double> gains) {
  const std::size_t n = gains.size();
  std::vector<std::size_t> ranked(n);
  std::iota(ranked.begin(), ranked.end(), std::size_t{0});
  std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) { return gains[a] > gains[b]; });
  const auto positions = center_out_positions(n);
  std::vector<std::size_t> perm(n);
  for (std::size_t k = 0; k < n; ++k) perm[positions[k]] = ranked[k];
  return perm;
}

inline SortedFeatureMatrix sort_center_out(const NormalizedFeatureMatrix& nm, std::span<const double> gains) {
  if (gains.size() != nm.matrix.cols) throw ShapeError("sort_center_out: one gain per column required");
  for (double g : gains)
    if (!std::isfinite(g) || g < 0.0) throw ArgumentError("sort_center_out: gains must be finite and >= 0");
  SortedFeatureMatrix out;
  out.permutation = center_out_permutation(gains);
  out.normalized.matrix = nm.matrix.select_columns(out.permutation);
  for (auto c : out.permutation) {
    out.normalized.bounds.push_back(nm.bounds.at(c));
    out.normalized.degenerate.push_back(nm.degenerate.at(c));
    out.gains.push_back(gains[c]);
  }
  return out;
}

}  // namespace prs
