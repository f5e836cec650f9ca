#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "prs/common.hpp"

namespace prs {

// Row-major m x n matrix of per-sample features with named columns and the
// per-row class index (0 = C1, 1 = C2).
struct FeatureMatrix {
  std::size_t rows{0};
  std::size_t cols{0};
  std::vector<double> values;
  std::vector<std::string> names;
  std::vector<int> labels;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t m, std::size_t n, std::vector<std::string> column_names = {},
                std::vector<int> row_labels = {})
      : rows(m), cols(n), values(m * n, 0.0), names(std::move(column_names)), labels(std::move(row_labels)) {
    if (names.empty())
      for (std::size_t j = 0; j < n; ++j) names.push_back("f" + std::to_string(j));
    if (names.size() != n) throw ShapeError("column name count does not match column count");
    if (!labels.empty() && labels.size() != m) throw ShapeError("label count does not match row count");
  }

  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }

  std::span<const double> row(std::size_t r) const { return {values.data() + r * cols, cols}; }
  std::span<double> row(std::size_t r) { return {values.data() + r * cols, cols}; }

  std::vector<double> column(std::size_t c) const {
    std::vector<double> out(rows);
    for (std::size_t r = 0; r < rows; ++r) out[r] = (*this)(r, c);
    return out;
  }

  // Rows `idx` in the given order.
  FeatureMatrix select_rows(std::span<const std::size_t> idx) const {
    FeatureMatrix out(idx.size(), cols, names);
    if (!labels.empty()) out.labels.reserve(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      auto src = row(idx[i]);
      std::copy(src.begin(), src.end(), out.row(i).begin());
      if (!labels.empty()) out.labels.push_back(labels[idx[i]]);
    }
    return out;
  }

  // Columns `idx` in the given order.
  FeatureMatrix select_columns(std::span<const std::size_t> idx) const {
    std::vector<std::string> n;
    for (auto c : idx) n.push_back(names[c]);
    FeatureMatrix out(rows, idx.size(), std::move(n), labels);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t j = 0; j < idx.size(); ++j) out(r, j) = (*this)(r, idx[j]);
    return out;
  }

  // Horizontal concatenation; labels are taken from *this.
  FeatureMatrix append_columns(const FeatureMatrix& other) const {
    if (other.rows != rows) throw ShapeError("append_columns: row count mismatch");
    auto n = names;
    n.insert(n.end(), other.names.begin(), other.names.end());
    FeatureMatrix out(rows, cols + other.cols, std::move(n), labels);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) out(r, c) = (*this)(r, c);
      for (std::size_t c = 0; c < other.cols; ++c) out(r, cols + c) = other(r, c);
    }
    return out;
  }

  bool all_finite() const {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

}  // namespace prs
