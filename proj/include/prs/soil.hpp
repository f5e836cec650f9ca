#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>

#include "prs/common.hpp"
#include "prs/feature_prep.hpp"

namespace prs {

inline constexpr std::size_t kSoilDepth = 15;  // number of bins
inline constexpr std::size_t kSoilWidth = 12;  // number of base features

using SoilGrid = Grid<double, kSoilDepth, kSoilWidth>;

// Binary soil before convolution: each column non-increasing with depth.
struct DiscreteSoil {
  SoilGrid grid;
  friend bool operator==(const DiscreteSoil&, const DiscreteSoil&) = default;
};

struct NutrientMatrix {
  SoilGrid grid;
  friend bool operator==(const NutrientMatrix&, const NutrientMatrix&) = default;
};

// How a bin index b becomes a depth column.
enum class SoilFill {
  Stacked,  // ones in rows 1..b
  OneHot,   // a single one at row b
  Graded,   // rows 1..b-1 full, row b holds the fractional remainder
};

// Equal-width bin (1-based) of `value` among k bins spanning [lo, hi].
// Out-of-range values clamp to the first/last bin; a degenerate range maps to 1.
inline int bin_index(double value, double lo, double hi, int k = static_cast<int>(kSoilDepth)) {
  if (k < 1) throw ArgumentError("bin_index: k must be >= 1");
  if (!(hi > lo)) return 1;
  const double width = (hi - lo) / k;
  const double b = std::floor((value - lo) / width) + 1.0;
  return static_cast<int>(std::clamp(b, 1.0, static_cast<double>(k)));
}

inline DiscreteSoil build_discrete_soil(std::span<const double> sorted_row, std::span<const ColumnBounds> bounds,
                                        SoilFill fill = SoilFill::Stacked) {
  if (sorted_row.size() != kSoilWidth || bounds.size() != kSoilWidth)
    throw ShapeError("build_discrete_soil: expected 12 sorted feature values and bounds");
  constexpr int k = static_cast<int>(kSoilDepth);
  DiscreteSoil d;
  for (std::size_t c = 0; c < kSoilWidth; ++c) {
    const auto& b = bounds[c];
    const int bin = bin_index(sorted_row[c], b.min, b.max, k);
    switch (fill) {
      case SoilFill::Stacked:
        for (int r = 0; r < bin; ++r) d.grid(r, c) = 1.0;
        break;
      case SoilFill::OneHot:
        d.grid(bin - 1, c) = 1.0;
        break;
      case SoilFill::Graded: {
        double depth = b.degenerate() ? 1.0 : (sorted_row[c] - b.min) / (b.max - b.min) * k;
        depth = std::clamp(depth, 1.0, static_cast<double>(k));
        for (int r = 0; r < k; ++r) d.grid(r, c) = std::clamp(depth - r, 0.0, 1.0);
        break;
      }
    }
  }
  return d;
}

using Kernel3 = std::array<std::array<double, 3>, 3>;

// Stencil pulling nutrients from shallower layers.
inline constexpr Kernel3 kKernelShallow = {{{0.5, 0.5, 0.5}, {0.0, 0.5, 0.0}, {0.25, 0.25, 0.25}}};
// Stencil pulling nutrients from deeper layers.
inline constexpr Kernel3 kKernelDeep = {{{0.25, 0.25, 0.25}, {0.0, 0.5, 0.0}, {0.5, 0.5, 0.5}}};

// 3x3 cross-correlation with one cell of zero padding; output keeps the
// input shape.
inline SoilGrid correlate_same(const SoilGrid& in, const Kernel3& k) {
  SoilGrid out;
  const auto rows = static_cast<long>(SoilGrid::rows);
  const auto cols = static_cast<long>(SoilGrid::cols);
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (long dr = -1; dr <= 1; ++dr) {
        const long rr = r + dr;
        if (rr < 0 || rr >= rows) continue;
        for (long dc = -1; dc <= 1; ++dc) {
          const long cc = c + dc;
          if (cc < 0 || cc >= cols) continue;
          acc += k[dr + 1][dc + 1] * in(rr, cc);
        }
      }
      out(r, c) = acc;
    }
  }
  return out;
}

// Shallow pass first, then deep pass.
inline NutrientMatrix convolve_soil(const SoilGrid& d) {
  return {correlate_same(correlate_same(d, kKernelShallow), kKernelDeep)};
}

inline NutrientMatrix convolve_soil(const DiscreteSoil& d) { return convolve_soil(d.grid); }

}  // namespace prs
