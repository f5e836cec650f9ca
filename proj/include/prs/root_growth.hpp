#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "prs/common.hpp"
#include "prs/soil.hpp"

namespace prs {

// 0-based grid coordinate (row = depth, col = sorted feature position).
struct Cell {
  int row{0};
  int col{0};
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct GrowthConfig {
  int days{10};
  int division_limit{2};
  // Upper center of the 12-wide grid (1-based row 1, column 6).
  std::vector<Cell> radicle{{0, 5}};
  // Whether cells with zero nutrient value can be occupied.
  bool grow_into_barren{true};
};

using OccupancyGrid = Grid<std::uint8_t, kSoilDepth, kSoilWidth>;

struct RootState {
  OccupancyGrid occupancy;
  double absorbed{0.0};
  std::vector<std::vector<Cell>> day_log;  // newly occupied cells per day
  std::vector<double> absorbed_by_day;     // running total after each day

  std::vector<Cell> occupied_cells() const {
    std::vector<Cell> out;
    for (int r = 0; r < static_cast<int>(kSoilDepth); ++r)
      for (int c = 0; c < static_cast<int>(kSoilWidth); ++c)
        if (occupancy(r, c)) out.push_back({r, c});
    return out;
  }

  friend bool operator==(const RootState&, const RootState&) = default;
};

struct PRSFeaturePair {
  double nf{0.0};  // nutrients absorbed
  double rf{0.0};  // root polygon area, cell^2
};

// Saturating uptake for one newly occupied cell.
inline double absorption_rate(double v) { return v == 0.0 ? 0.0 : v / (1.0 + std::abs(v)) + 0.49; }

inline void validate(const GrowthConfig& cfg) {
  if (cfg.days < 0) throw ArgumentError("growth: days must be >= 0");
  if (cfg.division_limit < 1) throw ArgumentError("growth: division limit must be >= 1");
  if (cfg.radicle.empty()) throw ArgumentError("growth: radicle must contain at least one cell");
  for (const auto& c : cfg.radicle)
    if (c.row < 0 || c.row >= static_cast<int>(kSoilDepth) || c.col < 0 || c.col >= static_cast<int>(kSoilWidth))
      throw ArgumentError("growth: radicle cell outside the soil grid");
}

// One day per iteration: gather the unoccupied 4-neighbors of all occupied
// cells, rank them by nutrient value (descending, ties by row then column),
// and occupy the first `division_limit`. Nutrients are not depleted.
inline RootState grow(const NutrientMatrix& nutrients, const GrowthConfig& cfg) {
  validate(cfg);
  constexpr int rows = static_cast<int>(kSoilDepth);
  constexpr int cols = static_cast<int>(kSoilWidth);
  RootState st;
  for (const auto& c : cfg.radicle) st.occupancy(c.row, c.col) = 1;

  struct Candidate {
    Cell cell;
    double value;
  };
  std::vector<Candidate> candidates;
  for (int day = 0; day < cfg.days; ++day) {
    candidates.clear();
    // Scanning unoccupied cells once deduplicates candidates and keeps them in
    // (row, col) order before the stable sort.
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        if (st.occupancy(r, c)) continue;
        const bool touches = (r > 0 && st.occupancy(r - 1, c)) || (r + 1 < rows && st.occupancy(r + 1, c)) ||
                             (c > 0 && st.occupancy(r, c - 1)) || (c + 1 < cols && st.occupancy(r, c + 1));
        if (!touches) continue;
        const double v = nutrients.grid(r, c);
        if (v == 0.0 && !cfg.grow_into_barren) continue;
        candidates.push_back({{r, c}, v});
      }
    }
    if (candidates.empty()) break;
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.value > b.value; });
    const auto take = std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(cfg.division_limit));
    std::vector<Cell> fresh;
    for (std::size_t j = 0; j < take; ++j) {
      const auto& cand = candidates[j];
      st.occupancy(cand.cell.row, cand.cell.col) = 1;
      st.absorbed += absorption_rate(cand.value);
      fresh.push_back(cand.cell);
    }
    st.day_log.push_back(std::move(fresh));
    st.absorbed_by_day.push_back(st.absorbed);
  }
  return st;
}

struct Point2 {
  double x{0.0};
  double y{0.0};
  friend auto operator<=>(const Point2&, const Point2&) = default;
};

// Shoelace area of a closed polygon given in traversal order; orientation
// does not matter. Fewer than 3 vertices give 0.
inline double polygon_area(std::span<const Point2> v) {
  if (v.size() < 3) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % v.size()];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * std::abs(s);
}

// Andrew's monotone chain. Returns the hull counter-clockwise without
// collinear points; fewer than 3 points for degenerate inputs.
inline std::vector<Point2> convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  const auto cross = [](const Point2& o, const Point2& a, const Point2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };
  std::vector<Point2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

// Cell (r, c) maps to point (c, r).
inline std::vector<Point2> root_polygon(const RootState& st) {
  std::vector<Point2> pts;
  for (const auto& c : st.occupied_cells()) pts.push_back({static_cast<double>(c.col), static_cast<double>(c.row)});
  return convex_hull(std::move(pts));
}

inline PRSFeaturePair extract_prs(const RootState& st) {
  const auto hull = root_polygon(st);
  return {st.absorbed, polygon_area(hull)};
}

}  // namespace prs
