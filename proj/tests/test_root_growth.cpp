#include <gtest/gtest.h>

#include <queue>
#include <random>
#include <set>

#include "oracles.hpp"
#include "prs/root_growth.hpp"

using namespace prs;

namespace {

NutrientMatrix random_nutrients(std::mt19937_64& rng, double zero_fraction = 0.0) {
  std::uniform_real_distribution<double> u(0, 8);
  std::bernoulli_distribution zero(zero_fraction);
  NutrientMatrix n;
  for (auto& v : n.grid.cells) v = zero(rng) ? 0.0 : u(rng);
  return n;
}

RootState with_cells(std::initializer_list<Cell> cells) {
  RootState st;
  for (const auto& c : cells) st.occupancy(c.row, c.col) = 1;
  return st;
}

bool connected_to(const RootState& st, const std::vector<Cell>& seeds) {
  OccupancyGrid seen;
  std::queue<Cell> q;
  for (const auto& s : seeds) {
    seen(s.row, s.col) = 1;
    q.push(s);
  }
  std::size_t reached = 0;
  while (!q.empty()) {
    auto c = q.front();
    q.pop();
    ++reached;
    const int dr[] = {-1, 1, 0, 0}, dc[] = {0, 0, -1, 1};
    for (int k = 0; k < 4; ++k) {
      const int r = c.row + dr[k], cc = c.col + dc[k];
      if (r < 0 || cc < 0 || r >= 15 || cc >= 12) continue;
      if (!st.occupancy(r, cc) || seen(r, cc)) continue;
      seen(r, cc) = 1;
      q.push({r, cc});
    }
  }
  return reached == st.occupied_cells().size();
}

}  // namespace

TEST(Absorption, Values) {
  EXPECT_EQ(absorption_rate(0.0), 0.0);
  EXPECT_DOUBLE_EQ(absorption_rate(1.0), 0.99);
  EXPECT_DOUBLE_EQ(absorption_rate(3.0), 0.75 + 0.49);
  EXPECT_LT(absorption_rate(1e12), 1.49);
}

TEST(Growth, ZeroDaysKeepsRadicle) {
  GrowthConfig cfg;
  cfg.days = 0;
  NutrientMatrix n;
  n.grid.cells.fill(2.0);
  auto st = grow(n, cfg);
  EXPECT_EQ(st.occupied_cells(), (std::vector<Cell>{{0, 5}}));
  EXPECT_EQ(st.absorbed, 0.0);
  EXPECT_EQ(extract_prs(st).rf, 0.0);
}

TEST(Growth, BarrenSoilTieBreaksByRowThenColumn) {
  GrowthConfig cfg;
  cfg.days = 1;
  auto st = grow(NutrientMatrix{}, cfg);
  ASSERT_EQ(st.day_log.size(), 1u);
  EXPECT_EQ(st.day_log[0], (std::vector<Cell>{{0, 4}, {0, 6}}));
  EXPECT_EQ(st.absorbed, 0.0);

  cfg.grow_into_barren = false;
  cfg.days = 10;
  auto none = grow(NutrientMatrix{}, cfg);
  EXPECT_EQ(none.occupied_cells().size(), 1u);
  EXPECT_TRUE(none.day_log.empty());
}

TEST(Growth, HandTrace) {
  NutrientMatrix n;
  n.grid(1, 5) = 1.0;
  GrowthConfig cfg;
  cfg.days = 1;
  cfg.division_limit = 1;
  auto st = grow(n, cfg);
  EXPECT_EQ(st.day_log[0], (std::vector<Cell>{{1, 5}}));
  EXPECT_DOUBLE_EQ(st.absorbed, 0.99);

  // second day: (2,5) outranks the zero-valued neighbors
  n.grid(2, 5) = 3.0;
  n.grid(0, 4) = 0.5;
  cfg.days = 3;
  cfg.division_limit = 1;
  auto st3 = grow(n, cfg);
  EXPECT_EQ(st3.day_log[1], (std::vector<Cell>{{2, 5}}));
  EXPECT_EQ(st3.day_log[2], (std::vector<Cell>{{0, 4}}));
  EXPECT_DOUBLE_EQ(st3.absorbed, 0.99 + (0.75 + 0.49) + (0.5 / 1.5 + 0.49));
  EXPECT_EQ(st3.absorbed_by_day.size(), 3u);
  EXPECT_DOUBLE_EQ(st3.absorbed_by_day[0], 0.99);
}

TEST(Growth, RejectsBadConfig) {
  GrowthConfig cfg;
  cfg.days = -1;
  EXPECT_THROW(grow(NutrientMatrix{}, cfg), ArgumentError);
  cfg = {};
  cfg.division_limit = 0;
  EXPECT_THROW(grow(NutrientMatrix{}, cfg), ArgumentError);
  cfg = {};
  cfg.radicle = {{15, 0}};
  EXPECT_THROW(grow(NutrientMatrix{}, cfg), ArgumentError);
  cfg.radicle = {};
  EXPECT_THROW(grow(NutrientMatrix{}, cfg), ArgumentError);
}

TEST(PolygonArea, Examples) {
  std::vector<Point2> square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  EXPECT_EQ(polygon_area(square), 1.0);
  std::vector<Point2> tri = {{0, 0}, {4, 0}, {0, 3}};
  EXPECT_EQ(polygon_area(tri), 6.0);
  std::vector<Point2> cw(tri.rbegin(), tri.rend());
  EXPECT_EQ(polygon_area(cw), 6.0);
  std::vector<Point2> seg = {{0, 0}, {3, 3}};
  EXPECT_EQ(polygon_area(seg), 0.0);
}

TEST(RootFeature, Examples) {
  EXPECT_EQ(extract_prs(with_cells({{3, 3}})).rf, 0.0);
  EXPECT_EQ(extract_prs(with_cells({{0, 0}, {0, 2}, {2, 0}, {2, 2}, {1, 1}})).rf, 4.0);
  EXPECT_EQ(extract_prs(with_cells({{0, 0}, {0, 1}, {1, 0}, {1, 1}})).rf, 1.0);
  EXPECT_EQ(extract_prs(with_cells({{0, 5}, {1, 5}, {2, 5}, {3, 5}})).rf, 0.0);
  // hull drops interior and collinear points
  auto hull = root_polygon(with_cells({{0, 0}, {0, 1}, {0, 2}, {2, 0}, {2, 2}, {1, 1}, {1, 0}}));
  EXPECT_EQ(hull.size(), 4u);
}

TEST(RootFeature, FullGridIsMaximal) {
  RootState st;
  st.occupancy.cells.fill(1);
  EXPECT_EQ(extract_prs(st).rf, 11.0 * 14.0);
}

TEST(ConvexHull, AreaMatchesFanAndMonteCarlo) {
  std::mt19937 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    auto poly = oracle::random_convex_polygon(rng);
    std::vector<Point2> pts;
    for (const auto& p : poly) pts.push_back({p.x, p.y});
    const double want = oracle::fan_area(poly);
    EXPECT_NEAR(polygon_area(pts), want, 1e-9 * std::max(1.0, want));
    // shuffled vertices plus interior points give the same hull area
    std::vector<Point2> cloud = pts;
    for (std::size_t i = 1; i + 1 < pts.size(); ++i)
      cloud.push_back({(pts[0].x + pts[i].x + pts[i + 1].x) / 3, (pts[0].y + pts[i].y + pts[i + 1].y) / 3});
    std::shuffle(cloud.begin(), cloud.end(), rng);
    EXPECT_NEAR(polygon_area(convex_hull(cloud)), want, 1e-9 * std::max(1.0, want));
    if (trial < 10) {
      const double mc = oracle::monte_carlo_area(poly, 200000, trial + 1u);
      EXPECT_NEAR(polygon_area(pts), mc, 0.02 * want + 0.05);
    }
  }
}

TEST(Growth, InvariantsOnRandomSoils) {
  std::mt19937_64 rng(2025);
  std::uniform_int_distribution<int> days(0, 30), limit(1, 5), rr(0, 14), cc(0, 11);
  for (int trial = 0; trial < 300; ++trial) {
    GrowthConfig cfg;
    cfg.days = days(rng);
    cfg.division_limit = limit(rng);
    if (trial % 4 == 0) cfg.radicle = {{rr(rng), cc(rng)}};
    if (trial % 7 == 0) cfg.radicle.push_back({rr(rng), cc(rng)});
    cfg.grow_into_barren = trial % 3 != 0;
    auto n = random_nutrients(rng, trial % 5 == 0 ? 0.5 : 0.0);
    auto st = grow(n, cfg);

    EXPECT_TRUE(connected_to(st, cfg.radicle)) << "trial " << trial;
    std::set<Cell> radicle(cfg.radicle.begin(), cfg.radicle.end());
    EXPECT_EQ(st.occupied_cells().size(), radicle.size() + [&] {
      std::size_t k = 0;
      for (const auto& d : st.day_log) k += d.size();
      return k;
    }());
    EXPECT_LE(st.day_log.size(), static_cast<std::size_t>(cfg.days));
    double prev = 0.0, total = 0.0;
    for (std::size_t d = 0; d < st.day_log.size(); ++d) {
      EXPECT_LE(st.day_log[d].size(), static_cast<std::size_t>(cfg.division_limit));
      EXPECT_GE(st.absorbed_by_day[d], prev);
      prev = st.absorbed_by_day[d];
      for (const auto& c : st.day_log[d]) {
        total += absorption_rate(n.grid(c.row, c.col));
        if (!cfg.grow_into_barren) {
          EXPECT_NE(n.grid(c.row, c.col), 0.0);
        }
      }
    }
    EXPECT_NEAR(st.absorbed, total, 1e-12);
    EXPECT_LE(st.absorbed, 1.49 * cfg.days * cfg.division_limit);
    auto f = extract_prs(st);
    EXPECT_GE(f.rf, 0.0);
    EXPECT_LE(f.rf, 154.0);
    EXPECT_EQ(grow(n, cfg), st);
  }
}

// Each day's picks must be the best-ranked frontier cells at that moment.
TEST(Growth, GreedyChoicePerDay) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> lvl(0, 3);
  for (int trial = 0; trial < 100; ++trial) {
    NutrientMatrix n;
    for (auto& v : n.grid.cells) v = lvl(rng);  // many ties
    GrowthConfig cfg;
    cfg.days = 12;
    cfg.division_limit = 1 + trial % 3;
    auto st = grow(n, cfg);
    std::set<Cell> occ(cfg.radicle.begin(), cfg.radicle.end());
    for (const auto& picks : st.day_log) {
      std::vector<std::tuple<double, int, int>> frontier;
      for (const auto& c : occ) {
        const int dr[] = {-1, 1, 0, 0}, dc[] = {0, 0, -1, 1};
        for (int k = 0; k < 4; ++k) {
          Cell nb{c.row + dr[k], c.col + dc[k]};
          if (nb.row < 0 || nb.col < 0 || nb.row >= 15 || nb.col >= 12 || occ.count(nb)) continue;
          frontier.emplace_back(-n.grid(nb.row, nb.col), nb.row, nb.col);
        }
      }
      std::sort(frontier.begin(), frontier.end());
      frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());
      ASSERT_EQ(picks.size(), std::min<std::size_t>(frontier.size(), cfg.division_limit));
      for (std::size_t j = 0; j < picks.size(); ++j) {
        EXPECT_EQ(picks[j].row, std::get<1>(frontier[j]));
        EXPECT_EQ(picks[j].col, std::get<2>(frontier[j]));
        occ.insert(picks[j]);
      }
    }
  }
}
