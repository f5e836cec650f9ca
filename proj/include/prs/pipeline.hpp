#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "prs/base_features.hpp"
#include "prs/feature_matrix.hpp"
#include "prs/feature_prep.hpp"
#include "prs/root_growth.hpp"
#include "prs/soil.hpp"

namespace prs {

struct PrsConfig {
  GrowthConfig growth{};
  SoilFill fill{SoilFill::Stacked};
  int kmeans_restarts{25};
};

// Everything learned from a reference set of raw base-feature rows that the
// per-sample soil construction needs. Fitting uses only the rows passed in,
// so fitting on a train fold keeps test rows out of every statistic.
struct FittedPrep {
  std::vector<ColumnBounds> norm_bounds;  // per original column, raw units
  std::vector<double> gains;              // per original column
  std::vector<std::size_t> permutation;   // position -> original column
  std::vector<ColumnBounds> soil_bounds;  // per position, normalized units

  friend bool operator==(const FittedPrep&, const FittedPrep&) = default;
};

inline FittedPrep fit_prep(const FeatureMatrix& base, std::uint64_t seed, int restarts = 25) {
  if (base.cols != kNumBaseFeatures) throw ShapeError("fit_prep: expected 12 base feature columns");
  if (base.labels.size() != base.rows) throw ShapeError("fit_prep: base matrix needs labels");
  FittedPrep prep;
  const auto normalized = minmax_normalize(base);
  prep.norm_bounds = normalized.bounds;
  prep.gains = column_gains(normalized, seed, restarts);
  const auto sorted = sort_center_out(normalized, prep.gains);
  prep.permutation = sorted.permutation;
  prep.soil_bounds = fit_minmax_bounds(sorted.normalized.matrix);
  return prep;
}

// Normalizes one raw base row with the fitted bounds and reorders it into
// soil positions.
inline std::vector<double> sorted_row(const FittedPrep& prep, std::span<const double> raw) {
  if (raw.size() != kNumBaseFeatures) throw ShapeError("sorted_row: expected 12 base features");
  std::vector<double> out(kNumBaseFeatures);
  for (std::size_t p = 0; p < kNumBaseFeatures; ++p) {
    const auto c = prep.permutation[p];
    const auto& b = prep.norm_bounds[c];
    out[p] = b.degenerate() ? 0.0 : (raw[c] - b.min) / (b.max - b.min);
  }
  return out;
}

inline DiscreteSoil soil_for(const FittedPrep& prep, std::span<const double> raw, SoilFill fill = SoilFill::Stacked) {
  const auto row = sorted_row(prep, raw);
  return build_discrete_soil(row, prep.soil_bounds, fill);
}

inline RootState grow_for(const FittedPrep& prep, std::span<const double> raw, const PrsConfig& cfg) {
  return grow(convolve_soil(soil_for(prep, raw, cfg.fill)), cfg.growth);
}

inline PRSFeaturePair prs_features(const FittedPrep& prep, std::span<const double> raw, const PrsConfig& cfg) {
  return extract_prs(grow_for(prep, raw, cfg));
}

// m x 2 matrix [NF, RF] for every row of `base`.
inline FeatureMatrix prs_feature_matrix(const FittedPrep& prep, const FeatureMatrix& base, const PrsConfig& cfg) {
  FeatureMatrix out(base.rows, 2, {"NF", "RF"}, base.labels);
  for (std::size_t r = 0; r < base.rows; ++r) {
    const auto pair = prs_features(prep, base.row(r), cfg);
    out(r, 0) = pair.nf;
    out(r, 1) = pair.rf;
  }
  return out;
}

inline std::vector<std::string> base_feature_names() { return {kBaseFeatureNames.begin(), kBaseFeatureNames.end()}; }

}  // namespace prs
