#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <exception>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "prs/base_features.hpp"
#include "prs/classifiers.hpp"
#include "prs/dataset_io.hpp"
#include "prs/feature_matrix.hpp"
#include "prs/feature_prep.hpp"
#include "prs/pipeline.hpp"
#include "prs/spectral.hpp"
#include "prs/stats.hpp"

namespace prs {

enum class FeatureSetVariant { BASE, BASE_NF, BASE_RF, PRS, COMPARISON };

inline constexpr std::array<FeatureSetVariant, 5> kAllVariants = {
    FeatureSetVariant::BASE, FeatureSetVariant::BASE_NF, FeatureSetVariant::BASE_RF, FeatureSetVariant::PRS,
    FeatureSetVariant::COMPARISON};

inline std::string_view to_string(FeatureSetVariant v) {
  switch (v) {
    case FeatureSetVariant::BASE: return "BASE";
    case FeatureSetVariant::BASE_NF: return "BASE_NF";
    case FeatureSetVariant::BASE_RF: return "BASE_RF";
    case FeatureSetVariant::PRS: return "PRS";
    case FeatureSetVariant::COMPARISON: return "COMPARISON";
  }
  return "?";
}

inline FeatureSetVariant parse_variant(std::string_view s) {
  for (auto v : kAllVariants)
    if (to_string(v) == s) return v;
  throw ArgumentError("unknown feature set '" + std::string(s) + "'");
}

inline std::size_t variant_columns(FeatureSetVariant v) {
  switch (v) {
    case FeatureSetVariant::BASE: return 12;
    case FeatureSetVariant::BASE_NF:
    case FeatureSetVariant::BASE_RF: return 13;
    case FeatureSetVariant::PRS:
    case FeatureSetVariant::COMPARISON: return 14;
  }
  return 0;
}

inline bool needs_prs(FeatureSetVariant v) {
  return v == FeatureSetVariant::BASE_NF || v == FeatureSetVariant::BASE_RF || v == FeatureSetVariant::PRS;
}

// Split-independent per-segment features.
struct DatasetFeatures {
  std::vector<std::string> ids;
  std::array<std::string, 2> class_names;
  FeatureMatrix base;      // m x 12, raw, labeled
  FeatureMatrix spectral;  // m x 2 [MaxPSD, MedPSD], raw, labeled

  std::size_t size() const { return base.rows; }
};

namespace detail {

// Runs body(i) for i in [0, n) on up to `threads` workers. Each index is
// processed exactly once; the first failing index (lowest) is rethrown.
template <typename Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
  const auto workers = static_cast<std::size_t>(std::clamp<long>(threads, 1, static_cast<long>(std::max<std::size_t>(n, 1))));
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            body(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

inline DatasetFeatures compute_dataset_features(const LabeledDataset& ds, const BaseFeatureOptions& opts = {},
                                                MedianMode median = MedianMode::PsdValue, int threads = 1) {
  DatasetFeatures f;
  const std::size_t m = ds.size();
  f.class_names = ds.class_names;
  f.base = FeatureMatrix(m, kNumBaseFeatures, base_feature_names(), ds.class_indices());
  f.spectral = FeatureMatrix(m, 2, {"MaxPSD", "MedPSD"}, ds.class_indices());
  for (const auto& s : ds.segments) f.ids.push_back(s.id);
  detail::parallel_for(m, threads, [&](std::size_t i) {
    const auto& seg = ds.segments[i];
    FeatureVector fv;
    try {
      fv = compute_base_features(seg, opts);
    } catch (const DegenerateError& e) {
      throw DegenerateError("segment '" + seg.id + "': " + e.what());
    }
    std::copy(fv.values.begin(), fv.values.end(), f.base.row(i).begin());
    const auto sp = compute_spectral(seg, median);
    f.spectral(i, 0) = sp.max_psd;
    f.spectral(i, 1) = sp.med_psd;
  });
  return f;
}

struct ExperimentConfig {
  std::vector<FeatureSetVariant> variants{kAllVariants.begin(), kAllVariants.end()};
  std::vector<ClassifierSpec> classifiers{
      {ClassifierKind::LR}, {ClassifierKind::SVM_POLY}, {ClassifierKind::LDA}, {ClassifierKind::QDA}};
  std::vector<double> rates{0.4, 0.5, 0.6, 0.7, 0.8};
  int reps{100};
  std::uint64_t seed{0};
  int threads{1};
  PrsConfig prs{};
  // Fit normalization/gains/soil bounds once on the whole dataset instead of
  // per train fold.
  bool global_prep{false};
  int max_split_retries{10};
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Per class, shuffles the member indices and sends round(rate * n_k) of
// them (at least 1, at most n_k - 1) to the train fold. Both folds come out
// in ascending index order.
inline Split stratified_split(std::span<const int> labels, double rate, std::uint64_t seed) {
  if (!(rate > 0.0 && rate < 1.0)) throw ArgumentError("split rate must lie in (0, 1)");
  std::mt19937_64 rng(seed);
  Split s;
  for (int cls = 0; cls < 2; ++cls) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) members.push_back(i);
    if (members.empty()) continue;
    std::shuffle(members.begin(), members.end(), rng);
    const auto n = static_cast<long>(members.size());
    const long n_train = n < 2 ? n : std::clamp(std::lround(rate * static_cast<double>(n)), 1L, n - 1);
    s.train.insert(s.train.end(), members.begin(), members.begin() + n_train);
    s.test.insert(s.test.end(), members.begin() + n_train, members.end());
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

namespace detail {

inline bool has_both_classes(std::span<const int> labels, std::span<const std::size_t> idx) {
  bool c0 = false;
  bool c1 = false;
  for (auto i : idx) (labels[i] == 1 ? c1 : c0) = true;
  return c0 && c1;
}

inline std::uint64_t rep_seed(std::uint64_t seed, std::size_t rep) { return derive_seed(seed, rep); }
inline std::uint64_t split_seed(std::uint64_t seed, std::size_t rate_index, std::size_t rep, int attempt) {
  return derive_seed(rep_seed(seed, rep), 4 * rate_index + 16 * static_cast<std::uint64_t>(attempt));
}
inline std::uint64_t prep_seed(std::uint64_t seed, std::size_t rate_index, std::size_t rep) {
  return derive_seed(rep_seed(seed, rep), 4 * rate_index + 1);
}
inline std::uint64_t global_prep_seed(std::uint64_t seed) { return derive_seed(seed, ~std::uint64_t{0}); }

}  // namespace detail

// Split with bounded resampling until both folds hold both classes.
inline Split experiment_split(std::span<const int> labels, const ExperimentConfig& cfg, std::size_t rate_index,
                              std::size_t rep) {
  for (int attempt = 0; attempt <= cfg.max_split_retries; ++attempt) {
    auto s = stratified_split(labels, cfg.rates.at(rate_index), detail::split_seed(cfg.seed, rate_index, rep, attempt));
    if (s.test.size() < 2) throw DataError("split leaves fewer than 2 test samples");
    if (detail::has_both_classes(labels, s.train) && detail::has_both_classes(labels, s.test)) return s;
  }
  throw DataError("could not draw a split with both classes in each fold");
}

// Raw (unnormalized) columns of a variant for all rows. `prs` is m x 2
// [NF, RF]; it may be empty for variants that do not use it.
inline FeatureMatrix assemble_variant(const DatasetFeatures& f, const FeatureMatrix& prs, FeatureSetVariant v) {
  std::vector<std::size_t> pick;
  switch (v) {
    case FeatureSetVariant::BASE: return f.base;
    case FeatureSetVariant::BASE_NF: pick = {0}; break;
    case FeatureSetVariant::BASE_RF: pick = {1}; break;
    case FeatureSetVariant::PRS: pick = {0, 1}; break;
    case FeatureSetVariant::COMPARISON: return f.base.append_columns(f.spectral);
  }
  if (prs.rows != f.base.rows || prs.cols != 2) throw ShapeError("assemble_variant: PRS features missing");
  return f.base.append_columns(prs.select_columns(pick));
}

struct FoldPair {
  FeatureMatrix train;
  FeatureMatrix test;
  std::vector<ColumnBounds> bounds;  // fitted on the train fold
};

// Min-max normalization fitted on the train rows and applied to both folds.
inline FoldPair normalize_folds(const FeatureMatrix& all, const Split& s) {
  FoldPair p;
  auto train_raw = all.select_rows(s.train);
  auto test_raw = all.select_rows(s.test);
  p.bounds = fit_minmax_bounds(train_raw);
  p.train = apply_minmax(train_raw, p.bounds);
  p.test = apply_minmax(test_raw, p.bounds);
  return p;
}

// Per-repetition state shared by every variant and classifier.
struct RepFolds {
  Split split;
  std::optional<FittedPrep> prep;
  FeatureMatrix prs;  // m x 2 [NF, RF] for all rows, empty if unused
};

inline RepFolds prepare_rep(const DatasetFeatures& f, const ExperimentConfig& cfg, std::size_t rate_index,
                            std::size_t rep, const std::optional<FittedPrep>& global_prep = std::nullopt) {
  RepFolds r;
  r.split = experiment_split(f.base.labels, cfg, rate_index, rep);
  const bool any_prs = std::any_of(cfg.variants.begin(), cfg.variants.end(), needs_prs);
  if (!any_prs) return r;
  if (global_prep) {
    r.prep = *global_prep;
  } else {
    r.prep = fit_prep(f.base.select_rows(r.split.train), detail::prep_seed(cfg.seed, rate_index, rep),
                      cfg.prs.kmeans_restarts);
  }
  r.prs = prs_feature_matrix(*r.prep, f.base, cfg.prs);
  return r;
}

struct CellResult {
  ClassifierKind classifier{ClassifierKind::LR};
  FeatureSetVariant variant{FeatureSetVariant::BASE};
  double rate{0.0};
  std::vector<double> accuracies;  // per repetition
  double mean{0.0};
  double std{0.0};
  double min{0.0};
  double max{0.0};
};

struct AnovaEntry {
  ClassifierKind classifier{ClassifierKind::LR};
  double rate{0.0};
  AnovaResult result;
};

struct EvalReport {
  ExperimentConfig config;
  std::size_t n_samples{0};
  std::vector<CellResult> cells;  // ordered by rate, classifier, variant
  std::vector<AnovaEntry> anova;  // per (rate, classifier) across variants

  const CellResult& cell(ClassifierKind k, FeatureSetVariant v, double rate) const {
    for (const auto& c : cells)
      if (c.classifier == k && c.variant == v && std::abs(c.rate - rate) < 1e-12) return c;
    throw ArgumentError("no result for the requested cell");
  }
};

inline void validate(const ExperimentConfig& cfg) {
  if (cfg.reps < 1) throw ArgumentError("reps must be >= 1");
  if (cfg.rates.empty() || cfg.variants.empty() || cfg.classifiers.empty())
    throw ArgumentError("experiment needs at least one rate, variant and classifier");
  for (double r : cfg.rates)
    if (!(r > 0.0 && r < 1.0)) throw ArgumentError("learning rates must lie in (0, 1)");
  validate(cfg.prs.growth);
}

inline EvalReport run_experiment(const DatasetFeatures& f, const ExperimentConfig& cfg) {
  validate(cfg);
  const std::size_t n_rates = cfg.rates.size();
  const std::size_t n_cls = cfg.classifiers.size();
  const std::size_t n_var = cfg.variants.size();
  const auto reps = static_cast<std::size_t>(cfg.reps);

  std::optional<FittedPrep> global;
  if (cfg.global_prep) global = fit_prep(f.base, detail::global_prep_seed(cfg.seed), cfg.prs.kmeans_restarts);

  // acc[((rate * reps + rep) * n_cls + cls) * n_var + var]
  std::vector<double> acc(n_rates * reps * n_cls * n_var, 0.0);
  detail::parallel_for(n_rates * reps, cfg.threads, [&](std::size_t task) {
    const std::size_t ri = task / reps;
    const std::size_t rep = task % reps;
    const auto folds = prepare_rep(f, cfg, ri, rep, global);
    const auto& labels = f.base.labels;
    std::vector<int> truth;
    for (auto i : folds.split.test) truth.push_back(labels[i]);
    for (std::size_t vi = 0; vi < n_var; ++vi) {
      const auto pair = normalize_folds(assemble_variant(f, folds.prs, cfg.variants[vi]), folds.split);
      const auto x_train = to_eigen(pair.train);
      const auto x_test = to_eigen(pair.test);
      for (std::size_t ci = 0; ci < n_cls; ++ci) {
        const auto model = train(cfg.classifiers[ci], x_train, pair.train.labels);
        const auto pred = predict(model, x_test);
        acc[(task * n_cls + ci) * n_var + vi] = accuracy(confusion(truth, pred));
      }
    }
  });

  EvalReport rep;
  rep.config = cfg;
  rep.n_samples = f.size();
  for (std::size_t ri = 0; ri < n_rates; ++ri) {
    for (std::size_t ci = 0; ci < n_cls; ++ci) {
      std::vector<std::vector<double>> groups;
      for (std::size_t vi = 0; vi < n_var; ++vi) {
        CellResult c;
        c.classifier = cfg.classifiers[ci].kind;
        c.variant = cfg.variants[vi];
        c.rate = cfg.rates[ri];
        for (std::size_t k = 0; k < reps; ++k) c.accuracies.push_back(acc[((ri * reps + k) * n_cls + ci) * n_var + vi]);
        c.mean = mean_of(c.accuracies);
        c.std = sample_std(c.accuracies);
        c.min = *std::min_element(c.accuracies.begin(), c.accuracies.end());
        c.max = *std::max_element(c.accuracies.begin(), c.accuracies.end());
        groups.push_back(c.accuracies);
        rep.cells.push_back(std::move(c));
      }
      if (n_var >= 2 && reps >= 2)
        rep.anova.push_back({cfg.classifiers[ci].kind, cfg.rates[ri], anova_oneway(groups)});
    }
  }
  return rep;
}

inline EvalReport run_experiment(const LabeledDataset& ds, const ExperimentConfig& cfg,
                                 const BaseFeatureOptions& opts = {}, MedianMode median = MedianMode::PsdValue) {
  return run_experiment(compute_dataset_features(ds, opts, median, cfg.threads), cfg);
}

// 16 columns: 12 base, NF, RF, MaxPSD, MedPSD, with the PRS preparation
// fitted on every row.
inline FeatureMatrix full_feature_table(const DatasetFeatures& f, const PrsConfig& cfg, std::uint64_t seed) {
  const auto prep = fit_prep(f.base, detail::global_prep_seed(seed), cfg.kmeans_restarts);
  return f.base.append_columns(prs_feature_matrix(prep, f.base, cfg)).append_columns(f.spectral);
}

}  // namespace prs
