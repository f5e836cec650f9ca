#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>

#include "prs/common.hpp"
#include "prs/dataset_io.hpp"

namespace prs {

inline constexpr std::size_t kNumBaseFeatures = 12;

enum class BaseFeature : std::size_t { STD, VAR, RMS, SKW, KURT, MAV, ZC, SSC, WAMP, SSI, NLE, WL };

inline constexpr std::array<std::string_view, kNumBaseFeatures> kBaseFeatureNames = {
    "STD", "VAR", "RMS", "SKW", "KURT", "MAV", "ZC", "SSC", "WAMP", "SSI", "NLE", "WL"};

struct ThresholdConfig {
  double zc_threshold{0.0};
  double wamp_threshold{0.0};
  double ssc_threshold{0.0};
};

struct BaseFeatureOptions {
  // When thresholds are not given explicitly, each one is this fraction of
  // max|x| over the segment.
  double relative_threshold{0.01};
  // VAR as the mean-centered sample variance instead of the literal
  // uncentered sum of squares over (N - 1).
  bool centered_variance{false};
};

// The 12 features in canonical order, see kBaseFeatureNames.
struct FeatureVector {
  std::array<double, kNumBaseFeatures> values{};

  double operator[](BaseFeature f) const { return values[static_cast<std::size_t>(f)]; }
  double& operator[](BaseFeature f) { return values[static_cast<std::size_t>(f)]; }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

namespace features {

using Samples = std::span<const double>;

inline double mean(Samples x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

// Central moment of order `k` with 1/N normalization.
inline double central_moment(Samples x, int k) {
  const double mu = mean(x);
  double s = 0.0;
  for (double v : x) s += std::pow(v - mu, k);
  return s / static_cast<double>(x.size());
}

inline double std_dev(Samples x) { return std::sqrt(central_moment(x, 2)); }

// Uncentered: sum(x^2) / (N - 1).
inline double variance(Samples x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s / static_cast<double>(x.size() - 1);
}

inline double centered_variance(Samples x) {
  return central_moment(x, 2) * static_cast<double>(x.size()) / static_cast<double>(x.size() - 1);
}

inline double rms(Samples x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s / static_cast<double>(x.size()));
}

inline double skewness(Samples x) {
  const double m2 = central_moment(x, 2);
  if (m2 == 0.0) throw DegenerateError("SKW undefined for a constant segment");
  return central_moment(x, 3) / std::pow(m2, 1.5);
}

inline double kurtosis(Samples x) {
  const double m2 = central_moment(x, 2);
  if (m2 == 0.0) throw DegenerateError("KURT undefined for a constant segment");
  return central_moment(x, 4) / (m2 * m2);
}

inline double mean_absolute_value(Samples x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s / static_cast<double>(x.size());
}

// Pairs with a strict sign change whose amplitude step reaches the threshold.
inline double zero_crossings(Samples x, double threshold) {
  std::size_t n = 0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    if (x[i] * x[i + 1] < 0.0 && std::abs(x[i] - x[i + 1]) >= threshold) ++n;
  return static_cast<double>(n);
}

inline double slope_sign_changes(Samples x, double threshold) {
  std::size_t n = 0;
  for (std::size_t i = 1; i + 1 < x.size(); ++i)
    if ((x[i] - x[i - 1]) * (x[i] - x[i + 1]) >= threshold) ++n;
  return static_cast<double>(n);
}

inline double willison_amplitude(Samples x, double threshold) {
  std::size_t n = 0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    if (std::abs(x[i] - x[i + 1]) >= threshold) ++n;
  return static_cast<double>(n);
}

inline double simple_square_integral(Samples x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

// Mean Teager-Kaiser energy over the interior samples. Can be negative.
inline double nonlinear_energy(Samples x) {
  double s = 0.0;
  for (std::size_t i = 1; i + 1 < x.size(); ++i) s += x[i] * x[i] - x[i - 1] * x[i + 1];
  return s / static_cast<double>(x.size() - 2);
}

inline double waveform_length(Samples x) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) s += std::abs(x[i + 1] - x[i]);
  return s;
}

}  // namespace features

inline ThresholdConfig default_thresholds(std::span<const double> x, double relative = 0.01) {
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  const double t = relative * peak;
  return {t, t, t};
}

inline FeatureVector compute_base_features(std::span<const double> x, const ThresholdConfig& thr,
                                           const BaseFeatureOptions& opts = {}) {
  if (x.size() < kMinSegmentLength) throw ArgumentError("base features need at least 16 samples");
  if (thr.zc_threshold < 0 || thr.wamp_threshold < 0 || thr.ssc_threshold < 0)
    throw ArgumentError("thresholds must be non-negative");
  namespace f = features;
  FeatureVector out;
  out[BaseFeature::STD] = f::std_dev(x);
  out[BaseFeature::VAR] = opts.centered_variance ? f::centered_variance(x) : f::variance(x);
  out[BaseFeature::RMS] = f::rms(x);
  out[BaseFeature::SKW] = f::skewness(x);
  out[BaseFeature::KURT] = f::kurtosis(x);
  out[BaseFeature::MAV] = f::mean_absolute_value(x);
  out[BaseFeature::ZC] = f::zero_crossings(x, thr.zc_threshold);
  out[BaseFeature::SSC] = f::slope_sign_changes(x, thr.ssc_threshold);
  out[BaseFeature::WAMP] = f::willison_amplitude(x, thr.wamp_threshold);
  out[BaseFeature::SSI] = f::simple_square_integral(x);
  out[BaseFeature::NLE] = f::nonlinear_energy(x);
  out[BaseFeature::WL] = f::waveform_length(x);
  return out;
}

inline FeatureVector compute_base_features(const SignalSegment& seg, const ThresholdConfig& thr,
                                           const BaseFeatureOptions& opts = {}) {
  return compute_base_features(std::span<const double>(seg.samples), thr, opts);
}

// Thresholds derived from the segment itself (opts.relative_threshold * max|x|).
inline FeatureVector compute_base_features(const SignalSegment& seg, const BaseFeatureOptions& opts = {}) {
  return compute_base_features(seg, default_thresholds(seg.samples, opts.relative_threshold), opts);
}

}  // namespace prs
