#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "prs/common.hpp"
#include "prs/dataset_io.hpp"

namespace prs {

struct SpectralPair {
  double max_psd{0.0};
  double med_psd{0.0};
};

enum class MedianMode {
  PsdValue,         // median of the PSD values
  MedianFrequency,  // frequency (Hz) splitting the spectral power in half
};

namespace detail {

// FFTW's planner is not thread-safe; execution on distinct arrays is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

inline std::vector<std::complex<double>> real_dft(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> in(x.begin(), x.end());
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n / 2 + 1));
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw Error("fftw", "failed to create FFT plan");
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

inline double median(std::vector<double> v) {
  const std::size_t n = v.size();
  std::sort(v.begin(), v.end());
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

// One-sided periodogram over bins k = 1..floor(N/2) (DC excluded):
// PSD[k] = 2 |X[k]|^2 / (N fs), without the factor 2 at the Nyquist bin.
// Summing PSD * fs / N recovers the mean power of the zero-mean part.
inline std::vector<double> periodogram(std::span<const double> x, double fs) {
  if (x.size() < 2) throw ArgumentError("periodogram needs at least 2 samples");
  if (!(fs > 0.0)) throw ArgumentError("periodogram: sampling rate must be positive");
  const std::size_t n = x.size();
  const auto spectrum = detail::real_dft(x);
  std::vector<double> psd;
  psd.reserve(n / 2);
  for (std::size_t k = 1; k <= n / 2; ++k) {
    const double scale = (n % 2 == 0 && k == n / 2) ? 1.0 : 2.0;
    psd.push_back(scale * std::norm(spectrum[k]) / (static_cast<double>(n) * fs));
  }
  return psd;
}

inline SpectralPair compute_spectral(std::span<const double> x, double fs, MedianMode mode = MedianMode::PsdValue) {
  if (x.size() < kMinSegmentLength) throw ArgumentError("spectral features need at least 16 samples");
  const auto psd = periodogram(x, fs);
  SpectralPair out;
  out.max_psd = *std::max_element(psd.begin(), psd.end());
  if (mode == MedianMode::PsdValue) {
    out.med_psd = detail::median(psd);
  } else {
    double total = 0.0;
    for (double p : psd) total += p;
    if (total > 0.0) {
      double acc = 0.0;
      for (std::size_t i = 0; i < psd.size(); ++i) {
        acc += psd[i];
        if (acc >= 0.5 * total) {
          out.med_psd = static_cast<double>(i + 1) * fs / static_cast<double>(x.size());
          break;
        }
      }
    }
  }
  return out;
}

inline SpectralPair compute_spectral(const SignalSegment& seg, MedianMode mode = MedianMode::PsdValue) {
  return compute_spectral(seg.samples, seg.sampling_rate, mode);
}

}  // namespace prs
