#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <thread>

#include "oracles.hpp"
#include "prs/spectral.hpp"

using namespace prs;

namespace {

std::vector<double> sinusoid(std::size_t n, double cycles, double amp = 1.0) {
  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t) x[t] = amp * std::sin(2 * std::numbers::pi * cycles * t / n);
  return x;
}

std::vector<double> noise(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0, 1);
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

}  // namespace

TEST(Spectral, ZeroSegment) {
  std::vector<double> x(64, 0.0);
  auto s = compute_spectral(x, 1000.0);
  EXPECT_EQ(s.max_psd, 0.0);
  EXPECT_EQ(s.med_psd, 0.0);
  auto f = compute_spectral(x, 1000.0, MedianMode::MedianFrequency);
  EXPECT_EQ(f.med_psd, 0.0);
}

TEST(Spectral, SinusoidPeaksAtItsBin) {
  constexpr std::size_t n = 1024;
  for (std::size_t k0 : {5u, 37u, 100u, 511u}) {
    auto x = sinusoid(n, static_cast<double>(k0));
    auto psd = periodogram(x, 1000.0);
    ASSERT_EQ(psd.size(), n / 2);
    const auto peak = std::max_element(psd.begin(), psd.end()) - psd.begin();
    EXPECT_EQ(static_cast<std::size_t>(peak) + 1, k0);
    std::vector<double> rest(psd);
    rest.erase(rest.begin() + peak);
    EXPECT_GE(psd[peak], 100.0 * *std::max_element(rest.begin(), rest.end()));
    EXPECT_EQ(compute_spectral(x, 1000.0).max_psd, psd[peak]);
    // median frequency of a pure tone is its own frequency
    EXPECT_DOUBLE_EQ(compute_spectral(x, 1000.0, MedianMode::MedianFrequency).med_psd, k0 * 1000.0 / n);
  }
}

TEST(Spectral, ParsevalOnZeroMeanInput) {
  std::mt19937_64 rng(12);
  for (std::size_t n : {16u, 17u, 256u, 1000u, 2001u}) {
    auto x = noise(rng, n);
    double mu = 0;
    for (double v : x) mu += v;
    mu /= n;
    double power = 0;
    for (auto& v : x) {
      v -= mu;
      power += v * v;
    }
    power /= n;
    const double fs = 250.0;
    auto psd = periodogram(x, fs);
    double total = 0;
    for (double p : psd) total += p * fs / n;
    EXPECT_NEAR(total, power, 1e-9 * power);
  }
}

TEST(Spectral, ScalesWithSquareOfAmplitude) {
  std::mt19937_64 rng(13);
  auto x = noise(rng, 500);
  auto base = compute_spectral(x, 1000.0);
  for (double c : {0.5, 3.0, -2.0}) {
    std::vector<double> y(x);
    for (auto& v : y) v *= c;
    auto s = compute_spectral(y, 1000.0);
    EXPECT_NEAR(s.max_psd, c * c * base.max_psd, 1e-12 * c * c * base.max_psd);
    EXPECT_NEAR(s.med_psd, c * c * base.med_psd, 1e-12 * c * c * base.med_psd);
  }
}

TEST(Spectral, MatchesNaiveDft) {
  std::mt19937_64 rng(14);
  std::uniform_int_distribution<std::size_t> len(16, 300);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = len(rng);
    auto x = noise(rng, n);
    const double fs = 100.0 + trial;
    auto psd = periodogram(x, fs);
    auto p = oracle::dft_power(x);
    ASSERT_EQ(psd.size(), n / 2);
    std::vector<double> want;
    for (std::size_t k = 1; k <= n / 2; ++k) {
      const double scale = (n % 2 == 0 && k == n / 2) ? 1.0 : 2.0;
      want.push_back(scale * p[k] / (n * fs));
    }
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(psd[i], want[i], 1e-9 * (1 + want[i]));
    auto s = compute_spectral(x, fs);
    EXPECT_DOUBLE_EQ(s.max_psd, *std::max_element(want.begin(), want.end()));
    std::sort(want.begin(), want.end());
    const double med = want.size() % 2 ? want[want.size() / 2] : 0.5 * (want[want.size() / 2 - 1] + want[want.size() / 2]);
    EXPECT_NEAR(s.med_psd, med, 1e-9 * (1 + med));
  }
}

TEST(Spectral, Preconditions) {
  std::vector<double> x(15, 1.0);
  EXPECT_THROW(compute_spectral(x, 1000.0), ArgumentError);
  std::vector<double> y(16, 1.0);
  EXPECT_THROW(compute_spectral(y, 0.0), ArgumentError);
}

TEST(Spectral, ConcurrentCallsAgree) {
  std::mt19937_64 rng(15);
  std::vector<std::vector<double>> inputs;
  for (int i = 0; i < 8; ++i) inputs.push_back(noise(rng, 512 + 37 * i));
  std::vector<SpectralPair> serial;
  for (const auto& x : inputs) serial.push_back(compute_spectral(x, 1000.0));
  std::vector<SpectralPair> parallel(inputs.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < inputs.size(); ++i)
      pool.emplace_back([&, i] {
        for (int rep = 0; rep < 20; ++rep) parallel[i] = compute_spectral(inputs[i], 1000.0);
      });
  }
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    EXPECT_EQ(parallel[i].max_psd, serial[i].max_psd);
    EXPECT_EQ(parallel[i].med_psd, serial[i].med_psd);
  }
}
