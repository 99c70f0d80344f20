#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "support.hpp"
#include "wavedetect/indices.hpp"
#include "wavedetect/spectral.hpp"

using namespace wavedetect;
using testing_support::random_signal;

namespace {

std::vector<double> tone(std::size_t n, double cycles_per_sample, double amplitude = 1.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = amplitude * std::sin(2 * std::numbers::pi * cycles_per_sample * static_cast<double>(i));
  }
  return x;
}

}  // namespace

TEST(Dft, MatchesDirectSum) {
  const auto x = random_signal(37, 2);
  const auto X = unitary_dft(x);
  const double n = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
      acc += x[t] * std::exp(std::complex<double>(0.0, -2.0 * std::numbers::pi * k * t / n));
    }
    acc /= std::sqrt(n);
    EXPECT_NEAR(X[k].real(), acc.real(), 1e-12);
    EXPECT_NEAR(X[k].imag(), acc.imag(), 1e-12);
  }
}

TEST(Dft, ParsevalOnRandomSignals) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto x = random_signal(64 + 13 * seed, seed);
    double spectral = 0.0;
    for (const auto& c : unitary_dft(x)) spectral += std::norm(c);
    EXPECT_NEAR(spectral / signal_energy(x), 1.0, 1e-9);
  }
}

TEST(DftIndices, ZeroSignal) {
  const auto idx = dft_indices(std::vector<double>(128, 0.0));
  EXPECT_EQ(idx.std, 0.0);
  EXPECT_EQ(idx.energy, 0.0);
  EXPECT_EQ(idx.band.kind, BandKind::Spectral);
}

TEST(DftIndices, FullBandEqualsTimeEnergy) {
  const auto x = random_signal(200, 8);
  EXPECT_NEAR(dft_indices(x, 1.0).energy / signal_energy(x), 1.0, 1e-9);
}

TEST(DftIndices, LowFrequencyToneHasNoHighBand) {
  const auto idx = dft_indices(tone(256, 5.0 / 256.0));
  EXPECT_LT(idx.energy, 1e-9);
}

TEST(DftIndices, HighFrequencyToneLandsInHighBand) {
  const auto x = tone(256, 100.0 / 256.0);
  EXPECT_NEAR(dft_indices(x).energy / signal_energy(x), 1.0, 1e-9);
}

TEST(DftIndices, Errors) {
  EXPECT_THROW(dft_indices(std::vector<double>{}), Error);
  for (double bad : {0.0, -0.1, 1.5}) {
    try {
      dft_indices(random_signal(16, 1), bad);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
    }
  }
}

TEST(Stft, StationaryToneHasFlatSeries) {
  // 50 Hz at 3200 Hz: hop 32 is half a period, so every frame sees the same energy
  const auto x = tone(3200, 50.0 / 3200.0);
  const auto idx = stft_indices(x);
  EXPECT_LT(idx.std, 1e-12 * std::max(1.0, idx.energy));
  const auto series = stft_highband_series(x, StftConfig{}, kDefaultHighbandFraction);
  EXPECT_EQ(series.size(), (3200 - 64) / 32 + 1);
}

TEST(Stft, StepRaisesStd) {
  auto clean = tone(3200, 50.0 / 3200.0);
  auto stepped = clean;
  for (std::size_t i = 1600; i < stepped.size(); ++i) stepped[i] += 0.4;
  EXPECT_GT(stft_indices(stepped).std, stft_indices(clean).std);
}

TEST(Stft, NonOverlappingRectangularFramesConserveEnergy) {
  const auto x = random_signal(64 * 20, 4);
  const StftConfig cfg{64, 64, WindowShape::Rectangular};
  const auto series = stft_highband_series(x, cfg, 1.0);
  double sum = 0.0;
  for (double e : series) sum += e;
  EXPECT_NEAR(sum / signal_energy(x), 1.0, 1e-9);
  EXPECT_NEAR(stft_indices(x, cfg, 1.0).energy / signal_energy(x), 1.0, 1e-9);
}

TEST(Stft, ConfigErrors) {
  const auto x = random_signal(32, 1);
  try {
    stft_indices(x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WindowTooLong);
  }
  EXPECT_THROW(stft_indices(random_signal(256, 1), StftConfig{64, 0, WindowShape::Hann}), Error);
  EXPECT_THROW(stft_indices(random_signal(256, 1), StftConfig{64, 65, WindowShape::Hann}), Error);
}

TEST(Stft, HannWindowOverlapAddsToOne) {
  const auto w = make_window(64, WindowShape::Hann);
  for (std::size_t i = 0; i < 32; ++i) EXPECT_NEAR(w[i] + w[i + 32], 1.0, 1e-15);
}
