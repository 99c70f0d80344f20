#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "wavedetect/error.hpp"
#include "wavedetect/indices.hpp"

namespace wavedetect {

enum class WindowShape { Rectangular, Hann };

struct StftConfig {
  std::size_t window_length = 64;
  std::size_t hop = 32;
  WindowShape window_shape = WindowShape::Hann;
};

inline constexpr double kDefaultHighbandFraction = 0.5;

/// Unitary DFT (scaled by 1/sqrt(N)), evaluated directly. Parseval holds with
/// no extra factor: sum |X_k|^2 == sum |x_n|^2.
inline std::vector<std::complex<double>> unitary_dft(std::span<const double> signal) {
  const std::size_t n = signal.size();
  std::vector<double> cos_table(n), sin_table(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    cos_table[i] = std::cos(angle);
    sin_table[i] = std::sin(angle);
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<std::complex<double>> spectrum(n);
  for (std::size_t k = 0; k < n; ++k) {
    double re = 0.0, im = 0.0;
    std::size_t idx = 0;  // (k * t) mod n, advanced incrementally
    for (std::size_t t = 0; t < n; ++t) {
      re += signal[t] * cos_table[idx];
      im -= signal[t] * sin_table[idx];
      idx += k;
      if (idx >= n) idx -= n;
    }
    spectrum[k] = {re * scale, im * scale};
  }
  return spectrum;
}

/// True when bin `k` of an `n`-point DFT lies in the top `fraction` of the
/// frequency range [0, Nyquist]. Both the positive- and negative-frequency
/// halves are selected, so fraction 1 keeps every bin.
inline bool in_high_band(std::size_t k, std::size_t n, double fraction) {
  const std::size_t folded = std::min(k, n - k);
  return static_cast<double>(folded) >= (1.0 - fraction) * static_cast<double>(n) / 2.0;
}

inline void check_fraction(double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "highband_fraction must lie in (0, 1], got " + std::to_string(fraction));
  }
}

/// Whole-record Fourier baseline: energy and magnitude STD of the high band.
inline PerformanceIndices dft_indices(std::span<const double> signal,
                                      double highband_fraction = kDefaultHighbandFraction) {
  if (signal.empty()) throw Error(ErrorCode::EmptySignal, "DFT of an empty signal");
  check_fraction(highband_fraction);
  const auto spectrum = unitary_dft(signal);
  std::vector<double> magnitudes;
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    if (in_high_band(k, spectrum.size(), highband_fraction)) {
      magnitudes.push_back(std::abs(spectrum[k]));
    }
  }
  double energy = 0.0;
  for (double m : magnitudes) energy += m * m;
  return PerformanceIndices{population_std(magnitudes), energy,
                            BandDescriptor{BandKind::Spectral, 0, highband_fraction},
                            signal.size()};
}

inline std::vector<double> make_window(std::size_t length, WindowShape shape) {
  std::vector<double> w(length, 1.0);
  if (shape == WindowShape::Hann) {
    // periodic Hann: overlapping copies at hop = length/2 sum to one
    for (std::size_t i = 0; i < length; ++i) {
      w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                   static_cast<double>(length)));
    }
  }
  return w;
}

/// High-band energy of every STFT frame, frames starting at 0, hop, 2*hop, ...
/// while they fit entirely inside the signal.
inline std::vector<double> stft_highband_series(std::span<const double> signal,
                                                const StftConfig& cfg,
                                                double highband_fraction) {
  if (cfg.window_length == 0 || cfg.hop == 0 || cfg.hop > cfg.window_length) {
    throw Error(ErrorCode::InvalidArgument, "STFT needs 0 < hop <= window_length");
  }
  if (cfg.window_length > signal.size()) {
    throw Error(ErrorCode::WindowTooLong, "window of " + std::to_string(cfg.window_length) +
                                              " samples exceeds signal of " +
                                              std::to_string(signal.size()));
  }
  check_fraction(highband_fraction);
  const auto window = make_window(cfg.window_length, cfg.window_shape);
  std::vector<double> frame(cfg.window_length);
  std::vector<double> series;
  for (std::size_t start = 0; start + cfg.window_length <= signal.size(); start += cfg.hop) {
    for (std::size_t i = 0; i < cfg.window_length; ++i) frame[i] = signal[start + i] * window[i];
    const auto spectrum = unitary_dft(frame);
    double e = 0.0;
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
      if (in_high_band(k, spectrum.size(), highband_fraction)) e += std::norm(spectrum[k]);
    }
    series.push_back(e);
  }
  return series;
}

/// Short-time Fourier baseline: total high-band energy over frames, and the STD
/// of the per-frame energy series (large when energy is concentrated in time).
inline PerformanceIndices stft_indices(std::span<const double> signal, const StftConfig& cfg = {},
                                       double highband_fraction = kDefaultHighbandFraction) {
  if (signal.empty()) throw Error(ErrorCode::EmptySignal, "STFT of an empty signal");
  const auto series = stft_highband_series(signal, cfg, highband_fraction);
  double energy = 0.0;
  for (double e : series) energy += e;
  return PerformanceIndices{population_std(series), energy,
                            BandDescriptor{BandKind::SpectralFrames, 0, highband_fraction},
                            signal.size()};
}

}  // namespace wavedetect
