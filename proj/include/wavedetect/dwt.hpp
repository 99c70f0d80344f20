#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "wavedetect/error.hpp"
#include "wavedetect/filters.hpp"

namespace wavedetect {

enum class BoundaryMode { Periodic };

struct Subbands {
  std::vector<double> approx;
  std::vector<double> detail;
};

/// Multi-level analysis output. `details[0]` is D1 (finest scale); the last
/// entry pairs with `approx_final`.
struct DecompositionResult {
  std::size_t levels = 0;
  std::vector<double> approx_final;
  std::vector<std::vector<double>> details;
  BoundaryMode boundary_mode = BoundaryMode::Periodic;
  std::size_t source_length = 0;
};

/// Length of the band produced from an input of `n` samples: ceil(n / 2).
constexpr std::size_t band_length(std::size_t n) noexcept { return (n + 1) / 2; }

/// Odd-length inputs get one trailing copy of the last sample.
inline std::vector<double> pad_to_even(std::span<const double> signal) {
  std::vector<double> out(signal.begin(), signal.end());
  if (out.size() % 2 == 1) out.push_back(out.back());
  return out;
}

/// One analysis step: A(n) = sum_m H(m) x((2n + m) mod N), D likewise with G,
/// over the periodically extended (even-padded) input.
inline Subbands dwt_single_level(std::span<const double> signal, const WaveletFilter& filter) {
  if (signal.empty()) throw Error(ErrorCode::EmptySignal, "cannot transform an empty signal");
  const std::vector<double> x = pad_to_even(signal);
  const std::size_t n = x.size();
  const std::size_t half = n / 2;
  const std::size_t taps = filter.length();
  Subbands out{std::vector<double>(half, 0.0), std::vector<double>(half, 0.0)};
  for (std::size_t i = 0; i < half; ++i) {
    double a = 0.0;
    double d = 0.0;
    for (std::size_t m = 0; m < taps; ++m) {
      const double v = x[(2 * i + m) % n];
      a += filter.lowpass[m] * v;
      d += filter.highpass[m] * v;
    }
    out.approx[i] = a;
    out.detail[i] = d;
  }
  return out;
}

inline DecompositionResult dwt_multi_level(std::span<const double> signal,
                                           const WaveletFilter& filter, std::size_t levels) {
  if (signal.empty()) throw Error(ErrorCode::EmptySignal, "cannot transform an empty signal");
  if (levels == 0) throw Error(ErrorCode::DepthExceeded, "levels must be at least 1");
  if (levels >= 8 * sizeof(std::size_t) || (std::size_t{1} << levels) > signal.size()) {
    throw Error(ErrorCode::DepthExceeded, std::to_string(levels) + " levels need at least 2^" +
                                              std::to_string(levels) + " samples, got " +
                                              std::to_string(signal.size()));
  }
  DecompositionResult result;
  result.levels = levels;
  result.source_length = signal.size();
  result.details.reserve(levels);
  std::vector<double> current(signal.begin(), signal.end());
  for (std::size_t j = 0; j < levels; ++j) {
    Subbands bands = dwt_single_level(current, filter);
    result.details.push_back(std::move(bands.detail));
    current = std::move(bands.approx);
  }
  result.approx_final = std::move(current);
  return result;
}

/// Expected per-level lengths N_0 = source_length, N_j = ceil(N_{j-1} / 2).
inline std::vector<std::size_t> level_lengths(std::size_t source_length, std::size_t levels) {
  std::vector<std::size_t> lengths{source_length};
  for (std::size_t j = 0; j < levels; ++j) lengths.push_back(band_length(lengths.back()));
  return lengths;
}

/// One synthesis step, the adjoint (= inverse, for orthonormal filters) of
/// dwt_single_level. Returns 2 * approx.size() samples.
inline std::vector<double> idwt_single_level(std::span<const double> approx,
                                             std::span<const double> detail,
                                             const WaveletFilter& filter) {
  if (approx.size() != detail.size()) {
    throw Error(ErrorCode::MalformedDecomposition,
                "approximation has " + std::to_string(approx.size()) + " coefficients, detail has " +
                    std::to_string(detail.size()));
  }
  const std::size_t n = 2 * approx.size();
  const std::size_t taps = filter.length();
  std::vector<double> x(n, 0.0);
  for (std::size_t i = 0; i < approx.size(); ++i) {
    for (std::size_t m = 0; m < taps; ++m) {
      x[(2 * i + m) % n] += filter.lowpass[m] * approx[i] + filter.highpass[m] * detail[i];
    }
  }
  return x;
}

/// Inverts dwt_multi_level; the result has `source_length` samples (padding
/// samples introduced on the way down are dropped).
inline std::vector<double> idwt(const DecompositionResult& result, const WaveletFilter& filter) {
  if (result.levels == 0 || result.details.size() != result.levels) {
    throw Error(ErrorCode::MalformedDecomposition,
                "expected " + std::to_string(result.levels) + " detail levels, found " +
                    std::to_string(result.details.size()));
  }
  const auto lengths = level_lengths(result.source_length, result.levels);
  if (result.approx_final.size() != lengths.back()) {
    throw Error(ErrorCode::MalformedDecomposition,
                "final approximation has " + std::to_string(result.approx_final.size()) +
                    " coefficients, expected " + std::to_string(lengths.back()));
  }
  for (std::size_t j = 0; j < result.levels; ++j) {
    if (result.details[j].size() != lengths[j + 1]) {
      throw Error(ErrorCode::MalformedDecomposition,
                  "detail level " + std::to_string(j + 1) + " has " +
                      std::to_string(result.details[j].size()) + " coefficients, expected " +
                      std::to_string(lengths[j + 1]));
    }
  }
  std::vector<double> current = result.approx_final;
  for (std::size_t j = result.levels; j-- > 0;) {
    current = idwt_single_level(current, result.details[j], filter);
    current.resize(lengths[j]);
  }
  return current;
}

}  // namespace wavedetect
