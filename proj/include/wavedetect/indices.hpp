#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "wavedetect/dwt.hpp"
#include "wavedetect/error.hpp"

namespace wavedetect {

enum class BandKind { TimeDomain, Detail, Spectral, SpectralFrames };

/// Where a PerformanceIndices value came from.
struct BandDescriptor {
  BandKind kind = BandKind::Detail;
  std::size_t level = 1;           // Detail only
  double highband_fraction = 0.0;  // Spectral kinds only

  std::string label() const {
    switch (kind) {
      case BandKind::TimeDomain: return "time-domain";
      case BandKind::Detail: return "detail level " + std::to_string(level);
      case BandKind::Spectral: return "spectral high band " + std::to_string(highband_fraction);
      case BandKind::SpectralFrames:
        return "framed spectral high band " + std::to_string(highband_fraction);
    }
    return "unknown";
  }
};

struct PerformanceIndices {
  double std = 0.0;
  double energy = 0.0;
  BandDescriptor band;
  std::size_t signal_length = 0;
};

/// Sum of squares.
inline double signal_energy(std::span<const double> signal) {
  if (signal.empty()) throw Error(ErrorCode::EmptySignal, "energy of an empty signal");
  double sum = 0.0;
  for (double v : signal) sum += v * v;
  return sum;
}

/// Energy held in a decomposition: final approximation plus every detail level.
/// For orthonormal filters this equals the energy of the (padded) input.
inline double coefficient_energy(const DecompositionResult& result) {
  if (result.details.size() != result.levels) {
    throw Error(ErrorCode::MalformedDecomposition, "detail count does not match levels");
  }
  double total = 0.0;
  for (double c : result.approx_final) total += c * c;
  for (const auto& band : result.details) {
    for (double d : band) total += d * d;
  }
  return total;
}

/// Population standard deviation (divides by N).
inline double population_std(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptySignal, "standard deviation of nothing");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / static_cast<double>(values.size()));
}

inline PerformanceIndices band_indices(std::span<const double> band, BandDescriptor descriptor,
                                       std::size_t signal_length) {
  return PerformanceIndices{population_std(band), signal_energy(band), descriptor, signal_length};
}

/// STD and energy of detail level `level` (default D1) of `signal`.
inline PerformanceIndices compute_indices(std::span<const double> signal,
                                          const WaveletFilter& filter, std::size_t level = 1) {
  if (signal.size() < 2 * filter.length()) {
    throw Error(ErrorCode::SignalTooShort,
                std::to_string(signal.size()) + " samples; " + std::string(to_string(filter.name)) +
                    " needs at least " + std::to_string(2 * filter.length()));
  }
  const BandDescriptor band{BandKind::Detail, level, 0.0};
  if (level == 1) {
    const Subbands bands = dwt_single_level(signal, filter);
    return band_indices(bands.detail, band, signal.size());
  }
  const DecompositionResult result = dwt_multi_level(signal, filter, level);
  return band_indices(result.details[level - 1], band, signal.size());
}

}  // namespace wavedetect
