#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wavedetect/dwt.hpp"
#include "wavedetect/error.hpp"
#include "wavedetect/grid_synth.hpp"
#include "wavedetect/indices.hpp"

namespace wavedetect {

enum class ChannelPolicy { WorstPhase, PhaseA, Mean };

constexpr std::string_view to_string(ChannelPolicy policy) noexcept {
  switch (policy) {
    case ChannelPolicy::WorstPhase: return "WorstPhase";
    case ChannelPolicy::PhaseA: return "PhaseA";
    case ChannelPolicy::Mean: return "Mean";
  }
  return "WorstPhase";
}

inline ChannelPolicy parse_channel_policy(std::string_view text) {
  if (text == "WorstPhase") return ChannelPolicy::WorstPhase;
  if (text == "PhaseA") return ChannelPolicy::PhaseA;
  if (text == "Mean") return ChannelPolicy::Mean;
  throw Error(ErrorCode::InvalidArgument, "unknown channel policy '" + std::string(text) + "'");
}

struct DetectorConfig {
  WaveletName filter_name = WaveletName::Haar;
  double gate_threshold = 0.0;   // on max |d1| / base_voltage
  double class_threshold = 1.0;  // on d1 energy
  ChannelPolicy channel_policy = ChannelPolicy::WorstPhase;

  void validate() const {
    if (!(gate_threshold >= 0.0) || !std::isfinite(gate_threshold)) {
      throw Error(ErrorCode::InvalidArgument, "gate_threshold must be finite and >= 0");
    }
    if (!(class_threshold > 0.0) || !std::isfinite(class_threshold)) {
      throw Error(ErrorCode::InvalidArgument, "class_threshold must be finite and > 0");
    }
  }
};

struct DetectionVerdict {
  EventKind kind = EventKind::Normal;
  PerformanceIndices indices;
  std::optional<std::size_t> onset_sample;
  std::string channel_used;
};

/// First coefficient whose magnitude exceeds `gate_threshold`, mapped back to
/// signal coordinates (coefficient n covers samples 2n and 2n + 1).
inline std::optional<std::size_t> locate_event(std::span<const double> d1, double gate_threshold) {
  for (std::size_t i = 0; i < d1.size(); ++i) {
    if (std::abs(d1[i]) > gate_threshold) return 2 * i;
  }
  return std::nullopt;
}

inline constexpr std::array<std::string_view, 3> kPhaseLabels = {"a", "b", "c"};

/// Level-1 detail of one phase, normalized by the waveform's base voltage.
struct PhaseDetail {
  std::size_t phase = 0;
  std::vector<double> d1;
  double max_abs = 0.0;
};

inline PhaseDetail phase_detail(const Waveform& w, std::size_t phase, const WaveletFilter& filter) {
  if (w.size() < 2 * filter.length()) {
    throw Error(ErrorCode::SignalTooShort,
                std::to_string(w.size()) + " samples; " + std::string(to_string(filter.name)) +
                    " needs at least " + std::to_string(2 * filter.length()));
  }
  PhaseDetail out;
  out.phase = phase;
  out.d1 = dwt_single_level(w.channels[phase], filter).detail;
  for (double& v : out.d1) {
    v /= w.base_voltage;
    out.max_abs = std::max(out.max_abs, std::abs(v));
  }
  return out;
}

/// The statistics the decision rule looks at, after applying the channel policy.
struct ChannelSummary {
  std::string channel;
  PerformanceIndices indices;
  double max_abs_d1 = 0.0;
  std::vector<PhaseDetail> details;  // the phase(s) that fed the summary
};

inline ChannelSummary summarize(const Waveform& w, const WaveletFilter& filter,
                                ChannelPolicy policy) {
  ChannelSummary out;
  const BandDescriptor band{BandKind::Detail, 1, 0.0};
  if (policy == ChannelPolicy::Mean) {
    out.channel = "mean";
    out.indices = PerformanceIndices{0.0, 0.0, band, w.size()};
    for (std::size_t p = 0; p < 3; ++p) {
      PhaseDetail pd = phase_detail(w, p, filter);
      const auto idx = band_indices(pd.d1, band, w.size());
      out.indices.std += idx.std / 3.0;
      out.indices.energy += idx.energy / 3.0;
      out.max_abs_d1 += pd.max_abs / 3.0;
      out.details.push_back(std::move(pd));
    }
    return out;
  }
  std::size_t chosen = 0;
  if (policy == ChannelPolicy::WorstPhase) {
    std::vector<PhaseDetail> all;
    for (std::size_t p = 0; p < 3; ++p) all.push_back(phase_detail(w, p, filter));
    for (std::size_t p = 1; p < 3; ++p) {
      if (all[p].max_abs > all[chosen].max_abs) chosen = p;
    }
    out.details.push_back(std::move(all[chosen]));
  } else {
    out.details.push_back(phase_detail(w, 0, filter));
  }
  out.channel = std::string(kPhaseLabels[chosen]);
  out.indices = band_indices(out.details.front().d1, band, w.size());
  out.max_abs_d1 = out.details.front().max_abs;
  return out;
}

/// Presence gate on max|d1|, then islanding if the d1 energy is above the class
/// threshold, fault otherwise.
inline DetectionVerdict detect(const Waveform& w, const DetectorConfig& cfg) {
  cfg.validate();
  const WaveletFilter filter = filter_bank(cfg.filter_name);
  ChannelSummary summary = summarize(w, filter, cfg.channel_policy);

  DetectionVerdict verdict;
  verdict.indices = summary.indices;
  verdict.channel_used = summary.channel;
  if (summary.max_abs_d1 <= cfg.gate_threshold) {
    verdict.kind = EventKind::Normal;
    return verdict;
  }
  verdict.kind = summary.indices.energy > cfg.class_threshold ? EventKind::Islanding
                                                              : EventKind::Fault;
  for (const auto& pd : summary.details) {
    const auto onset = locate_event(pd.d1, cfg.gate_threshold);
    if (onset && (!verdict.onset_sample || *onset < *verdict.onset_sample)) {
      verdict.onset_sample = onset;
    }
  }
  return verdict;
}

// --- calibration -----------------------------------------------------------

class NotSeparableError : public Error {
 public:
  NotSeparableError(double max_fault_energy, double min_islanding_energy)
      : Error(ErrorCode::NotSeparable,
              "largest fault energy " + std::to_string(max_fault_energy) +
                  " >= smallest islanding energy " + std::to_string(min_islanding_energy)),
        max_fault_energy_(max_fault_energy),
        min_islanding_energy_(min_islanding_energy) {}

  double max_fault_energy() const noexcept { return max_fault_energy_; }
  double min_islanding_energy() const noexcept { return min_islanding_energy_; }

 private:
  double max_fault_energy_;
  double min_islanding_energy_;
};

/// Geometric mean of the largest fault energy and the smallest islanding energy.
inline double class_threshold_from(std::span<const double> fault_energies,
                                   std::span<const double> islanding_energies) {
  if (fault_energies.empty()) throw Error(ErrorCode::MissingClass, "no Fault examples");
  if (islanding_energies.empty()) throw Error(ErrorCode::MissingClass, "no Islanding examples");
  const double max_fault = *std::max_element(fault_energies.begin(), fault_energies.end());
  const double min_island =
      *std::min_element(islanding_energies.begin(), islanding_energies.end());
  if (max_fault >= min_island) throw NotSeparableError(max_fault, min_island);
  return std::sqrt(max_fault * min_island);
}

struct LabeledWaveform {
  Waveform waveform;
  EventKind kind;
};

/// Gate = 3 x the largest max|d1| seen on Normal examples; class threshold from
/// class_threshold_from over the Fault and Islanding examples.
inline DetectorConfig calibrate(std::span<const LabeledWaveform> labeled, WaveletName filter_name,
                                ChannelPolicy policy = ChannelPolicy::WorstPhase) {
  const WaveletFilter filter = filter_bank(filter_name);
  std::vector<double> fault, island;
  std::optional<double> normal_peak;
  for (const auto& item : labeled) {
    const ChannelSummary s = summarize(item.waveform, filter, policy);
    switch (item.kind) {
      case EventKind::Normal:
        normal_peak = std::max(normal_peak.value_or(0.0), s.max_abs_d1);
        break;
      case EventKind::Fault: fault.push_back(s.indices.energy); break;
      case EventKind::Islanding: island.push_back(s.indices.energy); break;
    }
  }
  if (!normal_peak) throw Error(ErrorCode::MissingClass, "no Normal examples");
  DetectorConfig cfg;
  cfg.filter_name = filter_name;
  cfg.channel_policy = policy;
  cfg.gate_threshold = 3.0 * *normal_peak;
  cfg.class_threshold = class_threshold_from(fault, island);
  return cfg;
}

}  // namespace wavedetect
