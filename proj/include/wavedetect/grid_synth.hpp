#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "wavedetect/dg_sources.hpp"
#include "wavedetect/error.hpp"

namespace wavedetect {

enum class Disturbance {
  None,
  Islanding,
  FaultAG,
  FaultBG,
  FaultCG,
  FaultAB,
  FaultBC,
  FaultCA,
  FaultABG,
  FaultABC,
};

/// Coarse class used by the detector.
enum class EventKind { Normal, Islanding, Fault };

constexpr EventKind kind_of(Disturbance d) noexcept {
  switch (d) {
    case Disturbance::None: return EventKind::Normal;
    case Disturbance::Islanding: return EventKind::Islanding;
    default: return EventKind::Fault;
  }
}

constexpr std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::Normal: return "Normal";
    case EventKind::Islanding: return "Islanding";
    case EventKind::Fault: return "Fault";
  }
  return "Normal";
}

inline EventKind parse_event_kind(std::string_view text) {
  if (text == "Normal") return EventKind::Normal;
  if (text == "Islanding") return EventKind::Islanding;
  if (text == "Fault") return EventKind::Fault;
  throw Error(ErrorCode::InvalidArgument, "unknown event kind '" + std::string(text) + "'");
}

inline constexpr std::array<std::pair<Disturbance, std::string_view>, 10> kDisturbanceNames = {{
    {Disturbance::None, "None"},
    {Disturbance::Islanding, "Islanding"},
    {Disturbance::FaultAG, "FaultAG"},
    {Disturbance::FaultBG, "FaultBG"},
    {Disturbance::FaultCG, "FaultCG"},
    {Disturbance::FaultAB, "FaultAB"},
    {Disturbance::FaultBC, "FaultBC"},
    {Disturbance::FaultCA, "FaultCA"},
    {Disturbance::FaultABG, "FaultABG"},
    {Disturbance::FaultABC, "FaultABC"},
}};

constexpr std::string_view to_string(Disturbance d) noexcept {
  for (const auto& [value, name] : kDisturbanceNames) {
    if (value == d) return name;
  }
  return "None";
}

inline Disturbance parse_disturbance(std::string_view text) {
  for (const auto& [value, name] : kDisturbanceNames) {
    if (name == text) return value;
  }
  throw Error(ErrorCode::ScenarioInvalid, "unknown disturbance '" + std::string(text) + "'");
}

/// Phases (a, b, c) that a fault pulls down.
constexpr std::array<bool, 3> faulted_phases(Disturbance d) noexcept {
  switch (d) {
    case Disturbance::FaultAG: return {true, false, false};
    case Disturbance::FaultBG: return {false, true, false};
    case Disturbance::FaultCG: return {false, false, true};
    case Disturbance::FaultAB:
    case Disturbance::FaultABG: return {true, true, false};
    case Disturbance::FaultBC: return {false, true, true};
    case Disturbance::FaultCA: return {true, false, true};
    case Disturbance::FaultABC: return {true, true, true};
    default: return {false, false, false};
  }
}

struct WindSource {
  WindTurbineParams turbine;
  double mean_wind_speed = 12.0;  // m/s
  double gust_fraction = 0.1;     // peak gust relative to the mean
  double gust_frequency = 1.3;    // Hz
  double omega_r = 2.0;           // rad/s
  double penetration = 0.3;
};

struct PvSource {
  PvParams cell;
  double operating_voltage = 28.0;  // V
  double penetration = 0.2;
};

using DgSource = std::variant<WindSource, PvSource>;

inline WindSource wind_at(double penetration) {
  WindSource w;
  w.penetration = penetration;
  return w;
}

inline PvSource pv_at(double penetration) {
  PvSource p;
  p.penetration = penetration;
  return p;
}

/// Shapes injected over the event window. Defaults are the catalog's.
struct DisturbanceTemplate {
  // faults
  double fault_retained_voltage = 0.3;        // p.u. on faulted phases
  double fault_transient_amplitude = 0.5;     // p.u.
  double fault_transient_frequency = 1100.0;  // Hz
  double fault_transient_tau = 0.003;         // s
  // islanding
  double islanding_frequency_drift = 1.5;  // Hz reached at the end of the event
  double islanding_amplitude_drift = 0.10; // signed fraction reached at the end
  std::vector<std::pair<int, double>> islanding_harmonics = {{7, 0.075}, {11, 0.10}, {13, 0.085}};
  double islanding_burst_amplitude = 0.5;      // p.u., breaker-opening ring-down
  double islanding_burst_frequency = 1300.0;   // Hz
  double islanding_burst_tau = 0.010;          // s
};

struct Scenario {
  std::string label;
  int bus_id = 14;
  std::vector<DgSource> dg_mix;
  Disturbance disturbance = Disturbance::None;
  double onset = 0.61;     // s
  double duration = 0.39;  // s
  double nominal_frequency = 50.0;
  double sample_rate = 3200.0;
  double total_duration = 1.0;
  double noise_std = 0.001;  // p.u.
  std::uint64_t seed = 0;
  DisturbanceTemplate shape;

  std::size_t sample_count() const {
    return static_cast<std::size_t>(std::llround(total_duration * sample_rate));
  }
  std::size_t onset_sample() const {
    return static_cast<std::size_t>(std::llround(onset * sample_rate));
  }
  std::size_t end_sample() const {
    return std::min(sample_count(),
                    static_cast<std::size_t>(std::llround((onset + duration) * sample_rate)));
  }

  void validate() const {
    auto fail = [this](const std::string& why) {
      throw Error(ErrorCode::ScenarioInvalid, (label.empty() ? "scenario" : label) + ": " + why);
    };
    if (!(nominal_frequency > 0.0)) fail("nominal_frequency must be > 0");
    if (!(sample_rate >= 32.0 * nominal_frequency)) fail("sample_rate must be >= 32 x nominal_frequency");
    if (!(total_duration > 0.0)) fail("total_duration must be > 0");
    if (!(onset >= 0.0 && duration > 0.0 && onset + duration <= total_duration + 1e-12)) {
      fail("need 0 <= onset < onset + duration <= total_duration");
    }
    if (!(noise_std >= 0.0)) fail("noise_std must be >= 0");
    if (sample_count() < 2) fail("fewer than two samples");
    for (const auto& source : dg_mix) {
      try {
        std::visit([&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if (!(s.penetration >= 0.0 && s.penetration <= 1.0)) fail("penetration outside [0, 1]");
          if constexpr (std::is_same_v<T, WindSource>) {
            s.turbine.validate();
            if (!(s.mean_wind_speed > 0.0)) fail("mean wind speed must be > 0");
            if (!(s.gust_fraction >= 0.0 && s.gust_fraction < 1.0)) fail("gust_fraction outside [0, 1)");
          } else {
            s.cell.validate();
          }
        }, source);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::ScenarioInvalid) throw;
        fail(e.what());
      }
    }
  }
};

struct GroundTruth {
  Disturbance disturbance = Disturbance::None;
  std::optional<std::size_t> onset_sample;
};

/// Three-phase record. Values are per-unit of `base_voltage`.
struct Waveform {
  double sample_rate = 0.0;
  double base_voltage = 1.0;
  std::array<std::vector<double>, 3> channels;
  std::optional<GroundTruth> truth;

  std::size_t size() const noexcept { return channels[0].size(); }

  void validate() const {
    if (!(sample_rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "sample_rate must be > 0");
    for (const auto& ch : channels) {
      if (ch.size() != channels[0].size()) {
        throw Error(ErrorCode::InvalidArgument, "channel lengths differ");
      }
      for (double v : ch) {
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite sample");
      }
    }
  }
};

namespace detail {

/// Relative amplitude ripple from a wind source: the turbine's power follows a
/// sinusoidal gust and the PCC amplitude moves with penetration x (P/P_mean - 1).
struct WindRipple {
  const WindSource* source;
  double mean_power;

  double operator()(double t) const {
    if (mean_power <= 0.0) return 0.0;
    const double v = source->mean_wind_speed *
                     (1.0 + source->gust_fraction *
                                std::sin(2.0 * std::numbers::pi * source->gust_frequency * t));
    const double p = wind_power(source->turbine, v, source->omega_r).watts;
    return source->penetration * 0.1 * (p / mean_power - 1.0);
  }
};

inline double ring_down(double amplitude, double frequency, double tau, double dt, double phase) {
  return amplitude * std::exp(-dt / tau) * std::cos(2.0 * std::numbers::pi * frequency * dt + phase);
}

}  // namespace detail

/// Deterministic three-phase PCC voltage for `scenario`.
inline Waveform synthesize(const Scenario& scenario) {
  scenario.validate();
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const std::size_t n = scenario.sample_count();
  const double fs = scenario.sample_rate;
  const double f0 = scenario.nominal_frequency;
  const Disturbance dist = scenario.disturbance;
  const std::size_t on = scenario.onset_sample();
  const std::size_t end = scenario.end_sample();
  const bool islanding = dist == Disturbance::Islanding;
  const bool fault = kind_of(dist) == EventKind::Fault;
  const auto faulted = faulted_phases(dist);
  const DisturbanceTemplate& shape = scenario.shape;

  std::vector<detail::WindRipple> ripples;
  std::vector<std::pair<int, double>> pv_harmonics;  // (order, amplitude)
  for (const auto& source : scenario.dg_mix) {
    if (const auto* wind = std::get_if<WindSource>(&source)) {
      ripples.push_back({wind, wind_power(wind->turbine, wind->mean_wind_speed, wind->omega_r).watts});
    } else {
      const auto& pv = std::get<PvSource>(source);
      const double ratio =
          pv.cell.i_light > 0.0 ? pv_current(pv.cell, pv.operating_voltage) / pv.cell.i_light : 0.0;
      pv_harmonics.emplace_back(3, pv.penetration * 0.04 * ratio);
      pv_harmonics.emplace_back(5, pv.penetration * 0.025 * ratio);
    }
  }

  Waveform w;
  w.sample_rate = fs;
  for (auto& ch : w.channels) ch.assign(n, 0.0);

  std::mt19937_64 rng(scenario.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const std::array<double, 3> phase_shift = {0.0, two_pi / 3.0, 2.0 * two_pi / 3.0};

  double extra_phase = 0.0;  // accumulated by islanding frequency drift
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / fs;
    const bool in_event = k >= on && k < end;
    const double progress =
        in_event ? static_cast<double>(k - on) / static_cast<double>(end - on) : 0.0;

    double amplitude = 1.0;
    for (const auto& ripple : ripples) amplitude += ripple(t);
    if (islanding && in_event) amplitude *= 1.0 + shape.islanding_amplitude_drift * progress;

    const double theta = two_pi * f0 * t + extra_phase;
    for (std::size_t p = 0; p < 3; ++p) {
      const double angle = theta - phase_shift[p];
      double v = amplitude * std::sin(angle);
      for (const auto& [order, a] : pv_harmonics) v += a * std::sin(order * angle);

      if (fault && faulted[p]) {
        if (in_event) v *= shape.fault_retained_voltage;
        if (k >= on) {
          v += detail::ring_down(shape.fault_transient_amplitude, shape.fault_transient_frequency,
                                 shape.fault_transient_tau, static_cast<double>(k - on) / fs, 0.0);
        }
        if (end < n && k >= end) {
          v += detail::ring_down(shape.fault_transient_amplitude, shape.fault_transient_frequency,
                                 shape.fault_transient_tau, static_cast<double>(k - end) / fs, 0.0);
        }
      }
      if (islanding && in_event) {
        for (const auto& [order, a] : shape.islanding_harmonics) v += a * std::sin(order * angle);
        v += detail::ring_down(shape.islanding_burst_amplitude, shape.islanding_burst_frequency,
                               shape.islanding_burst_tau, static_cast<double>(k - on) / fs,
                               phase_shift[p]);
      }
      w.channels[p][k] = v;
    }
    if (scenario.noise_std > 0.0) {
      for (std::size_t p = 0; p < 3; ++p) w.channels[p][k] += scenario.noise_std * noise(rng);
    }
    if (islanding && in_event) {
      extra_phase += two_pi * shape.islanding_frequency_drift * progress / fs;
    }
  }

  GroundTruth truth{dist, std::nullopt};
  if (dist != Disturbance::None) truth.onset_sample = on;
  w.truth = truth;
  return w;
}

// --- catalog ---------------------------------------------------------------

/// Distributed generation attached at each bus of the reduced network.
inline std::vector<DgSource> bus_dg_mix(int bus_id) {
  switch (bus_id) {
    case 11: return {pv_at(0.2)};
    case 12: return {wind_at(0.25), pv_at(0.15)};
    case 13: return {wind_at(0.3)};
    default: return {pv_at(0.25)};
  }
}

inline std::string bus_label(int bus_id) { return "bus" + std::to_string(bus_id); }

/// A scenario at `bus_id` with the catalog's defaults for the given disturbance.
inline Scenario make_scenario(std::string label, int bus_id, Disturbance disturbance, double onset,
                              double duration, std::uint64_t seed) {
  Scenario s;
  s.label = std::move(label);
  s.bus_id = bus_id;
  s.dg_mix = bus_dg_mix(bus_id);
  s.disturbance = disturbance;
  s.onset = onset;
  s.duration = duration;
  s.seed = seed;
  return s;
}

/// Six faults (one per table row) followed by six islanding cases at the same
/// buses; scenario i + 6 is the islanding pair of fault i.
inline std::vector<Scenario> catalog() {
  struct Row {
    int bus;
    Disturbance fault;
    std::string_view code;
    double onset;
  };
  static constexpr std::array<Row, 6> rows = {{
      {11, Disturbance::FaultAG, "AG", 0.30},
      {12, Disturbance::FaultBG, "BG", 0.35},
      {13, Disturbance::FaultCG, "CG", 0.40},
      {11, Disturbance::FaultAB, "AB", 0.32},
      {12, Disturbance::FaultBC, "BC", 0.37},
      {13, Disturbance::FaultCA, "CA", 0.42},
  }};
  std::vector<Scenario> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out.push_back(make_scenario(bus_label(r.bus) + "_" + std::string(r.code) + "_fault", r.bus,
                                r.fault, r.onset, 0.10, 1100 + i));
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    Scenario s = make_scenario(bus_label(r.bus) + "_" + std::string(r.code) + "_islanding", r.bus,
                               Disturbance::Islanding, 0.61, 0.39, 1200 + i);
    if (i % 2 == 1) s.shape.islanding_amplitude_drift = -s.shape.islanding_amplitude_drift;
    out.push_back(std::move(s));
  }
  return out;
}

/// Two disturbance-free records used to set the presence gate.
inline std::vector<Scenario> normal_cases() {
  return {make_scenario("bus12_normal", 12, Disturbance::None, 0.0, 1.0, 9001),
          make_scenario("bus14_normal", 14, Disturbance::None, 0.0, 1.0, 9002)};
}

}  // namespace wavedetect
