#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <vector>

#include "wavedetect/config.hpp"
#include "wavedetect/dg_sources.hpp"
#include "wavedetect/grid_synth.hpp"
#include "wavedetect/waveform_io.hpp"

using namespace wavedetect;

namespace {

double rms(const std::vector<double>& x, std::size_t begin, std::size_t end) {
  double s = 0.0;
  for (std::size_t i = begin; i < end; ++i) s += x[i] * x[i];
  return std::sqrt(s / static_cast<double>(end - begin));
}

WindTurbineParams fixed_cp(double cp, double area) {
  WindTurbineParams p;
  p.area = area;
  p.cp_curve.fixed = cp;
  return p;
}

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Wind, DirectEvaluation) {
  const auto p = wind_power(fixed_cp(0.4, 100.0), 10.0, 2.0);
  EXPECT_NEAR(p.watts, 24500.0, 1e-9);
  EXPECT_DOUBLE_EQ(p.power_coefficient, 0.4);
}

TEST(Wind, ZeroCoefficientGivesZeroPower) {
  for (double v : {0.5, 7.0, 25.0}) EXPECT_EQ(wind_power(fixed_cp(0.0, 5000.0), v, 2.0).watts, 0.0);
}

TEST(Wind, CubicLaw) {
  const auto turbine = fixed_cp(0.35, 5026.55);
  for (double v : {3.0, 6.5, 11.0}) {
    const double p1 = wind_power(turbine, v, 1.0).watts;
    const double p2 = wind_power(turbine, 2 * v, 1.0).watts;
    EXPECT_NEAR(p2 / p1, 8.0, 8 * std::numeric_limits<double>::epsilon());
  }
}

TEST(Wind, CalmAirHasNoTipSpeedRatio) {
  const auto p = wind_power(WindTurbineParams{}, 0.0, 2.0);
  EXPECT_EQ(p.watts, 0.0);
  EXPECT_FALSE(p.tip_speed_ratio.has_value());
  EXPECT_EQ(code_of([] { wind_power(WindTurbineParams{}, -1.0, 2.0); }), ErrorCode::DegenerateWind);
}

TEST(Wind, TipSpeedRatio) {
  EXPECT_DOUBLE_EQ(tip_speed_ratio(1.0, 10.0, 10.0), 1.0);
  EXPECT_DOUBLE_EQ(tip_speed_ratio(40.0, 2.0, 10.0), 8.0);
  EXPECT_EQ(code_of([] { tip_speed_ratio(40.0, 2.0, 0.0); }), ErrorCode::DegenerateWind);
}

TEST(Wind, PowerCoefficientStaysPhysical) {
  const PowerCoefficientCurve curve;
  for (double tsr = 0.5; tsr < 20.0; tsr += 0.25) {
    for (double pitch : {0.0, 5.0, 15.0}) {
      const double cp = power_coefficient(curve, tsr, pitch);
      EXPECT_GE(cp, 0.0);
      EXPECT_LE(cp, kBetzLimit);
    }
  }
}

TEST(Pv, ShortCircuitWithoutSeriesResistance) {
  PvParams p;
  p.r_series = 0.0;
  EXPECT_EQ(pv_current(p, 0.0), p.i_light);
}

TEST(Pv, VanishingSaturationCurrent) {
  PvParams p;
  p.i_sat = 1e-300;
  for (double v : {0.0, 5.0, 20.0}) EXPECT_NEAR(pv_current(p, v), p.i_light, 1e-12);
}

TEST(Pv, OpenCircuitVoltage) {
  const PvParams p;
  const double voc = p.alpha * std::log(p.i_light / p.i_sat + 1.0);
  EXPECT_NEAR(pv_open_circuit_voltage(p), voc, 1e-12);
  EXPECT_LT(std::abs(pv_current(p, voc)), 1e-8);
}

TEST(Pv, SolutionSatisfiesDiodeEquation) {
  PvParams p;
  for (double rs : {0.01, 0.3, 2.0}) {
    p.r_series = rs;
    double previous = std::numeric_limits<double>::infinity();
    for (double v = -5.0; v <= 36.0; v += 0.5) {
      const double i = pv_current(p, v);
      const double rhs = p.i_light - p.i_sat * (std::exp((v + i * rs) / p.alpha) - 1.0);
      EXPECT_NEAR(i, rhs, 1e-9 * std::max(1.0, std::abs(i)));
      EXPECT_LE(i, previous);
      previous = i;
    }
  }
}

TEST(Pv, InvalidParameters) {
  PvParams p;
  p.alpha = 0.0;
  EXPECT_THROW(pv_current(p, 1.0), Error);
}

TEST(Synth, CleanBalancedSinusoids) {
  Scenario s;
  s.label = "clean";
  s.disturbance = Disturbance::None;
  s.onset = 0.0;
  s.duration = 1.0;
  s.noise_std = 0.0;
  const Waveform w = synthesize(s);
  ASSERT_EQ(w.size(), 3200u);
  for (const auto& ch : w.channels) EXPECT_NEAR(rms(ch, 0, ch.size()), 1.0 / std::sqrt(2.0), 1e-6);
  for (std::size_t k = 0; k < w.size(); ++k) {
    EXPECT_NEAR(w.channels[0][k] + w.channels[1][k] + w.channels[2][k], 0.0, 1e-12);
  }
  EXPECT_FALSE(w.truth->onset_sample.has_value());
}

TEST(Synth, AgFaultSagsPhaseA) {
  const Scenario s = make_scenario("ag", 13, Disturbance::FaultAG, 0.4, 0.1, 3);
  const Waveform w = synthesize(s);
  const std::size_t on = s.onset_sample(), end = s.end_sample();
  const double ra = rms(w.channels[0], on, end);
  EXPECT_LT(ra, rms(w.channels[1], on, end));
  EXPECT_LT(ra, rms(w.channels[2], on, end));

  double before = 0.0;
  for (std::size_t k = 1; k < on; ++k) {
    before = std::max(before, std::abs(w.channels[0][k] - w.channels[0][k - 1]));
  }
  EXPECT_GT(std::abs(w.channels[0][on] - w.channels[0][on - 1]), 3.0 * before);
  EXPECT_EQ(w.truth->onset_sample, on);
}

TEST(Synth, DeterministicPerSeed) {
  const Scenario s = make_scenario("x", 12, Disturbance::Islanding, 0.61, 0.39, 77);
  const Waveform a = synthesize(s), b = synthesize(s);
  EXPECT_EQ(a.channels, b.channels);
  Scenario other = s;
  other.seed = 78;
  EXPECT_NE(synthesize(other).channels[0], a.channels[0]);
}

TEST(Synth, SamplesBeforeOnsetMatchTheUndisturbedRecord) {
  for (Disturbance d : {Disturbance::Islanding, Disturbance::FaultBC, Disturbance::FaultABC}) {
    const Scenario s = make_scenario("x", 12, d, 0.5, 0.2, 5);
    Scenario quiet = s;
    quiet.disturbance = Disturbance::None;
    const Waveform a = synthesize(s), b = synthesize(quiet);
    for (std::size_t p = 0; p < 3; ++p) {
      for (std::size_t k = 0; k < s.onset_sample(); ++k) {
        ASSERT_EQ(a.channels[p][k], b.channels[p][k]);
      }
    }
  }
}

TEST(Synth, ScenarioValidation) {
  Scenario s;
  s.onset = 0.9;
  s.duration = 0.2;
  EXPECT_EQ(code_of([&] { synthesize(s); }), ErrorCode::ScenarioInvalid);
  Scenario slow;
  slow.sample_rate = 100.0;
  EXPECT_EQ(code_of([&] { slow.validate(); }), ErrorCode::ScenarioInvalid);
  Scenario neg;
  neg.dg_mix = {pv_at(-0.1)};
  EXPECT_EQ(code_of([&] { neg.validate(); }), ErrorCode::ScenarioInvalid);
}

TEST(Catalog, TwelvePairedScenarios) {
  const auto c = catalog();
  ASSERT_EQ(c.size(), 12u);
  std::set<std::string> labels;
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_NO_THROW(c[i].validate());
    labels.insert(c[i].label);
    EXPECT_EQ(kind_of(c[i].disturbance), i < 6 ? EventKind::Fault : EventKind::Islanding);
  }
  EXPECT_EQ(labels.size(), 12u);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(c[i].bus_id, c[i + 6].bus_id);
}

TEST(Catalog, Deterministic) {
  const auto a = catalog(), b = catalog();
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].label, b[i].label);
    EXPECT_EQ(a[i].seed, b[i].seed);
    EXPECT_EQ(synthesize(a[i]).channels, synthesize(b[i]).channels);
  }
}

TEST(WaveformCsv, RoundTripKeepsPrintedPrecision) {
  const Waveform w = synthesize(catalog()[7]);
  const std::string text = waveform_csv(w);
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,va,vb,vc");
  const Waveform r = read_waveform_csv(text);
  EXPECT_EQ(r.sample_rate, w.sample_rate);
  ASSERT_EQ(r.size(), w.size());
  for (std::size_t p = 0; p < 3; ++p) {
    for (std::size_t k = 0; k < w.size(); ++k) {
      EXPECT_NEAR(r.channels[p][k], w.channels[p][k], 1e-8 * std::max(1.0, std::abs(w.channels[p][k])));
    }
  }
  EXPECT_EQ(waveform_csv(r), text);
}

TEST(WaveformCsv, RejectsMalformedInput) {
  EXPECT_EQ(code_of([] { read_waveform_csv(""); }), ErrorCode::MalformedInput);
  EXPECT_EQ(code_of([] { read_waveform_csv("time,a,b,c\n0,1,2,3\n"); }), ErrorCode::MalformedInput);
  EXPECT_EQ(code_of([] { read_waveform_csv("t,va,vb,vc\n0,1,2,3\n0.1,x,2,3\n"); }),
            ErrorCode::MalformedInput);
  EXPECT_EQ(code_of([] { read_waveform_csv("t,va,vb,vc\n0,1,2,3\n0.1,1,2\n"); }),
            ErrorCode::MalformedInput);
  EXPECT_EQ(code_of([] { read_waveform_csv("t,va,vb,vc\n0,1,2,3\n0.1,1,2,3\n0.3,1,2,3\n"); }),
            ErrorCode::MalformedInput);
  try {
    read_waveform_csv("t,va,vb,vc\n0,1,2,3\n0.1,1,nan,3\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(LabelsCsv, RoundTrip) {
  const std::vector<LabelRow> rows = {{"a", EventKind::Fault, 960, 1100},
                                      {"b", EventKind::Normal, std::nullopt, 9001}};
  std::stringstream ss;
  write_labels_csv(ss, rows);
  EXPECT_EQ(ss.str(), "scenario,kind,onset_sample,seed\na,Fault,960,1100\nb,Normal,,9001\n");
  const auto back = read_labels_csv(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].onset_sample, 960u);
  EXPECT_FALSE(back[1].onset_sample.has_value());
  std::istringstream bad("scenario,kind,onset_sample,seed\na,Storm,1,2\n");
  EXPECT_THROW(read_labels_csv(bad), Error);
}

TEST(DetectorIni, RoundTripIsExact) {
  DetectorConfig cfg;
  cfg.filter_name = WaveletName::Db4;
  cfg.gate_threshold = 0.1 + 0.2;
  cfg.class_threshold = std::sqrt(0.8462 * 1.4657);
  cfg.channel_policy = ChannelPolicy::Mean;
  std::stringstream ss;
  write_detector_config(ss, cfg);
  const DetectorConfig back = read_detector_config(ss);
  EXPECT_EQ(back.filter_name, cfg.filter_name);
  EXPECT_EQ(back.gate_threshold, cfg.gate_threshold);
  EXPECT_EQ(back.class_threshold, cfg.class_threshold);
  EXPECT_EQ(back.channel_policy, cfg.channel_policy);
}

TEST(DetectorIni, ErrorsNameTheLine) {
  auto message = [](const std::string& text) {
    try {
      std::istringstream in(text);
      read_detector_config(in);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::MalformedInput);
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("[detector]\nfilter_name = Haar\ngate_threshold = abc\nclass_threshold = 1\n")
                .find("line 3"),
            std::string::npos);
  EXPECT_NE(message("[detector]\nfilter_name = sym5\ngate_threshold = 0\nclass_threshold = 1\n")
                .find("line 2"),
            std::string::npos);
  EXPECT_NE(message("[detector]\nfilter_name = Haar\ngate_threshold = 0\n").find("class_threshold"),
            std::string::npos);
  EXPECT_NE(message("gate_threshold = 0\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("[detector]\nfilter_name = Haar\ngate_threshold = 0\nclass_threshold = -1\n")
                .find("class_threshold"),
            std::string::npos);
}

TEST(ScenarioSpec, ParsesSectionsAndDefaults) {
  std::istringstream in(R"([synthesis]
sample_rate = 6400
noise_std = 0

[scenario island14]
bus = 14
disturbance = Islanding
onset = 0.61
duration = 0.39
seed = 7

[scenario ag13]   ; fault at bus 13
bus = 13
disturbance = FaultAG
onset = 0.2
duration = 0.1
dg = pv:0.1, wind
noise_std = 0.002
)");
  const auto specs = read_scenario_spec(in);
  ASSERT_EQ(specs.size(), 2u);
  EXPECT_EQ(specs[0].label, "island14");
  EXPECT_EQ(specs[0].sample_rate, 6400.0);
  EXPECT_EQ(specs[0].noise_std, 0.0);
  EXPECT_EQ(specs[0].seed, 7u);
  EXPECT_EQ(specs[0].dg_mix.size(), bus_dg_mix(14).size());
  EXPECT_EQ(specs[1].disturbance, Disturbance::FaultAG);
  EXPECT_EQ(specs[1].noise_std, 0.002);
  ASSERT_EQ(specs[1].dg_mix.size(), 2u);
  EXPECT_DOUBLE_EQ(std::get<PvSource>(specs[1].dg_mix[0]).penetration, 0.1);
  EXPECT_TRUE(std::holds_alternative<WindSource>(specs[1].dg_mix[1]));
}

TEST(ScenarioSpec, Errors) {
  auto message = [](const std::string& text) {
    try {
      std::istringstream in(text);
      read_scenario_spec(in);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::MalformedInput);
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("").find("no [scenario"), std::string::npos);
  EXPECT_NE(message("; nothing here\n[synthesis]\nsample_rate = 3200\n").find("no [scenario"),
            std::string::npos);
  EXPECT_NE(message("[scenario a]\nbus = 14\ndisturbance = Tornado\n").find("line 3"),
            std::string::npos);
  EXPECT_NE(message("[scenario a]\ndisturbance = None\n").find("lacks 'bus'"), std::string::npos);
  EXPECT_NE(message("[scenario a]\nbus = 14\nonset = 0.9\nduration = 0.5\n").find("line 1"),
            std::string::npos);
  EXPECT_NE(message("[scenario a]\nbus = 14\ncolour = red\n").find("line 3"), std::string::npos);
  EXPECT_NE(message("[scenario a]\nbus = 14\n[scenario a]\nbus = 12\n").find("duplicate"),
            std::string::npos);
}
