#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "wavedetect/error.hpp"

namespace wavedetect {

// --- wind ------------------------------------------------------------------

inline constexpr double kBetzLimit = 0.593;

/// Coefficients of the usual exponential C_p(lambda, beta) fit:
///   C = c1 (c2 / li - c3 beta - c4) exp(-c5 / li) + c6 lambda,
///   1 / li = 1 / (lambda + 0.08 beta) - 0.035 / (beta^3 + 1).
/// `fixed` overrides the curve with a constant (still clamped).
struct PowerCoefficientCurve {
  double c1 = 0.5176;
  double c2 = 116.0;
  double c3 = 0.4;
  double c4 = 5.0;
  double c5 = 21.0;
  double c6 = 0.0068;
  std::optional<double> fixed;
};

struct WindTurbineParams {
  double rho = 1.225;     // kg/m^3
  double area = 5026.55;  // m^2, swept by a 40 m blade
  double radius = 40.0;   // m
  double pitch_deg = 0.0;
  PowerCoefficientCurve cp_curve;

  void validate() const {
    if (!(rho > 0.0 && area > 0.0 && radius > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "wind turbine needs rho, area and radius > 0");
    }
  }
};

inline double tip_speed_ratio(double radius, double omega_r, double v_wind) {
  if (!(v_wind > 0.0)) {
    throw Error(ErrorCode::DegenerateWind,
                "tip-speed ratio undefined for wind speed " + std::to_string(v_wind));
  }
  return radius * omega_r / v_wind;
}

/// Power coefficient clamped to [0, Betz limit].
inline double power_coefficient(const PowerCoefficientCurve& curve, double tsr, double pitch_deg) {
  double cp = 0.0;
  if (curve.fixed) {
    cp = *curve.fixed;
  } else {
    const double inv_li =
        1.0 / (tsr + 0.08 * pitch_deg) - 0.035 / (pitch_deg * pitch_deg * pitch_deg + 1.0);
    cp = curve.c1 * (curve.c2 * inv_li - curve.c3 * pitch_deg - curve.c4) *
             std::exp(-curve.c5 * inv_li) +
         curve.c6 * tsr;
  }
  if (!std::isfinite(cp)) return 0.0;
  return std::clamp(cp, 0.0, kBetzLimit);
}

struct WindPower {
  double watts = 0.0;
  /// Absent when the wind is calm.
  std::optional<double> tip_speed_ratio;
  double power_coefficient = 0.0;
};

/// Mechanical shaft power P = (rho/2) A C(lambda, beta) v^3.
inline WindPower wind_power(const WindTurbineParams& p, double v_wind, double omega_r) {
  p.validate();
  if (v_wind < 0.0 || !std::isfinite(v_wind)) {
    throw Error(ErrorCode::DegenerateWind, "wind speed must be >= 0, got " + std::to_string(v_wind));
  }
  if (v_wind == 0.0) return WindPower{};
  const double tsr = tip_speed_ratio(p.radius, omega_r, v_wind);
  const double cp = power_coefficient(p.cp_curve, tsr, p.pitch_deg);
  return WindPower{0.5 * p.rho * p.area * cp * v_wind * v_wind * v_wind, tsr, cp};
}

// --- photovoltaic ----------------------------------------------------------

struct PvParams {
  double i_light = 8.0;   // A
  double i_sat = 1e-9;    // A
  double r_series = 0.3;  // ohm
  double alpha = 1.5;     // V

  void validate() const {
    if (!(i_light >= 0.0 && i_sat > 0.0 && r_series >= 0.0 && alpha > 0.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  "PV parameters need i_light >= 0, i_sat > 0, r_series >= 0, alpha > 0");
    }
  }
};

/// Residual of the single-diode equation; zero at the operating current.
inline double pv_residual(const PvParams& p, double v, double i) {
  return i - p.i_light + p.i_sat * std::expm1((v + i * p.r_series) / p.alpha);
}

/// Open-circuit voltage alpha * ln(I_L / I_0 + 1).
inline double pv_open_circuit_voltage(const PvParams& p) {
  p.validate();
  return p.alpha * std::log1p(p.i_light / p.i_sat);
}

/// Terminal current at voltage `v`. The residual is strictly increasing in I,
/// so the root is bracketed and refined by Newton steps that fall back to
/// bisection whenever a step leaves the bracket.
inline double pv_current(const PvParams& p, double v) {
  p.validate();
  if (p.r_series == 0.0) return p.i_light - p.i_sat * std::expm1(v / p.alpha);

  constexpr double kTolerance = 1e-10;
  constexpr int kMaxIterations = 500;

  // f(I_L + I_0) = I_0 exp(...) > 0 for every V.
  double hi = p.i_light + p.i_sat;
  double lo = hi - 1.0;
  int expansions = 0;
  while (pv_residual(p, v, lo) >= 0.0) {
    lo = hi - 2.0 * (hi - lo);
    if (++expansions > 200) throw Error(ErrorCode::SolverDiverged, "no PV current bracket found");
  }

  // iterate to machine precision; kTolerance only decides success
  double i = 0.5 * (lo + hi);
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    const double f = pv_residual(p, v, i);
    if (f == 0.0) return i;
    if (f > 0.0) hi = i; else lo = i;
    const double slope = 1.0 + p.i_sat * p.r_series / p.alpha *
                                   std::exp((v + i * p.r_series) / p.alpha);
    double next = i - f / slope;
    if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
    if (std::abs(next - i) <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(i) ||
        next == i) {
      i = next;
      break;
    }
    i = next;
  }
  if (std::abs(pv_residual(p, v, i)) < kTolerance) return i;
  throw Error(ErrorCode::SolverDiverged,
              "PV current did not converge at V = " + std::to_string(v));
}

}  // namespace wavedetect
