#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <boost/math/quadrature/gauss.hpp>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/Polynomials>

#include "wavedetect/error.hpp"

namespace wavedetect {

enum class WaveletName { Haar, Db1, Db4, Coif, Dmey };

inline constexpr std::array<WaveletName, 5> kAllWavelets = {
    WaveletName::Haar, WaveletName::Db1, WaveletName::Db4, WaveletName::Coif, WaveletName::Dmey};

constexpr std::string_view to_string(WaveletName name) {
  switch (name) {
    case WaveletName::Haar: return "Haar";
    case WaveletName::Db1: return "Db1";
    case WaveletName::Db4: return "Db4";
    case WaveletName::Coif: return "Coif";
    case WaveletName::Dmey: return "Dmey";
  }
  throw Error(ErrorCode::UnsupportedWavelet, "wavelet enum value out of range");
}

/// Case-insensitive; accepts the spellings used in reports ("dB4", "Demey", "coif1").
inline WaveletName parse_wavelet_name(std::string_view text) {
  std::string key(text);
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (key == "haar") return WaveletName::Haar;
  if (key == "db1") return WaveletName::Db1;
  if (key == "db4") return WaveletName::Db4;
  if (key == "coif" || key == "coif1") return WaveletName::Coif;
  if (key == "dmey" || key == "demey") return WaveletName::Dmey;
  throw Error(ErrorCode::UnsupportedWavelet, "unknown wavelet '" + std::string(text) + "'");
}

/// Orthonormal two-channel analysis filter pair. `lowpass` is H and
/// `highpass` is G with G(k) = (-1)^k H(L-1-k).
struct WaveletFilter {
  WaveletName name;
  std::vector<double> lowpass;
  std::vector<double> highpass;
  int vanishing_moments;

  std::size_t length() const noexcept { return lowpass.size(); }
};

inline std::vector<double> quadrature_mirror(const std::vector<double>& lowpass) {
  const std::size_t n = lowpass.size();
  std::vector<double> highpass(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    highpass[k] = sign * lowpass[n - 1 - k];
  }
  return highpass;
}

namespace detail {

inline std::vector<double> haar_lowpass() {
  const double c = 1.0 / std::numbers::sqrt2;
  return {c, c};
}

/// Minimum-phase Daubechies lowpass with `order` vanishing moments (2*order taps),
/// built by spectral factorization of the maximally flat halfband polynomial
/// P(y) = sum_k C(order-1+k, k) y^k with y = (2 - z - 1/z) / 4.
inline std::vector<double> daubechies_lowpass(int order) {
  using cplx = std::complex<double>;
  std::vector<cplx> poly{1.0};
  auto multiply = [&poly](cplx a, cplx b) {  // poly *= (a + b z), ascending powers
    std::vector<cplx> out(poly.size() + 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      out[i] += a * poly[i];
      out[i + 1] += b * poly[i];
    }
    poly = std::move(out);
  };
  for (int i = 0; i < order; ++i) multiply(1.0, 1.0);

  if (order > 1) {
    Eigen::VectorXd coeffs(order);
    double binom = 1.0;
    for (int k = 0; k < order; ++k) {
      coeffs[k] = binom;
      binom = binom * (order + k) / (k + 1);
    }
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(coeffs);
    for (const cplx& y : solver.roots()) {
      // z^2 - (2 - 4y) z + 1 = 0; keep the root inside the unit circle.
      const cplx b = 2.0 - 4.0 * y;
      const cplx disc = std::sqrt(b * b - 4.0);
      cplx z = (b + disc) / 2.0;
      if (std::abs(z) > 1.0) z = (b - disc) / 2.0;
      multiply(-z, 1.0);
    }
  }

  std::vector<double> h(poly.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    h[i] = poly[i].real();
    sum += h[i];
  }
  // Descending powers give the conventional (front-loaded) ordering.
  std::reverse(h.begin(), h.end());
  for (double& v : h) v *= std::numbers::sqrt2 / sum;
  return h;
}

/// Six-tap Coiflet (two vanishing moments), closed form in sqrt(7).
inline std::vector<double> coiflet1_lowpass() {
  const double s7 = std::sqrt(7.0);
  const double scale = 1.0 / (16.0 * std::numbers::sqrt2);
  return {(1.0 - s7) * scale,        (5.0 + s7) * scale,  (14.0 + 2.0 * s7) * scale,
          (14.0 - 2.0 * s7) * scale, (1.0 - s7) * scale,  (-3.0 + s7) * scale};
}

// ---------------------------------------------------------------------------
// Discrete Meyer
//
// The ideal Meyer lowpass is infinitely long, so any FIR truncation loses exact
// orthonormality. The filter used here is the orthonormal 62-tap filter closest
// (least squares) to the truncated Meyer response: it is parameterized by a
// paraunitary rotation lattice, which makes sum(h) = sqrt(2), sum(h^2) = 1 and
// double-shift orthogonality hold to rounding for any angles.
// ---------------------------------------------------------------------------

inline constexpr int kMeyerTaps = 62;

inline double meyer_nu(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * x * x * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x * x * x);
}

/// Meyer scaling-function spectrum phi_hat(w).
inline double meyer_phi_hat(double w) {
  w = std::abs(w);
  constexpr double pi = std::numbers::pi;
  if (w <= 2.0 * pi / 3.0) return 1.0;
  if (w >= 4.0 * pi / 3.0) return 0.0;
  return std::cos(pi / 2.0 * meyer_nu(3.0 * w / (2.0 * pi) - 1.0));
}

/// Coefficient n of the (two-sided, even) Meyer lowpass, H(w) = sqrt2 * phi_hat(2w).
inline double meyer_coefficient(int n) {
  constexpr double pi = std::numbers::pi;
  const double flat = (n == 0) ? pi / 3.0 : std::sin(n * pi / 3.0) / n;
  auto integrand = [n](double w) { return meyer_phi_hat(2.0 * w) * std::cos(w * n); };
  // Smooth integrand: fixed Gauss-Legendre panels reach rounding level.
  constexpr int panels = 8;
  const double width = (pi / 3.0) / panels;
  double transition = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = pi / 3.0 + p * width;
    transition += boost::math::quadrature::gauss<double, 30>::integrate(integrand, lo, lo + width);
  }
  return std::numbers::sqrt2 / pi * (flat + transition);
}

/// Truncated Meyer lowpass laid out in 62 slots: slot 0 is zero and slots
/// 1..61 hold n = -30..30.
inline std::vector<double> meyer_truncated() {
  std::vector<double> h(kMeyerTaps, 0.0);
  for (int k = 1; k < kMeyerTaps; ++k) h[k] = meyer_coefficient(k - 31);
  return h;
}

/// Builds the lowpass from lattice angles. The polyphase vector is
/// u_0 = R(theta_0) e1, u_m(z) = R(theta_m) diag(1, z^-1) u_{m-1}(z).
/// If `derivative_at` is set, the rotation at that stage is replaced by its
/// derivative with respect to the angle.
inline std::vector<double> lattice_lowpass(const std::vector<double>& theta,
                                           int derivative_at = -1) {
  const std::size_t stages = theta.size();
  std::vector<double> even(stages, 0.0), odd(stages, 0.0);
  std::vector<double> cosines(stages), sines(stages);
  for (std::size_t k = 0; k < stages; ++k) {
    cosines[k] = std::cos(theta[k]);
    sines[k] = std::sin(theta[k]);
    if (static_cast<int>(k) == derivative_at) {
      cosines[k] = -std::sin(theta[k]);
      sines[k] = std::cos(theta[k]);
    }
  }
  auto rotate = [&](std::size_t stage, double& a, double& b) {
    const double c = cosines[stage];
    const double s = sines[stage];
    const double na = c * a - s * b;
    const double nb = s * a + c * b;
    a = na;
    b = nb;
  };
  {
    double a = 1.0, b = 0.0;
    rotate(0, a, b);
    even[0] = a;
    odd[0] = b;
  }
  for (std::size_t m = 1; m < stages; ++m) {
    // delay the second component by one polyphase step
    for (std::size_t n = m; n > 0; --n) odd[n] = odd[n - 1];
    odd[0] = 0.0;
    for (std::size_t n = 0; n <= m; ++n) rotate(m, even[n], odd[n]);
  }
  std::vector<double> h(2 * stages);
  for (std::size_t n = 0; n < stages; ++n) {
    h[2 * n] = even[n];
    h[2 * n + 1] = odd[n];
  }
  return h;
}

/// Approximate lattice factorization of a nearly orthonormal filter, used as the
/// starting point for the least-squares fit. Each stage picks the rotation that
/// best cancels both end coefficients.
inline std::vector<double> lattice_angles(const std::vector<double>& h) {
  const std::size_t stages = h.size() / 2;
  std::vector<double> even(stages), odd(stages);
  for (std::size_t n = 0; n < stages; ++n) {
    even[n] = h[2 * n];
    odd[n] = h[2 * n + 1];
  }
  std::vector<double> theta(stages, 0.0);
  for (std::size_t m = stages - 1; m > 0; --m) {
    Eigen::Matrix2d quad;
    const Eigen::Vector2d tail(even[m], odd[m]);
    const Eigen::Vector2d head(odd[0], -even[0]);
    quad = tail * tail.transpose() + head * head.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(quad);
    const Eigen::Vector2d cs = eig.eigenvectors().col(0);
    theta[m] = std::atan2(cs[1], cs[0]);
    const double c = cs[0], s = cs[1];
    for (std::size_t n = 0; n <= m; ++n) {
      const double a = c * even[n] + s * odd[n];
      const double b = -s * even[n] + c * odd[n];
      even[n] = a;
      odd[n] = b;
    }
    for (std::size_t n = 0; n < m; ++n) odd[n] = odd[n + 1];
  }
  theta[0] = std::atan2(odd[0], even[0]);
  return theta;
}

/// Residual functor for the fit. Free parameters are theta_1..theta_{N-1};
/// theta_0 = pi/4 - sum(free), which pins H(1) = sqrt(2) and H(-1) = 0.
struct MeyerLatticeFit {
  using Scalar = double;
  std::vector<double> target;

  int inputs() const { return static_cast<int>(target.size() / 2) - 1; }
  int values() const { return static_cast<int>(target.size()); }

  std::vector<double> angles(const Eigen::VectorXd& free) const {
    std::vector<double> theta(free.size() + 1);
    theta[0] = std::numbers::pi / 4.0 - free.sum();
    for (Eigen::Index i = 0; i < free.size(); ++i) theta[i + 1] = free[i];
    return theta;
  }

  int operator()(const Eigen::VectorXd& free, Eigen::VectorXd& residual) const {
    const auto h = lattice_lowpass(angles(free));
    for (std::size_t i = 0; i < h.size(); ++i) residual[i] = h[i] - target[i];
    return 0;
  }

  int df(const Eigen::VectorXd& free, Eigen::MatrixXd& jac) const {
    const auto theta = angles(free);
    const auto d0 = lattice_lowpass(theta, 0);
    for (Eigen::Index k = 0; k < free.size(); ++k) {
      const auto dk = lattice_lowpass(theta, static_cast<int>(k) + 1);
      for (std::size_t i = 0; i < dk.size(); ++i) jac(i, k) = dk[i] - d0[i];
    }
    return 0;
  }
};

inline std::vector<double> dmey_lowpass() {
  MeyerLatticeFit fit{meyer_truncated()};
  const auto start = lattice_angles(fit.target);
  Eigen::VectorXd free(fit.inputs());
  for (Eigen::Index i = 0; i < free.size(); ++i) free[i] = start[i + 1];

  // The fit converges slowly past ~3e-4 max deviation from the truncated target;
  // more evaluations buy little. Orthonormality does not depend on the cap.
  Eigen::LevenbergMarquardt<MeyerLatticeFit> lm(fit);
  lm.parameters.maxfev = 300;
  lm.parameters.xtol = 1e-14;
  lm.parameters.ftol = 1e-14;
  lm.minimize(free);
  return lattice_lowpass(fit.angles(free));
}

}  // namespace detail

/// Returns the analysis filter pair for `name`. Dmey is fitted on first use and
/// cached; every call returns an independent copy.
inline WaveletFilter filter_bank(WaveletName name) {
  auto make = [name](std::vector<double> lowpass, int moments) {
    auto highpass = quadrature_mirror(lowpass);
    return WaveletFilter{name, std::move(lowpass), std::move(highpass), moments};
  };
  switch (name) {
    case WaveletName::Haar:
    case WaveletName::Db1:
      return make(detail::haar_lowpass(), 1);
    case WaveletName::Db4: {
      static const std::vector<double> db4 = detail::daubechies_lowpass(4);
      return make(db4, 4);
    }
    case WaveletName::Coif:
      return make(detail::coiflet1_lowpass(), 2);
    case WaveletName::Dmey: {
      static const std::vector<double> dmey = detail::dmey_lowpass();
      return make(dmey, 1);
    }
  }
  throw Error(ErrorCode::UnsupportedWavelet,
              "wavelet enum value " + std::to_string(static_cast<int>(name)));
}

inline WaveletFilter filter_bank(std::string_view name) {
  return filter_bank(parse_wavelet_name(name));
}

}  // namespace wavedetect
