#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <utility>

namespace mwsim::special {

/// sin(x)/x with the removable singularity filled in.
template <typename Real>
Real sinc(Real x) {
  const Real ax = std::abs(x);
  if (ax < Real(1e-4)) {
    const Real x2 = x * x;
    return Real(1) - x2 / Real(6) * (Real(1) - x2 / Real(20));
  }
  return std::sin(x) / x;
}

namespace detail {

template <typename Real>
inline constexpr Real fresnel_series_limit = Real(1.5);

/// pi x^2 / 2 reduced mod 2 pi, with x^2 split exactly (fma) so the phase
/// stays accurate for large x.
inline double half_pi_square_phase(double x) {
  const double hi = x * x;
  const double lo = std::fma(x, x, -hi);
  const double r = std::fmod(hi, 4.0) + lo;
  return 0.5 * std::numbers::pi * r;
}

// Power series of E(x) = C(x) + i S(x), |x| < 1.5.
template <typename Real>
std::complex<Real> fresnel_series(Real x) {
  constexpr Real half_pi = std::numbers::pi_v<Real> / 2;
  const Real eps = std::numeric_limits<Real>::epsilon();
  const Real t = half_pi * x * x;
  // E(x) = sum_k (i t)^k x / (k! (2k+1))
  Real c = 0, s = 0;
  Real term = x;  // x t^k / k!
  for (int k = 0; k < 200; ++k) {
    const Real contrib = term / Real(2 * k + 1);
    switch (k & 3) {
      case 0: c += contrib; break;
      case 1: s += contrib; break;
      case 2: c -= contrib; break;
      case 3: s -= contrib; break;
    }
    if (std::abs(contrib) < eps * (std::abs(c) + std::abs(s))) break;
    term *= t / Real(k + 1);
  }
  return {c, s};
}

// Tail T(x) with E(x) = (1+i)/2 - T(x) for x >= 1.5, from the continued
// fraction of erfc (modified Lentz).
template <typename Real>
std::complex<Real> fresnel_tail(Real x) {
  using C = std::complex<Real>;
  constexpr Real pi = std::numbers::pi_v<Real>;
  const Real eps = std::numeric_limits<Real>::epsilon();
  const Real tiny = std::numeric_limits<Real>::min() / eps;
  const Real pix2 = pi * x * x;
  C b(1, -pix2);
  C cc(Real(1) / tiny, 0);
  C d = Real(1) / b;
  C h = d;
  Real n = -1;
  for (int k = 2; k < 1000; ++k) {
    n += 2;
    const Real a = -n * (n + 1);
    b += Real(4);
    d = Real(1) / (a * d + b);
    cc = b + a / cc;
    const C del = cc * d;
    h *= del;
    if (std::abs(del.real() - 1) + std::abs(del.imag()) < eps) break;
  }
  h *= C(x, -x);
  const Real th = half_pi_square_phase(x);
  return C(Real(0.5), Real(0.5)) * C(std::cos(th), std::sin(th)) * h;
}

/// Same tail from piecewise Chebyshev fits of x T(x) exp(-i pi x^2 / 2) in
/// 1/x^2 on [1.5, 12), fitted once against fresnel_tail(), and its
/// asymptotic series beyond. About 20x faster than the continued fraction.
std::complex<double> fresnel_tail_fast(double x);

}  // namespace detail

/// Fresnel integrals E(x) = C(x) + i S(x) = int_0^x exp(i pi t^2 / 2) dt.
template <typename Real>
std::complex<Real> fresnel(Real x) {
  const Real ax = std::abs(x);
  std::complex<Real> e;
  if (ax < detail::fresnel_series_limit<Real>) {
    e = detail::fresnel_series(ax);
  } else {
    e = std::complex<Real>(Real(0.5), Real(0.5)) - detail::fresnel_tail_fast(ax);
  }
  return x < 0 ? -e : e;
}

/// E(x2) - E(x1), avoiding cancellation when both arguments sit far out on
/// the same side.
template <typename Real>
std::complex<Real> fresnel_difference(Real x1, Real x2) {
  const Real lim = detail::fresnel_series_limit<Real>;
  if (x1 >= lim && x2 >= lim) {
    return detail::fresnel_tail_fast(x1) - detail::fresnel_tail_fast(x2);
  }
  if (x1 <= -lim && x2 <= -lim) {
    return detail::fresnel_tail_fast(-x2) - detail::fresnel_tail_fast(-x1);
  }
  return fresnel(x2) - fresnel(x1);
}

/// int_lo^hi exp(i alpha (x - c)^2) dx for alpha != 0 (either sign).
template <typename Real>
std::complex<Real> chirp_integral(Real alpha, Real c, Real lo, Real hi) {
  constexpr Real pi = std::numbers::pi_v<Real>;
  const Real aa = std::abs(alpha);
  if (aa == Real(0)) return {hi - lo, Real(0)};
  const Real s = std::sqrt(Real(2) * aa / pi);
  std::complex<Real> r = fresnel_difference((lo - c) * s, (hi - c) * s) / s;
  return alpha < 0 ? std::conj(r) : r;
}

/// int_lo^hi exp(i k x) dx.
template <typename Real>
std::complex<Real> linear_phase_integral(Real k, Real lo, Real hi) {
  const Real w = hi - lo;
  const Real mid = Real(0.5) * (hi + lo);
  return std::polar(w * sinc(Real(0.5) * k * w), k * mid);
}

}  // namespace mwsim::special
