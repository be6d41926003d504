#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "mwsim/error.hpp"
#include "mwsim/quadrature.hpp"
#include "mwsim/special.hpp"

namespace mwsim::quad {

GaussLegendre::GaussLegendre(int n) {
  if (n < 1) throw DomainError("Gauss-Legendre order must be >= 1");
  nodes.resize(n);
  weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    nodes[i] = -z;
    nodes[n - 1 - i] = z;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace mwsim::quad

namespace mwsim::special::detail {
namespace {

constexpr int kDegree = 20;
constexpr std::array<double, 7> kBreaks = {1.5, 2.0, 3.0, 4.0, 6.0, 9.0, 12.0};

using cplx = std::complex<double>;

struct Piece {
  double u_lo, u_hi;  // u = 1 / x^2
  std::array<cplx, kDegree + 1> coef;
};

cplx aux_reference(double x) {
  return x * fresnel_tail(x) * std::polar(1.0, -half_pi_square_phase(x));
}

std::array<Piece, kBreaks.size() - 1> build_pieces() {
  constexpr double pi = std::numbers::pi;
  constexpr int n = kDegree + 1;
  std::array<Piece, kBreaks.size() - 1> out{};
  for (std::size_t j = 0; j < out.size(); ++j) {
    Piece& p = out[j];
    p.u_lo = 1.0 / (kBreaks[j + 1] * kBreaks[j + 1]);
    p.u_hi = 1.0 / (kBreaks[j] * kBreaks[j]);
    std::array<cplx, n> f{};
    for (int k = 0; k < n; ++k) {
      const double t = std::cos(pi * (k + 0.5) / n);
      const double u = 0.5 * (p.u_lo + p.u_hi) + 0.5 * (p.u_hi - p.u_lo) * t;
      f[k] = aux_reference(1.0 / std::sqrt(u));
    }
    for (int m = 0; m < n; ++m) {
      cplx s = 0.0;
      for (int k = 0; k < n; ++k) s += f[k] * std::cos(pi * m * (k + 0.5) / n);
      p.coef[m] = s * (2.0 / n);
    }
    p.coef[0] *= 0.5;
  }
  return out;
}

// x T(x) exp(-i pi x^2 / 2) ~ (i / pi) sum_k (2k-1)!! (-i / (pi x^2))^k
cplx aux_asymptotic(double x) {
  const double w = 1.0 / (std::numbers::pi * x * x);
  cplx term(0.0, 1.0 / std::numbers::pi);
  cplx sum = 0.0;
  for (int k = 0; k < 60; ++k) {
    sum += term;
    const cplx next = term * cplx(0.0, -w * (2 * k + 1));
    if (std::abs(next) < 1e-17 * std::abs(sum) || std::abs(next) > std::abs(term)) break;
    term = next;
  }
  return sum;
}

}  // namespace

cplx fresnel_tail_fast(double x) {
  static const auto pieces = build_pieces();
  cplx h;
  if (x >= kBreaks.back()) {
    h = aux_asymptotic(x);
  } else {
    std::size_t j = 0;
    while (x >= kBreaks[j + 1]) ++j;
    const Piece& p = pieces[j];
    const double u = 1.0 / (x * x);
    const double t = (2.0 * u - p.u_lo - p.u_hi) / (p.u_hi - p.u_lo);
    cplx b1 = 0.0, b2 = 0.0;
    for (int m = kDegree; m >= 1; --m) {
      const cplx tmp = 2.0 * t * b1 - b2 + p.coef[m];
      b2 = b1;
      b1 = tmp;
    }
    h = t * b1 - b2 + p.coef[0];
  }
  return std::polar(1.0, half_pi_square_phase(x)) * h / x;
}

}  // namespace mwsim::special::detail
