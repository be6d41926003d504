#include "mwsim/slit_propagator.hpp"

#include <cmath>

#include "mwsim/constants.hpp"
#include "mwsim/error.hpp"
#include "mwsim/special.hpp"

namespace mwsim {

using constants::pi;
using cplx = std::complex<double>;

std::vector<std::pair<double, double>> phase_panels(const PhaseProfile& phase, double tolerance) {
  const double h = phase.half_width;
  if (!(h > 0.0)) throw ConfigError("phase profile has empty support");
  std::vector<std::pair<double, double>> out;
  const double min_width = 1e-9 * h;
  auto refine = [&](auto&& self, double lo, double hi, double flo, double fhi, int depth) -> void {
    const double m = 0.5 * (lo + hi);
    const double fm = phase(m);
    const double q1 = phase(0.5 * (lo + m));
    const double q3 = phase(0.5 * (m + hi));
    const double dev = std::max({std::abs(fm - 0.5 * (flo + fhi)),
                                 std::abs(q1 - 0.75 * flo - 0.25 * fhi),
                                 std::abs(q3 - 0.25 * flo - 0.75 * fhi)});
    if (dev <= tolerance || depth > 60 || hi - lo < min_width) {
      out.emplace_back(lo, hi);
      return;
    }
    self(self, lo, m, flo, fm, depth + 1);
    self(self, m, hi, fm, fhi, depth + 1);
  };
  constexpr int seed = 16;
  for (int i = 0; i < seed; ++i) {
    const double lo = -h + 2.0 * h * i / seed;
    const double hi = -h + 2.0 * h * (i + 1) / seed;
    refine(refine, lo, hi, phase(lo), phase(hi), 0);
  }
  return out;
}

SlitPropagator::SlitPropagator(GratingSpec grating, double wavelength, const PhaseProfile* phase,
                               double phase_tolerance)
    : grating_(std::move(grating)), wavelength_(wavelength) {
  grating_.validate();
  if (!(wavelength_ > 0.0)) throw DomainError("wavelength must be positive");
  if (phase) {
    if (phase->half_width > 0.5 * grating_.profile.width * (1.0 + 1e-12)) {
      throw ConfigError("phase profile support exceeds the slit width");
    }
    if (grating_.profile.kind != SlitKind::rectangular) {
      throw UnsupportedOperation("phase masks are supported on rectangular slits only");
    }
    masked_ = true;
    for (auto [lo, hi] : phase_panels(*phase, phase_tolerance)) {
      const double flo = (*phase)(lo);
      const double fhi = (*phase)(hi);
      panels_.push_back({lo, hi, flo, (fhi - flo) / (hi - lo)});
    }
  }
}

SlitPropagator SlitPropagator::rescaled(double wavelength, double phase_factor) const {
  if (!(wavelength > 0.0)) throw DomainError("wavelength must be positive");
  SlitPropagator p = *this;
  p.wavelength_ = wavelength;
  for (auto& panel : p.panels_) {
    panel.phi0 *= phase_factor;
    panel.slope *= phase_factor;
  }
  return p;
}

cplx SlitPropagator::slit_chirp(double alpha, double center, double slit_c) const {
  const auto& prof = grating_.profile;
  const double d = slit_c - center;  // integrand exp(i alpha (u + d)^2), u from slit center
  if (masked_) {
    cplx sum = 0.0;
    for (const auto& p : panels_) {
      const double dd = d + p.slope / (2.0 * alpha);
      const double ph = p.phi0 - p.slope * p.lo - p.slope * d - p.slope * p.slope / (4.0 * alpha);
      sum += std::polar(1.0, ph) * special::chirp_integral(alpha, -dd, p.lo, p.hi);
    }
    return sum / prof.width;
  }
  if (prof.kind == SlitKind::rectangular) {
    const double h = 0.5 * prof.width;
    return special::chirp_integral(alpha, -d, -h, h) / prof.width;
  }
  // int A exp(-p u^2 + q u + r) du = A sqrt(pi / p) exp(q^2 / 4p + r)
  const double amp = 1.0 / (2.0 * prof.sigma * std::sqrt(pi));
  const cplx p(1.0 / (4.0 * prof.sigma * prof.sigma), -alpha);
  const cplx q(0.0, 2.0 * alpha * d);
  const cplx r(0.0, alpha * d * d);
  return amp * std::sqrt(pi / p) * std::exp(q * q / (4.0 * p) + r);
}

cplx SlitPropagator::fresnel_amplitude(double x, double length, const Illumination& ill) const {
  if (!(length > 0.0)) throw DomainError("propagation distance must be positive");
  const double a2 = pi / (wavelength_ * length);
  double alpha = a2, center = x, pref = 1.0 / std::sqrt(wavelength_ * length);
  if (ill.kind == Illumination::Kind::plane_wave) {
    center = x - ill.tilt / (2.0 * a2);
  } else {
    if (!(ill.distance > 0.0)) throw DomainError("point source distance must be positive");
    const double a1 = pi / (wavelength_ * ill.distance);
    alpha = a1 + a2;
    center = (a1 * ill.source_x + a2 * x) / alpha;
  }
  cplx sum = 0.0;
  for (int n = 0; n < grating_.n_slits; ++n) {
    sum += grating_.weight(n) * slit_chirp(alpha, center, grating_.slit_center(n));
  }
  return pref * sum;
}

cplx SlitPropagator::envelope(double zeta) const {
  const auto& prof = grating_.profile;
  if (!masked_) return fraunhofer_envelope(prof, nullptr, zeta);
  cplx sum = 0.0;
  for (const auto& p : panels_) {
    sum += std::polar(1.0, p.phi0 - p.slope * p.lo) *
           special::linear_phase_integral(p.slope + zeta, p.lo, p.hi);
  }
  return sum / prof.width;
}

cplx SlitPropagator::array_factor(double q) const {
  cplx s = 0.0;
  for (int n = 0; n < grating_.n_slits; ++n) {
    s += grating_.weight(n) * std::polar(1.0, -q * grating_.slit_center(n));
  }
  return s;
}

cplx SlitPropagator::fraunhofer_amplitude(double x, double length, const Illumination& ill) const {
  if (!(length > 0.0)) throw DomainError("propagation distance must be positive");
  double tilt = ill.tilt;
  double pref = 1.0 / std::sqrt(wavelength_ * length);
  if (ill.kind == Illumination::Kind::point_source) {
    if (!(ill.distance > 0.0)) throw DomainError("point source distance must be positive");
    tilt = -2.0 * pi * ill.source_x / (wavelength_ * ill.distance);
  }
  const double q = 2.0 * pi * x / (wavelength_ * length) - tilt;
  return pref * envelope(-q) * array_factor(q);
}

RealArray SlitPropagator::fresnel_intensity(const UniformGrid& grid, double length,
                                            const Illumination& ill) const {
  RealArray out(grid.size);
  for (Eigen::Index k = 0; k < grid.size; ++k) {
    out[k] = std::norm(fresnel_amplitude(grid.x(k), length, ill));
  }
  return out;
}

RealArray SlitPropagator::fraunhofer_intensity(const UniformGrid& grid, double length,
                                               const Illumination& ill) const {
  RealArray out(grid.size);
  if (!grating_.weights.empty()) {
    for (Eigen::Index k = 0; k < grid.size; ++k) {
      out[k] = std::norm(fraunhofer_amplitude(grid.x(k), length, ill));
    }
    return out;
  }
  // Equal weights: |AF|^2 = sin^2(N u) / sin^2(u), u = q D / 2.
  double tilt = ill.tilt;
  double pref = 1.0 / (wavelength_ * length);
  if (ill.kind == Illumination::Kind::point_source) {
    if (!(ill.distance > 0.0)) throw DomainError("point source distance must be positive");
    tilt = -2.0 * pi * ill.source_x / (wavelength_ * ill.distance);
  }
  const double n = grating_.n_slits;
  const double s = 2.0 * pi / (wavelength_ * length);
  for (Eigen::Index k = 0; k < grid.size; ++k) {
    const double q = s * grid.x(k) - tilt;
    const double u = 0.5 * q * grating_.period;
    const double su = std::sin(u);
    const double af = std::abs(su) > 1e-6 ? std::sin(n * u) / su
                                           : n * std::cos(n * u) / std::cos(u);
    out[k] = pref * std::norm(envelope(-q)) * af * af;
  }
  return out;
}

}  // namespace mwsim
