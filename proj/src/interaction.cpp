#include "mwsim/interaction.hpp"

#include <cmath>

#include "mwsim/constants.hpp"
#include "mwsim/error.hpp"
#include "mwsim/quadrature.hpp"
#include "mwsim/units.hpp"

namespace mwsim {

using constants::hbar;
using constants::pi;

double hoinkes_c3(double reference_c3, double reference_polarizability,
                  double target_polarizability) {
  if (!(reference_polarizability > 0.0)) {
    throw DomainError("Hoinkes scaling needs a positive reference polarizability");
  }
  if (target_polarizability < 0.0) throw DomainError("polarizability must be non-negative");
  return reference_c3 * target_polarizability / reference_polarizability;
}

double species_c3(const MaterialSpec& material, const ParticleSpecies& species) {
  if (material.reference_polarizability > 0.0) {
    return hoinkes_c3(material.c3, material.reference_polarizability, species.polarizability);
  }
  return material.c3;
}

double max_validated_scale() { return 1.1 * units::meV_nm3 / 400.0; }

InteractionRegime interaction_regime(const ParticleSpecies& species, double speed,
                                     const MaterialSpec& material) {
  const double c3 = species_c3(material, species);
  if (!(c3 > 0.0)) throw DomainError("interaction regime needs C3 > 0");
  if (!(speed > 0.0)) throw DomainError("speed must be positive");
  return c3 / speed <= max_validated_scale() ? InteractionRegime::weak : InteractionRegime::strong;
}

double weak_regime_min_speed(const ParticleSpecies& species, const MaterialSpec& material) {
  const double c3 = species_c3(material, species);
  if (!(c3 > 0.0)) throw DomainError("interaction regime needs C3 > 0");
  return c3 / max_validated_scale();
}

double power_law_wall_phase(int n, double coefficient, double open_width, double thickness,
                            double wedge_angle, double speed, double xi) {
  if (n < 1) throw DomainError("power-law exponent must be >= 1");
  const double a = open_width - 2.0 * xi;  // twice the horizontal wall distance at y = 0
  if (!(a > 0.0)) throw DomainError("point outside the open slit");
  const double c = std::cos(wedge_angle);
  const double tb = std::tan(wedge_angle);
  // int_0^delta (A + 2 y tan b)^{-n} dy
  double integral;
  if (tb == 0.0) {
    integral = thickness * std::pow(a, -n);
  } else {
    const double t = 2.0 * thickness * tb / a;
    if (n == 1) {
      integral = std::log1p(t) / (2.0 * tb);
    } else {
      integral = -std::pow(a, 1 - n) * std::expm1((1 - n) * std::log1p(t)) /
                 ((n - 1) * 2.0 * tb);
    }
  }
  return -coefficient * std::pow(2.0 / c, n) * integral / (hbar * speed);
}

namespace {

double vdw_wall(double c3, double am, double delta, double beta, double v, double xi) {
  const double a = am - 2.0 * xi;
  const double b = a + 2.0 * delta * std::tan(beta);
  const double c = std::cos(beta);
  return 4.0 * c3 * delta * (a + b) / (hbar * v * c * c * c * a * a * b * b);
}

// (1 - eps)/(1 + eps) q^2 / (4 pi eps0)
double image_coefficient(double charge, double eps) {
  const double q = charge / constants::elementary_charge;
  return (1.0 - eps) / (1.0 + eps) * q * q * constants::coulomb_e2;
}

double electrostatic_wall(double kprime, double am, double delta, double beta, double v,
                          double xi) {
  const double a = am - 2.0 * xi;
  const double t = 2.0 * delta * std::tan(beta) / a;
  const double ratio = t == 0.0 ? 1.0 : std::log1p(t) / t;  // ln(B/A) / t
  return -kprime / (2.0 * hbar * v) * ratio * 2.0 * delta / (a * std::cos(beta));
}

void check_point(const GratingSpec& g, double speed) {
  g.validate();
  if (!(speed > 0.0)) throw DomainError("speed must be positive");
}

}  // namespace

std::optional<double> vdw_phase(const GratingSpec& grating, const ParticleSpecies& species,
                                double speed, double xi, const InteractionOptions& opt) {
  check_point(grating, speed);
  const double c3 = species_c3(grating.material, species);
  const double am = grating.open_width();
  if (std::abs(xi) > 0.5 * am - opt.wall_cutoff) return std::nullopt;
  if (c3 == 0.0 || grating.thickness == 0.0) return 0.0;
  const double d = grating.thickness, b = grating.wedge_angle;
  return vdw_wall(c3, am, d, b, speed, xi) + vdw_wall(c3, am, d, b, speed, -xi);
}

std::optional<double> electrostatic_phase(const GratingSpec& grating,
                                          const ParticleSpecies& species, double speed,
                                          double xi, const InteractionOptions& opt) {
  check_point(grating, speed);
  if (!species.charged()) {
    throw UnsupportedOperation("electrostatic phase needs a charged species");
  }
  const double am = grating.open_width();
  if (std::abs(xi) > 0.5 * am - opt.wall_cutoff) return std::nullopt;
  const double k = image_coefficient(species.charge, grating.material.permittivity);
  if (k == 0.0 || grating.thickness == 0.0) return 0.0;
  const double d = grating.thickness, b = grating.wedge_angle;
  return electrostatic_wall(k, am, d, b, speed, xi) + electrostatic_wall(k, am, d, b, speed, -xi);
}

double electrostatic_potential(const ParticleSpecies& species, double permittivity, double r) {
  return image_coefficient(species.charge, permittivity) / (2.0 * r);
}

double vdw_potential(double c3, double r) { return -c3 / (r * r * r); }

PhaseProfile interaction_phase(const GratingSpec& grating, const ParticleSpecies& species,
                               double speed, const InteractionOptions& opt) {
  check_point(grating, speed);
  if (opt.wall_cutoff < 0.0) throw ConfigError("wall cutoff must be non-negative");
  const double am = grating.open_width();
  const double d = grating.thickness, b = grating.wedge_angle;
  PhaseProfile p;
  p.half_width = 0.5 * am;
  if (species.charged()) {
    const double k = image_coefficient(species.charge, grating.material.permittivity);
    if (k == 0.0 || d == 0.0) {
      p.model = "none";
      return p;
    }
    p.model = "electrostatic";
    p.scale = k / speed;
    p.phase = [=](double xi) {
      return electrostatic_wall(k, am, d, b, speed, xi) + electrostatic_wall(k, am, d, b, speed, -xi);
    };
  } else {
    const double c3 = species_c3(grating.material, species);
    if (c3 == 0.0 || d == 0.0) {
      p.model = "none";
      return p;
    }
    p.model = "van_der_waals";
    p.scale = c3 / speed;
    p.phase = [=](double xi) {
      return vdw_wall(c3, am, d, b, speed, xi) + vdw_wall(c3, am, d, b, speed, -xi);
    };
  }
  p.half_width = 0.5 * am - opt.wall_cutoff;
  if (!(p.half_width > 0.0)) throw ConfigError("wall cutoff closes the slit");
  return p;
}

std::vector<double> phase_gradient_breaks(const PhaseProfile& phase, double max_step) {
  const double h = phase.half_width;
  std::vector<double> out;
  if (!phase.phase) return out;
  constexpr std::size_t cap = 200000;
  auto refine = [&](auto&& self, double lo, double hi, double flo, double fhi, int depth) -> void {
    if (std::abs(fhi - flo) <= max_step || depth > 50 || out.size() > cap) {
      out.push_back(hi);
      return;
    }
    const double m = 0.5 * (lo + hi);
    const double fm = phase(m);
    self(self, lo, m, flo, fm, depth + 1);
    self(self, m, hi, fm, fhi, depth + 1);
  };
  constexpr int seed = 32;
  for (int i = 0; i < seed; ++i) {
    const double lo = -h + 2.0 * h * i / seed;
    const double hi = -h + 2.0 * h * (i + 1) / seed;
    refine(refine, lo, hi, phase(lo), phase(hi), 0);
  }
  out.pop_back();  // drop +h
  return out;
}

CumulantExpansion effective_slit_width(const SlitProfile& profile, const PhaseProfile& phase) {
  profile.validate();
  const double h = phase.half_width;
  if (!(h > 0.0)) throw ConfigError("phase profile has empty support");
  if (h > 0.5 * profile.width * (1.0 + 1e-12)) {
    throw ConfigError("phase profile support exceeds the slit width");
  }
  // Integrate in s = xi / h so the tolerances are scale free.
  std::vector<double> breaks;
  for (double x : phase_gradient_breaks(phase, 0.25 * pi)) breaks.push_back(x / h);
  for (int k = 1; k <= 30; ++k) {
    breaks.push_back(-1.0 + std::ldexp(1.0, -k));
    breaks.push_back(1.0 - std::ldexp(1.0, -k));
  }
  std::sort(breaks.begin(), breaks.end());

  CumulantExpansion ce;
  ce.nominal_width = profile.width;
  ce.open_fraction = 2.0 * h / profile.width;
  std::complex<double> mu[3];
  // a * psi is O(1); the moments are O(1) in s, and mu1 vanishes for symmetric slits, so the
  // absolute tolerance carries the odd moment.
  const double a = profile.width;
  for (int k = 0; k < 3; ++k) {
    auto f = [&](double s) {
      const double xi = h * s;
      return std::polar(a * profile.amplitude(xi) * std::pow(s, k), phase(xi));
    };
    auto r = quad::integrate(f, -1.0, 1.0, 1e-13, 1e-12, breaks, 400000);
    r.value /= a;
    r.error /= a;
    if (!r.converged) {
      throw NumericalError("moment quadrature did not converge (k = " + std::to_string(k) +
                           ", error " + format_double(r.error) + ", wall cutoff leaves half width " +
                           format_double(h) + " m)");
    }
    mu[k] = r.value * std::pow(h, k + 1);
    // relative to |mu0| h^k, the natural size of the k-th moment
    ce.quadrature_error = std::max(ce.quadrature_error,
                                   r.error * h / std::max(std::abs(mu[0]), 1e-300));
  }
  ce.mu0 = mu[0];
  ce.mu1 = mu[1];
  ce.mu2 = mu[2];
  ce.kappa1 = mu[1] / mu[0];
  ce.kappa2 = mu[2] / mu[0] - ce.kappa1 * ce.kappa1;
  if (!(ce.kappa2.real() > 0.0)) {
    throw NumericalError("cumulant expansion invalid: Re kappa2 = " +
                         format_double(ce.kappa2.real()) + " <= 0 (interaction too strong)");
  }
  ce.a_eff = std::sqrt(12.0 * ce.kappa2.real());
  ce.near_validity_edge = ce.reduction() > 0.5;
  return ce;
}

CumulantExpansion effective_slit_width(const GratingSpec& grating, const ParticleSpecies& species,
                                       double speed, const InteractionOptions& opt) {
  const PhaseProfile ph = interaction_phase(grating, species, speed, opt);
  return effective_slit_width(grating.profile, ph);
}

std::vector<CutoffPoint> cutoff_sensitivity(const GratingSpec& grating,
                                            const ParticleSpecies& species, double speed,
                                            const std::vector<double>& cutoffs) {
  std::vector<CutoffPoint> out;
  for (double r : cutoffs) {
    InteractionOptions opt;
    opt.wall_cutoff = r;
    CutoffPoint p{r, std::nullopt, 1.0};
    try {
      const auto ce = effective_slit_width(grating, species, speed, opt);
      p.a_eff = ce.a_eff;
      p.open_fraction = ce.open_fraction;
    } catch (const NumericalError&) {
      p.open_fraction = 1.0 - 2.0 * r / grating.open_width();
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace mwsim
