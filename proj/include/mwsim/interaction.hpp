#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "mwsim/species.hpp"
#include "mwsim/wavefield.hpp"

namespace mwsim {

struct InteractionOptions {
  double wall_cutoff = 1e-9;  // r_min, m
};

/// C3 of a particle with polarizability `target_polarizability` against a
/// wall whose C3 was measured with a reference particle (Hoinkes' rule:
/// C3 linear in the static polarizability).
double hoinkes_c3(double reference_c3, double reference_polarizability,
                  double target_polarizability);

/// C3 the material exerts on `species`: scaled by polarizability when the
/// material carries a reference polarizability, the bare material value
/// otherwise.
double species_c3(const MaterialSpec& material, const ParticleSpecies& species);

/// Largest experimentally validated interaction scale R = C3 / v
/// (Kr on SiNx, C3 = 1.1 meV nm^3 at 400 m/s), in J m^3 / (m/s).
double max_validated_scale();

enum class InteractionRegime { weak, strong };
/// Weak iff C3 / v <= R^max (inclusive). Requires C3 > 0.
InteractionRegime interaction_regime(const ParticleSpecies& species, double speed,
                                     const MaterialSpec& material);
/// Lowest speed with R <= R^max.
double weak_regime_min_speed(const ParticleSpecies& species, const MaterialSpec& material);

/// Eikonal phase of one wall with V(r) = coefficient / r^n over a trapezoidal
/// slit, phi_1 = -(1/hbar v) int_0^delta V(r(xi, y)) dy with the normal
/// distance r = cos(beta) (a_m/2 - xi + y tan(beta)). Generic r^-n route.
double power_law_wall_phase(int n, double coefficient, double open_width, double thickness,
                            double wedge_angle, double speed, double xi);

/// Total van der Waals phase phi(xi) = phi_1(xi) + phi_1(-xi) for
/// V = -C3 / r^3 (positive: attractive potential). nullopt when the point
/// lies inside the wall cutoff (absorbed).
std::optional<double> vdw_phase(const GratingSpec& grating, const ParticleSpecies& species,
                                double speed, double xi, const InteractionOptions& opt = {});
/// Same for the image-charge potential V = (1 - eps)/(1 + eps) q^2 / (4 pi eps0) / (2 r).
/// The beta = 0 case is the parallel-plate limit of the same expression.
std::optional<double> electrostatic_phase(const GratingSpec& grating,
                                          const ParticleSpecies& species, double speed,
                                          double xi, const InteractionOptions& opt = {});

/// Image-charge and van der Waals potentials at distance r (J).
double electrostatic_potential(const ParticleSpecies& species, double permittivity, double r);
double vdw_potential(double c3, double r);

/// Phase mask of one slit for `species` at `speed`: electrostatic for
/// charged species, van der Waals for neutral ones. When the potential is
/// identically zero the mask is trivial and no wall cutoff is applied.
PhaseProfile interaction_phase(const GratingSpec& grating, const ParticleSpecies& species,
                               double speed, const InteractionOptions& opt = {});

struct CumulantExpansion {
  std::complex<double> mu0, mu1, mu2;    // raw moments
  std::complex<double> kappa1, kappa2;   // cumulants, normalized by mu0
  double a_eff = 0.0;
  double nominal_width = 0.0;
  double open_fraction = 1.0;  // transmitted part of the open width
  double quadrature_error = 0.0;
  bool near_validity_edge = false;  // reduction beyond 50 %

  [[nodiscard]] double reduction() const { return 1.0 - a_eff / nominal_width; }
};

/// Moments mu_k = int psi(xi) e^{i phi(xi)} xi^k dxi by adaptive
/// Gauss-Kronrod, cumulants kappa_1 = mu1/mu0, kappa_2 = mu2/mu0 - kappa_1^2,
/// a_eff = sqrt(12 Re kappa_2). Throws NumericalError when the quadrature
/// does not converge or Re kappa_2 <= 0 (expansion invalid).
CumulantExpansion effective_slit_width(const SlitProfile& profile, const PhaseProfile& phase);
CumulantExpansion effective_slit_width(const GratingSpec& grating, const ParticleSpecies& species,
                                       double speed, const InteractionOptions& opt = {});

struct CutoffPoint {
  double wall_cutoff;
  std::optional<double> a_eff;  // nullopt when the expansion is invalid
  double open_fraction;
};
/// a_eff versus wall cutoff r_min (sensitivity report).
std::vector<CutoffPoint> cutoff_sensitivity(const GratingSpec& grating,
                                            const ParticleSpecies& species, double speed,
                                            const std::vector<double>& cutoffs);

/// Breakpoints splitting [-h, h] so the phase changes by at most `max_step`
/// between neighbours.
std::vector<double> phase_gradient_breaks(const PhaseProfile& phase, double max_step);

}  // namespace mwsim
