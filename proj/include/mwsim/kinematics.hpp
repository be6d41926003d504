#pragma once

#include "mwsim/species.hpp"

namespace mwsim {

/// Non-relativistic beam kinematics; speed, wavelength and kinetic energy
/// are always mutually consistent.
struct BeamKinematics {
  double speed = 0.0;           // m/s
  double wavelength = 0.0;      // m
  double kinetic_energy = 0.0;  // J

  [[nodiscard]] double kinetic_energy_keV() const;
};

/// de Broglie kinematics for a given speed. Throws DomainError for speed <= 0.
BeamKinematics de_broglie(const ParticleSpecies& species, double speed);
/// Kinematics from a kinetic energy E = m v^2 / 2 (joules).
BeamKinematics from_energy(const ParticleSpecies& species, double kinetic_energy);
BeamKinematics from_energy_keV(const ParticleSpecies& species, double keV);
/// Inverse of de_broglie.
BeamKinematics from_wavelength(const ParticleSpecies& species, double wavelength);

/// T_L = D^2 / lambda.
double talbot_length(double period, const BeamKinematics& kin);

/// How the pattern scale Delta entering the critical force is chosen.
enum class PatternScale {
  talbot,      // Delta = D
  fraunhofer,  // Delta = L lambda / D
  explicit_,   // Delta supplied by the caller
};

struct CriticalFields {
  double force = 0.0;          // N
  double e_field = 0.0;        // V/m
  double b_field = 0.0;        // T
  double pattern_scale = 0.0;  // Delta, m
  double flight_time = 0.0;    // tau_f = L / v, s
};

/// Largest uniform force (and the equivalent E and B fields) that deflects
/// the pattern by less than Delta over a flight of length L:
/// F = m Delta / tau_f^2 = h^2 Delta / (m L^2 lambda^2). Reduces to
/// h^2 / (m D^3) when L = T_L and Delta = D. Charged species only.
CriticalFields critical_fields(const ParticleSpecies& species, const BeamKinematics& kin,
                               double period, double length, double pattern_scale);
CriticalFields critical_fields(const ParticleSpecies& species, const BeamKinematics& kin,
                               double period, double length, PatternScale scale);

}  // namespace mwsim
