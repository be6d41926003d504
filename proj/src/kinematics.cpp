#include "mwsim/kinematics.hpp"

#include <cmath>

#include "mwsim/constants.hpp"
#include "mwsim/error.hpp"

namespace mwsim {

using constants::planck;

double BeamKinematics::kinetic_energy_keV() const { return kinetic_energy / units::keV; }

BeamKinematics de_broglie(const ParticleSpecies& species, double speed) {
  species.validate();
  if (!(speed > 0.0) || !std::isfinite(speed)) {
    throw DomainError("speed must be positive and finite");
  }
  BeamKinematics k;
  k.speed = speed;
  k.wavelength = planck / (species.mass * speed);
  k.kinetic_energy = 0.5 * species.mass * speed * speed;
  return k;
}

BeamKinematics from_energy(const ParticleSpecies& species, double kinetic_energy) {
  if (!(kinetic_energy > 0.0) || !std::isfinite(kinetic_energy)) {
    throw DomainError("kinetic energy must be positive and finite");
  }
  species.validate();
  BeamKinematics k;
  k.kinetic_energy = kinetic_energy;
  k.speed = std::sqrt(2.0 * kinetic_energy / species.mass);
  k.wavelength = planck / std::sqrt(2.0 * species.mass * kinetic_energy);
  return k;
}

BeamKinematics from_energy_keV(const ParticleSpecies& species, double keV) {
  return from_energy(species, keV * units::keV);
}

BeamKinematics from_wavelength(const ParticleSpecies& species, double wavelength) {
  if (!(wavelength > 0.0) || !std::isfinite(wavelength)) {
    throw DomainError("wavelength must be positive and finite");
  }
  species.validate();
  BeamKinematics k;
  k.wavelength = wavelength;
  k.speed = planck / (species.mass * wavelength);
  k.kinetic_energy = 0.5 * species.mass * k.speed * k.speed;
  return k;
}

double talbot_length(double period, const BeamKinematics& kin) {
  if (!(period > 0.0)) throw DomainError("grating period must be positive");
  if (!(kin.wavelength > 0.0)) throw DomainError("wavelength must be positive");
  return period * period / kin.wavelength;
}

CriticalFields critical_fields(const ParticleSpecies& species, const BeamKinematics& kin,
                               double period, double length, double pattern_scale) {
  if (!species.charged()) {
    throw UnsupportedOperation("critical fields are defined for charged species only ('" +
                               species.name + "' is neutral)");
  }
  if (!(period > 0.0) || !(length > 0.0) || !(pattern_scale > 0.0)) {
    throw DomainError("critical fields need positive D, L and Delta");
  }
  CriticalFields f;
  f.pattern_scale = pattern_scale;
  f.flight_time = length / kin.speed;
  // h^2 Delta / (m L^2 lambda^2); equal to m Delta / tau^2.
  const double r = planck / (length * kin.wavelength);
  f.force = r * r * pattern_scale / species.mass;
  const double q = std::abs(species.charge);
  f.e_field = f.force / q;
  f.b_field = f.force / (q * kin.speed);
  return f;
}

CriticalFields critical_fields(const ParticleSpecies& species, const BeamKinematics& kin,
                               double period, double length, PatternScale scale) {
  double delta = period;
  switch (scale) {
    case PatternScale::talbot: delta = period; break;
    case PatternScale::fraunhofer:
      if (!(period > 0.0)) throw DomainError("grating period must be positive");
      delta = length * kin.wavelength / period;
      break;
    case PatternScale::explicit_:
      throw DomainError("explicit pattern scale needs a Delta value");
  }
  return critical_fields(species, kin, period, length, delta);
}

}  // namespace mwsim
