#pragma once

#include <numbers>

namespace mwsim::constants {

// CODATA 2018 recommended values, SI units. Every module takes physical
// constants from here.
inline constexpr double pi = std::numbers::pi;
inline constexpr double planck = 6.62607015e-34;              // h, J s (exact)
inline constexpr double hbar = planck / (2.0 * pi);           // J s
inline constexpr double elementary_charge = 1.602176634e-19;  // e, C (exact)
inline constexpr double electron_mass = 9.1093837015e-31;     // kg
inline constexpr double proton_mass = 1.67262192369e-27;      // kg
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg
inline constexpr double vacuum_permittivity = 8.8541878128e-12; // F/m
inline constexpr double speed_of_light = 299792458.0;         // m/s (exact)

// e^2 / (4 pi eps0), J m. Equals 1439.964 meV nm.
inline constexpr double coulomb_e2 =
    elementary_charge * elementary_charge / (4.0 * pi * vacuum_permittivity);

}  // namespace mwsim::constants

namespace mwsim::units {

inline constexpr double m = 1.0;
inline constexpr double cm = 1e-2;
inline constexpr double mm = 1e-3;
inline constexpr double um = 1e-6;
inline constexpr double nm = 1e-9;
inline constexpr double pm = 1e-12;
inline constexpr double angstrom = 1e-10;

inline constexpr double s = 1.0;
inline constexpr double ms = 1e-3;
inline constexpr double us = 1e-6;
inline constexpr double ns = 1e-9;
inline constexpr double ps = 1e-12;

inline constexpr double joule = 1.0;
inline constexpr double eV = constants::elementary_charge;
inline constexpr double meV = 1e-3 * eV;
inline constexpr double keV = 1e3 * eV;
inline constexpr double MeV = 1e6 * eV;

inline constexpr double rad = 1.0;
inline constexpr double deg = constants::pi / 180.0;

inline constexpr double tesla = 1.0;
inline constexpr double gauss = 1e-4;
inline constexpr double milligauss = 1e-7;

inline constexpr double angstrom3 = angstrom * angstrom * angstrom;
inline constexpr double meV_nm3 = meV * nm * nm * nm;  // C3 unit, J m^3

}  // namespace mwsim::units
