#include "mwsim/units.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <limits>

#include "mwsim/constants.hpp"
#include "mwsim/error.hpp"

namespace mwsim {
namespace {

struct UnitEntry {
  std::string_view token;
  Dimension dim;
  double factor;
};

namespace u = units;
namespace c = constants;

constexpr std::array kUnits = {
    UnitEntry{"1", Dimension::dimensionless, 1.0},
    UnitEntry{"m", Dimension::length, u::m},
    UnitEntry{"cm", Dimension::length, u::cm},
    UnitEntry{"mm", Dimension::length, u::mm},
    UnitEntry{"um", Dimension::length, u::um},
    UnitEntry{"nm", Dimension::length, u::nm},
    UnitEntry{"pm", Dimension::length, u::pm},
    UnitEntry{"A", Dimension::length, u::angstrom},
    UnitEntry{"s", Dimension::time, u::s},
    UnitEntry{"ms", Dimension::time, u::ms},
    UnitEntry{"us", Dimension::time, u::us},
    UnitEntry{"ns", Dimension::time, u::ns},
    UnitEntry{"ps", Dimension::time, u::ps},
    UnitEntry{"J", Dimension::energy, u::joule},
    UnitEntry{"eV", Dimension::energy, u::eV},
    UnitEntry{"meV", Dimension::energy, u::meV},
    UnitEntry{"keV", Dimension::energy, u::keV},
    UnitEntry{"MeV", Dimension::energy, u::MeV},
    UnitEntry{"kg", Dimension::mass, 1.0},
    UnitEntry{"u", Dimension::mass, c::atomic_mass_unit},
    UnitEntry{"m_e", Dimension::mass, c::electron_mass},
    UnitEntry{"m_p", Dimension::mass, c::proton_mass},
    UnitEntry{"C", Dimension::charge, 1.0},
    UnitEntry{"e", Dimension::charge, c::elementary_charge},
    UnitEntry{"m3", Dimension::volume, 1.0},
    UnitEntry{"nm3", Dimension::volume, u::nm * u::nm * u::nm},
    UnitEntry{"A3", Dimension::volume, u::angstrom3},
    UnitEntry{"rad", Dimension::angle, u::rad},
    UnitEntry{"deg", Dimension::angle, u::deg},
    UnitEntry{"m/s", Dimension::speed, 1.0},
    UnitEntry{"km/s", Dimension::speed, 1e3},
    UnitEntry{"V/m", Dimension::e_field, 1.0},
    UnitEntry{"mV/m", Dimension::e_field, 1e-3},
    UnitEntry{"T", Dimension::b_field, u::tesla},
    UnitEntry{"G", Dimension::b_field, u::gauss},
    UnitEntry{"mG", Dimension::b_field, u::milligauss},
    UnitEntry{"J*m3", Dimension::c3, 1.0},
    UnitEntry{"meV*nm3", Dimension::c3, u::meV_nm3},
    UnitEntry{"eV*A3", Dimension::c3, u::eV * u::angstrom3},
};

}  // namespace

std::string_view dimension_name(Dimension dim) {
  switch (dim) {
    case Dimension::dimensionless: return "dimensionless";
    case Dimension::length: return "length";
    case Dimension::time: return "time";
    case Dimension::energy: return "energy";
    case Dimension::mass: return "mass";
    case Dimension::charge: return "charge";
    case Dimension::volume: return "volume";
    case Dimension::angle: return "angle";
    case Dimension::speed: return "speed";
    case Dimension::e_field: return "electric field";
    case Dimension::b_field: return "magnetic field";
    case Dimension::c3: return "C3 coefficient";
  }
  return "?";
}

double unit_factor(std::string_view unit, Dimension dim) {
  for (const auto& e : kUnits) {
    if (e.token == unit) {
      if (e.dim != dim) {
        throw ConfigError("unit '" + std::string(unit) + "' is not a " +
                          std::string(dimension_name(dim)) + " unit");
      }
      return e.factor;
    }
  }
  throw ConfigError("unknown unit '" + std::string(unit) + "'");
}

std::string_view si_unit(Dimension dim) {
  switch (dim) {
    case Dimension::dimensionless: return "";
    case Dimension::length: return "m";
    case Dimension::time: return "s";
    case Dimension::energy: return "J";
    case Dimension::mass: return "kg";
    case Dimension::charge: return "C";
    case Dimension::volume: return "m3";
    case Dimension::angle: return "rad";
    case Dimension::speed: return "m/s";
    case Dimension::e_field: return "V/m";
    case Dimension::b_field: return "T";
    case Dimension::c3: return "J*m3";
  }
  return "";
}

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

double parse_number(std::string_view text) {
  text = trim(text);
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError("malformed number '" + std::string(text) + "'");
  }
  return value;
}

double parse_quantity(std::string_view text, Dimension dim) {
  text = trim(text);
  const auto sp = text.find_first_of(" \t");
  if (sp == std::string_view::npos) {
    if (dim == Dimension::dimensionless) return parse_number(text);
    throw ConfigError("missing unit in '" + std::string(text) + "' (expected a " +
                      std::string(dimension_name(dim)) + " unit)");
  }
  const double value = parse_number(text.substr(0, sp));
  return value * unit_factor(trim(text.substr(sp)), dim);
}

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  (void)ec;
  return std::string(buf.data(), ptr);
}

}  // namespace mwsim
