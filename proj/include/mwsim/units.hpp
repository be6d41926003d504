#pragma once

#include <string>
#include <string_view>

namespace mwsim {

/// Physical dimension expected for a quantity read from text.
enum class Dimension {
  dimensionless,
  length,
  time,
  energy,
  mass,
  charge,
  volume,      // polarizability volumes
  angle,
  speed,
  e_field,
  b_field,
  c3,          // van der Waals coefficient, energy * length^3
};

std::string_view dimension_name(Dimension dim);

/// SI factor of `unit` for the given dimension. Throws ConfigError on an
/// unknown unit or a unit of the wrong dimension.
double unit_factor(std::string_view unit, Dimension dim);

/// Canonical unit token used when writing a dimension back out (SI).
std::string_view si_unit(Dimension dim);

/// Parses "<number> <unit>" (unit mandatory unless dimensionless) into SI.
/// Accepts "inf" for the number.
double parse_quantity(std::string_view text, Dimension dim);

/// Parses a bare floating point number; throws ConfigError on junk.
double parse_number(std::string_view text);

/// Shortest decimal form of x that parses back to the same double.
std::string format_double(double x);

std::string_view trim(std::string_view s);

}  // namespace mwsim
