#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace mwsim {

/// A particle species. All quantities SI; polarizability is a volume (m^3).
struct ParticleSpecies {
  std::string name;
  double mass = 0.0;            // kg
  double charge = 0.0;          // C, zero for neutrals
  double polarizability = 0.0;  // m^3 (alpha / 4 pi eps0), zero if unused
  double lifetime = std::numeric_limits<double>::infinity();  // s

  [[nodiscard]] bool charged() const noexcept { return charge != 0.0; }
  [[nodiscard]] bool stable() const noexcept {
    return lifetime == std::numeric_limits<double>::infinity();
  }
  /// Throws DomainError unless mass > 0 and lifetime > 0.
  void validate() const;

  bool operator==(const ParticleSpecies&) const = default;
};

/// Built-in preset table text (same format as presets/species.txt).
std::string_view builtin_species_table();

/// Parses a species table: one species per line,
/// `name  mass  charge  polarizability  lifetime`, each value followed by
/// its unit token, `#` comments. Throws ConfigError naming the line.
std::vector<ParticleSpecies> parse_species_table(std::string_view text);
std::vector<ParticleSpecies> load_species_table(const std::string& path);

/// Looks up a preset by name (e-, e+, pbar, Hbar, Ps, Kr).
ParticleSpecies species_preset(std::string_view name);

}  // namespace mwsim
