#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mwsim/incoherence.hpp"
#include "mwsim/interaction.hpp"
#include "mwsim/species.hpp"
#include "mwsim/talbot_lau.hpp"
#include "mwsim/units.hpp"
#include "mwsim/wavefield.hpp"

namespace mwsim {

enum class Subcommand { pattern, coherence, slitwidth, talbot_scan_l, talbot_scan_e, fields };

std::string_view subcommand_name(Subcommand s);
Subcommand parse_subcommand(std::string_view name);

/// One value of a config key. Physical quantities are stored in SI.
struct ConfigValue {
  enum class Kind { quantity, integer, text, boolean, quantity_list, text_list };
  Kind kind = Kind::text;
  Dimension dim = Dimension::dimensionless;
  double number = 0.0;
  std::uint64_t integer = 0;
  std::string text;
  bool flag = false;
  std::vector<double> numbers;
  std::vector<std::string> texts;
  int line = 0;  // source line, 0 when set programmatically

  bool operator==(const ConfigValue& o) const;  // ignores `line`
};

/// Sectioned key = value configuration:
///
///   [grating]
///   period = 10 um     # comment
///
/// Every physical quantity must carry a unit. Unknown sections/keys, missing
/// units and malformed values are rejected with the offending line number.
class RunConfig {
 public:
  [[nodiscard]] bool has(const std::string& section, const std::string& key) const;
  [[nodiscard]] const ConfigValue& get(const std::string& section, const std::string& key) const;

  [[nodiscard]] double quantity(const std::string& section, const std::string& key) const;
  [[nodiscard]] std::optional<double> maybe_quantity(const std::string& section,
                                                     const std::string& key) const;
  [[nodiscard]] std::uint64_t integer(const std::string& section, const std::string& key) const;
  [[nodiscard]] std::string text(const std::string& section, const std::string& key) const;
  [[nodiscard]] bool flag(const std::string& section, const std::string& key) const;
  [[nodiscard]] const std::vector<double>& quantities(const std::string& section,
                                                      const std::string& key) const;
  [[nodiscard]] const std::vector<std::string>& texts(const std::string& section,
                                                      const std::string& key) const;

  void set_integer(const std::string& section, const std::string& key, std::uint64_t v);
  void set_quantity(const std::string& section, const std::string& key, double value_si);
  void set_text(const std::string& section, const std::string& key, const std::string& v);
  void set(const std::string& section, const std::string& key, ConfigValue v);

  /// Line of a key (or of the section header when key is empty), 0 if absent.
  [[nodiscard]] int line_of(const std::string& section, const std::string& key = {}) const;

  [[nodiscard]] Subcommand subcommand() const;

  bool operator==(const RunConfig& o) const { return values_ == o.values_; }

  std::map<std::string, std::map<std::string, ConfigValue>> values_;
  std::map<std::string, int> section_lines_;
};

/// Parses and validates config text (errors name the line).
RunConfig parse_config(std::string_view text);
/// Same, with the subcommand given separately (e.g. on the command line). A
/// config naming a different subcommand is rejected.
RunConfig parse_config(std::string_view text, Subcommand subcommand);
RunConfig load_config(const std::string& path);
/// Canonical text: sections and keys in schema order, SI units, shortest
/// round-trip numbers. parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& config);

/// Checks the whole config against the selected subcommand by building the
/// domain objects; errors name the relevant line.
void validate_config(const RunConfig& config);

// Domain objects built from a config.
ParticleSpecies config_species(const RunConfig& c, const std::string& name_override = {});
GratingSpec config_grating(const RunConfig& c);
BeamModel config_beam(const RunConfig& c, const ParticleSpecies& species);
MCConfig config_mc(const RunConfig& c);
InteractionOptions config_interaction(const RunConfig& c);
/// "auto" (charged species only), "on" or "off".
bool config_interactions_enabled(const RunConfig& c, const ParticleSpecies& species);
FieldModel config_field_model(const RunConfig& c);
UniformGrid config_screen(const RunConfig& c);
TalbotLauSetup config_talbot(const RunConfig& c);

}  // namespace mwsim
