#include "mwsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mwsim/constants.hpp"
#include "mwsim/error.hpp"

namespace mwsim {

namespace {

using Kind = ConfigValue::Kind;

struct KeySpec {
  const char* section;
  const char* key;
  Kind kind;
  Dimension dim = Dimension::dimensionless;
};

// Emission order follows this table.
const KeySpec kSchema[] = {
    {"run", "subcommand", Kind::text},

    {"species", "name", Kind::text},
    {"species", "table", Kind::text},
    {"species", "mass", Kind::quantity, Dimension::mass},
    {"species", "charge", Kind::quantity, Dimension::charge},
    {"species", "polarizability", Kind::quantity, Dimension::volume},
    {"species", "lifetime", Kind::quantity, Dimension::time},

    {"grating", "slits", Kind::integer},
    {"grating", "period", Kind::quantity, Dimension::length},
    {"grating", "width", Kind::quantity, Dimension::length},
    {"grating", "profile", Kind::text},
    {"grating", "thickness", Kind::quantity, Dimension::length},
    {"grating", "wedge", Kind::quantity, Dimension::angle},
    {"grating", "weights", Kind::quantity_list},

    {"material", "name", Kind::text},
    {"material", "c3", Kind::quantity, Dimension::c3},
    {"material", "reference_polarizability", Kind::quantity, Dimension::volume},
    {"material", "permittivity", Kind::quantity},

    {"beam", "speed", Kind::quantity, Dimension::speed},
    {"beam", "energy", Kind::quantity, Dimension::energy},
    {"beam", "speed_sigma", Kind::quantity, Dimension::speed},
    {"beam", "energy_sigma", Kind::quantity, Dimension::energy},
    {"beam", "source_extent", Kind::quantity, Dimension::length},
    {"beam", "source_distance", Kind::quantity, Dimension::length},

    {"screen", "distance", Kind::quantity, Dimension::length},
    {"screen", "half_width", Kind::quantity, Dimension::length},
    {"screen", "samples", Kind::integer},
    {"screen", "model", Kind::text},

    {"mc", "samples", Kind::integer},
    {"mc", "seed", Kind::integer},
    {"mc", "decay_culling", Kind::boolean},
    {"mc", "batches", Kind::integer},

    {"interaction", "mode", Kind::text},
    {"interaction", "wall_cutoff", Kind::quantity, Dimension::length},
    {"interaction", "on_g1", Kind::boolean},

    {"coherence", "source_extents", Kind::quantity_list, Dimension::length},

    {"slitwidth", "species", Kind::text_list},
    {"slitwidth", "thicknesses", Kind::quantity_list, Dimension::length},
    {"slitwidth", "energies", Kind::quantity_list, Dimension::energy},
    {"slitwidth", "cutoffs", Kind::quantity_list, Dimension::length},

    {"talbot", "separation", Kind::quantity, Dimension::length},
    {"talbot", "ratios", Kind::quantity_list},
    {"talbot", "energies", Kind::quantity_list, Dimension::energy},
    {"talbot", "energy_sigmas", Kind::quantity_list, Dimension::energy},
    {"talbot", "source_points", Kind::integer},
    {"talbot", "max_source_points", Kind::integer},
    {"talbot", "tolerance", Kind::quantity},

    {"fields", "length", Kind::quantity, Dimension::length},
    {"fields", "energy", Kind::quantity, Dimension::energy},
    {"fields", "scale", Kind::text},
};

const KeySpec* find_spec(std::string_view section, std::string_view key) {
  for (const auto& s : kSchema)
    if (section == s.section && key == s.key) return &s;
  return nullptr;
}

bool known_section(std::string_view section) {
  return std::any_of(std::begin(kSchema), std::end(kSchema),
                     [&](const KeySpec& s) { return section == s.section; });
}

[[noreturn]] void fail_at(int line, const std::string& msg) {
  if (line > 0) throw ConfigError("line " + std::to_string(line) + ": " + msg);
  throw ConfigError(msg);
}

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto comma = text.find(',', start);
    out.push_back(trim(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::uint64_t parse_unsigned(std::string_view text) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ConfigError("expected a non-negative integer, got '" + std::string(text) + "'");
  return v;
}

ConfigValue parse_value(const KeySpec& spec, std::string_view text) {
  ConfigValue v;
  v.kind = spec.kind;
  v.dim = spec.dim;
  switch (spec.kind) {
    case Kind::quantity:
      v.number = parse_quantity(text, spec.dim);
      break;
    case Kind::integer:
      v.integer = parse_unsigned(text);
      break;
    case Kind::text:
      if (text.empty()) throw ConfigError("empty value");
      v.text = std::string(text);
      break;
    case Kind::boolean:
      if (text == "true")
        v.flag = true;
      else if (text == "false")
        v.flag = false;
      else
        throw ConfigError("expected true or false, got '" + std::string(text) + "'");
      break;
    case Kind::quantity_list:
      for (auto item : split_list(text)) v.numbers.push_back(parse_quantity(item, spec.dim));
      break;
    case Kind::text_list:
      for (auto item : split_list(text)) {
        if (item.empty()) throw ConfigError("empty list item");
        v.texts.emplace_back(item);
      }
      break;
  }
  return v;
}

std::string quantity_text(double x, Dimension dim) {
  std::string s = format_double(x);
  if (dim != Dimension::dimensionless) {
    s += ' ';
    s += si_unit(dim);
  }
  return s;
}

std::string value_text(const ConfigValue& v) {
  std::string s;
  switch (v.kind) {
    case Kind::quantity:
      return quantity_text(v.number, v.dim);
    case Kind::integer:
      return std::to_string(v.integer);
    case Kind::text:
      return v.text;
    case Kind::boolean:
      return v.flag ? "true" : "false";
    case Kind::quantity_list:
      for (std::size_t i = 0; i < v.numbers.size(); ++i) {
        if (i) s += ", ";
        s += quantity_text(v.numbers[i], v.dim);
      }
      return s;
    case Kind::text_list:
      for (std::size_t i = 0; i < v.texts.size(); ++i) {
        if (i) s += ", ";
        s += v.texts[i];
      }
      return s;
  }
  return s;
}

std::string key_name(const std::string& section, const std::string& key) {
  return "[" + section + "] " + key;
}

// Runs `f`, re-throwing config/domain errors with the given line attached.
template <class F>
auto at_line(int line, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError& e) {
    fail_at(line, e.what());
  } catch (const DomainError& e) {
    fail_at(line, e.what());
  } catch (const UnsupportedOperation& e) {
    fail_at(line, e.what());
  }
}

}  // namespace

std::string_view subcommand_name(Subcommand s) {
  switch (s) {
    case Subcommand::pattern: return "pattern";
    case Subcommand::coherence: return "coherence";
    case Subcommand::slitwidth: return "slitwidth";
    case Subcommand::talbot_scan_l: return "talbot-scan-l";
    case Subcommand::talbot_scan_e: return "talbot-scan-e";
    case Subcommand::fields: return "fields";
  }
  return "?";
}

Subcommand parse_subcommand(std::string_view name) {
  for (auto s : {Subcommand::pattern, Subcommand::coherence, Subcommand::slitwidth,
                 Subcommand::talbot_scan_l, Subcommand::talbot_scan_e, Subcommand::fields})
    if (subcommand_name(s) == name) return s;
  throw ConfigError("unknown subcommand '" + std::string(name) + "'");
}

bool ConfigValue::operator==(const ConfigValue& o) const {
  return kind == o.kind && dim == o.dim && number == o.number && integer == o.integer &&
         text == o.text && flag == o.flag && numbers == o.numbers && texts == o.texts;
}

bool RunConfig::has(const std::string& section, const std::string& key) const {
  auto s = values_.find(section);
  return s != values_.end() && s->second.count(key);
}

const ConfigValue& RunConfig::get(const std::string& section, const std::string& key) const {
  auto s = values_.find(section);
  if (s != values_.end()) {
    auto k = s->second.find(key);
    if (k != s->second.end()) return k->second;
  }
  fail_at(line_of(section), "missing required key " + key_name(section, key));
}

double RunConfig::quantity(const std::string& section, const std::string& key) const {
  return get(section, key).number;
}

std::optional<double> RunConfig::maybe_quantity(const std::string& section,
                                                const std::string& key) const {
  if (!has(section, key)) return std::nullopt;
  return get(section, key).number;
}

std::uint64_t RunConfig::integer(const std::string& section, const std::string& key) const {
  return get(section, key).integer;
}

std::string RunConfig::text(const std::string& section, const std::string& key) const {
  return get(section, key).text;
}

bool RunConfig::flag(const std::string& section, const std::string& key) const {
  return get(section, key).flag;
}

const std::vector<double>& RunConfig::quantities(const std::string& section,
                                                 const std::string& key) const {
  return get(section, key).numbers;
}

const std::vector<std::string>& RunConfig::texts(const std::string& section,
                                                 const std::string& key) const {
  return get(section, key).texts;
}

void RunConfig::set(const std::string& section, const std::string& key, ConfigValue v) {
  const KeySpec* spec = find_spec(section, key);
  if (!spec) throw ConfigError("unknown key " + key_name(section, key));
  if (spec->kind != v.kind) throw ConfigError("wrong value kind for " + key_name(section, key));
  v.dim = spec->dim;
  values_[section][key] = std::move(v);
}

void RunConfig::set_integer(const std::string& section, const std::string& key,
                            std::uint64_t value) {
  ConfigValue v;
  v.kind = Kind::integer;
  v.integer = value;
  set(section, key, std::move(v));
}

void RunConfig::set_quantity(const std::string& section, const std::string& key,
                             double value_si) {
  ConfigValue v;
  v.kind = Kind::quantity;
  v.number = value_si;
  set(section, key, std::move(v));
}

void RunConfig::set_text(const std::string& section, const std::string& key,
                         const std::string& value) {
  ConfigValue v;
  v.kind = Kind::text;
  v.text = value;
  set(section, key, std::move(v));
}

int RunConfig::line_of(const std::string& section, const std::string& key) const {
  if (key.empty()) {
    auto it = section_lines_.find(section);
    return it == section_lines_.end() ? 0 : it->second;
  }
  auto s = values_.find(section);
  if (s == values_.end()) return 0;
  auto k = s->second.find(key);
  return k == s->second.end() ? line_of(section) : k->second.line;
}

Subcommand RunConfig::subcommand() const {
  return at_line(line_of("run", "subcommand"),
                 [&] { return parse_subcommand(text("run", "subcommand")); });
}

namespace {

RunConfig parse_raw(std::string_view text) {
  RunConfig cfg;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail_at(line_no, "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!known_section(section)) fail_at(line_no, "unknown section [" + section + "]");
      if (cfg.section_lines_.count(section)) fail_at(line_no, "duplicate section [" + section + "]");
      cfg.section_lines_[section] = line_no;
      continue;
    }

    auto eq = line.find('=');
    if (eq == std::string_view::npos) fail_at(line_no, "expected 'key = value'");
    if (section.empty()) fail_at(line_no, "key outside any section");
    std::string key(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));

    const KeySpec* spec = find_spec(section, key);
    if (!spec) fail_at(line_no, "unknown key " + key_name(section, key));
    if (cfg.has(section, key)) fail_at(line_no, "duplicate key " + key_name(section, key));
    ConfigValue v = at_line(line_no, [&] { return parse_value(*spec, value); });
    v.line = line_no;
    cfg.values_[section][key] = std::move(v);
  }
  return cfg;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig cfg = parse_raw(text);
  validate_config(cfg);
  return cfg;
}

RunConfig parse_config(std::string_view text, Subcommand subcommand) {
  RunConfig cfg = parse_raw(text);
  if (cfg.has("run", "subcommand")) {
    if (cfg.subcommand() != subcommand)
      fail_at(cfg.line_of("run", "subcommand"),
              "config is for '" + cfg.text("run", "subcommand") + "', not '" +
                  std::string(subcommand_name(subcommand)) + "'");
  } else {
    cfg.set_text("run", "subcommand", std::string(subcommand_name(subcommand)));
  }
  validate_config(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string emit_config(const RunConfig& config) {
  std::string out;
  std::string current;
  for (const auto& spec : kSchema) {
    if (!config.has(spec.section, spec.key)) continue;
    if (current != spec.section) {
      if (!current.empty()) out += '\n';
      current = spec.section;
      out += "[" + current + "]\n";
    }
    out += std::string(spec.key) + " = " + value_text(config.get(spec.section, spec.key)) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Domain objects

ParticleSpecies config_species(const RunConfig& c, const std::string& name_override) {
  const int line = c.line_of("species");
  if (!name_override.empty()) {
    return at_line(line, [&] {
      if (c.has("species", "table"))
        for (auto& s : load_species_table(c.text("species", "table")))
          if (s.name == name_override) return s;
      return species_preset(name_override);
    });
  }
  const bool custom = c.has("species", "mass");
  ParticleSpecies s;
  if (c.has("species", "name")) {
    const std::string name = c.text("species", "name");
    if (c.has("species", "table")) {
      auto table = at_line(c.line_of("species", "table"),
                           [&] { return load_species_table(c.text("species", "table")); });
      auto it = std::find_if(table.begin(), table.end(),
                             [&](const ParticleSpecies& p) { return p.name == name; });
      if (it == table.end())
        fail_at(c.line_of("species", "name"), "species '" + name + "' not in table");
      s = *it;
    } else if (!custom) {
      s = at_line(c.line_of("species", "name"), [&] { return species_preset(name); });
    }
    s.name = name;
  } else if (!custom) {
    fail_at(line, "[species] needs a name or an explicit mass");
  }
  // Explicit values always win over the preset.
  if (custom) s.mass = c.quantity("species", "mass");
  if (auto q = c.maybe_quantity("species", "charge")) s.charge = *q;
  if (auto p = c.maybe_quantity("species", "polarizability")) s.polarizability = *p;
  if (auto t = c.maybe_quantity("species", "lifetime")) s.lifetime = *t;
  if (s.name.empty()) s.name = "custom";
  at_line(line, [&] { s.validate(); });
  return s;
}

GratingSpec config_grating(const RunConfig& c) {
  GratingSpec g;
  const int line = c.line_of("grating");
  const auto slits = c.integer("grating", "slits");
  if (slits < 1 || slits > 100000) fail_at(c.line_of("grating", "slits"), "slits out of range");
  g.n_slits = static_cast<int>(slits);
  g.period = c.quantity("grating", "period");
  const double width = c.quantity("grating", "width");
  const std::string profile = c.has("grating", "profile") ? c.text("grating", "profile")
                                                           : std::string("rectangular");
  if (profile == "rectangular")
    g.profile = SlitProfile::rectangular(width);
  else if (profile == "gaussian")
    g.profile = SlitProfile::gaussian(width);
  else
    fail_at(c.line_of("grating", "profile"), "profile must be rectangular or gaussian");
  if (auto t = c.maybe_quantity("grating", "thickness")) g.thickness = *t;
  if (auto b = c.maybe_quantity("grating", "wedge")) g.wedge_angle = *b;
  if (c.has("grating", "weights")) g.weights = c.quantities("grating", "weights");

  if (c.has("material", "name")) g.material.name = c.text("material", "name");
  if (auto v = c.maybe_quantity("material", "c3")) g.material.c3 = *v;
  if (auto v = c.maybe_quantity("material", "reference_polarizability"))
    g.material.reference_polarizability = *v;
  if (auto v = c.maybe_quantity("material", "permittivity")) g.material.permittivity = *v;
  at_line(c.line_of("material"), [&] { g.material.validate(); });

  at_line(c.line_of("grating", "period"), [&] { g.validate(); });
  (void)line;
  return g;
}

BeamModel config_beam(const RunConfig& c, const ParticleSpecies& species) {
  BeamModel b;
  const int line = c.line_of("beam");
  const bool has_speed = c.has("beam", "speed");
  const bool has_energy = c.has("beam", "energy");
  if (has_speed == has_energy) fail_at(line, "[beam] needs exactly one of speed or energy");
  if (has_speed) {
    b.mean_speed = c.quantity("beam", "speed");
    if (c.has("beam", "energy_sigma"))
      fail_at(c.line_of("beam", "energy_sigma"), "energy_sigma requires energy, not speed");
    const double sv = c.maybe_quantity("beam", "speed_sigma").value_or(0.0);
    b.speed_sigma = sv;
    b.speed_dist = sv > 0.0 ? SpeedDistribution::gaussian_speed : SpeedDistribution::delta;
  } else {
    b.mean_energy = c.quantity("beam", "energy");
    if (c.has("beam", "speed_sigma"))
      fail_at(c.line_of("beam", "speed_sigma"), "speed_sigma requires speed, not energy");
    b.energy_sigma = c.maybe_quantity("beam", "energy_sigma").value_or(0.0);
    b.speed_dist = SpeedDistribution::gaussian_energy;
    b.mean_speed = at_line(c.line_of("beam", "energy"),
                           [&] { return from_energy(species, b.mean_energy).speed; });
  }
  if (auto v = c.maybe_quantity("beam", "source_extent")) b.source_extent = *v;
  if (auto v = c.maybe_quantity("beam", "source_distance")) b.source_distance = *v;
  at_line(line, [&] { b.validate(); });
  return b;
}

MCConfig config_mc(const RunConfig& c) {
  MCConfig m;
  if (c.has("mc", "samples")) m.sample_count = c.integer("mc", "samples");
  if (c.has("mc", "seed")) m.seed = c.integer("mc", "seed");
  if (c.has("mc", "decay_culling")) m.decay_culling = c.flag("mc", "decay_culling");
  if (c.has("mc", "batches")) {
    const auto b = c.integer("mc", "batches");
    if (b < 1 || b > 4096) fail_at(c.line_of("mc", "batches"), "batches out of range [1, 4096]");
    m.batches = static_cast<int>(b);
  }
  at_line(c.line_of("mc"), [&] { m.validate(); });
  return m;
}

InteractionOptions config_interaction(const RunConfig& c) {
  InteractionOptions o;
  if (auto r = c.maybe_quantity("interaction", "wall_cutoff")) {
    if (!(*r >= 0.0)) fail_at(c.line_of("interaction", "wall_cutoff"), "wall_cutoff must be >= 0");
    o.wall_cutoff = *r;
  }
  return o;
}

bool config_interactions_enabled(const RunConfig& c, const ParticleSpecies& species) {
  const std::string mode = c.has("interaction", "mode") ? c.text("interaction", "mode")
                                                        : std::string("auto");
  if (mode == "on") return true;
  if (mode == "off") return false;
  if (mode == "auto") return species.charged();
  fail_at(c.line_of("interaction", "mode"), "interaction mode must be auto, on or off");
}

FieldModel config_field_model(const RunConfig& c) {
  const std::string m = c.has("screen", "model") ? c.text("screen", "model") : std::string("auto");
  if (m == "auto") return FieldModel::automatic;
  if (m == "fraunhofer") return FieldModel::fraunhofer;
  if (m == "fresnel") return FieldModel::fresnel;
  fail_at(c.line_of("screen", "model"), "screen model must be auto, fraunhofer or fresnel");
}

UniformGrid config_screen(const RunConfig& c) {
  const double half = c.quantity("screen", "half_width");
  const auto n = c.integer("screen", "samples");
  if (n < 3 || n > 10'000'000) fail_at(c.line_of("screen", "samples"), "samples out of range");
  if (!(half > 0.0)) fail_at(c.line_of("screen", "half_width"), "half_width must be positive");
  return UniformGrid::centered(half, static_cast<Eigen::Index>(n));
}

TalbotLauSetup config_talbot(const RunConfig& c) {
  TalbotLauSetup s;
  s.species = config_species(c);
  s.grating1 = config_grating(c);
  s.grating2 = s.grating1;
  if (c.has("run", "subcommand") && c.subcommand() == Subcommand::talbot_scan_e) {
    // The scan supplies the energies; a [beam] energy would be silently ignored.
    for (const char* k : {"speed", "energy", "speed_sigma", "energy_sigma"})
      if (c.has("beam", k))
        fail_at(c.line_of("beam", k), std::string("[beam] ") + k +
                                          " conflicts with [talbot] energies/energy_sigmas");
    const auto& energies = c.quantities("talbot", "energies");
    if (energies.empty() || !(energies.front() > 0.0))
      fail_at(c.line_of("talbot", "energies"), "energies must be positive");
    s.beam.speed_dist = SpeedDistribution::gaussian_energy;
    s.beam.mean_energy = energies.front();
    s.beam.mean_speed = from_energy(s.species, energies.front()).speed;
  } else {
    s.beam = config_beam(c, s.species);
  }
  if (auto L = c.maybe_quantity("talbot", "separation")) s.separation = *L;
  if (c.has("interaction", "mode") || !s.species.charged())
    s.apply_effective_width = config_interactions_enabled(c, s.species);
  if (c.has("interaction", "on_g1")) s.effective_width_on_g1 = c.flag("interaction", "on_g1");
  s.interaction = config_interaction(c);
  if (c.has("talbot", "source_points")) {
    const auto k = c.integer("talbot", "source_points");
    if (k < 2 || k > 65536) fail_at(c.line_of("talbot", "source_points"), "source_points out of range");
    s.source_points_per_slit = static_cast<int>(k);
  }
  if (c.has("talbot", "max_source_points")) {
    const auto k = c.integer("talbot", "max_source_points");
    if (k < 2 || k > 65536)
      fail_at(c.line_of("talbot", "max_source_points"), "max_source_points out of range");
    s.max_source_points = static_cast<int>(k);
  }
  if (auto t = c.maybe_quantity("talbot", "tolerance")) s.contrast_tolerance = *t;
  if (c.has("screen", "half_width")) s.screen = config_screen(c);
  return s;
}

void validate_config(const RunConfig& c) {
  const Subcommand sub = c.subcommand();
  auto require = [&](const char* section, const char* key) {
    if (!c.has(section, key))
      fail_at(c.line_of(section), std::string("missing required key ") +
                                      key_name(section, key) + " for " +
                                      std::string(subcommand_name(sub)));
  };
  auto positive_list = [&](const char* section, const char* key, bool allow_zero) {
    require(section, key);
    const auto& v = c.quantities(section, key);
    for (double x : v)
      if (!(allow_zero ? x >= 0.0 : x > 0.0) || !std::isfinite(x))
        fail_at(c.line_of(section, key), std::string(key) + " entries must be " +
                                             (allow_zero ? "non-negative" : "positive"));
  };

  switch (sub) {
    case Subcommand::pattern:
    case Subcommand::coherence: {
      const auto species = config_species(c);
      const auto grating = config_grating(c);
      const auto beam = config_beam(c, species);
      require("screen", "distance");
      if (!(c.quantity("screen", "distance") > 0.0))
        fail_at(c.line_of("screen", "distance"), "screen distance must be positive");
      config_screen(c);
      config_field_model(c);
      config_mc(c);
      config_interactions_enabled(c, species);
      config_interaction(c);
      (void)grating;
      (void)beam;
      if (sub == Subcommand::coherence) {
        if (c.has("beam", "source_extent"))
          fail_at(c.line_of("beam", "source_extent"),
                  "[beam] source_extent conflicts with [coherence] source_extents");
        positive_list("coherence", "source_extents", true);
      }
      break;
    }
    case Subcommand::slitwidth: {
      config_grating(c);
      config_interaction(c);
      require("slitwidth", "species");
      for (const auto& name : c.texts("slitwidth", "species"))
        config_species(c, name);
      positive_list("slitwidth", "energies", false);
      if (c.has("slitwidth", "thicknesses")) {
        positive_list("slitwidth", "thicknesses", true);
        if (c.quantities("slitwidth", "thicknesses").size() != c.texts("slitwidth", "species").size())
          fail_at(c.line_of("slitwidth", "thicknesses"),
                  "thicknesses must list one value per species");
      }
      if (c.has("slitwidth", "cutoffs")) positive_list("slitwidth", "cutoffs", true);
      break;
    }
    case Subcommand::talbot_scan_l: {
      auto s = config_talbot(c);
      if (c.has("talbot", "separation"))
        fail_at(c.line_of("talbot", "separation"), "talbot-scan-l takes ratios, not a separation");
      positive_list("talbot", "ratios", false);
      s.separation = 1.0;
      at_line(c.line_of("talbot"), [&] { s.validate(); });
      config_mc(c);
      break;
    }
    case Subcommand::talbot_scan_e: {
      positive_list("talbot", "energies", false);
      auto s = config_talbot(c);
      require("talbot", "separation");
      if (c.has("talbot", "energy_sigmas")) positive_list("talbot", "energy_sigmas", true);
      at_line(c.line_of("talbot"), [&] { s.validate(); });
      config_mc(c);
      break;
    }
    case Subcommand::fields: {
      const auto species = config_species(c);
      if (!species.charged())
        fail_at(c.line_of("species"), "fields report requires a charged species");
      require("grating", "period");
      if (!(c.quantity("grating", "period") > 0.0))
        fail_at(c.line_of("grating", "period"), "period must be positive");
      require("fields", "energy");
      if (!(c.quantity("fields", "energy") > 0.0))
        fail_at(c.line_of("fields", "energy"), "energy must be positive");
      if (c.has("fields", "length") && !(c.quantity("fields", "length") > 0.0))
        fail_at(c.line_of("fields", "length"), "length must be positive");
      if (c.has("fields", "scale")) {
        const auto sc = c.text("fields", "scale");
        if (sc != "talbot" && sc != "fraunhofer")
          fail_at(c.line_of("fields", "scale"), "scale must be talbot or fraunhofer");
      }
      break;
    }
  }
}

}  // namespace mwsim
