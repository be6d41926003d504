#include "mwsim/species.hpp"

#include <fstream>
#include <sstream>

#include "mwsim/error.hpp"
#include "mwsim/units.hpp"

namespace mwsim {
namespace {

// Mirror of presets/species.txt so the binary works without the preset
// directory. Kept in sync by a unit test.
constexpr std::string_view kBuiltinTable = R"(# name mass charge polarizability lifetime
e-    1             m_e   -1 e   0 A3        inf s
e+    1             m_e    1 e   0 A3        inf s
pbar  1             m_p   -1 e   0 A3        inf s
Hbar  1.00782503223 u      0 e   0.666831 A3 inf s
Ps    2             m_e    0 e   5.334650 A3 142 ns
Kr    83.798        u      0 e   2.4844 A3   inf s
)";

}  // namespace

void ParticleSpecies::validate() const {
  if (!(mass > 0.0)) throw DomainError("species '" + name + "': mass must be positive");
  if (!(lifetime > 0.0)) throw DomainError("species '" + name + "': lifetime must be positive");
  if (polarizability < 0.0) {
    throw DomainError("species '" + name + "': polarizability must be non-negative");
  }
}

std::string_view builtin_species_table() { return kBuiltinTable; }

std::vector<ParticleSpecies> parse_species_table(std::string_view text) {
  std::vector<ParticleSpecies> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() != 9) {
      throw ConfigError("species table line " + std::to_string(lineno) +
                        ": expected 'name mass unit charge unit polarizability unit "
                        "lifetime unit'");
    }
    try {
      ParticleSpecies s;
      s.name = tok[0];
      s.mass = parse_number(tok[1]) * unit_factor(tok[2], Dimension::mass);
      s.charge = parse_number(tok[3]) * unit_factor(tok[4], Dimension::charge);
      s.polarizability = parse_number(tok[5]) * unit_factor(tok[6], Dimension::volume);
      s.lifetime = parse_number(tok[7]) * unit_factor(tok[8], Dimension::time);
      s.validate();
      out.push_back(std::move(s));
    } catch (const Error& e) {
      throw ConfigError("species table line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<ParticleSpecies> load_species_table(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open species table '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_species_table(ss.str());
}

ParticleSpecies species_preset(std::string_view name) {
  static const auto table = parse_species_table(kBuiltinTable);
  for (const auto& s : table) {
    if (s.name == name) return s;
  }
  throw ConfigError("unknown species '" + std::string(name) + "'");
}

}  // namespace mwsim
