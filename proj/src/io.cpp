#include "mwsim/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include "mwsim/error.hpp"
#include "mwsim/units.hpp"

namespace mwsim {

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw ConfigError("cannot create '" + target.parent_path().string() + "': " + ec.message());
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw ConfigError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw ConfigError("cannot rename into '" + path + "': " + ec.message());
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string DataTable::render() const {
  std::string out = "# mwsim " + kind + "\n";
  for (const auto& [k, v] : header.entries()) out += "# " + k + " = " + v + "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? ", " : "") + columns[i];
  out += '\n';
  for (const auto& row : rows) {
    if (row.size() != columns.size()) throw ConfigError("table row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? ", " : "") + row[i];
    out += '\n';
  }
  return out;
}

std::size_t DataTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw ConfigError("table has no column '" + name + "'");
}

std::vector<double> DataTable::numeric_column(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& row : rows) v.push_back(parse_number(row[c]));
  return v;
}

namespace {

std::vector<std::string> split_row(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

const std::string& header_value(const DataTable& t, const std::string& key) {
  const std::string* v = t.header.find(key);
  if (!v) throw ConfigError("data file header lacks '" + key + "'");
  return *v;
}

UniformGrid header_grid(const DataTable& t) {
  UniformGrid g;
  g.x0 = parse_number(header_value(t, "grid_x0"));
  g.dx = parse_number(header_value(t, "grid_dx"));
  g.size = static_cast<Eigen::Index>(parse_number(header_value(t, "grid_size")));
  if (static_cast<std::size_t>(g.size) != t.rows.size())
    throw ConfigError("grid_size does not match the number of rows");
  return g;
}

void put_grid(Metadata& md, const UniformGrid& g) {
  md.set("grid_x0", format_double(g.x0));
  md.set("grid_dx", format_double(g.dx));
  md.set("grid_size", std::to_string(g.size));
}

Metadata without_grid(const Metadata& md, std::initializer_list<const char*> extra = {}) {
  Metadata out;
  for (const auto& [k, v] : md.entries()) {
    bool skip = k == "grid_x0" || k == "grid_dx" || k == "grid_size";
    for (const char* e : extra) skip = skip || k == e;
    if (!skip) out.set(k, v);
  }
  return out;
}

}  // namespace

DataTable parse_table(std::string_view text) {
  DataTable t;
  bool first = true;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (trim(line).empty()) continue;
    if (line.front() == '#') {
      std::string_view body = trim(line.substr(1));
      if (first) {
        if (body.substr(0, 6) != "mwsim ") throw ConfigError("not an mwsim data file");
        t.kind = std::string(trim(body.substr(6)));
        first = false;
        continue;
      }
      auto eq = body.find(" = ");
      if (eq == std::string_view::npos)
        throw ConfigError("line " + std::to_string(line_no) + ": malformed header");
      t.header.set(std::string(trim(body.substr(0, eq))), std::string(trim(body.substr(eq + 3))));
      continue;
    }
    if (first) throw ConfigError("not an mwsim data file");
    auto cells = split_row(line);
    if (t.columns.empty()) {
      t.columns = std::move(cells);
    } else {
      if (cells.size() != t.columns.size())
        throw ConfigError("line " + std::to_string(line_no) + ": wrong number of columns");
      t.rows.push_back(std::move(cells));
    }
  }
  if (t.columns.empty()) throw ConfigError("data file has no column header");
  return t;
}

DataTable read_table(const std::string& path) { return parse_table(read_text(path)); }

DataTable pattern_table(const IntensityPattern& pattern, const RealArray* standard_error) {
  DataTable t;
  t.kind = "pattern";
  t.header = pattern.metadata;
  put_grid(t.header, pattern.grid);
  t.columns = {"x", "intensity"};
  if (standard_error) {
    if (standard_error->size() != pattern.intensity.size())
      throw ConfigError("standard error size does not match the pattern");
    t.columns.push_back("stat_error");
  }
  for (Eigen::Index k = 0; k < pattern.intensity.size(); ++k) {
    std::vector<std::string> row{format_double(pattern.grid.x(k)),
                                 format_double(pattern.intensity[k])};
    if (standard_error) row.push_back(format_double((*standard_error)[k]));
    t.rows.push_back(std::move(row));
  }
  return t;
}

DataTable wavefield_table(const ComplexWavefield& field, const Metadata& metadata) {
  DataTable t;
  t.kind = "wavefield";
  t.header = metadata;
  t.header.set("wavelength_m", format_double(field.wavelength));
  put_grid(t.header, field.grid);
  t.columns = {"x", "re", "im"};
  for (Eigen::Index k = 0; k < field.amplitude.size(); ++k)
    t.rows.push_back({format_double(field.grid.x(k)), format_double(field.amplitude[k].real()),
                      format_double(field.amplitude[k].imag())});
  return t;
}

DataTable scan_table(const std::vector<ContrastCurve>& curves, const Metadata& metadata) {
  DataTable t;
  t.kind = "scan";
  t.header = metadata;
  if (!curves.empty()) t.header.set("scan_parameter", curves.front().parameter);
  t.columns = {"scan_value", "contrast", "stat_error", "mode"};
  for (const auto& c : curves) {
    c.validate();
    if (c.mode.find(',') != std::string::npos) throw ConfigError("scan mode may not contain ','");
    for (std::size_t i = 0; i < c.values.size(); ++i)
      t.rows.push_back({format_double(c.values[i]), format_double(c.contrast[i]),
                        format_double(c.error[i]), c.mode});
  }
  return t;
}

PatternFile read_pattern(const std::string& path) {
  const DataTable t = read_table(path);
  if (t.kind != "pattern") throw ConfigError("'" + path + "' is not a pattern file");
  PatternFile f;
  f.pattern.grid = header_grid(t);
  f.pattern.metadata = without_grid(t.header);
  const auto I = t.numeric_column("intensity");
  f.pattern.intensity = Eigen::Map<const RealArray>(I.data(), static_cast<Eigen::Index>(I.size()));
  if (t.columns.size() > 2) {
    const auto e = t.numeric_column("stat_error");
    f.standard_error = Eigen::Map<const RealArray>(e.data(), static_cast<Eigen::Index>(e.size()));
  }
  return f;
}

ComplexWavefield read_wavefield(const std::string& path) {
  const DataTable t = read_table(path);
  if (t.kind != "wavefield") throw ConfigError("'" + path + "' is not a wavefield file");
  ComplexWavefield f;
  f.grid = header_grid(t);
  f.wavelength = parse_number(header_value(t, "wavelength_m"));
  const auto re = t.numeric_column("re");
  const auto im = t.numeric_column("im");
  f.amplitude.resize(static_cast<Eigen::Index>(re.size()));
  for (std::size_t k = 0; k < re.size(); ++k)
    f.amplitude[static_cast<Eigen::Index>(k)] = {re[k], im[k]};
  return f;
}

std::vector<ContrastCurve> read_scan(const std::string& path) {
  const DataTable t = read_table(path);
  if (t.kind != "scan") throw ConfigError("'" + path + "' is not a scan file");
  const std::string* param = t.header.find("scan_parameter");
  std::vector<ContrastCurve> curves;
  const std::size_t mode_col = t.column("mode");
  for (const auto& row : t.rows) {
    if (curves.empty() || curves.back().mode != row[mode_col]) {
      curves.emplace_back();
      curves.back().mode = row[mode_col];
      if (param) curves.back().parameter = *param;
    }
    curves.back().push(parse_number(row[0]), parse_number(row[1]), parse_number(row[2]));
  }
  return curves;
}

}  // namespace mwsim
