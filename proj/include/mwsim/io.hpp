#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mwsim/incoherence.hpp"
#include "mwsim/wavefield.hpp"

namespace mwsim {

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t h);

/// Writes `content` to a temporary file next to `path` and renames it into
/// place, so readers never see a partial file.
void write_text_atomic(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

/// A delimited-text data file:
///
///   # mwsim <kind>
///   # key = value
///   col_a, col_b, ...
///   1.5, 2.25, ...
///
/// Numbers are written in shortest round-trip form, so reading a file back
/// reproduces the written doubles exactly.
struct DataTable {
  std::string kind;
  Metadata header;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] std::string render() const;
  [[nodiscard]] std::size_t column(const std::string& name) const;  // throws if absent
  [[nodiscard]] std::vector<double> numeric_column(const std::string& name) const;
};

DataTable parse_table(std::string_view text);
DataTable read_table(const std::string& path);

/// `x, intensity[, stat_error]` with the grid stored exactly in the header.
DataTable pattern_table(const IntensityPattern& pattern, const RealArray* standard_error = nullptr);
/// `x, re, im`.
DataTable wavefield_table(const ComplexWavefield& field, const Metadata& metadata = {});
/// `scan_value, contrast, stat_error, mode`, one block per curve.
DataTable scan_table(const std::vector<ContrastCurve>& curves, const Metadata& metadata = {});

struct PatternFile {
  IntensityPattern pattern;
  RealArray standard_error;  // empty when the file has no stat_error column
};
PatternFile read_pattern(const std::string& path);
ComplexWavefield read_wavefield(const std::string& path);
std::vector<ContrastCurve> read_scan(const std::string& path);

}  // namespace mwsim
