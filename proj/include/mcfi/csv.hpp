#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mcfi/model.hpp"

namespace mcfi {

/// Shortest decimal text that parses back to the same binary64 value.
/// NaN is written as an empty field.
std::string format_double(double value);

/// "# mcfi <version> config_hash=<hash>" plus any extra key=value pairs.
std::string header_comment(const std::string& config_hash, const std::string& extra = {});

/// Writes the header comment, a column header row, then one row per matrix row.
void write_csv(std::ostream& out, const std::vector<std::string>& columns, const Matrix& data,
               const std::string& config_hash, const std::string& extra = {});
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
               const Matrix& data, const std::string& config_hash, const std::string& extra = {});

struct CsvTable {
  std::vector<std::string> columns;
  Matrix data;
};

/// Reads a numeric CSV written by write_csv: '#' lines are skipped, the
/// first remaining line is the header. Throws ConfigError on malformed input.
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace mcfi
