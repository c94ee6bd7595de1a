#include "mcfi/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mcfi {

std::string format_double(double value) {
  if (std::isnan(value)) return {};
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string header_comment(const std::string& config_hash, const std::string& extra) {
  std::string line = "# mcfi " MCFI_VERSION " config_hash=" + config_hash;
  if (!extra.empty()) line += " " + extra;
  return line;
}

void write_csv(std::ostream& out, const std::vector<std::string>& columns, const Matrix& data,
               const std::string& config_hash, const std::string& extra) {
  if (static_cast<Eigen::Index>(columns.size()) != data.cols()) {
    throw DimensionError("CSV column names do not match the data width");
  }
  out << header_comment(config_hash, extra) << '\n';
  for (std::size_t j = 0; j < columns.size(); ++j) out << (j ? "," : "") << columns[j];
  out << '\n';
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) out << (j ? "," : "") << format_double(data(i, j));
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& columns, const Matrix& data,
               const std::string& config_hash, const std::string& extra) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_csv(out, columns, data, config_hash, extra);
  if (!out) throw Error("failed writing " + path.string());
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_field(const std::string& s, const std::filesystem::path& path, int line) {
  if (s.empty()) return NAN;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError(path.string() + ":" + std::to_string(line) + ": '" + s + "' is not a number");
  }
  return v;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  CsvTable table;
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!have_header) {
      table.columns = split(line);
      have_header = true;
      continue;
    }
    const auto fields = split(line);
    if (fields.size() != table.columns.size()) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                        std::to_string(table.columns.size()) + " fields");
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_field(f, path, lineno));
    rows.push_back(std::move(row));
  }
  if (!have_header) throw ConfigError(path.string() + " has no header row");
  table.data.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(table.columns.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      table.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return table;
}

}  // namespace mcfi
