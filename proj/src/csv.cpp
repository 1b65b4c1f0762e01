#include "qbmc/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>
#include <vector>

namespace qbmc {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void parse_error(const std::string& path, std::size_t line,
                              const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string field = line.substr(start, comma - start);
    if (!field.empty() && field.back() == '\r') field.pop_back();
    fields.push_back(std::move(field));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_field_double(const std::string& field, const std::string& path,
                          std::size_t line) {
  double value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    parse_error(path, line, "cannot parse number '" + field + "'");
  return value;
}

long parse_field_index(const std::string& field, const std::string& path,
                       std::size_t line) {
  long value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    parse_error(path, line, "cannot parse index '" + field + "'");
  return value;
}

}  // namespace

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_fields(line);
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_field_double(f, path, lineno));
    if (!rows.empty() && row.size() != rows.front().size())
      parse_error(path, lineno, "ragged row: expected " +
                                    std::to_string(rows.front().size()) + " fields, got " +
                                    std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path + ": empty matrix file");
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

void write_observations_csv(const std::string& path, const ObservationSet& obs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "row,col,value\n";
  for (const Observation& ob : obs.entries)
    out << ob.row << ',' << ob.col << ',' << format_double(ob.value) << '\n';
  if (!out) throw std::runtime_error(path + ": write failed");
}

ObservationSet read_observations_csv(const std::string& path, int n, int q) {
  if (n < 1 || q < 1)
    throw std::invalid_argument("read_observations_csv: invalid target shape");
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");

  ObservationSet obs;
  obs.n = n;
  obs.q = q;
  std::string line;
  std::size_t lineno = 0;
  bool first_data_line = true;
  std::set<std::pair<int, int>> seen;
  bool duplicates = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_fields(line);
    if (first_data_line && !fields.empty() && fields[0] == "row") {
      first_data_line = false;
      continue;  // header
    }
    first_data_line = false;
    if (fields.size() != 3)
      parse_error(path, lineno, "expected 3 fields row,col,value");
    const long row = parse_field_index(fields[0], path, lineno);
    const long col = parse_field_index(fields[1], path, lineno);
    const double value = parse_field_double(fields[2], path, lineno);
    if (row < 0 || row >= n || col < 0 || col >= q)
      parse_error(path, lineno, "index (" + std::to_string(row) + "," +
                                    std::to_string(col) + ") outside " + std::to_string(n) +
                                    "x" + std::to_string(q));
    if (!seen.emplace(static_cast<int>(row), static_cast<int>(col)).second)
      duplicates = true;
    obs.entries.push_back({static_cast<int>(row), static_cast<int>(col), value});
  }
  if (obs.entries.empty()) throw std::runtime_error(path + ": no observations");
  if (duplicates)
    obs.mode = ObservationMode::IidWithReplacement;
  else if (static_cast<long long>(obs.entries.size()) ==
           static_cast<long long>(n) * q)
    obs.mode = ObservationMode::Full;
  else
    obs.mode = ObservationMode::MaskedWithoutReplacement;
  return obs;
}

}  // namespace qbmc
