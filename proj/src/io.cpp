#include "gtf/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gtf {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::FileNotFound, "cannot open: " + path);
  return is;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path);
  if (!os) fail(ErrorCode::FileNotFound, "cannot open for writing: " + path);
  return os;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

double parse_double(const std::string& s, const std::string& path, int lineno) {
  try {
    size_t consumed = 0;
    const double v = std::stod(s, &consumed);
    while (consumed < s.size() && std::isspace(static_cast<unsigned char>(s[consumed]))) ++consumed;
    if (consumed != s.size())
      fail(ErrorCode::ParseError, path + " line " + std::to_string(lineno) + ": bad number '" + s + "'");
    return v;
  } catch (const Error&) {
    throw;
  } catch (...) {
    fail(ErrorCode::ParseError, path + " line " + std::to_string(lineno) + ": bad number '" + s + "'");
  }
}

int parse_int(const std::string& s, const std::string& path, int lineno) {
  try {
    size_t consumed = 0;
    const int v = std::stoi(s, &consumed);
    if (consumed != s.size())
      fail(ErrorCode::ParseError, path + " line " + std::to_string(lineno) + ": bad integer '" + s + "'");
    return v;
  } catch (const Error&) {
    throw;
  } catch (...) {
    fail(ErrorCode::ParseError, path + " line " + std::to_string(lineno) + ": bad integer '" + s + "'");
  }
}

}  // namespace

void write_signal_csv(const std::string& path, const std::vector<double>& values) {
  auto os = open_output(path);
  os << "node,value\n";
  for (size_t i = 0; i < values.size(); ++i) os << i << ',' << format_double(values[i]) << '\n';
}

std::vector<double> read_signal_csv(const std::string& path) {
  auto is = open_input(path);
  std::string line;
  int lineno = 0;
  std::vector<double> values;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    if (lineno == 1 && line.rfind("node", 0) == 0) continue;  // header
    const auto fields = split_csv_line(line);
    if (fields.size() != 2)
      fail(ErrorCode::ParseError, path + " line " + std::to_string(lineno) + ": expected 'node,value'");
    const int node = parse_int(fields[0], path, lineno);
    if (node != static_cast<int>(values.size()))
      fail(ErrorCode::ParseError,
           path + " line " + std::to_string(lineno) + ": nodes must appear in order 0..n-1");
    values.push_back(parse_double(fields[1], path, lineno));
  }
  if (values.empty()) fail(ErrorCode::ParseError, path + ": no signal rows");
  return values;
}

void write_labels_csv(const std::string& path, const std::vector<int>& labels) {
  auto os = open_output(path);
  os << "node,class\n";
  for (size_t i = 0; i < labels.size(); ++i) os << i << ',' << labels[i] << '\n';
}

std::vector<std::pair<int, int>> read_labels_csv(const std::string& path) {
  auto is = open_input(path);
  std::string line;
  int lineno = 0;
  std::vector<std::pair<int, int>> labels;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    if (lineno == 1 && line.rfind("node", 0) == 0) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2)
      fail(ErrorCode::ParseError, path + " line " + std::to_string(lineno) + ": expected 'node,class'");
    labels.emplace_back(parse_int(fields[0], path, lineno), parse_int(fields[1], path, lineno));
  }
  if (labels.empty()) fail(ErrorCode::ParseError, path + ": no label rows");
  return labels;
}

std::vector<std::vector<double>> read_features_csv(const std::string& path) {
  auto is = open_input(path);
  std::string line;
  int lineno = 0;
  std::vector<std::vector<double>> rows;
  bool first = true;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (first) {
      first = false;
      // Header row: any non-numeric first field marks it.
      try {
        size_t consumed = 0;
        std::stod(fields[0], &consumed);
        if (consumed != fields[0].size()) continue;
      } catch (...) {
        continue;
      }
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_double(f, path, lineno));
    if (!rows.empty() && rows.back().size() != row.size())
      fail(ErrorCode::ParseError, path + " line " + std::to_string(lineno) + ": ragged feature row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorCode::ParseError, path + ": no feature rows");
  return rows;
}

void write_text_file(const std::string& path, const std::string& content) {
  auto os = open_output(path);
  os << content;
}

}  // namespace gtf
