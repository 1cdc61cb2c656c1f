#include "katgnn/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace katgnn {

CsvTable::CsvTable(std::string path, std::vector<std::string> header,
                   std::vector<std::vector<std::string>> rows,
                   std::vector<size_t> line_numbers)
    : path_(std::move(path)),
      header_(std::move(header)),
      rows_(std::move(rows)),
      line_numbers_(std::move(line_numbers)) {
  for (size_t i = 0; i < header_.size(); ++i) column_index_[header_[i]] = i;
}

CsvTable CsvTable::read(const std::string& path,
                        const std::vector<std::string>& required_columns) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_csv_line(line);

  for (const auto& col : required_columns) {
    bool found = false;
    for (const auto& h : header) found |= (h == col);
    if (!found)
      throw std::runtime_error(path + ": line 1: missing column '" + col + "'");
  }

  std::vector<std::vector<std::string>> rows;
  std::vector<size_t> line_numbers;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": expected " + std::to_string(header.size()) +
                               " fields, got " + std::to_string(fields.size()));
    rows.push_back(std::move(fields));
    line_numbers.push_back(line_no);
  }
  return CsvTable(path, std::move(header), std::move(rows), std::move(line_numbers));
}

size_t CsvTable::column_index(const std::string& column) const {
  auto it = column_index_.find(column);
  if (it == column_index_.end())
    throw std::runtime_error(path_ + ": missing column '" + column + "'");
  return it->second;
}

const std::string& CsvTable::field(size_t row, const std::string& column) const {
  return rows_[row][column_index(column)];
}

double CsvTable::field_double(size_t row, const std::string& column) const {
  const std::string& s = field(row, column);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::runtime_error(path_ + ": line " + std::to_string(line(row)) +
                             ": column '" + column + "': cannot parse '" + s +
                             "' as a number");
  return v;
}

int64_t CsvTable::field_int(size_t row, const std::string& column) const {
  const std::string& s = field(row, column);
  int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::runtime_error(path_ + ": line " + std::to_string(line(row)) +
                             ": column '" + column + "': cannot parse '" + s +
                             "' as an integer");
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string join_csv(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += fields[i];
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return std::string(buf);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace katgnn
