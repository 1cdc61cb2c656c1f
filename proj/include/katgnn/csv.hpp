#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace katgnn {

// Parsed CSV file with a named header. Fields are plain (no quoting); all the
// file formats in this project use simple identifiers and numbers.
class CsvTable {
 public:
  CsvTable(std::string path, std::vector<std::string> header,
           std::vector<std::vector<std::string>> rows,
           std::vector<size_t> line_numbers);

  // Reads and validates the header; errors name the file and missing column.
  static CsvTable read(const std::string& path,
                       const std::vector<std::string>& required_columns);

  size_t num_rows() const { return rows_.size(); }
  const std::string& path() const { return path_; }
  // 1-based line number in the source file (header is line 1).
  size_t line(size_t row) const { return line_numbers_[row]; }

  const std::string& field(size_t row, const std::string& column) const;
  double field_double(size_t row, const std::string& column) const;
  int64_t field_int(size_t row, const std::string& column) const;

 private:
  size_t column_index(const std::string& column) const;

  std::string path_;
  std::vector<std::string> header_;
  std::map<std::string, size_t> column_index_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<size_t> line_numbers_;
};

std::vector<std::string> split_csv_line(const std::string& line);
std::string join_csv(const std::vector<std::string>& fields);

// Shortest decimal form that round-trips the exact double value.
std::string format_double(double v);
// Fixed-precision form for report files.
std::string format_fixed(double v, int digits);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace katgnn
