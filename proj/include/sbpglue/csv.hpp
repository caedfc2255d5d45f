#pragma once

#include <string>
#include <variant>
#include <vector>

namespace sbpglue {

/// 17 significant digits, so values round-trip through text exactly.
std::string format_number(double x);

using CsvCell = std::variant<std::string, int, double>;

/// Small CSV table; cells never contain commas, so no quoting is done.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(std::vector<CsvCell> row);
  std::string str() const;
  /// Writes str() to dir/name, creating dir if needed. Throws Io on failure.
  std::string write(const std::string& dir, const std::string& name) const;
  size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<CsvCell>> rows_;
};

}  // namespace sbpglue
