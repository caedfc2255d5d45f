#include "sbpglue/csv.hpp"

#include <filesystem>
#include <fstream>

#include <fmt/format.h>

#include "sbpglue/errors.hpp"

namespace sbpglue {

std::string format_number(double x) { return fmt::format("{:.17g}", x); }

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<CsvCell> row) {
  if (row.size() != header_.size())
    fail(ErrorCode::ShapeMismatch, "csv row has " + std::to_string(row.size()) + " cells, header has " +
                                       std::to_string(header_.size()));
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  for (size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + header_[i];
  out += '\n';
  for (const auto& row : rows_) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) out += v;
            else if constexpr (std::is_same_v<T, int>) out += std::to_string(v);
            else out += format_number(v);
          },
          row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string CsvTable::write(const std::string& dir, const std::string& name) const {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const std::string path = (std::filesystem::path(dir) / name).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  out << str();
  if (!out) fail(ErrorCode::Io, "write failed for " + path);
  return path;
}

}  // namespace sbpglue
