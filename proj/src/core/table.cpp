#include "table.hpp"

#include <cmath>
#include <cstdio>

#include "errors.hpp"

namespace rshd {

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size())
    throw_error(ErrorCode::invalid_argument, "table row width mismatch");
  rows_.push_back(std::move(row));
}

std::string Table::format_cell(const Cell& cell) {
  if (std::holds_alternative<std::string>(cell))
    return std::get<std::string>(cell);
  if (std::holds_alternative<std::int64_t>(cell))
    return std::to_string(std::get<std::int64_t>(cell));
  const double v = std::get<double>(cell);
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  // shortest representation that still round-trips
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) break;
  }
  return buf;
}

std::string Table::to_csv(const std::vector<std::string>& comment_lines) const {
  std::string out;
  for (const auto& line : comment_lines) out += "# " + line + "\n";
  for (size_t j = 0; j < columns_.size(); ++j) {
    if (j) out += ',';
    out += columns_[j];
  }
  out += '\n';
  for (const auto& row : rows_) {
    for (size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += format_cell(row[j]);
    }
    out += '\n';
  }
  return out;
}

} // namespace rshd
