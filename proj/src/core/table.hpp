#ifndef RSHD_TABLE_HPP
#define RSHD_TABLE_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace rshd {

// Generic result table: what the CLI renders as CSV and what crosses the
// C API boundary. Doubles are formatted with full round-trip precision so
// re-running a command yields byte-identical files.
class Table {
public:
  using Cell = std::variant<double, std::int64_t, std::string>;

  explicit Table(std::vector<std::string> columns)
      : columns_(std::move(columns)) {}

  void add_row(std::vector<Cell> row);
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }

  static std::string format_cell(const Cell& cell);
  // comment_lines are emitted first, each prefixed with "# "
  std::string to_csv(const std::vector<std::string>& comment_lines = {}) const;

private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

} // namespace rshd

#endif
