#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace muxphoton {

/// One report cell. Non-finite doubles are written as `nan` in CSV and
/// `null` in JSON.
using Cell = std::variant<std::int64_t, std::uint64_t, double, std::string>;

/// Column-named table; the common shape of every CLI report.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

/// Shortest round-trip decimal representation, locale independent.
std::string format_number(double value);

void write_csv(std::ostream& os, const Table& table);

/// Array of objects keyed by column name.
nlohmann::ordered_json to_json(const Table& table);

}  // namespace muxphoton
