#pragma once

// Tabular report shared by all commands, written either as CSV with a
// `# key: value` comment header or as a schema-1 JSON document.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace cbtree::cli {

using Cell = std::variant<std::monostate, double, std::int64_t, std::string, bool>;

struct Report {
  std::string command;
  std::vector<std::pair<std::string, Cell>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_meta(std::string key, Cell value) { meta.emplace_back(std::move(key), std::move(value)); }
};

void write_report(const Report& report, const std::string& format, std::ostream& out);

}  // namespace cbtree::cli
