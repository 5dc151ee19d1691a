#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace qmetro {

/// Machine-readable run report. Rows are pre-formatted strings (doubles at 17
/// significant digits) so CSV output is byte-stable for identical inputs and
/// seed. The CSV form carries no timestamp for exactly that reason; the JSON
/// form includes one in its meta block.
struct Report {
  std::string command;
  std::uint64_t seed = 0;
  std::string scenario_hash;  // empty when no scenario file is involved
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::pair<std::string, std::string>> summary;
};

std::string format_g17(double v);
std::string to_csv(const Report& report);
std::string to_json(const Report& report, bool with_timestamp = true);

}  // namespace qmetro
