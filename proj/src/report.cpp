#include "qmetro/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <sstream>

#include <json.hpp>

#include "qmetro/version.hpp"

namespace qmetro {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string to_csv(const Report& report) {
  std::ostringstream out;
  out << "# tool=qmetro version=" << kVersion << " command=" << report.command << "\n";
  out << "# seed=" << report.seed << "\n";
  if (!report.scenario_hash.empty()) out << "# scenario_hash=" << report.scenario_hash << "\n";
  for (std::size_t c = 0; c < report.columns.size(); ++c) {
    if (c) out << ",";
    out << report.columns[c];
  }
  out << "\n";
  for (const auto& row : report.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ",";
      out << row[c];
    }
    out << "\n";
  }
  for (const auto& [key, value] : report.summary)
    out << "# summary " << key << "=" << value << "\n";
  return out.str();
}

std::string to_json(const Report& report, bool with_timestamp) {
  nlohmann::json doc;
  doc["meta"]["tool"] = "qmetro";
  doc["meta"]["version"] = std::string(kVersion);
  doc["meta"]["command"] = report.command;
  doc["meta"]["seed"] = report.seed;
  doc["meta"]["scenario_hash"] =
      report.scenario_hash.empty() ? nlohmann::json() : nlohmann::json(report.scenario_hash);
  if (with_timestamp) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    doc["meta"]["timestamp"] = buf;
  } else {
    doc["meta"]["timestamp"] = nullptr;
  }
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    nlohmann::json obj;
    for (std::size_t c = 0; c < row.size() && c < report.columns.size(); ++c)
      obj[report.columns[c]] = row[c];
    rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows);
  nlohmann::json summary;
  for (const auto& [key, value] : report.summary) summary[key] = value;
  doc["summary"] = std::move(summary);
  return doc.dump(2) + "\n";
}

}  // namespace qmetro
