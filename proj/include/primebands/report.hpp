#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <utility>

#include <json.hpp>

#include "primebands/stats.hpp"

namespace primebands {

enum class ReportFormat { csv, json, text };

inline std::optional<ReportFormat> parse_format(std::string_view s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  if (s == "text") return ReportFormat::text;
  return std::nullopt;
}

/// A deviation table: rows sorted by x, plus the configuration that makes
/// the run reproducible.
struct Report {
  std::string title;
  std::vector<std::pair<std::string, std::string>> metadata;  // ordered, values non-empty
  std::vector<DeviationRow> rows;

  friend bool operator==(const Report&, const Report&) = default;
};

namespace detail {

inline std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

inline std::string fmt_sig6(double v) { return fmt("%.6g", v); }
inline std::string fmt_fixed2(double v) { return fmt("%.2f", v); }

inline void validate_report(const Report& r) {
  if (r.title.empty()) throw std::invalid_argument("report: title must not be empty");
  for (const auto& [key, value] : r.metadata)
    if (key.empty() || value.empty())
      throw std::invalid_argument("report: metadata entries must be complete");
  for (std::size_t i = 1; i < r.rows.size(); ++i)
    if (r.rows[i].x <= r.rows[i - 1].x)
      throw std::invalid_argument("report: rows must be sorted by x ascending");
}

}  // namespace detail

inline nlohmann::ordered_json report_to_json(const Report& r) {
  detail::validate_report(r);
  nlohmann::ordered_json j;
  j["title"] = r.title;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [key, value] : r.metadata) meta[key] = value;
  j["metadata"] = meta;
  j["rows"] = nlohmann::ordered_json::array();
  for (const DeviationRow& row : r.rows) {
    nlohmann::ordered_json jr;
    jr["x"] = row.x;
    jr["actual"] = row.actual;
    jr["predicted"] = row.predicted;
    jr["predicted_rounded"] = static_cast<i64>(std::llround(row.predicted));
    jr["difference"] = row.difference;
    jr["sd"] = row.sd;
    jr["z"] = row.z;
    jr["band_probability"] = row.band_probability;
    j["rows"].push_back(std::move(jr));
  }
  return j;
}

inline Report report_from_json(const std::string& text) {
  const auto j = nlohmann::ordered_json::parse(text);
  Report r;
  r.title = j.at("title").get<std::string>();
  for (const auto& [key, value] : j.at("metadata").items())
    r.metadata.emplace_back(key, value.get<std::string>());
  for (const auto& jr : j.at("rows")) {
    DeviationRow row;
    row.x = jr.at("x").get<u64>();
    row.actual = jr.at("actual").get<u64>();
    row.predicted = jr.at("predicted").get<double>();
    row.difference = jr.at("difference").get<double>();
    row.sd = jr.at("sd").get<double>();
    row.z = jr.at("z").get<double>();
    row.band_probability = jr.at("band_probability").get<double>();
    r.rows.push_back(row);
  }
  return r;
}

/// Byte-stable rendering. CSV carries the pinned columns
/// x,actual,predicted,difference,sd,z,band_probability (predicted/sd at six
/// significant digits, difference at two decimals); JSON mirrors every field
/// at full precision plus the rounded prediction; text is an aligned table.
inline std::string render(const Report& r, ReportFormat format) {
  detail::validate_report(r);
  switch (format) {
    case ReportFormat::csv: {
      std::string out = "x,actual,predicted,difference,sd,z,band_probability\n";
      for (const DeviationRow& row : r.rows) {
        out += std::to_string(row.x) + "," + std::to_string(row.actual) + "," +
               detail::fmt_sig6(row.predicted) + "," + detail::fmt_fixed2(row.difference) +
               "," + detail::fmt_sig6(row.sd) + "," + detail::fmt_sig6(row.z) + "," +
               detail::fmt_sig6(row.band_probability) + "\n";
      }
      return out;
    }
    case ReportFormat::json:
      return report_to_json(r).dump(2) + "\n";
    case ReportFormat::text: {
      std::string out = r.title + "\n";
      for (const auto& [key, value] : r.metadata) out += "  " + key + ": " + value + "\n";
      char buf[200];
      std::snprintf(buf, sizeof(buf), "%12s %10s %14s %12s %10s %8s %8s\n", "x", "actual",
                    "predicted", "difference", "sd", "z", "band");
      out += buf;
      for (const DeviationRow& row : r.rows) {
        std::snprintf(buf, sizeof(buf), "%12llu %10llu %14.4f %12.2f %10.4f %8.3f %8.5f\n",
                      static_cast<unsigned long long>(row.x),
                      static_cast<unsigned long long>(row.actual), row.predicted,
                      row.difference, row.sd, row.z, row.band_probability);
        out += buf;
      }
      return out;
    }
  }
  throw std::invalid_argument("render: unknown report format");
}

}  // namespace primebands
