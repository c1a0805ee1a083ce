#include "output.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>

#ifndef QNOISE_VERSION
#define QNOISE_VERSION "unknown"
#endif

namespace qlab {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.header.size(); ++i) out += (i ? "," : "") + t.header[i];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      out += format_number(row[i]);
    }
    out += "\n";
  }
  return out;
}

nlohmann::json to_json(const Table& t) {
  nlohmann::json j;
  j["columns"] = t.header;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) {
    nlohmann::json row = nlohmann::json::array();
    for (double v : r) row.push_back(std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr));
    rows.push_back(row);
  }
  j["rows"] = rows;
  return j;
}

nlohmann::json make_manifest(const ManifestInfo& info, const RunResult& r) {
  nlohmann::json m;
  m["tool"] = "qnoise-lab";
  m["version"] = QNOISE_VERSION;
  m["command"] = info.command;
  m["config_origin"] = info.config_origin;
  m["config"] = info.config_text;
  if (info.has_seed) m["seed"] = info.seed;
  m["started_utc"] = info.started_utc;
  m["finished_utc"] = info.finished_utc;
  m["derived"] = r.derived;
  m["warnings"] = r.warnings;
  if (!info.csv_path.empty()) m["csv"] = info.csv_path;
  m["rows"] = r.table.rows.size();
  m["columns"] = r.table.header;
  return m;
}

std::string config_text_from_manifest(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  if (!j.contains("config") || !j["config"].is_string())
    throw ParseError("<manifest>", 0, "manifest has no 'config' string");
  return j["config"].get<std::string>();
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
  if (!f) throw std::runtime_error("write failed for " + path);
}

}  // namespace qlab
