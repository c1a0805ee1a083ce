#pragma once

#include <string>

#include <json.hpp>

#include "scenario.hpp"

namespace qlab {

/// Shortest round-trip decimal form.
std::string format_number(double v);

std::string to_csv(const Table& t);
nlohmann::json to_json(const Table& t);

struct ManifestInfo {
  std::string command;
  std::string config_origin;
  std::string config_text;  // resolved config, re-runnable on its own
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::string started_utc;
  std::string finished_utc;
  std::string csv_path;
};

nlohmann::json make_manifest(const ManifestInfo& info, const RunResult& r);

/// Read the resolved config back out of a manifest.
std::string config_text_from_manifest(const std::string& json_text);

std::string utc_now();

void write_file(const std::string& path, const std::string& content);

}  // namespace qlab
