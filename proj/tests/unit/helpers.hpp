#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "smi/ingest.hpp"
#include "smi/time.hpp"

namespace testing_helpers {

inline smi::Date day(const char* iso) { return *smi::parse_date(iso); }

inline smi::Instant at(const char* iso) { return *smi::parse_timestamp(iso); }

inline smi::ingest::GeoEvent event(std::string user, const char* when, double lat, double lon,
                                   std::string id = "") {
  smi::ingest::GeoEvent e;
  e.event_id = id.empty() ? user + "@" + when : std::move(id);
  e.user_id = std::move(user);
  e.timestamp = at(when);
  e.latitude = lat;
  e.longitude = lon;
  return e;
}

inline std::string data_path(const std::string& name) {
  return std::string(SMI_TEST_DATA_DIR) + "/" + name;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("smi_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testing_helpers
