#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "smi/geo.hpp"
#include "smi/parallel.hpp"
#include "smi/time.hpp"

namespace smi::ingest {

enum class PlaceType { poi, neighborhood, city, admin, country };

std::string_view to_string(PlaceType type);
std::optional<PlaceType> parse_place_type(std::string_view text);

struct PlaceInfo {
  std::string place_id;
  PlaceType place_type = PlaceType::city;
  std::string name;
  std::string full_name;
  std::string country_code;
  std::array<geo::Point, 4> bounding_box{};
};

struct RawEvent {
  std::string event_id;
  std::string user_id;
  Instant timestamp{};
  std::optional<geo::Point> coordinates;
  std::optional<PlaceInfo> place;
};

enum class Resolution { exact_coordinates, place_center };

std::string_view to_string(Resolution r);

struct GeoEvent {
  std::string event_id;
  std::string user_id;
  Instant timestamp{};
  double latitude = 0;
  double longitude = 0;
  Resolution resolution = Resolution::exact_coordinates;
  std::optional<PlaceType> place_type;

  geo::Point point() const { return {latitude, longitude}; }
  friend bool operator==(const GeoEvent&, const GeoEvent&) = default;
};

enum class SkipReason {
  malformed,           // not JSON, or a required field missing / unparseable
  no_location,         // neither coordinates nor place
  invalid_coordinate,  // coordinate or bounding-box corner out of range
  poi_excluded,        // place-only POI/neighborhood dropped by the analysis mode
  duplicate,           // event_id seen earlier in the input
};

inline constexpr std::array kSkipReasons = {SkipReason::malformed, SkipReason::no_location,
                                            SkipReason::invalid_coordinate,
                                            SkipReason::poi_excluded, SkipReason::duplicate};

std::string_view to_string(SkipReason reason);

enum class AnalysisMode { state_analysis, city_analysis };

/// Parses one JSONL record. Both the normalized schema (docs/event-schema.md)
/// and raw Twitter v1.1 status objects are accepted.
std::variant<RawEvent, SkipReason> parse_event(std::string_view line);

/// Midpoint of a bounding box. Boxes spanning more than 180 degrees of
/// longitude are taken to cross the antimeridian and use the shorter arc;
/// the result longitude is in (-180, 180].
geo::Point bounding_box_center(const std::array<geo::Point, 4>& box);

/// Canonical city a place name refers to, matching `city_names` as
/// case-insensitive substrings of name or full_name. When a New York city
/// name is configured, the five borough names also map to it.
std::optional<std::string> match_city(const PlaceInfo& place,
                                      const std::vector<std::string>& city_names);

std::variant<GeoEvent, SkipReason> resolve_location(const RawEvent& raw, AnalysisMode mode,
                                                    const std::vector<std::string>& city_names);

struct IngestCounters {
  std::size_t lines = 0;
  std::size_t emitted = 0;
  std::map<SkipReason, std::size_t> skipped;

  std::size_t skipped_total() const;
  void merge(const IngestCounters& other);
  friend bool operator==(const IngestCounters&, const IngestCounters&) = default;
};

struct IngestOptions {
  AnalysisMode mode = AnalysisMode::state_analysis;
  std::vector<std::string> city_names;
};

struct IngestResult {
  std::vector<GeoEvent> events;  // sorted by (user_id, timestamp, event_id)
  IngestCounters counters;
  std::vector<IngestCounters> per_file;
};

/// Ingests in-memory JSONL shards. Shards are parsed in parallel; duplicates
/// keep the first occurrence in (shard, line) order.
IngestResult ingest_shards(const std::vector<std::string>& shards, const IngestOptions& options,
                           const WorkerPool& pool = WorkerPool{1});

/// Reads `.jsonl` or gzip-compressed `.jsonl.gz` files (detected by content).
IngestResult ingest_files(const std::vector<std::string>& paths, const IngestOptions& options,
                          const WorkerPool& pool = WorkerPool{1});

std::string read_possibly_gzipped(const std::string& path);

/// Orders events by (user_id, timestamp, event_id).
void sort_events(std::vector<GeoEvent>& events);

// Event store: versioned line-based file. Layout documented in
// docs/formats.md.
inline constexpr std::string_view kEventStoreMagic = "# smi:events:v1";

void write_event_store(std::ostream& out, const std::vector<GeoEvent>& events,
                       const IngestCounters& counters);
void write_event_store(const std::string& path, const std::vector<GeoEvent>& events,
                       const IngestCounters& counters);

struct EventStore {
  std::vector<GeoEvent> events;
  IngestCounters counters;
};

EventStore read_event_store(std::istream& in, std::string_view source = "<stream>");
EventStore read_event_store(const std::string& path);

}  // namespace smi::ingest
