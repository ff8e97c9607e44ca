#include "smi/ingest.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <tuple>
#include <unordered_set>

#include "json.hpp"
#include "smi/error.hpp"

namespace smi::ingest {

using nlohmann::json;

std::string_view to_string(PlaceType type) {
  switch (type) {
    case PlaceType::poi: return "poi";
    case PlaceType::neighborhood: return "neighborhood";
    case PlaceType::city: return "city";
    case PlaceType::admin: return "admin";
    case PlaceType::country: return "country";
  }
  return "unknown";
}

std::optional<PlaceType> parse_place_type(std::string_view text) {
  if (text == "poi") return PlaceType::poi;
  if (text == "neighborhood") return PlaceType::neighborhood;
  if (text == "city") return PlaceType::city;
  if (text == "admin" || text == "state") return PlaceType::admin;
  if (text == "country") return PlaceType::country;
  return std::nullopt;
}

std::string_view to_string(Resolution r) {
  return r == Resolution::exact_coordinates ? "exact_coordinates" : "place_center";
}

std::string_view to_string(SkipReason reason) {
  switch (reason) {
    case SkipReason::malformed: return "malformed";
    case SkipReason::no_location: return "no_location";
    case SkipReason::invalid_coordinate: return "invalid_coordinate";
    case SkipReason::poi_excluded: return "poi_excluded";
    case SkipReason::duplicate: return "duplicate";
  }
  return "unknown";
}

namespace {

// Thrown inside the parser to unwind to a skip reason.
struct Skip {
  SkipReason reason;
};

std::string id_field(const json& obj, std::initializer_list<const char*> keys) {
  for (const char* key : keys) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) continue;
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<long long>());
    if (it->is_number_unsigned()) return std::to_string(it->get<unsigned long long>());
    throw Skip{SkipReason::malformed};
  }
  return {};
}

bool clean_id(const std::string& id) {
  return !id.empty() && id.find_first_of("\t\r\n") == std::string::npos;
}

geo::Point lonlat(const json& pair) {
  if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
    throw Skip{SkipReason::malformed};
  }
  geo::Point p{pair[1].get<double>(), pair[0].get<double>()};
  if (!geo::valid(p)) throw Skip{SkipReason::invalid_coordinate};
  return p;
}

std::optional<geo::Point> parse_coordinates(const json& record) {
  auto it = record.find("coordinates");
  if (it == record.end() || it->is_null()) return std::nullopt;
  if (it->is_array()) return lonlat(*it);
  if (it->is_object()) {  // Twitter GeoJSON point
    auto inner = it->find("coordinates");
    if (inner == it->end()) throw Skip{SkipReason::malformed};
    return lonlat(*inner);
  }
  throw Skip{SkipReason::malformed};
}

std::optional<PlaceInfo> parse_place(const json& record) {
  auto it = record.find("place");
  if (it == record.end() || it->is_null()) return std::nullopt;
  if (!it->is_object()) throw Skip{SkipReason::malformed};
  const json& place = *it;
  PlaceInfo info;
  info.place_id = id_field(place, {"place_id", "id"});
  const auto type = parse_place_type(place.value("place_type", ""));
  if (!type) throw Skip{SkipReason::malformed};
  info.place_type = *type;
  info.name = place.value("name", "");
  info.full_name = place.value("full_name", "");
  info.country_code = place.value("country_code", "");

  auto bb = place.find("bounding_box");
  if (bb == place.end() || bb->is_null()) throw Skip{SkipReason::malformed};
  const json* corners = &*bb;
  if (bb->is_object()) {  // Twitter: {"type":"Polygon","coordinates":[[[lon,lat] x4]]}
    auto coords = bb->find("coordinates");
    if (coords == bb->end() || !coords->is_array() || coords->size() != 1) {
      throw Skip{SkipReason::malformed};
    }
    corners = &(*coords)[0];
  }
  if (!corners->is_array() || corners->size() < 4) throw Skip{SkipReason::malformed};
  for (std::size_t i = 0; i < 4; ++i) info.bounding_box[i] = lonlat((*corners)[i]);
  return info;
}

RawEvent parse_record(std::string_view line) {
  json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (record.is_discarded() || !record.is_object()) throw Skip{SkipReason::malformed};

  RawEvent raw;
  raw.event_id = id_field(record, {"event_id", "id_str", "id"});
  raw.user_id = id_field(record, {"user_id"});
  if (raw.user_id.empty()) {
    auto user = record.find("user");
    if (user != record.end() && user->is_object()) raw.user_id = id_field(*user, {"id_str", "id"});
  }
  if (!clean_id(raw.event_id) || !clean_id(raw.user_id)) throw Skip{SkipReason::malformed};

  std::optional<Instant> ts;
  for (const char* key : {"timestamp", "created_at", "timestamp_ms"}) {
    auto it = record.find(key);
    if (it == record.end() || it->is_null()) continue;
    if (it->is_number_integer()) {
      long long v = it->get<long long>();
      if (std::string_view(key) == "timestamp_ms") v /= 1000;
      ts = Instant{std::chrono::seconds{v}};
    } else if (it->is_string()) {
      ts = parse_timestamp(it->get<std::string>());
      if (ts && std::string_view(key) == "timestamp_ms") {
        ts = Instant{std::chrono::seconds{ts->time_since_epoch().count() / 1000}};
      }
    }
    break;
  }
  if (!ts) throw Skip{SkipReason::malformed};
  raw.timestamp = *ts;

  raw.coordinates = parse_coordinates(record);
  raw.place = parse_place(record);
  if (!raw.coordinates && !raw.place) throw Skip{SkipReason::no_location};
  return raw;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool contains_ci(std::string_view haystack, std::string_view needle) {
  return !needle.empty() && lower(haystack).find(lower(needle)) != std::string::npos;
}

constexpr std::array<std::string_view, 6> kNycBoroughs = {
    "Brooklyn", "Manhattan", "Queens", "Staten Island", "The Bronx", "Bronx"};

}  // namespace

std::variant<RawEvent, SkipReason> parse_event(std::string_view line) {
  try {
    return parse_record(line);
  } catch (const Skip& skip) {
    return skip.reason;
  } catch (const json::exception&) {
    return SkipReason::malformed;
  }
}

geo::Point bounding_box_center(const std::array<geo::Point, 4>& box) {
  double min_lat = 90, max_lat = -90, min_lon = 180, max_lon = -180;
  for (const geo::Point& p : box) {
    min_lat = std::min(min_lat, p.latitude);
    max_lat = std::max(max_lat, p.latitude);
    min_lon = std::min(min_lon, p.longitude);
    max_lon = std::max(max_lon, p.longitude);
  }
  double lon = 0.5 * (min_lon + max_lon);
  if (max_lon - min_lon > 180) {
    // Crosses the antimeridian: unwrap western longitudes by a full turn.
    double lo = 540, hi = -540;
    for (const geo::Point& p : box) {
      const double x = p.longitude < 0 ? p.longitude + 360 : p.longitude;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    lon = 0.5 * (lo + hi);
    if (lon > 180) lon -= 360;
  }
  if (lon == -180) lon = 180;
  return {0.5 * (min_lat + max_lat), lon};
}

std::optional<std::string> match_city(const PlaceInfo& place,
                                      const std::vector<std::string>& city_names) {
  for (const std::string& city : city_names) {
    if (contains_ci(place.name, city) || contains_ci(place.full_name, city)) return city;
  }
  for (const std::string& city : city_names) {
    if (!contains_ci(city, "new york")) continue;
    for (std::string_view borough : kNycBoroughs) {
      if (contains_ci(place.name, borough) || contains_ci(place.full_name, borough)) return city;
    }
  }
  return std::nullopt;
}

std::variant<GeoEvent, SkipReason> resolve_location(const RawEvent& raw, AnalysisMode mode,
                                                    const std::vector<std::string>& city_names) {
  GeoEvent event;
  event.event_id = raw.event_id;
  event.user_id = raw.user_id;
  event.timestamp = raw.timestamp;
  if (raw.place) event.place_type = raw.place->place_type;

  if (raw.coordinates) {
    event.latitude = raw.coordinates->latitude;
    event.longitude = raw.coordinates->longitude;
    event.resolution = Resolution::exact_coordinates;
    return event;
  }
  if (!raw.place) return SkipReason::no_location;

  const PlaceInfo& place = *raw.place;
  const bool fine_grained =
      place.place_type == PlaceType::poi || place.place_type == PlaceType::neighborhood;
  if (fine_grained) {
    if (mode == AnalysisMode::state_analysis) return SkipReason::poi_excluded;
    if (!match_city(place, city_names)) return SkipReason::poi_excluded;
  }
  const geo::Point center = bounding_box_center(place.bounding_box);
  event.latitude = center.latitude;
  event.longitude = center.longitude;
  event.resolution = Resolution::place_center;
  return event;
}

std::size_t IngestCounters::skipped_total() const {
  std::size_t total = 0;
  for (const auto& [reason, n] : skipped) total += n;
  return total;
}

void IngestCounters::merge(const IngestCounters& other) {
  lines += other.lines;
  emitted += other.emitted;
  for (const auto& [reason, n] : other.skipped) skipped[reason] += n;
}

void sort_events(std::vector<GeoEvent>& events) {
  std::sort(events.begin(), events.end(), [](const GeoEvent& a, const GeoEvent& b) {
    return std::tie(a.user_id, a.timestamp, a.event_id) <
           std::tie(b.user_id, b.timestamp, b.event_id);
  });
}

namespace {

struct LineOutcome {
  std::string event_id;  // empty when the line failed to parse
  std::variant<GeoEvent, SkipReason> result;
};

std::vector<LineOutcome> process_shard(std::string_view shard, const IngestOptions& options) {
  std::vector<LineOutcome> out;
  std::size_t pos = 0;
  while (pos < shard.size()) {
    std::size_t end = shard.find('\n', pos);
    if (end == std::string_view::npos) end = shard.size();
    std::string_view line = shard.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    auto parsed = parse_event(line);
    if (auto* skip = std::get_if<SkipReason>(&parsed)) {
      out.push_back({{}, *skip});
      continue;
    }
    const RawEvent& raw = std::get<RawEvent>(parsed);
    out.push_back({raw.event_id, resolve_location(raw, options.mode, options.city_names)});
  }
  return out;
}

}  // namespace

IngestResult ingest_shards(const std::vector<std::string>& shards, const IngestOptions& options,
                           const WorkerPool& pool) {
  std::vector<std::vector<LineOutcome>> outcomes(shards.size());
  pool.parallel_for(shards.size(), [&](std::size_t i) {
    outcomes[i] = process_shard(shards[i], options);
  });

  IngestResult result;
  result.per_file.resize(shards.size());
  std::unordered_set<std::string> seen;
  for (std::size_t f = 0; f < outcomes.size(); ++f) {
    IngestCounters& counters = result.per_file[f];
    for (LineOutcome& line : outcomes[f]) {
      ++counters.lines;
      if (!line.event_id.empty() && !seen.insert(line.event_id).second) {
        ++counters.skipped[SkipReason::duplicate];
        continue;
      }
      if (auto* skip = std::get_if<SkipReason>(&line.result)) {
        ++counters.skipped[*skip];
        continue;
      }
      ++counters.emitted;
      result.events.push_back(std::move(std::get<GeoEvent>(line.result)));
    }
    result.counters.merge(counters);
  }
  sort_events(result.events);
  return result;
}

std::string read_possibly_gzipped(const std::string& path) {
  gzFile file = gzopen(path.c_str(), "rb");
  if (!file) throw DataError("cannot open input " + path);
  std::string content;
  char buffer[1 << 16];
  for (;;) {
    const int n = gzread(file, buffer, sizeof buffer);
    if (n < 0) {
      int code = 0;
      std::string message = gzerror(file, &code);
      gzclose(file);
      throw DataError("error reading " + path + ": " + message);
    }
    if (n == 0) break;
    content.append(buffer, static_cast<std::size_t>(n));
  }
  gzclose(file);
  return content;
}

IngestResult ingest_files(const std::vector<std::string>& paths, const IngestOptions& options,
                          const WorkerPool& pool) {
  std::vector<std::string> shards(paths.size());
  pool.parallel_for(paths.size(), [&](std::size_t i) { shards[i] = read_possibly_gzipped(paths[i]); });
  return ingest_shards(shards, options, pool);
}

}  // namespace smi::ingest
