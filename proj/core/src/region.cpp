#include "smi/region.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "smi/error.hpp"

namespace smi::geo {

using nlohmann::json;

std::string_view to_string(Level level) {
  switch (level) {
    case Level::country: return "country";
    case Level::state: return "state";
    case Level::city: return "city";
  }
  return "unknown";
}

std::optional<Level> parse_level(std::string_view text) {
  if (text == "country") return Level::country;
  if (text == "state") return Level::state;
  if (text == "city") return Level::city;
  return std::nullopt;
}

namespace {

bool on_segment(const Point& p, const Point& a, const Point& b) {
  const double cross = (b.longitude - a.longitude) * (p.latitude - a.latitude) -
                       (b.latitude - a.latitude) * (p.longitude - a.longitude);
  const double scale = std::max({std::fabs(b.longitude - a.longitude),
                                 std::fabs(b.latitude - a.latitude), 1.0});
  if (std::fabs(cross) > 1e-12 * scale) return false;
  return p.longitude >= std::min(a.longitude, b.longitude) &&
         p.longitude <= std::max(a.longitude, b.longitude) &&
         p.latitude >= std::min(a.latitude, b.latitude) &&
         p.latitude <= std::max(a.latitude, b.latitude);
}

}  // namespace

Containment locate(const Point& p, const Polygon& polygon) {
  bool inside = false;
  for (const Ring& ring : polygon) {
    for (std::size_t i = 1; i < ring.size(); ++i) {
      const Point& a = ring[i - 1];
      const Point& b = ring[i];
      if (on_segment(p, a, b)) return Containment::boundary;
      if ((a.latitude > p.latitude) != (b.latitude > p.latitude)) {
        const double x = a.longitude + (b.longitude - a.longitude) * (p.latitude - a.latitude) /
                                           (b.latitude - a.latitude);
        if (p.longitude < x) inside = !inside;
      }
    }
  }
  return inside ? Containment::inside : Containment::outside;
}

void RegionIndex::add(Region region) {
  if (region.id.empty()) throw ConfigError("region without region_id");
  for (Polygon& polygon : region.polygons) {
    for (Ring& ring : polygon) {
      if (ring.size() < 4 || !(ring.front() == ring.back())) {
        throw ConfigError("region " + region.id + ": polygon ring is not closed");
      }
      for (const Point& p : ring) {
        if (!valid(p)) throw ConfigError("region " + region.id + ": vertex out of range");
        region.min_lat = std::min(region.min_lat, p.latitude);
        region.max_lat = std::max(region.max_lat, p.latitude);
        region.min_lon = std::min(region.min_lon, p.longitude);
        region.max_lon = std::max(region.max_lon, p.longitude);
      }
    }
  }
  auto& list = by_level_[region.level];
  for (const Region& existing : list) {
    if (existing.id == region.id) {
      throw ConfigError("duplicate region_id '" + region.id + "' at level " +
                        std::string(to_string(region.level)));
    }
  }
  list.push_back(std::move(region));
  std::sort(list.begin(), list.end(), [](const Region& a, const Region& b) { return a.id < b.id; });
}

bool RegionIndex::has_level(Level level) const {
  auto it = by_level_.find(level);
  return it != by_level_.end() && !it->second.empty();
}

const std::vector<Region>& RegionIndex::regions(Level level) const {
  static const std::vector<Region> kEmpty;
  auto it = by_level_.find(level);
  return it == by_level_.end() ? kEmpty : it->second;
}

std::optional<std::string> RegionIndex::assign(const Point& p, Level level) const {
  if (!has_level(level)) {
    throw ConfigError("no region geometry loaded for level '" + std::string(to_string(level)) +
                      "'");
  }
  // Regions are kept sorted by id, so the first hit is the smallest id.
  for (const Region& r : by_level_.at(level)) {
    if (p.latitude < r.min_lat || p.latitude > r.max_lat || p.longitude < r.min_lon ||
        p.longitude > r.max_lon) {
      continue;
    }
    for (const Polygon& polygon : r.polygons) {
      if (locate(p, polygon) != Containment::outside) return r.id;
    }
  }
  return std::nullopt;
}

namespace {

Ring parse_ring(const json& coords, const std::string& id) {
  Ring ring;
  for (const json& c : coords) {
    if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number()) {
      throw ConfigError("region " + id + ": malformed coordinate");
    }
    ring.push_back(Point{c[1].get<double>(), c[0].get<double>()});
  }
  return ring;
}

Polygon parse_polygon(const json& rings, const std::string& id) {
  if (!rings.is_array() || rings.empty()) throw ConfigError("region " + id + ": empty polygon");
  Polygon polygon;
  for (const json& ring : rings) polygon.push_back(parse_ring(ring, id));
  return polygon;
}

}  // namespace

RegionIndex RegionIndex::parse_geojson(std::string_view text, std::string_view source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string(source) + ": invalid GeoJSON: " + e.what());
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array()) {
    throw ConfigError(std::string(source) + ": expected a GeoJSON FeatureCollection");
  }
  RegionIndex index;
  try {
  for (const json& feature : doc["features"]) {
    const json props = feature.value("properties", json::object());
    Region region;
    region.id = props.value("region_id", "");
    region.name = props.value("name", region.id);
    const auto level = parse_level(props.value("level", ""));
    if (!level) {
      throw ConfigError(std::string(source) + ": feature '" + region.id +
                        "' has no valid level (country|state|city)");
    }
    region.level = *level;
    const json& geometry = feature.at("geometry");
    const std::string type = geometry.value("type", "");
    if (type == "Polygon") {
      region.polygons.push_back(parse_polygon(geometry.at("coordinates"), region.id));
    } else if (type == "MultiPolygon") {
      for (const json& poly : geometry.at("coordinates")) {
        region.polygons.push_back(parse_polygon(poly, region.id));
      }
    } else {
      throw ConfigError(std::string(source) + ": feature '" + region.id +
                        "' geometry must be Polygon or MultiPolygon");
    }
    index.add(std::move(region));
  }
  } catch (const json::exception& e) {
    throw ConfigError(std::string(source) + ": malformed feature: " + e.what());
  }
  return index;
}

RegionIndex RegionIndex::load_geojson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open region geometry file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_geojson(buffer.str(), path);
}

}  // namespace smi::geo
