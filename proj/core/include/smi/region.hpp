#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smi/geo.hpp"

namespace smi::geo {

enum class Level { country, state, city };

std::string_view to_string(Level level);
std::optional<Level> parse_level(std::string_view text);

// A linear ring in (longitude, latitude) degrees; first vertex == last.
using Ring = std::vector<Point>;

// One polygon: outer ring followed by holes. Containment uses the even-odd
// rule over all rings, so holes need no special casing.
using Polygon = std::vector<Ring>;

struct Region {
  std::string id;
  std::string name;
  Level level = Level::state;
  std::vector<Polygon> polygons;
  double min_lat = 90, max_lat = -90, min_lon = 180, max_lon = -180;
};

// Where a point lies relative to a polygon.
enum class Containment { outside, inside, boundary };

Containment locate(const Point& p, const Polygon& polygon);

// Immutable set of region geometries grouped by level.
class RegionIndex {
 public:
  RegionIndex() = default;

  // Loads a GeoJSON FeatureCollection. Each feature carries properties
  // `region_id` and `level` (country|state|city), optionally `name`, and a
  // Polygon or MultiPolygon geometry. Throws ConfigError on bad input.
  static RegionIndex load_geojson(const std::string& path);
  static RegionIndex parse_geojson(std::string_view text, std::string_view source = "<geojson>");

  // Throws ConfigError on unclosed rings or duplicate ids within a level.
  void add(Region region);

  bool has_level(Level level) const;
  const std::vector<Region>& regions(Level level) const;

  // Region whose polygon contains p (boundary counts as inside). When
  // several match, the lexicographically smallest region_id wins. Throws
  // ConfigError when no geometry is loaded for the level.
  std::optional<std::string> assign(const Point& p, Level level) const;

 private:
  std::map<Level, std::vector<Region>> by_level_;
};

}  // namespace smi::geo
