#include <gtest/gtest.h>

#include "smi/error.hpp"
#include "smi/region.hpp"

using namespace smi;
using geo::Containment;
using geo::Level;
using geo::Point;

namespace {

// Rings are (lat, lon) points; the square spans lon [x0, x1], lat [y0, y1].
geo::Ring square(double x0, double y0, double x1, double y1) {
  return {{y0, x0}, {y0, x1}, {y1, x1}, {y1, x0}, {y0, x0}};
}

std::string feature(const std::string& id, const std::string& level, const std::string& coords) {
  return R"({"type":"Feature","properties":{"region_id":")" + id + R"(","level":")" + level +
         R"(","name":")" + id + R"("},"geometry":{"type":"Polygon","coordinates":)" + coords + "}}";
}

std::string collection(const std::string& features) {
  return R"({"type":"FeatureCollection","features":[)" + features + "]}";
}

}  // namespace

TEST(Region, LocateInsideOutsideBoundary) {
  const geo::Polygon poly{square(0, 0, 10, 10)};
  EXPECT_EQ(geo::locate({5, 5}, poly), Containment::inside);
  EXPECT_EQ(geo::locate({15, 5}, poly), Containment::outside);
  EXPECT_EQ(geo::locate({0, 5}, poly), Containment::boundary);
  EXPECT_EQ(geo::locate({10, 10}, poly), Containment::boundary);
}

TEST(Region, HolesExcludePoints) {
  const geo::Polygon donut{square(0, 0, 10, 10), square(3, 3, 6, 6)};
  EXPECT_EQ(geo::locate({4, 4}, donut), Containment::outside);
  EXPECT_EQ(geo::locate({1, 1}, donut), Containment::inside);
}

TEST(Region, AssignPicksSmallestIdOnOverlap) {
  const auto index = geo::RegionIndex::parse_geojson(collection(
      feature("B", "state", "[[[0,0],[10,0],[10,10],[0,10],[0,0]]]") + "," +
      feature("A", "state", "[[[5,0],[15,0],[15,10],[5,10],[5,0]]]")));
  EXPECT_EQ(index.assign({5, 7}, Level::state), "A");
  EXPECT_EQ(index.assign({5, 2}, Level::state), "B");
  EXPECT_EQ(index.assign({5, 12}, Level::state), "A");
  EXPECT_FALSE(index.assign({50, 50}, Level::state));
  // Shared edge at lon 10 between B's boundary and A's interior.
  EXPECT_EQ(index.assign({5, 10}, Level::state), "A");
  EXPECT_THROW(index.assign({5, 5}, Level::city), ConfigError);
}

TEST(Region, MultiPolygon) {
  const auto index = geo::RegionIndex::parse_geojson(
      R"({"type":"FeatureCollection","features":[{"type":"Feature","properties":{"region_id":"M","level":"city"},)"
      R"("geometry":{"type":"MultiPolygon","coordinates":[[[[0,0],[1,0],[1,1],[0,1],[0,0]]],[[[5,5],[6,5],[6,6],[5,6],[5,5]]]]}}]})");
  EXPECT_EQ(index.assign({0.5, 0.5}, Level::city), "M");
  EXPECT_EQ(index.assign({5.5, 5.5}, Level::city), "M");
  EXPECT_FALSE(index.assign({3, 3}, Level::city));
}

TEST(Region, RejectsBadGeometry) {
  EXPECT_THROW(geo::RegionIndex::parse_geojson(
                   collection(feature("A", "state", "[[[0,0],[1,0],[1,1],[0,1]]]"))),
               ConfigError);
  EXPECT_THROW(geo::RegionIndex::parse_geojson(collection(
                   feature("A", "state", "[[[0,0],[1,0],[1,1],[0,1],[0,0]]]") + "," +
                   feature("A", "state", "[[[2,2],[3,2],[3,3],[2,3],[2,2]]]"))),
               ConfigError);
  EXPECT_THROW(geo::RegionIndex::parse_geojson(
                   collection(feature("A", "planet", "[[[0,0],[1,0],[1,1],[0,1],[0,0]]]"))),
               ConfigError);
  EXPECT_THROW(geo::RegionIndex::parse_geojson("{not json"), ConfigError);
}

TEST(Region, BundledFixtureLoads) {
  const auto index = geo::RegionIndex::load_geojson(std::string(SMI_FIXTURE_DIR) + "/regions_fixture.geojson");
  EXPECT_EQ(index.regions(Level::state).size(), 4u);
  EXPECT_EQ(index.regions(Level::city).size(), 2u);
  EXPECT_EQ(index.assign({42.2, -87.7}, Level::state), "NE");
  EXPECT_EQ(index.assign({42.2, -87.7}, Level::city), "C1");
  EXPECT_EQ(geo::parse_level("city"), Level::city);
  EXPECT_FALSE(geo::parse_level("county"));
}
