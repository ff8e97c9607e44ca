#include <gtest/gtest.h>

#include <zlib.h>

#include <algorithm>
#include <numbers>
#include <cmath>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "smi/error.hpp"
#include "smi/ingest.hpp"

using namespace smi;
using namespace smi::ingest;

namespace {

RawEvent parse_ok(std::string_view line) {
  auto r = parse_event(line);
  EXPECT_TRUE(std::holds_alternative<RawEvent>(r)) << line;
  return std::get<RawEvent>(r);
}

SkipReason parse_skip(std::string_view line) {
  auto r = parse_event(line);
  EXPECT_TRUE(std::holds_alternative<SkipReason>(r)) << line;
  return std::get<SkipReason>(r);
}

std::string place_json(const std::string& type, const std::string& name,
                       const std::string& box = "[[-77,39],[-76,39],[-76,40],[-77,40]]") {
  return R"("place":{"place_id":"p","place_type":")" + type + R"(","name":")" + name +
         R"(","full_name":")" + name + R"(, NY","country_code":"US","bounding_box":)" + box + "}";
}

std::string record(const std::string& id, const std::string& extra) {
  return R"({"event_id":")" + id + R"(","user_id":"u1","timestamp":"2020-03-16T12:00:00Z")" +
         (extra.empty() ? "" : "," + extra) + "}";
}

}  // namespace

TEST(ParseEvent, CoordinatesPassThrough) {
  const RawEvent e = parse_ok(record("a", R"("coordinates":[-76.61,39.29])"));
  ASSERT_TRUE(e.coordinates);
  EXPECT_EQ(e.coordinates->longitude, -76.61);
  EXPECT_EQ(e.coordinates->latitude, 39.29);
  EXPECT_EQ(e.timestamp, testing_helpers::at("2020-03-16T12:00:00Z"));
}

TEST(ParseEvent, SkipReasons) {
  EXPECT_EQ(parse_skip(record("a", "")), SkipReason::no_location);
  EXPECT_EQ(parse_skip(record("a", R"("coordinates":[-76.61,91.0])")), SkipReason::invalid_coordinate);
  EXPECT_EQ(parse_skip(record("a", R"("coordinates":[-181,10])")), SkipReason::invalid_coordinate);
  EXPECT_EQ(parse_skip("{not json"), SkipReason::malformed);
  EXPECT_EQ(parse_skip(R"({"user_id":"u","timestamp":"2020-03-16T00:00:00Z","coordinates":[0,0]})"),
            SkipReason::malformed);
  EXPECT_EQ(parse_skip(R"({"event_id":"x","user_id":"u","timestamp":"soon","coordinates":[0,0]})"),
            SkipReason::malformed);
}

TEST(ParseEvent, TwitterV11Fields) {
  const RawEvent e = parse_ok(
      R"({"id_str":"1239","created_at":"Mon Mar 16 12:00:00 +0000 2020","user":{"id_str":"77"},)"
      R"("coordinates":{"type":"Point","coordinates":[-76.61,39.29]},)"
      R"("place":{"id":"p9","place_type":"city","name":"Baltimore","full_name":"Baltimore, MD","country_code":"US",)"
      R"("bounding_box":{"type":"Polygon","coordinates":[[[-76.71,39.2],[-76.53,39.2],[-76.53,39.37],[-76.71,39.37]]]}}})");
  EXPECT_EQ(e.event_id, "1239");
  EXPECT_EQ(e.user_id, "77");
  EXPECT_EQ(e.place->place_id, "p9");
  EXPECT_EQ(e.coordinates->latitude, 39.29);
}

TEST(ResolveLocation, CoordinatesWinOverPlace) {
  const RawEvent raw = parse_ok(record("a", R"("coordinates":[-76.61,39.29],)" + place_json("city", "Baltimore")));
  const auto r = resolve_location(raw, AnalysisMode::state_analysis, {});
  const auto& e = std::get<GeoEvent>(r);
  EXPECT_EQ(e.resolution, Resolution::exact_coordinates);
  EXPECT_EQ(e.latitude, 39.29);
  EXPECT_EQ(e.longitude, -76.61);
}

TEST(ResolveLocation, StateModeExcludesPlaceOnlyPoiAndNeighborhood) {
  for (const char* type : {"poi", "neighborhood"}) {
    const RawEvent raw = parse_ok(record("a", place_json(type, "Fells Point")));
    EXPECT_EQ(std::get<SkipReason>(resolve_location(raw, AnalysisMode::state_analysis, {})),
              SkipReason::poi_excluded);
  }
}

TEST(ResolveLocation, CityModeKeepsPoiNamedAfterCity) {
  const RawEvent raw = parse_ok(record("a", place_json("poi", "New York City Center")));
  const auto r = resolve_location(raw, AnalysisMode::city_analysis, {"New York City"});
  ASSERT_TRUE(std::holds_alternative<GeoEvent>(r));
  EXPECT_EQ(std::get<GeoEvent>(r).resolution, Resolution::place_center);
  const RawEvent other = parse_ok(record("b", place_json("poi", "Some Diner")));
  EXPECT_EQ(std::get<SkipReason>(resolve_location(other, AnalysisMode::city_analysis, {"Chicago"})),
            SkipReason::poi_excluded);
}

TEST(ResolveLocation, BoroughsMapToNewYorkCity) {
  for (const char* borough : {"Brooklyn", "Manhattan", "Queens", "Staten Island", "The Bronx"}) {
    PlaceInfo p;
    p.name = std::string("Downtown ") + borough;
    EXPECT_EQ(match_city(p, {"Chicago", "New York City"}), "New York City") << borough;
    EXPECT_FALSE(match_city(p, {"Chicago"}));
  }
  PlaceInfo lower;
  lower.full_name = "chicago loop";
  EXPECT_EQ(match_city(lower, {"Chicago"}), "Chicago");
}

TEST(ResolveLocation, PlaceCenterFromBoundingBox) {
  const RawEvent raw = parse_ok(record("a", place_json("city", "Somewhere")));
  const auto e = std::get<GeoEvent>(resolve_location(raw, AnalysisMode::state_analysis, {}));
  EXPECT_EQ(e.longitude, -76.5);
  EXPECT_EQ(e.latitude, 39.5);
  EXPECT_EQ(e.place_type, PlaceType::city);
}

TEST(BoundingBox, PointBoxIsItsOwnCenter) {
  const geo::Point p{39.29, -76.61};
  EXPECT_EQ(bounding_box_center({p, p, p, p}), p);
}

TEST(BoundingBox, AntimeridianUsesShorterArc) {
  const std::array<geo::Point, 4> box{{{10, 179}, {10, -179}, {12, -179}, {12, 179}}};
  const auto c = bounding_box_center(box);
  EXPECT_EQ(std::abs(c.longitude), 180);
  EXPECT_EQ(c.latitude, 11);
}

TEST(BoundingBox, AntimeridianMatchesArcMidpointOracle) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> west(170, 180), east(-180, -170);
  for (int i = 0; i < 1000; ++i) {
    const double w = west(rng), e = east(rng);
    const std::array<geo::Point, 4> box{{{0, w}, {0, e}, {1, e}, {1, w}}};
    const double rad = std::numbers::pi / 180;
    const double mid = std::atan2(std::sin(w * rad) + std::sin(e * rad),
                                  std::cos(w * rad) + std::cos(e * rad)) / rad;
    const double got = bounding_box_center(box).longitude;
    EXPECT_GT(got, -180);
    EXPECT_LE(got, 180);
    EXPECT_NEAR(std::remainder(got - mid, 360.0), 0.0, 1e-9);
  }
}

TEST(Ingest, FixtureCounts) {
  const auto result = ingest_files({testing_helpers::data_path("ingest_fixture.jsonl")}, {});
  EXPECT_EQ(result.counters.lines, 10u);
  EXPECT_EQ(result.counters.emitted, 8u);
  EXPECT_EQ(result.counters.skipped.at(SkipReason::malformed), 2u);
  EXPECT_EQ(result.counters.emitted + result.counters.skipped_total(), result.counters.lines);
}

TEST(Ingest, DuplicatesKeepFirstOccurrence) {
  const std::string a = record("dup", R"("coordinates":[1,1])") + "\n";
  const std::string b = R"({"event_id":"dup","user_id":"u2","timestamp":"2020-03-17T00:00:00Z","coordinates":[2,2]})" "\n";
  const auto result = ingest_shards({a, b}, {});
  ASSERT_EQ(result.events.size(), 1u);
  EXPECT_EQ(result.events[0].user_id, "u1");
  EXPECT_EQ(result.counters.skipped.at(SkipReason::duplicate), 1u);
}

namespace {

std::string random_corpus(std::mt19937_64& rng, int n) {
  std::ostringstream out;
  for (int i = 0; i < n; ++i) {
    const int kind = static_cast<int>(rng() % 6);
    const std::string id = "e" + std::to_string(rng() % (n * 2));  // some duplicates
    const std::string user = "u" + std::to_string(rng() % 20);
    const std::string ts = "2020-03-" + std::to_string(10 + rng() % 15) + "T0" + std::to_string(rng() % 10) + ":00:00Z";
    const std::string head = R"({"event_id":")" + id + R"(","user_id":")" + user + R"(","timestamp":")" + ts + "\"";
    switch (kind) {
      case 0: out << head << R"(,"coordinates":[)" << (rng() % 360) - 180.0 << "," << (rng() % 180) - 90.0 << "]}\n"; break;
      case 1: out << head << "," << place_json("poi", "NYC Center") << "}\n"; break;
      case 2: out << head << "," << place_json("city", "Town") << "}\n"; break;
      case 3: out << head << "}\n"; break;
      case 4: out << head << R"(,"coordinates":[0,95]})" << "\n"; break;
      default: out << "garbage " << i << "\n"; break;
    }
  }
  return out.str();
}

}  // namespace

TEST(Ingest, EveryLineAccountedForAndPartitionIndependent) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const std::string corpus = random_corpus(rng, 300);
    std::vector<std::string> lines;
    std::istringstream in(corpus);
    for (std::string l; std::getline(in, l);) lines.push_back(l + "\n");

    const auto whole = ingest_shards({corpus}, {});
    EXPECT_EQ(whole.counters.emitted + whole.counters.skipped_total(), whole.counters.lines);
    EXPECT_EQ(whole.counters.lines, lines.size());

    // Any split into shards, in order, with any pool size gives the same result.
    std::vector<std::string> shards(1 + rng() % 7);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      shards[std::min(shards.size() - 1, i * shards.size() / lines.size())] += lines[i];
    }
    const auto split = ingest_shards(shards, {}, WorkerPool{4});
    EXPECT_EQ(split.events, whole.events);
    EXPECT_EQ(split.counters, whole.counters);

    for (const auto& e : whole.events) {
      if (e.resolution == Resolution::place_center) {
        EXPECT_NE(e.place_type, PlaceType::poi);
        EXPECT_NE(e.place_type, PlaceType::neighborhood);
      }
    }
  }
}

TEST(Ingest, ShuffledDuplicateFreeInputGivesSameMultiset) {
  std::mt19937_64 rng(2);
  std::vector<std::string> lines;
  for (int i = 0; i < 200; ++i) {
    lines.push_back(R"({"event_id":"id)" + std::to_string(i) + R"(","user_id":"u)" + std::to_string(i % 7) +
                    R"(","timestamp":"2020-03-1)" + std::to_string(i % 10) + R"(T12:00:00Z","coordinates":[)" +
                    std::to_string(i % 50) + ",10]}\n");
  }
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& l : v) s += l;
    return s;
  };
  const auto a = ingest_shards({join(lines)}, {});
  std::shuffle(lines.begin(), lines.end(), rng);
  const auto b = ingest_shards({join(lines)}, {}, WorkerPool{3});
  EXPECT_EQ(a.events, b.events);
}

TEST(EventStore, RoundTripIsByteStable) {
  const auto result = ingest_files({testing_helpers::data_path("ingest_fixture.jsonl")}, {});
  std::ostringstream first;
  write_event_store(first, result.events, result.counters);
  std::istringstream in(first.str());
  const EventStore store = read_event_store(in);
  EXPECT_EQ(store.events, result.events);
  EXPECT_EQ(store.counters, result.counters);
  std::ostringstream second;
  write_event_store(second, store.events, store.counters);
  EXPECT_EQ(first.str(), second.str());
}

TEST(EventStore, RejectsWrongHeader) {
  std::istringstream in("# smi:events:v2\n");
  EXPECT_THROW(read_event_store(in), DataError);
}

TEST(Ingest, GzipAndPlainInputsAgree) {
  const auto dir = testing_helpers::scratch_dir("gzip");
  const std::string plain = testing_helpers::data_path("ingest_fixture.jsonl");
  const std::string gz = (dir / "fixture.jsonl.gz").string();
  const std::string content = testing_helpers::slurp(plain);
  gzFile f = gzopen(gz.c_str(), "wb");
  ASSERT_NE(f, nullptr);
  gzwrite(f, content.data(), static_cast<unsigned>(content.size()));
  gzclose(f);
  const auto a = ingest_files({plain}, {});
  const auto b = ingest_files({gz}, {});
  EXPECT_EQ(a.events, b.events);
  EXPECT_EQ(a.counters, b.counters);
  EXPECT_THROW(ingest_files({(dir / "missing.jsonl").string()}, {}), DataError);
}
