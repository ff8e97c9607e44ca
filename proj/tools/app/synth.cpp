#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <vector>

#include <json.hpp>

namespace smi::app {

namespace {

constexpr double kKmPerDegree = 111.195;

geo::Point random_home(std::mt19937_64& rng, const geo::RegionIndex* regions) {
  if (regions && regions->has_level(geo::Level::state) &&
      !regions->regions(geo::Level::state).empty()) {
    const auto& list = regions->regions(geo::Level::state);
    std::uniform_int_distribution<std::size_t> pick(0, list.size() - 1);
    const geo::Region& r = list[pick(rng)];
    std::uniform_real_distribution<double> lat(r.min_lat, r.max_lat), lon(r.min_lon, r.max_lon);
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const geo::Point p{lat(rng), lon(rng)};
      for (const geo::Polygon& poly : r.polygons) {
        if (geo::locate(p, poly) == geo::Containment::inside) return p;
      }
    }
    return r.polygons.front().front().front();
  }
  std::uniform_real_distribution<double> lat(30, 45), lon(-120, -75);
  const double la = lat(rng);
  return {la, lon(rng)};
}

geo::Point offset(const geo::Point& home, double north_km, double east_km) {
  const double lat = std::clamp(home.latitude + north_km / kKmPerDegree, -89.9, 89.9);
  double lon = home.longitude +
               east_km / (kKmPerDegree * std::cos(home.latitude * std::numbers::pi / 180));
  lon = std::remainder(lon, 360.0);
  return {lat, lon};
}

}  // namespace

SynthManifest generate_synthetic(const SyntheticSpec& spec, std::ostream& out,
                                 const geo::RegionIndex* regions) {
  std::mt19937_64 rng(spec.seed);
  std::poisson_distribution<int> per_week(spec.events_per_week);
  std::uniform_int_distribution<long> second_of_week(0, 7 * 86400 - 1);
  std::bernoulli_distribution fully(spec.fully_reducing_fraction);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SynthManifest m;
  m.seed = spec.seed;
  m.users = spec.users;
  const Instant begin{std::chrono::sys_days(spec.start)};
  const Instant finish{std::chrono::sys_days(spec.end + std::chrono::days{1})};
  const Instant split{std::chrono::sys_days(spec.split)};

  char id[32];
  for (std::size_t u = 0; u < spec.users; ++u) {
    std::snprintf(id, sizeof id, "u%07zu", u + 1);
    const std::string user = id;
    const geo::Point home = random_home(rng, regions);
    const bool reduces = fully(rng);
    if (reduces) ++m.fully_reducing_users;

    std::vector<Instant> times;
    for (Date w = week_start(spec.start); w <= spec.end; w += std::chrono::days{7}) {
      const int n = per_week(rng);
      for (int k = 0; k < n; ++k) {
        const Instant t = std::chrono::sys_days(w) + std::chrono::seconds{second_of_week(rng)};
        if (t >= begin && t < finish) times.push_back(t);
      }
    }
    std::sort(times.begin(), times.end());

    std::size_t seq = 0;
    for (const Instant t : times) {
      const bool post = t >= split;
      geo::Point p = home;
      if (!(post && reduces)) {
        const double sigma = post ? spec.post_dispersion_km : spec.pre_dispersion_km;
        const double north = sigma * gauss(rng);
        const double east = sigma * gauss(rng);
        p = offset(home, north, east);
      }
      nlohmann::json line = {
          {"event_id", user + "-" + std::to_string(++seq)},
          {"user_id", user},
          {"timestamp", format_instant(t)},
          {"coordinates", {p.longitude, p.latitude}},
      };
      out << line.dump() << '\n';
      ++m.events;
    }
  }
  const double share = m.users ? static_cast<double>(m.fully_reducing_users) / static_cast<double>(m.users) : 0;
  m.injected_group_reduction =
      spec.pre_dispersion_km > 0 ? 1.0 - (1.0 - share) * spec.post_dispersion_km / spec.pre_dispersion_km : 0;
  return m;
}

void write_manifest(const SynthManifest& m, const SyntheticSpec& spec, std::ostream& out) {
  nlohmann::ordered_json j = {
      {"schema", "smi:synth_manifest:v1"},
      {"seed", m.seed},
      {"users", m.users},
      {"fully_reducing_users", m.fully_reducing_users},
      {"fully_reducing_share", m.users ? static_cast<double>(m.fully_reducing_users) / static_cast<double>(m.users) : 0.0},
      {"events", m.events},
      {"injected_group_reduction", m.injected_group_reduction},
      {"start", format_date(spec.start)},
      {"split", format_date(spec.split)},
      {"end", format_date(spec.end)},
      {"pre_dispersion_km", spec.pre_dispersion_km},
      {"post_dispersion_km", spec.post_dispersion_km},
      {"events_per_week", spec.events_per_week},
  };
  out << j.dump(2) << '\n';
}

}  // namespace smi::app
