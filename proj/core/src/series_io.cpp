#include <fstream>
#include <ostream>

#include "smi/csv.hpp"
#include "smi/error.hpp"
#include "smi/mobility.hpp"

namespace smi::mobility {

namespace {

Date require_date(const std::string& text, const std::string& path) {
  auto d = parse_date(text);
  if (!d) throw DataError(path + ": bad date '" + text + "'");
  return *d;
}

}  // namespace

void write_records_csv(std::ostream& out, std::span<const MobilityRecord> records) {
  csv::Writer w(out, "mobility_records", {"user_id", "period_start", "region_id", "index_km", "checkins"});
  for (const MobilityRecord& r : records) {
    w.row({r.user_id, format_date(r.period), r.region_id, csv::format_double(r.index_km),
           std::to_string(r.checkins)});
  }
}

std::vector<MobilityRecord> read_records_csv(const std::string& path) {
  const csv::Table t = csv::read_versioned(path, "mobility_records");
  const auto user = t.require_column("user_id", path);
  const auto period = t.require_column("period_start", path);
  const auto region = t.require_column("region_id", path);
  const auto index = t.require_column("index_km", path);
  const auto checkins = t.require_column("checkins", path);
  std::vector<MobilityRecord> out;
  out.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    MobilityRecord r;
    r.user_id = row[user];
    r.period = require_date(row[period], path);
    r.region_id = row[region];
    r.index_km = csv::parse_double(row[index], "index_km");
    r.checkins = static_cast<int>(csv::parse_int(row[checkins], "checkins"));
    out.push_back(std::move(r));
  }
  return out;
}

void write_series_csv(std::ostream& out, const RegionSeriesSet& series) {
  csv::Writer w(out, "region_series", {"region_id", "period_start", "mean_km", "variance", "users"});
  for (const auto& [id, s] : series) {
    for (const auto& [period, stats] : s.periods) {
      w.row({id, format_date(period), csv::format_double(stats.mean_km),
             csv::format_double(stats.variance), std::to_string(stats.users)});
    }
  }
}

RegionSeriesSet read_series_csv(const std::string& path) {
  const csv::Table t = csv::read_versioned(path, "region_series");
  const auto region = t.require_column("region_id", path);
  const auto period = t.require_column("period_start", path);
  const auto mean_col = t.require_column("mean_km", path);
  const auto var = t.require_column("variance", path);
  const auto users = t.require_column("users", path);
  RegionSeriesSet out;
  for (const auto& row : t.rows) {
    RegionSeries& s = out[row[region]];
    s.region_id = row[region];
    const Date d = require_date(row[period], path);
    if (s.periods.contains(d)) throw DataError(path + ": duplicate period for " + row[region]);
    s.periods[d] = {csv::parse_double(row[mean_col], "mean_km"),
                    csv::parse_double(row[var], "variance"),
                    static_cast<std::size_t>(csv::parse_int(row[users], "users"))};
  }
  return out;
}

}  // namespace smi::mobility
