#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>

#include <json.hpp>

#include "smi/changepoint.hpp"
#include "smi/correlate.hpp"
#include "smi/csv.hpp"
#include "smi/error.hpp"
#include "smi/ingest.hpp"
#include "smi/mobility.hpp"
#include "smi/reduction.hpp"
#include "synth.hpp"

namespace smi::app {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::ofstream open_output(const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

void write_json(const std::string& path, const ordered_json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw ConfigError(what + " is not configured");
  if (!fs::exists(path)) throw ConfigError(what + " not found: " + path);
}

std::string level_name(geo::Level level) { return std::string(geo::to_string(level)); }

std::string optional_cell(const std::optional<double>& v) {
  return v ? csv::format_double(*v) : std::string();
}

ordered_json optional_json(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

bool needs_geometry(const PipelineConfig& c) {
  return std::any_of(c.levels.begin(), c.levels.end(),
                     [](geo::Level l) { return l != geo::Level::country; });
}

std::optional<geo::RegionIndex> load_regions(const PipelineConfig& c, bool required) {
  if (c.regions.empty()) {
    if (required) {
      throw ConfigError("region geometry ('regions') is required for state or city levels");
    }
    return std::nullopt;
  }
  require_file(c.regions, "region geometry");
  return geo::RegionIndex::load_geojson(c.regions);
}

std::string series_file(const PipelineConfig& c, const char* prefix, geo::Level level) {
  return c.output_path(std::string(prefix) + "_" + level_name(level) + ".csv");
}

mobility::TraceFilter trace_filter(const PipelineConfig& c) {
  mobility::TraceFilter f;
  f.min_lifetime_events = c.min_lifetime_events;
  f.min_period_events = c.min_period_events;
  f.start = c.start;
  f.end = c.end;
  return f;
}

ordered_json box_json(const std::optional<BoxSummary>& box) {
  if (!box) return nullptr;
  return {{"n", box->n},           {"min", box->min}, {"q1", box->q1},
          {"median", box->median}, {"q3", box->q3},   {"max", box->max}};
}

}  // namespace

void cmd_ingest(const PipelineConfig& c, std::ostream& log) {
  if (c.inputs.empty()) throw ConfigError("no input files configured ('inputs')");
  ingest::IngestOptions options;
  options.mode = c.analysis_mode == "city" ? ingest::AnalysisMode::city_analysis
                                           : ingest::AnalysisMode::state_analysis;
  options.city_names = c.city_names;
  const WorkerPool pool(c.threads);
  const ingest::IngestResult result = ingest::ingest_files(c.inputs, options, pool);
  if (result.counters.emitted == 0) {
    throw DataError("no events: " + std::to_string(result.counters.lines) +
                    " input lines produced no geolocated events");
  }
  if (const fs::path store(c.events_path()); store.has_parent_path()) {
    fs::create_directories(store.parent_path());
  }
  ingest::write_event_store(c.events_path(), result.events, result.counters);

  auto skip_json = [](const ingest::IngestCounters& counters) {
    ordered_json s = ordered_json::object();
    for (auto reason : ingest::kSkipReasons) {
      auto it = counters.skipped.find(reason);
      s[std::string(ingest::to_string(reason))] = it == counters.skipped.end() ? 0 : it->second;
    }
    return s;
  };
  ordered_json report = {{"schema", "smi:ingest_report:v1"},
                         {"lines", result.counters.lines},
                         {"emitted", result.counters.emitted},
                         {"skipped_total", result.counters.skipped_total()},
                         {"skipped", skip_json(result.counters)},
                         {"files", ordered_json::array()}};
  for (std::size_t i = 0; i < c.inputs.size(); ++i) {
    const auto& f = result.per_file[i];
    report["files"].push_back({{"path", c.inputs[i]},
                               {"lines", f.lines},
                               {"emitted", f.emitted},
                               {"skipped_total", f.skipped_total()},
                               {"skipped", skip_json(f)}});
  }
  write_json(c.output_path("ingest_report.json"), report);
  log << "ingest: " << result.counters.lines << " lines, " << result.counters.emitted
      << " events, " << result.counters.skipped_total() << " skipped\n";
}

void cmd_compute(const PipelineConfig& c, std::ostream& log) {
  const auto regions = load_regions(c, needs_geometry(c));
  const std::string events_path = c.events_path();
  if (!fs::exists(events_path)) {
    throw ConfigError("event store not found: " + events_path + " (run 'smi ingest' first)");
  }
  const ingest::EventStore store = ingest::read_event_store(events_path);
  const WorkerPool pool(c.threads);
  const mobility::TraceFilter filter = trace_filter(c);

  std::vector<geo::Level> profile_levels = c.levels;
  if (std::find(profile_levels.begin(), profile_levels.end(), geo::Level::country) ==
      profile_levels.end()) {
    profile_levels.push_back(geo::Level::country);
  }
  const mobility::ProfileMap profiles = mobility::build_profiles(
      store.events, filter, regions ? &*regions : nullptr, profile_levels, c.country_id, pool);

  const auto weekly_traces = mobility::build_weekly_traces(store.events, filter);
  std::vector<mobility::MobilityRecord> weekly = mobility::compute_records(weekly_traces, pool);

  const auto volumes = mobility::weekly_volumes(store.events, filter);
  const auto exclusion = mobility::exclude_lowdata_periods(
      volumes, c.lowdata_confidence, static_cast<std::size_t>(c.lowdata_min_weeks));
  if (exclusion.insufficient_data) {
    log << "warning: only " << volumes.size()
        << " weeks of data; low-data week exclusion skipped\n";
  }
  mobility::drop_periods(weekly, exclusion.excluded);
  {
    auto out = open_output(c.output_path("excluded_weeks.csv"));
    csv::Writer w(out, "excluded_weeks",
                  {"week_start", "users", "records", "user_threshold", "record_threshold"});
    for (const auto& v : volumes) {
      if (std::find(exclusion.excluded.begin(), exclusion.excluded.end(), v.week) ==
          exclusion.excluded.end()) {
        continue;
      }
      w.row({format_date(v.week), std::to_string(v.users), std::to_string(v.records),
             csv::format_double(exclusion.user_threshold),
             csv::format_double(exclusion.record_threshold)});
    }
  }

  const int trace_window = c.daily_mode == "smoothed" ? 1 : c.window;
  const auto daily_traces =
      mobility::build_daily_traces(store.events, c.start, c.end, filter, trace_window);
  const std::vector<mobility::MobilityRecord> daily = mobility::compute_records(daily_traces, pool);

  for (geo::Level level : c.levels) {
    std::vector<mobility::MobilityRecord> labeled = weekly;
    for (auto& r : labeled) {
      const auto& region = profiles.at(r.user_id).region.at(level);
      r.region_id = region.value_or("");
    }
    {
      auto out = open_output(series_file(c, "records", level));
      mobility::write_records_csv(out, labeled);
    }
    {
      auto series = mobility::aggregate(weekly, profiles, level, c.country_id, pool);
      auto out = open_output(series_file(c, "weekly", level));
      mobility::write_series_csv(out, series);
    }
    {
      auto series = mobility::aggregate(daily, profiles, level, c.country_id, pool);
      if (c.daily_mode == "smoothed") series = mobility::smooth_daily(series, c.window);
      auto out = open_output(series_file(c, "daily", level));
      mobility::write_series_csv(out, series);
    }
    log << "compute: level " << level_name(level) << ", " << labeled.size() << " weekly records\n";
  }
  log << "compute: " << exclusion.excluded.size() << " low-data weeks excluded\n";
}

void cmd_report(const PipelineConfig& c, std::ostream& log) {
  const WorkerPool pool(c.threads);
  const reduction::PeriodSplit split(c.start, c.split, c.end, c.seasonal_shift_years);
  for (geo::Level level : c.levels) {
    const std::string weekly_path = series_file(c, "weekly", level);
    const std::string records_path = series_file(c, "records", level);
    require_file(weekly_path, "weekly series");
    require_file(records_path, "mobility records");
    const auto series = mobility::read_series_csv(weekly_path);
    const auto all_records = mobility::read_records_csv(records_path);

    std::vector<mobility::MobilityRecord> records;
    records.reserve(all_records.size() * 2);
    for (const auto& r : all_records) {
      if (!r.region_id.empty()) records.push_back(r);
    }
    if (level != geo::Level::country) {
      for (auto r : all_records) {
        r.region_id = c.country_id;
        records.push_back(std::move(r));
      }
    }

    auto reports = reduction::build_reports(series, records, split, c.min_checkins, pool);
    std::optional<reduction::ReductionReport> country;
    std::vector<reduction::ReductionReport> regional;
    for (auto& r : reports) {
      if (level != geo::Level::country && r.region_id == c.country_id) {
        country = std::move(r);
      } else {
        regional.push_back(std::move(r));
      }
    }
    regional = reduction::rank_regions(std::move(regional));
    std::vector<reduction::ReductionReport> rows;
    if (country) rows.push_back(*country);
    rows.insert(rows.end(), regional.begin(), regional.end());

    {
      auto out = open_output(c.output_path("report_" + level_name(level) + ".csv"));
      csv::Writer w(out, "reduction_report",
                    {"location", "before_km", "after_km", "group_reduction", "median_reduction",
                     "median_seasonal_reduction", "rank"});
      for (const auto& r : rows) {
        w.row({r.region_id, optional_cell(r.before_mean_km), optional_cell(r.after_mean_km),
               optional_cell(r.group_reduction), optional_cell(r.median_user_reduction),
               optional_cell(r.median_seasonal_reduction),
               r.rank ? std::to_string(*r.rank) : std::string()});
      }
    }

    ordered_json users = {{"schema", "smi:user_reduction:v1"}, {"regions", ordered_json::array()}};
    ordered_json dist = {{"schema", "smi:distribution:v1"},
                         {"transform", "log1p"},
                         {"quantiles", "nearest-rank"},
                         {"regions", ordered_json::array()}};
    std::map<std::string_view, std::vector<mobility::MobilityRecord>> by_region;
    for (const auto& r : records) by_region[r.region_id].push_back(r);
    const Date before_from = week_start(c.start);
    const Date before_to = c.split - std::chrono::days{1};
    for (const auto& r : rows) {
      users["regions"].push_back({{"region_id", r.region_id},
                                  {"active_users", r.active_users},
                                  {"fully_reduced_fraction", optional_json(r.fully_reduced_fraction)},
                                  {"median_reduction", optional_json(r.median_user_reduction)},
                                  {"median_seasonal_reduction",
                                   optional_json(r.median_seasonal_reduction)}});
      const auto& recs = by_region[r.region_id];
      dist["regions"].push_back(
          {{"region_id", r.region_id},
           {"before", box_json(mobility::log1p_distribution_summary(recs, before_from, before_to))},
           {"after", box_json(mobility::log1p_distribution_summary(recs, c.split, c.end))}});
    }
    write_json(c.output_path("user_reduction_" + level_name(level) + ".json"), users);
    write_json(c.output_path("distribution_" + level_name(level) + ".json"), dist);

    mobility::RegionSeriesSet regional_series = series;
    if (level != geo::Level::country) regional_series.erase(c.country_id);
    const auto drops = reduction::largest_drop_week(regional_series);
    ordered_json drop_json = {{"schema", "smi:largest_drop:v1"},
                              {"regions", ordered_json::array()},
                              {"fraction_by_week", ordered_json::object()}};
    for (const auto& d : drops) {
      drop_json["regions"].push_back(
          {{"region_id", d.region_id}, {"week_start", format_date(d.week)}, {"drop_km", d.drop}});
    }
    for (const auto& [week, frac] : reduction::drop_week_fractions(drops)) {
      drop_json["fraction_by_week"][format_date(week)] = frac;
    }
    write_json(c.output_path("largest_drop_" + level_name(level) + ".json"), drop_json);
    log << "report: level " << level_name(level) << ", " << rows.size() << " rows\n";
  }
}

void cmd_changepoint(const PipelineConfig& c, std::ostream& log) {
  const WorkerPool pool(c.threads);
  std::optional<correlate::PolicyTable> policies;
  if (!c.policies.empty() && fs::exists(c.policies)) {
    policies = correlate::load_policies(c.policies);
  } else {
    log << "warning: no policy file; change points are not attributed\n";
  }
  const auto policy_type = correlate::parse_policy_type(c.changepoint_policy);
  if (!policy_type) throw ConfigError("unknown changepoint_policy '" + c.changepoint_policy + "'");

  for (geo::Level level : c.levels) {
    const std::string daily_path = series_file(c, "daily", level);
    require_file(daily_path, "daily series");
    const auto daily = mobility::read_series_csv(daily_path);
    std::vector<changepoint::DailySeries> series;
    for (const auto& [id, s] : daily) {
      auto d = changepoint::make_daily_series(s);
      if (d.size() < 4) {
        log << "warning: region " << id << " has fewer than 4 days; skipped\n";
        continue;
      }
      series.push_back(std::move(d));
    }
    const auto results = changepoint::detect_all(series, c.changepoint_penalty, pool);
    {
      auto out = open_output(c.output_path("breakpoints_" + level_name(level) + ".csv"));
      csv::Writer w(out, "breakpoints", {"region_id", "breakpoint_date", "penalty"});
      for (const auto& r : results) {
        for (Date b : r.breakpoints) {
          w.row({r.region_id, format_date(b), csv::format_double(r.penalty)});
        }
      }
    }

    ordered_json summary = {{"schema", "smi:changepoint_summary:v1"},
                            {"level", level_name(level)},
                            {"regions", ordered_json::array()}};
    for (const auto& r : results) {
      summary["regions"].push_back({{"region_id", r.region_id},
                                    {"breakpoints", r.breakpoints.size()},
                                    {"penalty", r.penalty},
                                    {"cost_total", r.cost_total}});
    }
    if (policies) {
      std::vector<changepoint::ChangePointResult> regional;
      std::vector<const changepoint::DailySeries*> regional_series;
      for (std::size_t i = 0; i < results.size(); ++i) {
        if (level != geo::Level::country && results[i].region_id == c.country_id) continue;
        regional.push_back(results[i]);
        regional_series.push_back(&series[i]);
      }
      const auto dates = correlate::policy_dates(*policies, *policy_type);
      const auto a = changepoint::attribute_changepoints(regional, c.national_date, dates);
      summary["attribution"] = {{"national_date", format_date(c.national_date)},
                                {"policy_type", c.changepoint_policy},
                                {"in_window", a.in_window},
                                {"breakpoints", a.total},
                                {"regions", a.regions},
                                {"fraction", optional_json(a.fraction)}};
      std::size_t evaluated = 0, more_stationary = 0;
      for (const auto* s : regional_series) {
        auto it = dates.find(s->region_id);
        if (it == dates.end()) continue;
        auto cmp = changepoint::compare_stationarity(*s, it->second,
                                                     static_cast<std::size_t>(c.window));
        if (!cmp) continue;
        ++evaluated;
        if (*cmp) ++more_stationary;
      }
      summary["stationarity"] = {
          {"window", c.window},
          {"regions_evaluated", evaluated},
          {"more_stationary_before_policy", more_stationary},
          {"fraction", evaluated ? ordered_json(static_cast<double>(more_stationary) /
                                                static_cast<double>(evaluated))
                                 : ordered_json(nullptr)}};
    }
    write_json(c.output_path("changepoint_summary_" + level_name(level) + ".json"), summary);
    log << "changepoint: level " << level_name(level) << ", " << results.size() << " regions\n";
  }
}

void cmd_correlate(const PipelineConfig& c, std::ostream& log) {
  require_file(c.cases, "case data ('cases')");
  require_file(c.factors, "factor data ('factors')");
  correlate::RegionAliases aliases;
  if (!c.regions.empty() && fs::exists(c.regions)) {
    const auto regions = geo::RegionIndex::load_geojson(c.regions);
    for (geo::Level level : {geo::Level::state, geo::Level::city}) {
      if (!regions.has_level(level)) continue;
      for (const auto& r : regions.regions(level)) {
        if (!r.name.empty()) aliases.emplace(r.name, r.id);
      }
    }
  }
  const auto cases = correlate::load_cases(c.cases, aliases);
  const auto factors = correlate::load_factors(c.factors);
  const auto rates = correlate::daily_infection_rate(cases, factors);
  for (const auto& region : rates.missing_population) {
    log << "warning: no population for " << region << "; excluded from infection rates\n";
  }
  for (const auto& [region, days] : rates.clamped) {
    log << "warning: " << region << " has " << days.size()
        << " day(s) with falling cumulative cases; clamped to zero\n";
  }

  const geo::Level level = c.levels.front();
  correlate::RegionDaily mobility_daily;
  const std::string daily_path = series_file(c, "daily", level);
  if (fs::exists(daily_path)) {
    for (const auto& [id, s] : mobility::read_series_csv(daily_path)) {
      if (id == c.country_id && level != geo::Level::country) continue;
      for (const auto& [d, stats] : s.periods) mobility_daily[id][d] = stats.mean_km;
    }
  } else {
    log << "warning: " << daily_path << " not found; mobility excluded from correlations\n";
  }

  auto write_panel = [&](const std::string& name, const std::vector<correlate::DailyCorrelation>& rows) {
    auto out = open_output(c.output_path(name));
    csv::Writer w(out, "factor_correlations", {"date", "factor", "correlation", "regions"});
    for (const auto& r : rows) {
      w.row({format_date(r.date), r.factor, optional_cell(r.correlation), std::to_string(r.regions)});
    }
  };

  correlate::FactorPanel infection_panel = correlate::static_panel(factors);
  if (!mobility_daily.empty()) infection_panel.daily["mobility_index"] = mobility_daily;
  write_panel("infection_factor_correlations.csv",
              correlate::daily_factor_correlations(rates.rate, infection_panel));

  if (!mobility_daily.empty()) {
    correlate::FactorPanel mobility_panel = correlate::static_panel(factors);
    mobility_panel.daily["infection_rate"] = rates.rate;
    write_panel("mobility_factor_correlations.csv",
                correlate::daily_factor_correlations(mobility_daily, mobility_panel));
  }

  if (c.policies.empty() || !fs::exists(c.policies)) {
    log << "warning: no policy file; only the factor panels were computed\n";
    return;
  }
  const auto policies = correlate::load_policies(c.policies);
  const auto rows = correlate::policy_correlation(cases, policies, c.snapshot, c.missing_policy_days);
  std::map<std::string, const correlate::PolicyCorrelation*> by_name;
  for (const auto& r : rows) by_name[std::string(correlate::policy_display_name(r.policy))] = &r;
  auto out = open_output(c.output_path("policy_correlations.csv"));
  csv::Writer w(out, "policy_correlations",
                {"policy", "policy_type", "correlation", "regions", "sentinel_regions"});
  for (const auto& [display, value] : correlate::policy_table_rows(rows)) {
    const auto* r = by_name.at(display);
    w.row({display, std::string(correlate::policy_key(r->policy)), value,
           std::to_string(r->regions), std::to_string(r->sentinel_regions)});
  }
  log << "correlate: " << cases.size() << " case regions, " << factors.size()
      << " factor regions\n";
}

void cmd_synth(const PipelineConfig& c, std::ostream& log) {
  std::optional<geo::RegionIndex> regions;
  if (!c.regions.empty()) regions = load_regions(c, false);
  const std::string path =
      c.synth.output.empty() ? c.output_path("synthetic.jsonl") : c.synth.output;
  SynthManifest manifest;
  {
    auto out = open_output(path);
    manifest = generate_synthetic(c.synth, out, regions ? &*regions : nullptr);
  }
  {
    auto out = open_output(path + ".manifest.json");
    write_manifest(manifest, c.synth, out);
  }
  log << "synth: " << manifest.users << " users, " << manifest.events << " events -> " << path
      << "\n";
}

}  // namespace smi::app
