#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "smi/region.hpp"
#include "smi/time.hpp"

namespace smi::app {

struct SyntheticSpec {
  std::size_t users = 1000;
  Date start;  // first week's Monday
  Date split;
  Date end;
  double pre_dispersion_km = 30;
  double post_dispersion_km = 30;
  double events_per_week = 4;
  double fully_reducing_fraction = 0;
  std::uint64_t seed = 1;
  std::string output;  // default: <output_dir>/synthetic.jsonl
};

struct PipelineConfig {
  std::vector<std::string> inputs;
  std::string events;  // default: <output_dir>/events.tsv
  std::string regions;
  std::string output_dir = "out";
  std::string country_id = "US";

  Date start, split, end;
  int seasonal_shift_years = 1;
  std::vector<geo::Level> levels{geo::Level::state};

  std::string analysis_mode = "state";  // state | city
  std::vector<std::string> city_names;

  int min_lifetime_events = 3;
  int min_period_events = 2;
  int min_checkins = 2;
  int window = 7;
  std::string daily_mode = "window";  // window | smoothed
  double lowdata_confidence = 0.9975;
  int lowdata_min_weeks = 4;

  std::optional<double> changepoint_penalty;
  Date national_date;
  std::string changepoint_policy = "stay_at_home";

  std::string cases;
  std::string factors;
  std::string policies;
  Date snapshot;
  double missing_policy_days = -1000;

  unsigned threads = 1;
  SyntheticSpec synth;

  std::string events_path() const;
  std::string output_path(const std::string& name) const;
};

PipelineConfig default_config();

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
std::optional<std::string> process_env(const std::string& name);

// Reads a JSON config file (empty path: defaults only), then applies
// SMI_<KEY> environment overrides, e.g. SMI_SPLIT=2020-03-16 or
// SMI_SYNTH_USERS=500. List values are comma separated. Throws ConfigError
// on unknown keys, bad values or inconsistent settings.
PipelineConfig load_config(const std::string& path, const EnvLookup& env = process_env);
PipelineConfig parse_config(const std::string& json_text, const EnvLookup& env = process_env);

// Throws ConfigError when dates are out of order or thresholds below 1.
void validate(const PipelineConfig& config);

}  // namespace smi::app
