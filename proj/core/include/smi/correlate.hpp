#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smi/time.hpp"

namespace smi::correlate {

// Per-region daily values keyed by region_id then date.
using RegionDaily = std::map<std::string, std::map<Date, double>, std::less<>>;

// Optional mapping from region names (as found in external files) to ids.
using RegionAliases = std::map<std::string, std::string, std::less<>>;

// Cumulative confirmed cases. Accepts a long layout with columns
// region_id,date,cumulative and the wide layout with one row per area and
// one M/D/YY column per day; wide rows sharing a region are summed. The
// region column is the first of region_id, Province_State, Province/State
// or state; names are mapped through `aliases` when present.
RegionDaily load_cases(const std::string& path, const RegionAliases& aliases = {});

struct StateFactors {
  std::string region_id;
  std::optional<double> population;
  std::optional<double> area_sq_miles;
  std::optional<double> homeless_2019;
  std::optional<double> unemployment_2018;
  std::optional<double> at_risk_fraction;
};

using FactorTable = std::map<std::string, StateFactors, std::less<>>;

inline constexpr std::array<std::string_view, 5> kFactorNames = {
    "population", "area_sq_miles", "homeless_2019", "unemployment_2018", "at_risk_fraction"};

std::optional<double> factor_value(const StateFactors& f, std::string_view name);

// Blank cells are missing values. Throws DataError on a non-positive
// population or a fraction outside [0, 1].
FactorTable load_factors(const std::string& path);

enum class PolicyType {
  state_of_emergency,
  nursing_home_visitor_ban,
  stay_at_home,
  froze_evictions,
  closed_nonessential_businesses,
  closed_gyms,
  closed_movie_theaters,
  closed_day_cares,
  closed_restaurants,
  closed_k12_schools,
};

inline constexpr std::array<PolicyType, 10> kPolicyTypes = {
    PolicyType::state_of_emergency,   PolicyType::nursing_home_visitor_ban,
    PolicyType::stay_at_home,         PolicyType::froze_evictions,
    PolicyType::closed_nonessential_businesses, PolicyType::closed_gyms,
    PolicyType::closed_movie_theaters, PolicyType::closed_day_cares,
    PolicyType::closed_restaurants,   PolicyType::closed_k12_schools,
};

std::string_view policy_key(PolicyType p);
std::string_view policy_display_name(PolicyType p);
// Accepts the key or the display name.
std::optional<PolicyType> parse_policy_type(std::string_view text);

// region -> policy -> date (nullopt: the region has not enacted it).
using PolicyTable = std::map<std::string, std::map<PolicyType, std::optional<Date>>, std::less<>>;

PolicyTable load_policies(const std::string& path);

// The enactment dates of one policy, for regions that have it.
std::map<std::string, Date, std::less<>> policy_dates(const PolicyTable& table, PolicyType p);

struct InfectionRates {
  RegionDaily rate;
  std::map<std::string, std::vector<Date>, std::less<>> clamped;  // days with a falling total
  std::vector<std::string> missing_population;
};

// New cases per day divided by population. The first day counts its whole
// cumulative total; decreases clamp to zero and are recorded.
InfectionRates daily_infection_rate(const RegionDaily& cumulative, const FactorTable& factors);

// Pearson product-moment correlation over the pairs where neither value is
// NaN. Missing with fewer than 3 pairs or a constant side. Throws
// std::invalid_argument on unequal lengths.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

struct DailyCorrelation {
  Date date;
  std::string factor;
  std::optional<double> correlation;
  std::size_t regions = 0;
};

struct FactorPanel {
  // factor -> region -> value
  std::map<std::string, std::map<std::string, double, std::less<>>, std::less<>> fixed;
  // factor -> region -> date -> value
  std::map<std::string, RegionDaily, std::less<>> daily;
};

FactorPanel static_panel(const FactorTable& factors);

// For every date of `target`, the cross-region correlation between the
// target and each factor, using the regions that have both values on that
// date. Ordered by date, then factor name.
std::vector<DailyCorrelation> daily_factor_correlations(const RegionDaily& target,
                                                        const FactorPanel& panel);

struct PolicyCorrelation {
  PolicyType policy;
  std::optional<double> correlation;
  std::size_t regions = 0;
  std::size_t sentinel_regions = 0;
};

inline constexpr double kMissingPolicyDays = -1000;

// For regions present in both tables with a case count on `snapshot`:
// x = days from the policy date to the snapshot, or `missing_days` when the
// region lacks the policy; y = cumulative cases on the snapshot. The
// sentinel sits far from every real value and dominates the correlation.
std::vector<PolicyCorrelation> policy_correlation(const RegionDaily& cumulative,
                                                  const PolicyTable& policies, Date snapshot,
                                                  double missing_days = kMissingPolicyDays);

// Display name and 4-decimal value, sorted by correlation descending with
// missing rows last.
std::vector<std::pair<std::string, std::string>> policy_table_rows(
    std::span<const PolicyCorrelation> rows);

}  // namespace smi::correlate
