#include "smi/correlate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "smi/csv.hpp"
#include "smi/error.hpp"

namespace smi::correlate {

namespace {

constexpr std::array<std::string_view, 10> kKeys = {
    "state_of_emergency",  "nursing_home_visitor_ban", "stay_at_home",
    "froze_evictions",     "closed_nonessential_businesses", "closed_gyms",
    "closed_movie_theaters", "closed_day_cares",       "closed_restaurants",
    "closed_k12_schools"};

constexpr std::array<std::string_view, 10> kDisplay = {
    "State of emergency",
    "Date banned visitors to nursing homes",
    "Stay at home/ shelter in place",
    "Froze evictions",
    "Closed non-essential businesses",
    "Closed gyms",
    "Closed movie theaters",
    "Closed day cares",
    "Closed restaurants except take out",
    "Date closed K-12 schools"};

std::string resolve_region(const std::string& name, const RegionAliases& aliases) {
  auto it = aliases.find(name);
  return it == aliases.end() ? name : it->second;
}

std::optional<double> optional_number(const std::string& cell, std::string_view what) {
  if (cell.empty()) return std::nullopt;
  return csv::parse_double(cell, what);
}

Date require_date(const std::string& text, const std::string& path) {
  auto d = parse_flexible_date(text);
  if (!d) throw DataError(path + ": bad date '" + text + "'");
  return *d;
}

}  // namespace

RegionDaily load_cases(const std::string& path, const RegionAliases& aliases) {
  const csv::Table t = csv::read_plain(path);
  RegionDaily out;
  const int date_col = t.column("date");
  const int cum_col = t.column("cumulative") >= 0 ? t.column("cumulative") : t.column("cases");
  const int id_col = t.column("region_id");
  if (id_col >= 0 && date_col >= 0 && cum_col >= 0) {
    for (const auto& row : t.rows) {
      const std::string region = resolve_region(row[static_cast<std::size_t>(id_col)], aliases);
      const Date d = require_date(row[static_cast<std::size_t>(date_col)], path);
      const double v = csv::parse_double(row[static_cast<std::size_t>(cum_col)], "cumulative");
      if (v < 0) throw DataError(path + ": negative case count for " + region);
      auto [it, inserted] = out[region].emplace(d, v);
      if (!inserted) throw DataError(path + ": duplicate date for " + region);
    }
    return out;
  }

  int region_col = -1;
  for (std::string_view name : {"region_id", "Province_State", "Province/State", "state"}) {
    if ((region_col = t.column(name)) >= 0) break;
  }
  if (region_col < 0) throw DataError(path + ": no region column in case file");
  std::vector<std::pair<std::size_t, Date>> date_cols;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (auto d = parse_flexible_date(t.header[c])) date_cols.emplace_back(c, *d);
  }
  if (date_cols.empty()) throw DataError(path + ": no date columns in case file");
  for (const auto& row : t.rows) {
    const std::string region = resolve_region(row[static_cast<std::size_t>(region_col)], aliases);
    auto& series = out[region];
    for (const auto& [c, d] : date_cols) {
      const double v = row[c].empty() ? 0.0 : csv::parse_double(row[c], "cases");
      if (v < 0) throw DataError(path + ": negative case count for " + region);
      series[d] += v;
    }
  }
  return out;
}

std::optional<double> factor_value(const StateFactors& f, std::string_view name) {
  if (name == "population") return f.population;
  if (name == "area_sq_miles") return f.area_sq_miles;
  if (name == "homeless_2019") return f.homeless_2019;
  if (name == "unemployment_2018") return f.unemployment_2018;
  if (name == "at_risk_fraction") return f.at_risk_fraction;
  throw std::invalid_argument("unknown factor: " + std::string(name));
}

FactorTable load_factors(const std::string& path) {
  const csv::Table t = csv::read_plain(path);
  const auto id = t.require_column("region_id", path);
  std::array<int, 5> cols{};
  for (std::size_t i = 0; i < kFactorNames.size(); ++i) cols[i] = t.column(kFactorNames[i]);
  FactorTable out;
  for (const auto& row : t.rows) {
    StateFactors f;
    f.region_id = row[id];
    std::array<std::optional<double>, 5> v;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (cols[i] >= 0) v[i] = optional_number(row[static_cast<std::size_t>(cols[i])], kFactorNames[i]);
    }
    f.population = v[0];
    f.area_sq_miles = v[1];
    f.homeless_2019 = v[2];
    f.unemployment_2018 = v[3];
    f.at_risk_fraction = v[4];
    if (f.population && !(*f.population > 0)) {
      throw DataError(path + ": population must be positive for " + f.region_id);
    }
    for (const auto& frac : {f.unemployment_2018, f.at_risk_fraction}) {
      if (frac && !(*frac >= 0 && *frac <= 1)) {
        throw DataError(path + ": fraction outside [0, 1] for " + f.region_id);
      }
    }
    if (!out.emplace(f.region_id, f).second) {
      throw DataError(path + ": duplicate region " + f.region_id);
    }
  }
  return out;
}

std::string_view policy_key(PolicyType p) { return kKeys[static_cast<std::size_t>(p)]; }

std::string_view policy_display_name(PolicyType p) {
  return kDisplay[static_cast<std::size_t>(p)];
}

std::optional<PolicyType> parse_policy_type(std::string_view text) {
  for (std::size_t i = 0; i < kKeys.size(); ++i) {
    if (text == kKeys[i] || text == kDisplay[i]) return kPolicyTypes[i];
  }
  return std::nullopt;
}

PolicyTable load_policies(const std::string& path) {
  const csv::Table t = csv::read_plain(path);
  const auto id = t.require_column("region_id", path);
  const auto type = t.require_column("policy_type", path);
  const auto date = t.require_column("date", path);
  PolicyTable out;
  for (const auto& row : t.rows) {
    const auto p = parse_policy_type(row[type]);
    if (!p) throw DataError(path + ": unknown policy type '" + row[type] + "'");
    std::optional<Date> d;
    if (!row[date].empty()) d = require_date(row[date], path);
    if (!out[row[id]].emplace(*p, d).second) {
      throw DataError(path + ": duplicate policy " + row[type] + " for " + row[id]);
    }
  }
  return out;
}

std::map<std::string, Date, std::less<>> policy_dates(const PolicyTable& table, PolicyType p) {
  std::map<std::string, Date, std::less<>> out;
  for (const auto& [region, policies] : table) {
    auto it = policies.find(p);
    if (it != policies.end() && it->second) out.emplace(region, *it->second);
  }
  return out;
}

InfectionRates daily_infection_rate(const RegionDaily& cumulative, const FactorTable& factors) {
  InfectionRates out;
  for (const auto& [region, series] : cumulative) {
    auto f = factors.find(region);
    if (f == factors.end() || !f->second.population) {
      out.missing_population.push_back(region);
      continue;
    }
    const double pop = *f->second.population;
    auto& rates = out.rate[region];
    std::optional<double> prev;
    for (const auto& [d, total] : series) {
      double fresh = prev ? total - *prev : total;
      if (fresh < 0) {
        out.clamped[region].push_back(d);
        fresh = 0;
      }
      rates[d] = fresh / pop;
      prev = total;
    }
  }
  return out;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  std::vector<double> a, b;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) continue;
    a.push_back(x[i]);
    b.push_back(y[i]);
  }
  const std::size_t n = a.size();
  if (n < 3) return std::nullopt;
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0 || sbb == 0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

FactorPanel static_panel(const FactorTable& factors) {
  FactorPanel panel;
  for (std::string_view name : kFactorNames) {
    auto& column = panel.fixed[std::string(name)];
    for (const auto& [region, f] : factors) {
      if (auto v = factor_value(f, name)) column.emplace(region, *v);
    }
  }
  return panel;
}

std::vector<DailyCorrelation> daily_factor_correlations(const RegionDaily& target,
                                                        const FactorPanel& panel) {
  std::map<Date, std::vector<std::pair<std::string_view, double>>> by_date;
  for (const auto& [region, series] : target) {
    for (const auto& [d, v] : series) by_date[d].emplace_back(region, v);
  }
  std::vector<std::string_view> names;
  for (const auto& [name, col] : panel.fixed) names.push_back(name);
  for (const auto& [name, col] : panel.daily) names.push_back(name);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());

  std::vector<DailyCorrelation> out;
  for (const auto& [d, values] : by_date) {
    for (std::string_view name : names) {
      std::vector<double> xs, ys;
      auto fixed = panel.fixed.find(name);
      auto daily = panel.daily.find(name);
      for (const auto& [region, v] : values) {
        std::optional<double> f;
        if (fixed != panel.fixed.end()) {
          if (auto it = fixed->second.find(region); it != fixed->second.end()) f = it->second;
        }
        if (!f && daily != panel.daily.end()) {
          if (auto r = daily->second.find(region); r != daily->second.end()) {
            if (auto it = r->second.find(d); it != r->second.end()) f = it->second;
          }
        }
        if (!f || std::isnan(*f) || std::isnan(v)) continue;
        xs.push_back(v);
        ys.push_back(*f);
      }
      out.push_back({d, std::string(name), pearson(xs, ys), xs.size()});
    }
  }
  return out;
}

std::vector<PolicyCorrelation> policy_correlation(const RegionDaily& cumulative,
                                                  const PolicyTable& policies, Date snapshot,
                                                  double missing_days) {
  std::vector<PolicyCorrelation> out;
  for (PolicyType p : kPolicyTypes) {
    PolicyCorrelation row{p, std::nullopt, 0, 0};
    std::vector<double> xs, ys;
    for (const auto& [region, table] : policies) {
      auto cases = cumulative.find(region);
      if (cases == cumulative.end()) continue;
      auto at = cases->second.find(snapshot);
      if (at == cases->second.end()) continue;
      auto it = table.find(p);
      if (it != table.end() && it->second) {
        xs.push_back(static_cast<double>((snapshot - *it->second).count()));
      } else {
        xs.push_back(missing_days);
        ++row.sentinel_regions;
      }
      ys.push_back(at->second);
    }
    row.regions = xs.size();
    row.correlation = pearson(xs, ys);
    out.push_back(row);
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> policy_table_rows(
    std::span<const PolicyCorrelation> rows) {
  std::vector<PolicyCorrelation> sorted(rows.begin(), rows.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const PolicyCorrelation& a, const PolicyCorrelation& b) {
                     if (a.correlation.has_value() != b.correlation.has_value()) {
                       return a.correlation.has_value();
                     }
                     return a.correlation && *a.correlation > *b.correlation;
                   });
  std::vector<std::pair<std::string, std::string>> out;
  for (const PolicyCorrelation& r : sorted) {
    std::string value;
    if (r.correlation) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.4f", *r.correlation);
      value = buf;
      if (value == "-0.0000") value = "0.0000";
    }
    out.emplace_back(std::string(policy_display_name(r.policy)), value);
  }
  return out;
}

}  // namespace smi::correlate
