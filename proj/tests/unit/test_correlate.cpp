#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "smi/correlate.hpp"
#include "smi/error.hpp"

using namespace smi;
using namespace smi::correlate;
using testing_helpers::data_path;
using testing_helpers::day;

namespace {

const RegionAliases kAliases{
    {"Northeast", "NE"}, {"Northwest", "NW"}, {"Southeast", "SE"}, {"Southwest", "SW"}};

std::string write_file(const std::string& dir, const std::string& name, const std::string& text) {
  const auto path = testing_helpers::scratch_dir(dir) / name;
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST(Pearson, Basics) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> y, neg;
  for (double v : x) {
    y.push_back(2 * v + 1);
    neg.push_back(-v);
  }
  EXPECT_DOUBLE_EQ(*pearson(x, y), 1.0);
  EXPECT_DOUBLE_EQ(*pearson(x, neg), -1.0);
  EXPECT_FALSE(pearson(std::vector<double>{1, 2}, std::vector<double>{3, 4}));
  EXPECT_FALSE(pearson(x, std::vector<double>(5, 7.0)));
  EXPECT_THROW(pearson(x, std::vector<double>{1, 2}), std::invalid_argument);
}

TEST(Pearson, FivePointHandFixture) {
  // Deviations x: -2,-1,0,1,2; y: -2,0,1,0,1. Sxy = 6, Sxx = 10, Syy = 6.
  const std::vector<double> x{1, 2, 3, 4, 5}, y{2, 4, 5, 4, 5};
  EXPECT_NEAR(*pearson(x, y), std::sqrt(0.6), 1e-12);
}

TEST(Pearson, PairwiseDeletion) {
  const std::vector<double> x{1, 2, NAN, 3, 4, 5}, y{2, 4, 9, 5, NAN, 4};
  // Remaining pairs (1,2) (2,4) (3,5) (5,4).
  EXPECT_NEAR(*pearson(x, y), static_cast<double>(oracle::pearson({1, 2, 3, 5}, {2, 4, 5, 4})), 1e-12);
}

TEST(Pearson, Properties) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0, 1);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> x, y, ax, ny;
    for (int i = 0; i < 3 + trial % 40; ++i) {
      x.push_back(n(rng));
      y.push_back(0.5 * x.back() + n(rng));
      ax.push_back(3.5 * x.back() - 12);
      ny.push_back(-y.back());
    }
    const double r = *pearson(x, y);
    EXPECT_NEAR(r, static_cast<double>(oracle::pearson(x, y)), 1e-12);
    EXPECT_NEAR(*pearson(y, x), r, 1e-14);
    EXPECT_NEAR(*pearson(ax, y), r, 1e-12);
    EXPECT_NEAR(*pearson(x, ny), -r, 1e-14);
    EXPECT_LE(std::abs(r), 1.0);
  }
}

TEST(InfectionRate, HandArithmetic) {
  RegionDaily cum;
  cum["A"] = {{day("2020-03-01"), 0}, {day("2020-03-02"), 10}, {day("2020-03-03"), 30}};
  cum["B"] = {{day("2020-03-01"), 5}, {day("2020-03-02"), 5}, {day("2020-03-03"), 4}};
  cum["C"] = {{day("2020-03-01"), 5}};
  FactorTable f;
  f["A"].population = 1000;
  f["B"].population = 100;
  f["C"].area_sq_miles = 3;
  const auto r = daily_infection_rate(cum, f);
  EXPECT_EQ(r.rate.at("A").at(day("2020-03-02")), 0.01);
  EXPECT_EQ(r.rate.at("A").at(day("2020-03-03")), 0.02);
  EXPECT_EQ(r.rate.at("B").at(day("2020-03-01")), 0.05);
  EXPECT_EQ(r.rate.at("B").at(day("2020-03-02")), 0.0);
  EXPECT_EQ(r.rate.at("B").at(day("2020-03-03")), 0.0);
  EXPECT_EQ(r.clamped.at("B"), std::vector<Date>{day("2020-03-03")});
  EXPECT_EQ(r.missing_population, std::vector<std::string>{"C"});
  EXPECT_FALSE(r.rate.count("C"));
}

TEST(InfectionRate, ConservationWithoutClamping) {
  std::mt19937_64 rng(2);
  RegionDaily cum;
  FactorTable f;
  double total = 0;
  for (int d = 0; d < 60; ++d) {
    total += static_cast<double>(rng() % 50);
    cum["A"][day("2020-03-01") + std::chrono::days{d}] = total;
  }
  f["A"].population = 7e5;
  const auto r = daily_infection_rate(cum, f);
  double sum = 0;
  for (const auto& [d, v] : r.rate.at("A")) sum += v;
  EXPECT_NEAR(sum, total / 7e5, 1e-12);
}

TEST(LoadCases, WideFixtureSumsCounties) {
  const auto cases = load_cases(data_path("cases_wide.csv"), kAliases);
  ASSERT_EQ(cases.size(), 4u);
  EXPECT_EQ(cases.at("NE").at(day("2020-05-10")), 6034);
  EXPECT_EQ(cases.at("SW").at(day("2020-05-10")), 6348);
  EXPECT_EQ(cases.at("SW").size(), 71u);
  FactorTable f = load_factors(data_path("factors.csv"));
  const auto rates = daily_infection_rate(cases, f);
  EXPECT_EQ(rates.clamped.at("SW"), std::vector<Date>{day("2020-04-10")});
  EXPECT_FALSE(rates.clamped.count("NE"));
}

TEST(LoadCases, LongLayoutAndErrors) {
  const auto p = write_file("cases_long", "c.csv", "region_id,date,cumulative\nA,2020-03-01,3\nA,2020-03-02,5\n");
  const auto c = load_cases(p);
  EXPECT_EQ(c.at("A").at(day("2020-03-02")), 5);
  const auto bad = write_file("cases_bad", "c.csv", "region_id,date,cumulative\nA,2020-03-01,-3\n");
  EXPECT_THROW(load_cases(bad), DataError);
  const auto dup = write_file("cases_dup", "c.csv", "region_id,date,cumulative\nA,2020-03-01,3\nA,2020-03-01,4\n");
  EXPECT_THROW(load_cases(dup), DataError);
}

TEST(LoadFactors, BlanksAndValidation) {
  const auto f = load_factors(data_path("factors.csv"));
  ASSERT_EQ(f.size(), 4u);
  EXPECT_FALSE(f.at("SW").homeless_2019);
  EXPECT_EQ(*f.at("NE").population, 5400000);
  EXPECT_EQ(*factor_value(f.at("NW"), "area_sq_miles"), 97000);
  const auto bad = write_file("factors_bad", "f.csv", "region_id,population,at_risk_fraction\nA,100,1.5\n");
  EXPECT_THROW(load_factors(bad), DataError);
  const auto zero = write_file("factors_zero", "f.csv", "region_id,population\nA,0\n");
  EXPECT_THROW(load_factors(zero), DataError);
}

TEST(Policies, NamesAndLoading) {
  EXPECT_EQ(policy_display_name(PolicyType::state_of_emergency), "State of emergency");
  EXPECT_EQ(policy_display_name(PolicyType::closed_k12_schools), "Date closed K-12 schools");
  for (PolicyType p : kPolicyTypes) {
    EXPECT_EQ(parse_policy_type(policy_key(p)), p);
    EXPECT_EQ(parse_policy_type(policy_display_name(p)), p);
  }
  EXPECT_FALSE(parse_policy_type("closed_beaches"));
  const auto t = load_policies(data_path("policies.csv"));
  EXPECT_FALSE(t.at("SW").at(PolicyType::stay_at_home).has_value());
  EXPECT_EQ(*t.at("NE").at(PolicyType::stay_at_home), day("2020-03-23"));
  const auto dates = policy_dates(t, PolicyType::stay_at_home);
  EXPECT_EQ(dates.size(), 3u);
  EXPECT_FALSE(dates.count("SW"));
}

TEST(DailyFactors, ProportionalToArea) {
  RegionDaily target;
  FactorTable f;
  const std::vector<std::pair<std::string, double>> areas{{"A", 10}, {"B", 25}, {"C", 40}};
  for (const auto& [id, area] : areas) {
    f[id].region_id = id;
    f[id].area_sq_miles = area;
    f[id].population = 1000;  // identical everywhere
    for (int d = 0; d < 5; ++d) target[id][day("2020-03-01") + std::chrono::days{d}] = area * (d + 1) * 1e-5;
  }
  const auto rows = daily_factor_correlations(target, static_panel(f));
  ASSERT_EQ(rows.size(), 5u * kFactorNames.size());
  for (const auto& r : rows) {
    if (r.factor == "area_sq_miles") {
      EXPECT_NEAR(*r.correlation, 1.0, 1e-12);
      EXPECT_EQ(r.regions, 3u);
    } else {
      EXPECT_FALSE(r.correlation);  // constant population or no values at all
      EXPECT_EQ(r.regions, r.factor == "population" ? 3u : 0u);
    }
  }
}

TEST(DailyFactors, RandomPanelMatchesBruteForce) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  RegionDaily target;
  FactorPanel panel;
  std::vector<std::string> regions;
  for (int i = 0; i < 12; ++i) regions.push_back("R" + std::to_string(10 + i));
  for (const auto& id : regions) {
    if (u(rng) < 0.9) panel.fixed["area"][id] = u(rng);
    for (int d = 0; d < 20; ++d) {
      const Date date = day("2020-03-01") + std::chrono::days{d};
      if (u(rng) < 0.85) target[id][date] = u(rng);
      if (u(rng) < 0.85) panel.daily["mobility"][id][date] = u(rng);
    }
  }
  const auto rows = daily_factor_correlations(target, panel);
  ASSERT_EQ(rows.size(), 40u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (i > 0) {
      EXPECT_TRUE(rows[i - 1].date < r.date || (rows[i - 1].date == r.date && rows[i - 1].factor < r.factor));
    }
    std::vector<double> xs, ys;
    for (const auto& id : regions) {
      auto t = target.find(id);
      if (t == target.end() || !t->second.count(r.date)) continue;
      std::optional<double> v;
      if (r.factor == "area" && panel.fixed["area"].count(id)) v = panel.fixed["area"][id];
      if (r.factor == "mobility" && panel.daily["mobility"][id].count(r.date)) v = panel.daily["mobility"][id][r.date];
      if (!v) continue;
      xs.push_back(t->second.at(r.date));
      ys.push_back(*v);
    }
    EXPECT_EQ(r.regions, xs.size());
    if (xs.size() >= 3) {
      EXPECT_NEAR(*r.correlation, static_cast<double>(oracle::pearson(xs, ys)), 1e-12);
    } else {
      EXPECT_FALSE(r.correlation);
    }
  }
}

TEST(PolicyCorrelation, LinearFixtureAndSentinel) {
  RegionDaily cum;
  PolicyTable pol;
  const Date snap = day("2020-05-10");
  for (int i = 0; i < 8; ++i) {
    const std::string id = "S" + std::to_string(i);
    const int age = 30 + 5 * i;
    pol[id][PolicyType::stay_at_home] = snap - std::chrono::days{age};
    pol[id][PolicyType::closed_gyms] = snap - std::chrono::days{40};
    cum[id][snap] = 2000 + 2.0 * age;
  }
  pol["S9"][PolicyType::stay_at_home] = std::nullopt;  // no case data: left out
  const auto rows = policy_correlation(cum, pol, snap);
  ASSERT_EQ(rows.size(), 10u);
  for (const auto& r : rows) {
    if (r.policy == PolicyType::stay_at_home) {
      EXPECT_NEAR(*r.correlation, 1.0, 1e-12);
      EXPECT_EQ(r.regions, 8u);
      EXPECT_EQ(r.sentinel_regions, 0u);
    } else if (r.policy == PolicyType::closed_gyms) {
      EXPECT_FALSE(r.correlation);  // one shared date: constant x
    } else {
      EXPECT_EQ(r.sentinel_regions, 8u);
      EXPECT_FALSE(r.correlation);
    }
  }
  // A sentinel region with y = 0 keeps the relation linear.
  pol["S8"][PolicyType::stay_at_home] = std::nullopt;
  cum["S8"][snap] = 0;
  const auto with_sentinel = policy_correlation(cum, pol, snap);
  EXPECT_NEAR(*with_sentinel[static_cast<int>(PolicyType::stay_at_home)].correlation, 1.0, 1e-12);
  EXPECT_EQ(with_sentinel[static_cast<int>(PolicyType::stay_at_home)].sentinel_regions, 1u);
}

TEST(PolicyCorrelation, EqualCasesAreMissing) {
  RegionDaily cum;
  PolicyTable pol;
  for (int i = 0; i < 5; ++i) {
    const std::string id = "S" + std::to_string(i);
    pol[id][PolicyType::state_of_emergency] = day("2020-03-10");
    cum[id][day("2020-05-10")] = 100;
  }
  EXPECT_FALSE(policy_correlation(cum, pol, day("2020-05-10"))[0].correlation);
}

TEST(PolicyCorrelation, InvariantToCommonShift) {
  std::mt19937_64 rng(4);
  RegionDaily cum;
  PolicyTable pol, shifted;
  const Date snap = day("2020-05-10");
  const auto offset = std::chrono::days{17};
  for (int i = 0; i < 20; ++i) {
    const std::string id = "S" + std::to_string(i);
    for (PolicyType p : kPolicyTypes) {
      std::optional<Date> d;
      if (rng() % 5) d = day("2020-03-01") + std::chrono::days{static_cast<int>(rng() % 50)};
      pol[id][p] = d;
      shifted[id][p] = d ? std::optional(*d + offset) : std::nullopt;
    }
    const double y = static_cast<double>(rng() % 10000);
    cum[id][snap] = y;
    cum[id][snap + offset] = y;
  }
  const auto a = policy_correlation(cum, pol, snap);
  const auto b = policy_correlation(cum, shifted, snap + offset);
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a[i].correlation.has_value(), b[i].correlation.has_value());
    if (a[i].correlation) EXPECT_NEAR(*a[i].correlation, *b[i].correlation, 1e-12);
  }
}

TEST(PolicyCorrelation, TableRowsFormatAndOrder) {
  std::vector<PolicyCorrelation> rows{{PolicyType::closed_gyms, 0.12345, 4, 0},
                                      {PolicyType::state_of_emergency, 0.2587, 4, 0},
                                      {PolicyType::froze_evictions, std::nullopt, 4, 0},
                                      {PolicyType::closed_day_cares, -0.00001, 4, 0}};
  const auto t = policy_table_rows(rows);
  ASSERT_EQ(t.size(), 4u);
  EXPECT_EQ(t[0], (std::pair<std::string, std::string>{"State of emergency", "0.2587"}));
  EXPECT_EQ(t[1].second, "0.1235");
  EXPECT_EQ(t[2], (std::pair<std::string, std::string>{"Closed day cares", "0.0000"}));
  EXPECT_EQ(t[3], (std::pair<std::string, std::string>{"Froze evictions", ""}));
}
