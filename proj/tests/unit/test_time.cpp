#include <gtest/gtest.h>

#include "helpers.hpp"
#include "smi/time.hpp"

using namespace smi;
using testing_helpers::at;
using testing_helpers::day;

TEST(Time, WeekStartsOnMonday) {
  EXPECT_EQ(week_start(day("2020-03-16")), day("2020-03-16"));
  EXPECT_EQ(week_start(day("2020-03-22")), day("2020-03-16"));
  EXPECT_EQ(week_start(day("2019-01-01")), day("2018-12-31"));
}

TEST(Time, SundayNightAndMondayMorningAreDifferentWeeks) {
  EXPECT_EQ(week_start(at("2020-03-15T23:59:59Z")), day("2020-03-09"));
  EXPECT_EQ(week_start(at("2020-03-16T00:00:00Z")), day("2020-03-16"));
}

TEST(Time, OffsetsNormaliseToUtc) {
  EXPECT_EQ(at("2020-03-16T01:30:00+02:00"), at("2020-03-15T23:30:00Z"));
  EXPECT_EQ(at("2020-03-15T20:00:00-05:00"), at("2020-03-16T01:00:00Z"));
}

TEST(Time, TimestampLayouts) {
  const Instant ref = at("2020-03-16T12:00:00Z");
  EXPECT_EQ(*parse_timestamp("Mon Mar 16 12:00:00 +0000 2020"), ref);
  EXPECT_EQ(*parse_timestamp("2020-03-16 12:00:00"), ref);
  EXPECT_EQ(*parse_timestamp("2020-03-16T12:00:00.750Z"), ref);
  EXPECT_EQ(*parse_timestamp("1584360000"), ref);
  EXPECT_FALSE(parse_timestamp("2020-13-01T00:00:00Z"));
  EXPECT_FALSE(parse_timestamp("yesterday"));
  EXPECT_EQ(format_instant(ref), "2020-03-16T12:00:00Z");
}

TEST(Time, ShiftYears) {
  EXPECT_EQ(shift_years(day("2020-03-16"), -1), day("2019-03-16"));
  EXPECT_EQ(shift_years(day("2020-02-29"), -1), day("2019-02-28"));
  EXPECT_EQ(year_of(day("2020-12-31")), 2020);
}

TEST(Time, FlexibleDates) {
  EXPECT_EQ(*parse_flexible_date("3/16/20"), day("2020-03-16"));
  EXPECT_EQ(*parse_flexible_date("3/16/2020"), day("2020-03-16"));
  EXPECT_EQ(*parse_flexible_date("2020-03-16"), day("2020-03-16"));
  EXPECT_FALSE(parse_flexible_date("UID"));
  EXPECT_FALSE(parse_date("2020-02-30"));
}
