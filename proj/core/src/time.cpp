#include "smi/time.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

namespace smi {

namespace {

using namespace std::chrono;

bool read_int(std::string_view text, size_t pos, size_t len, int& out) {
  if (pos + len > text.size()) return false;
  for (size_t i = pos; i < pos + len; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) return false;
  }
  auto [p, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
  return ec == std::errc{} && p == text.data() + pos + len;
}

std::optional<Date> make_date(int y, int m, int d) {
  year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return sys_days{ymd};
}

std::optional<Instant> make_instant(Date d, int hh, int mm, int ss) {
  if (hh < 0 || hh > 23 || mm < 0 || mm > 59 || ss < 0 || ss > 60) return std::nullopt;
  return Instant{d} + hours{hh} + minutes{mm} + seconds{ss};
}

std::optional<Instant> parse_iso(std::string_view s) {
  int y, mo, d, hh = 0, mi = 0, ss = 0;
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  if (!read_int(s, 0, 4, y) || !read_int(s, 5, 2, mo) || !read_int(s, 8, 2, d)) return std::nullopt;
  auto date = make_date(y, mo, d);
  if (!date) return std::nullopt;
  size_t pos = 10;
  if (pos == s.size()) return make_instant(*date, 0, 0, 0);
  if (s[pos] != 'T' && s[pos] != ' ') return std::nullopt;
  ++pos;
  if (!read_int(s, pos, 2, hh) || pos + 2 >= s.size() || s[pos + 2] != ':' ||
      !read_int(s, pos + 3, 2, mi)) {
    return std::nullopt;
  }
  pos += 5;
  if (pos < s.size() && s[pos] == ':') {
    if (!read_int(s, pos + 1, 2, ss)) return std::nullopt;
    pos += 3;
  }
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  auto t = make_instant(*date, hh, mi, ss);
  if (!t) return std::nullopt;
  if (pos == s.size()) return t;  // no designator: treated as UTC
  if (s[pos] == 'Z' && pos + 1 == s.size()) return t;
  if (s[pos] == '+' || s[pos] == '-') {
    int oh, om = 0;
    if (!read_int(s, pos + 1, 2, oh)) return std::nullopt;
    size_t rest = pos + 3;
    if (rest < s.size() && s[rest] == ':') ++rest;
    if (rest < s.size()) {
      if (!read_int(s, rest, 2, om) || rest + 2 != s.size()) return std::nullopt;
    }
    auto offset = hours{oh} + minutes{om};
    return s[pos] == '+' ? *t - offset : *t + offset;
  }
  return std::nullopt;
}

// "Mon Mar 16 12:00:00 +0000 2020"
std::optional<Instant> parse_twitter(std::string_view s) {
  static constexpr std::array<std::string_view, 12> kMonths = {
      "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  if (s.size() != 30 || s[3] != ' ' || s[7] != ' ' || s[10] != ' ' || s[19] != ' ' ||
      s[25] != ' ') {
    return std::nullopt;
  }
  int month_index = -1;
  for (size_t i = 0; i < kMonths.size(); ++i) {
    if (s.substr(4, 3) == kMonths[i]) month_index = static_cast<int>(i) + 1;
  }
  int d, hh, mi, ss, y, off;
  if (month_index < 0 || !read_int(s, 8, 2, d) || !read_int(s, 11, 2, hh) ||
      !read_int(s, 14, 2, mi) || !read_int(s, 17, 2, ss) || !read_int(s, 21, 4, off) ||
      !read_int(s, 26, 4, y)) {
    return std::nullopt;
  }
  if (s[20] != '+' && s[20] != '-') return std::nullopt;
  auto date = make_date(y, month_index, d);
  if (!date) return std::nullopt;
  auto t = make_instant(*date, hh, mi, ss);
  if (!t) return std::nullopt;
  auto offset = hours{off / 100} + minutes{off % 100};
  return s[20] == '+' ? *t - offset : *t + offset;
}

}  // namespace

Date to_date(Instant t) { return floor<days>(t); }

Date week_start(Date d) {
  const weekday wd{d};
  return d - days{wd.iso_encoding() - 1};
}

Date shift_years(Date d, int years) {
  year_month_day ymd{d};
  year_month_day shifted{ymd.year() + std::chrono::years{years}, ymd.month(), ymd.day()};
  if (!shifted.ok()) shifted = year_month_day_last{shifted.year(), month_day_last{shifted.month()}};
  return sys_days{shifted};
}

int year_of(Date d) { return static_cast<int>(year_month_day{d}.year()); }

std::optional<Date> parse_date(std::string_view text) {
  int y, m, d;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  if (!read_int(text, 0, 4, y) || !read_int(text, 5, 2, m) || !read_int(text, 8, 2, d)) {
    return std::nullopt;
  }
  return make_date(y, m, d);
}

std::string format_date(Date d) {
  year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::optional<Instant> parse_timestamp(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool all_digits = true;
  for (char c : text) all_digits = all_digits && std::isdigit(static_cast<unsigned char>(c));
  if (all_digits) {
    long long secs = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), secs);
    if (ec != std::errc{} || p != text.data() + text.size()) return std::nullopt;
    return Instant{seconds{secs}};
  }
  if (auto t = parse_iso(text)) return t;
  return parse_twitter(text);
}

std::string format_instant(Instant t) {
  const Date d = to_date(t);
  const auto tod = hh_mm_ss<seconds>{t - Instant{d}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", format_date(d).c_str(),
                static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()));
  return buf;
}

std::optional<Date> parse_flexible_date(std::string_view text) {
  if (auto d = parse_date(text)) return d;
  // M/D/YY or M/D/YYYY
  const auto first = text.find('/');
  const auto second = text.find('/', first == std::string_view::npos ? 0 : first + 1);
  if (first == std::string_view::npos || second == std::string_view::npos) return std::nullopt;
  int m, d, y;
  if (!read_int(text, 0, first, m) || !read_int(text, first + 1, second - first - 1, d) ||
      !read_int(text, second + 1, text.size() - second - 1, y)) {
    return std::nullopt;
  }
  if (text.size() - second - 1 == 2) y += 2000;
  return make_date(y, m, d);
}

}  // namespace smi
