#include "denguecast/core.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace denguecast {

namespace {

constexpr double kPer100k = 1e5;

int parse_fixed(std::string_view text, std::size_t pos, std::size_t len, std::string_view what) {
  if (pos + len > text.size()) {
    throw std::invalid_argument("truncated " + std::string(what) + " in '" + std::string(text) + "'");
  }
  int value = 0;
  const char* first = text.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + len, value);
  if (ec != std::errc{} || ptr != first + len) {
    throw std::invalid_argument("bad " + std::string(what) + " in '" + std::string(text) + "'");
  }
  return value;
}

void expect_char(std::string_view text, std::size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c) {
    throw std::invalid_argument("malformed ISO-8601 value '" + std::string(text) + "'");
  }
}

}  // namespace

std::string_view to_string(IncidenceBand b) {
  switch (b) {
    case IncidenceBand::Low:
      return "low";
    case IncidenceBand::Medium:
      return "medium";
    case IncidenceBand::High:
      return "high";
  }
  return "low";
}

std::optional<IncidenceBand> parse_band(std::string_view text) {
  if (text == "low") return IncidenceBand::Low;
  if (text == "medium") return IncidenceBand::Medium;
  if (text == "high") return IncidenceBand::High;
  return std::nullopt;
}

WeeklySeries::WeeklySeries(CityId city, Count population, Date start_week, std::vector<Count> cases,
                           std::vector<Count> tweets)
    : city_(std::move(city)),
      population_(population),
      start_week_(start_week),
      cases_(std::move(cases)),
      tweets_(std::move(tweets)) {
  if (population_ < 1) {
    throw std::invalid_argument("population must be >= 1 for city '" + city_.value + "'");
  }
  if (cases_.empty()) {
    throw std::invalid_argument("series for city '" + city_.value + "' is empty");
  }
  if (cases_.size() != tweets_.size()) {
    throw std::invalid_argument("cases and tweets differ in length for city '" + city_.value + "'");
  }
  auto negative = [](Count c) { return c < 0; };
  if (std::ranges::any_of(cases_, negative) || std::ranges::any_of(tweets_, negative)) {
    throw std::invalid_argument("negative count in series for city '" + city_.value + "'");
  }
}

double WeeklySeries::exposure_scale() const noexcept {
  return static_cast<double>(population_) / kPer100k;
}

WeeklySeries WeeklySeries::slice(std::size_t first, std::size_t count) const {
  if (count == 0 || first + count > cases_.size()) {
    throw std::out_of_range("series slice out of range");
  }
  auto begin = static_cast<std::ptrdiff_t>(first);
  auto end = static_cast<std::ptrdiff_t>(first + count);
  return WeeklySeries(city_, population_, start_week_ + std::chrono::days(7 * static_cast<long>(first)),
                      std::vector<Count>(cases_.begin() + begin, cases_.begin() + end),
                      std::vector<Count>(tweets_.begin() + begin, tweets_.begin() + end));
}

double exposure_scale(const WeeklySeries& series) noexcept { return series.exposure_scale(); }

double incidence_rate(Count cases, Count population) {
  if (population < 1) {
    throw std::invalid_argument("population must be >= 1");
  }
  return static_cast<double>(cases) * kPer100k / static_cast<double>(population);
}

IncidenceBand band(double rate) {
  if (rate < 100.0) return IncidenceBand::Low;
  if (rate < 300.0) return IncidenceBand::Medium;
  return IncidenceBand::High;
}

std::optional<int> week_index(Date day, Date start_week) {
  if (day < start_week) return std::nullopt;
  auto days = (day - start_week).count();
  return static_cast<int>(1 + days / 7);
}

std::optional<int> week_index(Timestamp timestamp, Date start_week) {
  return week_index(std::chrono::floor<std::chrono::days>(timestamp), start_week);
}

Date parse_iso_date(std::string_view text) {
  if (text.size() < 10) {
    throw std::invalid_argument("malformed ISO-8601 date '" + std::string(text) + "'");
  }
  int y = parse_fixed(text, 0, 4, "year");
  expect_char(text, 4, '-');
  int m = parse_fixed(text, 5, 2, "month");
  expect_char(text, 7, '-');
  int d = parse_fixed(text, 8, 2, "day");
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                  std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) {
    throw std::invalid_argument("invalid calendar date '" + std::string(text) + "'");
  }
  return std::chrono::sys_days{ymd};
}

Timestamp parse_iso_datetime(std::string_view text) {
  Date day = parse_iso_date(text.substr(0, std::min<std::size_t>(10, text.size())));
  Timestamp ts{day};
  if (text.size() == 10) return ts;
  if (text[10] != 'T' && text[10] != ' ') {
    throw std::invalid_argument("malformed ISO-8601 datetime '" + std::string(text) + "'");
  }
  int hh = parse_fixed(text, 11, 2, "hour");
  expect_char(text, 13, ':');
  int mm = parse_fixed(text, 14, 2, "minute");
  int ss = 0;
  std::size_t pos = 16;
  if (pos < text.size() && text[pos] == ':') {
    ss = parse_fixed(text, 17, 2, "second");
    pos = 19;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    }
  }
  if (hh > 23 || mm > 59 || ss > 60) {
    throw std::invalid_argument("invalid time of day in '" + std::string(text) + "'");
  }
  ts += std::chrono::hours(hh) + std::chrono::minutes(mm) + std::chrono::seconds(ss);
  if (pos == text.size()) return ts;
  if (text[pos] == 'Z' && pos + 1 == text.size()) return ts;
  if ((text[pos] == '+' || text[pos] == '-') && pos + 6 == text.size()) {
    int oh = parse_fixed(text, pos + 1, 2, "offset hour");
    expect_char(text, pos + 3, ':');
    int om = parse_fixed(text, pos + 4, 2, "offset minute");
    auto offset = std::chrono::hours(oh) + std::chrono::minutes(om);
    return text[pos] == '+' ? ts - offset : ts + offset;
  }
  throw std::invalid_argument("malformed ISO-8601 offset in '" + std::string(text) + "'");
}

std::string format_iso_date(Date day) {
  std::chrono::year_month_day ymd{day};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

}  // namespace denguecast
