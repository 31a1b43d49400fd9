#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace denguecast {

using Count = std::int64_t;
using Date = std::chrono::sys_days;
using Timestamp = std::chrono::sys_seconds;

/// Opaque city identifier (IBGE code, slug, or any stable string).
struct CityId {
  std::string value;

  friend auto operator<=>(const CityId&, const CityId&) = default;
};

/// WHO incidence scale, cases per 100 000 inhabitants per week.
enum class IncidenceBand { Low, Medium, High };

std::string_view to_string(IncidenceBand band);
std::optional<IncidenceBand> parse_band(std::string_view text);

/// Paired weekly case and tweet counts for one city.
///
/// Week t of the series (1-based) covers the seven days starting at
/// `start_week() + 7 * (t - 1)`. Instances are immutable once constructed;
/// the constructor throws std::invalid_argument when the series is empty,
/// the two sequences differ in length, any count is negative, or the
/// population is below one.
class WeeklySeries {
 public:
  WeeklySeries(CityId city, Count population, Date start_week, std::vector<Count> cases,
               std::vector<Count> tweets);

  const CityId& city() const noexcept { return city_; }
  Count population() const noexcept { return population_; }
  Date start_week() const noexcept { return start_week_; }
  std::span<const Count> cases() const noexcept { return cases_; }
  std::span<const Count> tweets() const noexcept { return tweets_; }
  std::size_t size() const noexcept { return cases_.size(); }

  /// population / 1e5: converts a per-100k rate into an expected count.
  double exposure_scale() const noexcept;

  /// Sub-series of `count` weeks starting at 0-based offset `first`; the
  /// anchor moves so week indices stay calendar-consistent.
  WeeklySeries slice(std::size_t first, std::size_t count) const;

  friend bool operator==(const WeeklySeries&, const WeeklySeries&) = default;

 private:
  CityId city_;
  Count population_;
  Date start_week_;
  std::vector<Count> cases_;
  std::vector<Count> tweets_;
};

double exposure_scale(const WeeklySeries& series) noexcept;

/// Cases per 100 000 inhabitants. Requires population >= 1.
double incidence_rate(Count cases, Count population);

/// rate < 100 is Low, [100, 300) is Medium, >= 300 is High.
IncidenceBand band(double rate);

/// 1-based week index of `timestamp` relative to the anchor, or nullopt for
/// timestamps before the anchor.
std::optional<int> week_index(Timestamp timestamp, Date start_week);
std::optional<int> week_index(Date day, Date start_week);

// ISO-8601 helpers. Parsers throw std::invalid_argument on malformed input.
Date parse_iso_date(std::string_view text);
/// Accepts `YYYY-MM-DD`, `YYYY-MM-DDTHH:MM[:SS[.fff]]` with an optional `Z` or
/// `+HH:MM` / `-HH:MM` offset; the result is UTC.
Timestamp parse_iso_datetime(std::string_view text);
std::string format_iso_date(Date day);

}  // namespace denguecast
