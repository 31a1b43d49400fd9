#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "denguecast/core.hpp"
#include "denguecast/ingest/gazetteer.hpp"
#include "denguecast/ingest/lac.hpp"
#include "denguecast/ingest/text.hpp"

namespace denguecast::ingest {

struct RawTweet {
  std::string id;
  std::string text;
  Timestamp created_at{};
  std::optional<std::string> location;
  std::optional<std::string> country;
  std::optional<std::pair<double, double>> coordinates;  ///< (lat, lon)
};

/// One JSON object with `id, text, created_at` required and nullable
/// `location, country, lat, lon`. Throws csv::FormatError tagged with `line`.
RawTweet parse_tweet_json(std::string_view json, std::size_t line = 0);

/// Any of location, country or coordinates present.
bool has_geographic_location(const RawTweet& tweet);
/// "brasil" or "brazil" as a standalone folded word of `field`.
bool mentions_brazil(std::string_view field);
bool filter_brazil(const RawTweet& tweet);

/// Text resolution of the location field; coordinates are consulted only
/// when a reverse geocoder is supplied and the text does not resolve.
std::optional<CityId> resolve_location(const RawTweet& tweet, const Gazetteer& gazetteer,
                                       const ReverseGeocoder* geocoder = nullptr);

/// Stage counts. Each stage is a subset of the one before it, except that
/// the two field-specific Brazil counts overlap.
struct Funnel {
  Count total = 0;
  Count geographic = 0;
  Count brazil_location = 0;
  Count brazil_country = 0;
  Count brazil = 0;
  Count resolved = 0;
  Count selected = 0;  ///< resolved tweets in the aggregated category

  Funnel& operator+=(const Funnel& other);
  friend bool operator==(const Funnel&, const Funnel&) = default;
};

/// Rows `stage,tweets,percent`; percent is relative to the geographic stage.
void write_funnel_csv(std::ostream& out, const Funnel& funnel);
Funnel read_funnel_csv(std::istream& in);

struct ClassifiedTweet {
  std::string id;
  CityId city;
  Timestamp created_at{};
  Category label = Category::Information;
};

struct MalformedLine {
  std::size_t line = 0;
  std::string message;
};

struct IngestResult {
  Funnel funnel;
  std::vector<ClassifiedTweet> tweets;  ///< every resolved tweet, classified
  std::vector<MalformedLine> malformed;
};

class TweetPipeline {
 public:
  TweetPipeline(const Gazetteer& gazetteer, const LacClassifier& classifier, TokenSet stopwords,
                Category selected = Category::PersonalExperience, const ReverseGeocoder* geocoder = nullptr);

  /// Pure per-tweet map; appends to `result`.
  void process(const RawTweet& tweet, IngestResult& result) const;

  Category selected() const noexcept { return selected_; }

 private:
  const Gazetteer& gazetteer_;
  const LacClassifier& classifier_;
  TokenSet stopwords_;
  Category selected_;
  const ReverseGeocoder* geocoder_;
};

/// Reads JSON lines (blank lines skipped). Malformed lines and duplicate ids
/// are recorded; once more than `max_malformed` have been seen a
/// csv::FormatError naming the offending line is thrown.
IngestResult ingest_jsonl(std::istream& in, const TweetPipeline& pipeline, std::size_t max_malformed = 0);

struct WeeklyCounts {
  std::map<CityId, std::vector<Count>> series;
  Count out_of_range = 0;  ///< matching tweets outside weeks 1..T
};

/// Per-city counts of `category` by week index relative to `start_week`.
/// Every city in `cities` gets a zero-filled series of length `weeks`.
WeeklyCounts aggregate_weekly(std::span<const ClassifiedTweet> tweets, Category category,
                              std::span<const CityId> cities, Date start_week, int weeks);

}  // namespace denguecast::ingest
