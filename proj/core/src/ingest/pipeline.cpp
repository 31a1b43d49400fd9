#include "denguecast/ingest/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>

#include "denguecast/csv.hpp"
#include "json.hpp"

namespace denguecast::ingest {

namespace {

using nlohmann::json;

std::optional<std::string> optional_string(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw csv::FormatError(std::string("tweet field '") + key + "' must be a string", line);
  return it->get<std::string>();
}

std::optional<double> optional_number(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw csv::FormatError(std::string("tweet field '") + key + "' must be a number", line);
  double v = it->get<double>();
  if (!std::isfinite(v)) throw csv::FormatError(std::string("tweet field '") + key + "' is not finite", line);
  return v;
}

struct Stage {
  const char* name;
  Count Funnel::*field;
};

constexpr Stage kStages[] = {
    {"Total crawled", &Funnel::total},
    {"With geographic location", &Funnel::geographic},
    {"Bra[s|z]il in location field", &Funnel::brazil_location},
    {"Bra[s|z]il in country field", &Funnel::brazil_country},
    {"Bra[s|z]il in location or country field", &Funnel::brazil},
    {"Location resolved", &Funnel::resolved},
    {"Selected category", &Funnel::selected},
};

}  // namespace

RawTweet parse_tweet_json(std::string_view text, std::size_t line) {
  json obj = json::parse(text.begin(), text.end(), nullptr, false);
  if (obj.is_discarded()) throw csv::FormatError("invalid JSON", line);
  if (!obj.is_object()) throw csv::FormatError("tweet must be a JSON object", line);

  RawTweet tweet;
  auto id = obj.find("id");
  if (id == obj.end() || id->is_null()) throw csv::FormatError("tweet is missing 'id'", line);
  if (id->is_string()) tweet.id = id->get<std::string>();
  else if (id->is_number_integer()) tweet.id = id->dump();
  else throw csv::FormatError("tweet 'id' must be a string or integer", line);

  auto body = optional_string(obj, "text", line);
  if (!body) throw csv::FormatError("tweet is missing 'text'", line);
  tweet.text = std::move(*body);

  auto created = optional_string(obj, "created_at", line);
  if (!created) throw csv::FormatError("tweet is missing 'created_at'", line);
  try {
    tweet.created_at = parse_iso_datetime(*created);
  } catch (const std::invalid_argument& err) {
    throw csv::FormatError(std::string("bad created_at: ") + err.what(), line);
  }

  tweet.location = optional_string(obj, "location", line);
  tweet.country = optional_string(obj, "country", line);
  auto lat = optional_number(obj, "lat", line);
  auto lon = optional_number(obj, "lon", line);
  if (lat.has_value() != lon.has_value()) throw csv::FormatError("tweet has only one of lat/lon", line);
  if (lat) {
    if (std::abs(*lat) > 90.0 || std::abs(*lon) > 180.0) throw csv::FormatError("coordinates out of range", line);
    tweet.coordinates = std::make_pair(*lat, *lon);
  }
  return tweet;
}

bool has_geographic_location(const RawTweet& tweet) {
  return tweet.location.has_value() || tweet.country.has_value() || tweet.coordinates.has_value();
}

bool mentions_brazil(std::string_view field) {
  for (const std::string& w : words(field)) {
    if (w == "brasil" || w == "brazil") return true;
  }
  return false;
}

bool filter_brazil(const RawTweet& tweet) {
  return (tweet.location && mentions_brazil(*tweet.location)) || (tweet.country && mentions_brazil(*tweet.country));
}

std::optional<CityId> resolve_location(const RawTweet& tweet, const Gazetteer& gazetteer,
                                       const ReverseGeocoder* geocoder) {
  if (tweet.location) {
    if (auto city = gazetteer.resolve(*tweet.location)) return city;
  }
  if (geocoder != nullptr && tweet.coordinates) {
    return geocoder->resolve(tweet.coordinates->first, tweet.coordinates->second);
  }
  return std::nullopt;
}

Funnel& Funnel::operator+=(const Funnel& other) {
  for (const Stage& s : kStages) this->*s.field += other.*s.field;
  return *this;
}

void write_funnel_csv(std::ostream& out, const Funnel& funnel) {
  csv::write_row(out, {"stage", "tweets", "percent"});
  for (const Stage& s : kStages) {
    Count n = funnel.*s.field;
    std::string pct = "NA";
    if (funnel.geographic > 0) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.2f", 100.0 * static_cast<double>(n) / static_cast<double>(funnel.geographic));
      pct = buf;
    }
    csv::write_row(out, {s.name, csv::format_int(n), pct});
  }
}

Funnel read_funnel_csv(std::istream& in) {
  csv::Reader reader(in);
  csv::expect_header(reader, {"stage", "tweets", "percent"}, "funnel");
  Funnel funnel;
  std::set<std::string> seen;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (f.size() != 3) throw csv::FormatError("funnel: expected 3 fields", reader.line());
    bool known = false;
    for (const Stage& s : kStages) {
      if (f[0] == s.name) {
        funnel.*s.field = csv::parse_int(f[1], reader.line());
        known = true;
      }
    }
    if (!known) throw csv::FormatError("funnel: unknown stage '" + f[0] + "'", reader.line());
    if (!seen.insert(f[0]).second) throw csv::FormatError("funnel: duplicate stage '" + f[0] + "'", reader.line());
  }
  return funnel;
}

TweetPipeline::TweetPipeline(const Gazetteer& gazetteer, const LacClassifier& classifier, TokenSet stopwords,
                             Category selected, const ReverseGeocoder* geocoder)
    : gazetteer_(gazetteer),
      classifier_(classifier),
      stopwords_(std::move(stopwords)),
      selected_(selected),
      geocoder_(geocoder) {}

void TweetPipeline::process(const RawTweet& tweet, IngestResult& result) const {
  Funnel& f = result.funnel;
  ++f.total;
  if (!has_geographic_location(tweet)) return;
  ++f.geographic;
  bool in_location = tweet.location && mentions_brazil(*tweet.location);
  bool in_country = tweet.country && mentions_brazil(*tweet.country);
  f.brazil_location += in_location;
  f.brazil_country += in_country;
  if (!in_location && !in_country) return;
  ++f.brazil;
  auto city = resolve_location(tweet, gazetteer_, geocoder_);
  if (!city) return;
  ++f.resolved;
  Category label = classifier_.classify(normalize_text(tweet.text, stopwords_)).label;
  f.selected += label == selected_;
  result.tweets.push_back({tweet.id, std::move(*city), tweet.created_at, label});
}

IngestResult ingest_jsonl(std::istream& in, const TweetPipeline& pipeline, std::size_t max_malformed) {
  IngestResult result;
  std::set<std::string> ids;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      RawTweet tweet = parse_tweet_json(text, line);
      if (!ids.insert(tweet.id).second) throw csv::FormatError("duplicate tweet id '" + tweet.id + "'", line);
      pipeline.process(tweet, result);
    } catch (const csv::FormatError& err) {
      result.malformed.push_back({line, err.what()});
      if (result.malformed.size() > max_malformed) throw;
    }
  }
  return result;
}

WeeklyCounts aggregate_weekly(std::span<const ClassifiedTweet> tweets, Category category,
                              std::span<const CityId> cities, Date start_week, int weeks) {
  if (weeks < 0) throw std::invalid_argument("aggregate_weekly: negative week count");
  WeeklyCounts out;
  const auto len = static_cast<std::size_t>(weeks);
  for (const CityId& c : cities) out.series.try_emplace(c, len, 0);
  for (const ClassifiedTweet& t : tweets) {
    if (t.label != category) continue;
    auto week = week_index(t.created_at, start_week);
    if (!week || *week > weeks) {
      ++out.out_of_range;
      continue;
    }
    auto [it, inserted] = out.series.try_emplace(t.city, len, 0);
    ++it->second[static_cast<std::size_t>(*week - 1)];
  }
  return out;
}

}  // namespace denguecast::ingest
