#include "denguecast/ingest/gazetteer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include "denguecast/csv.hpp"
#include "denguecast/ingest/text.hpp"

namespace denguecast::ingest {

namespace {

constexpr std::array<std::string_view, 27> kStateCodes = {
    "AC", "AL", "AM", "AP", "BA", "CE", "DF", "ES", "GO", "MA", "MG", "MS", "MT", "PA",
    "PB", "PE", "PI", "PR", "RJ", "RN", "RO", "RR", "RS", "SC", "SE", "SP", "TO"};

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> split_aliases(std::string_view field) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= field.size()) {
    std::size_t bar = field.find('|', start);
    if (bar == std::string_view::npos) bar = field.size();
    std::string_view part = field.substr(start, bar - start);
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    if (!part.empty()) out.emplace_back(part);
    start = bar + 1;
  }
  return out;
}

}  // namespace

std::span<const std::string_view> state_codes() { return kStateCodes; }

bool is_state_code(std::string_view code) {
  if (code.size() != 2) return false;
  std::string u = upper(code);
  return std::binary_search(kStateCodes.begin(), kStateCodes.end(), std::string_view(u));
}

Gazetteer::Gazetteer(std::vector<GazetteerEntry> entries) : entries_(std::move(entries)) {
  std::set<CityId> seen;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    GazetteerEntry& e = entries_[i];
    e.state = upper(e.state);
    if (!is_state_code(e.state)) throw std::invalid_argument("unknown state code: " + e.state);
    if (e.population <= 0) throw std::invalid_argument("gazetteer population must be positive: " + e.id.value);
    if (!seen.insert(e.id).second) throw std::invalid_argument("duplicate gazetteer city_id: " + e.id.value);
    std::vector<std::string> names{e.name};
    names.insert(names.end(), e.aliases.begin(), e.aliases.end());
    for (const std::string& name : names) {
      std::vector<std::string> key = words(name);
      if (key.empty()) continue;
      auto& slot = index_[key];
      if (std::find(slot.begin(), slot.end(), i) == slot.end()) slot.push_back(i);
      longest_name_ = std::max(longest_name_, key.size());
    }
  }
}

Gazetteer Gazetteer::read_csv(std::istream& in) {
  csv::Reader reader(in);
  csv::expect_header(reader, {"city_id", "name", "state", "population", "aliases"}, "gazetteer");
  std::vector<GazetteerEntry> entries;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (f.size() != 5) throw csv::FormatError("gazetteer: expected 5 fields", reader.line());
    GazetteerEntry e;
    e.id = CityId{f[0]};
    e.name = f[1];
    e.state = f[2];
    e.population = csv::parse_int(f[3], reader.line());
    e.aliases = split_aliases(f[4]);
    entries.push_back(std::move(e));
  }
  try {
    return Gazetteer(std::move(entries));
  } catch (const std::invalid_argument& err) {
    throw csv::FormatError(std::string("gazetteer: ") + err.what());
  }
}

std::optional<CityId> Gazetteer::resolve(std::string_view location_field) const {
  std::vector<std::string> tokens = words(location_field);
  std::vector<bool> consumed(tokens.size(), false);
  std::vector<const std::vector<std::size_t>*> matches;

  for (std::size_t i = 0; i < tokens.size();) {
    std::size_t len = std::min(longest_name_, tokens.size() - i);
    const std::vector<std::size_t>* hit = nullptr;
    for (; len > 0; --len) {
      std::vector<std::string> key(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                   tokens.begin() + static_cast<std::ptrdiff_t>(i + len));
      auto it = index_.find(key);
      if (it != index_.end()) {
        hit = &it->second;
        break;
      }
    }
    if (hit == nullptr) {
      ++i;
      continue;
    }
    matches.push_back(hit);
    std::fill(consumed.begin() + static_cast<std::ptrdiff_t>(i),
              consumed.begin() + static_cast<std::ptrdiff_t>(i + len), true);
    i += len;
  }
  if (matches.empty()) return std::nullopt;

  std::set<std::string> states;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!consumed[i] && is_state_code(tokens[i])) states.insert(upper(tokens[i]));
  }

  std::set<std::size_t> candidates;
  for (const auto* match : matches) {
    std::vector<std::size_t> kept;
    for (std::size_t idx : *match) {
      if (states.empty() || states.contains(entries_[idx].state)) kept.push_back(idx);
    }
    // A bare name shared by several states cannot be pinned down.
    if (kept.size() == 1) candidates.insert(kept.front());
    else if (kept.size() > 1) return std::nullopt;
  }
  if (candidates.size() != 1) return std::nullopt;
  return entries_[*candidates.begin()].id;
}

bool Gazetteer::is_ambiguous(std::string_view name) const {
  auto it = index_.find(words(name));
  if (it == index_.end()) return false;
  std::set<std::string> states;
  for (std::size_t idx : it->second) states.insert(entries_[idx].state);
  return states.size() > 1;
}

const GazetteerEntry* Gazetteer::find(const CityId& id) const {
  auto it = std::find_if(entries_.begin(), entries_.end(), [&](const GazetteerEntry& e) { return e.id == id; });
  return it == entries_.end() ? nullptr : &*it;
}

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
  constexpr double kEarthRadiusKm = 6371.0;
  constexpr double kRad = std::numbers::pi / 180.0;
  double dlat = (lat2 - lat1) * kRad;
  double dlon = (lon2 - lon1) * kRad;
  double a = std::sin(dlat / 2) * std::sin(dlat / 2) +
             std::cos(lat1 * kRad) * std::cos(lat2 * kRad) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

ReverseGeocoder::ReverseGeocoder(std::vector<Centroid> centroids) : centroids_(std::move(centroids)) {
  for (const Centroid& c : centroids_) {
    if (!(c.radius_km > 0.0) || std::abs(c.lat) > 90.0 || std::abs(c.lon) > 180.0)
      throw std::invalid_argument("invalid centroid for " + c.id.value);
  }
}

ReverseGeocoder ReverseGeocoder::read_csv(std::istream& in) {
  csv::Reader reader(in);
  csv::expect_header(reader, {"city_id", "lat", "lon", "radius_km"}, "centroids");
  std::vector<Centroid> out;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (f.size() != 4) throw csv::FormatError("centroids: expected 4 fields", reader.line());
    out.push_back({CityId{f[0]}, csv::parse_double(f[1], reader.line()), csv::parse_double(f[2], reader.line()),
                   csv::parse_double(f[3], reader.line())});
  }
  try {
    return ReverseGeocoder(std::move(out));
  } catch (const std::invalid_argument& err) {
    throw csv::FormatError(std::string("centroids: ") + err.what());
  }
}

std::optional<CityId> ReverseGeocoder::resolve(double lat, double lon) const {
  const Centroid* best = nullptr;
  double best_d = 0.0;
  for (const Centroid& c : centroids_) {
    double d = haversine_km(lat, lon, c.lat, c.lon);
    if (d <= c.radius_km && (best == nullptr || d < best_d)) {
      best = &c;
      best_d = d;
    }
  }
  if (best == nullptr) return std::nullopt;
  return best->id;
}

}  // namespace denguecast::ingest
