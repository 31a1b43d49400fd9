#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "denguecast/core.hpp"

namespace denguecast::ingest {

/// The 27 federative units (26 states plus DF), upper-case two-letter codes.
std::span<const std::string_view> state_codes();
/// Case-insensitive membership in the fixed state-code table.
bool is_state_code(std::string_view code);

struct GazetteerEntry {
  CityId id;
  std::string name;
  std::string state;  ///< upper-case UF code
  Count population = 0;
  std::vector<std::string> aliases;
};

/// Case- and accent-insensitive city lookup. Names and aliases are indexed by
/// their folded word sequence.
class Gazetteer {
 public:
  explicit Gazetteer(std::vector<GazetteerEntry> entries);

  /// CSV `city_id,name,state,population,aliases` with `|`-separated aliases.
  static Gazetteer read_csv(std::istream& in);

  /// Longest-match scan of a free-text location field. A name followed or
  /// preceded anywhere by a state code is restricted to that state; a bare
  /// name resolves only when it is unambiguous. Multiple distinct cities
  /// leave the field unresolved.
  std::optional<CityId> resolve(std::string_view location_field) const;

  /// Folded name present in more than one state.
  bool is_ambiguous(std::string_view name) const;

  const GazetteerEntry* find(const CityId& id) const;
  std::span<const GazetteerEntry> entries() const noexcept { return entries_; }

 private:
  std::vector<GazetteerEntry> entries_;
  std::map<std::vector<std::string>, std::vector<std::size_t>> index_;
  std::size_t longest_name_ = 0;
};

/// Optional coordinate lookup: nearest city centroid within its radius.
class ReverseGeocoder {
 public:
  struct Centroid {
    CityId id;
    double lat = 0.0;
    double lon = 0.0;
    double radius_km = 0.0;
  };

  explicit ReverseGeocoder(std::vector<Centroid> centroids);
  /// CSV `city_id,lat,lon,radius_km`.
  static ReverseGeocoder read_csv(std::istream& in);

  std::optional<CityId> resolve(double lat, double lon) const;

 private:
  std::vector<Centroid> centroids_;
};

/// Great-circle distance on a sphere of radius 6371 km.
double haversine_km(double lat1, double lon1, double lat2, double lon2);

}  // namespace denguecast::ingest
