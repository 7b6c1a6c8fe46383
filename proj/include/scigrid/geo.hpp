#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "scigrid/corpus.hpp"

namespace scigrid {

/// Mean Earth radius (IUGG R1), kilometers.
inline constexpr double kEarthRadiusKm = 6371.0088;

/// Decimal degrees; lat in [-90, 90], lon in (-180, 180].
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
  bool operator==(const GeoPoint&) const = default;
};

[[nodiscard]] bool is_valid(GeoPoint p);

/// Haversine distance on the sphere of radius kEarthRadiusKm.
[[nodiscard]] double great_circle_km(GeoPoint a, GeoPoint b);

/// Point on the unit sphere; lets the pair kernels skip per-pair trigonometry.
struct UnitVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

[[nodiscard]] UnitVector to_unit_vector(GeoPoint p);

/// Same central angle as the haversine form, computed as
/// atan2(|a x b|, a . b), which stays well conditioned at both tiny and
/// near-antipodal separations.
[[nodiscard]] inline double great_circle_km(const UnitVector& a, const UnitVector& b) {
  const double cx = a.y * b.z - a.z * b.y;
  const double cy = a.z * b.x - a.x * b.z;
  const double cz = a.x * b.y - a.y * b.x;
  const double cross = std::sqrt(cx * cx + cy * cy + cz * cz);
  const double dot = a.x * b.x + a.y * b.y + a.z * b.z;
  return kEarthRadiusKm * std::atan2(cross, dot);
}

struct GazetteerLoadReport {
  std::uint64_t rows = 0;
  std::uint64_t loaded = 0;
  std::uint64_t rejected = 0;
  std::uint64_t duplicates = 0;
};

/// Offline CityKey -> coordinate table.
class Gazetteer {
 public:
  /// Returns true if an existing entry was replaced.
  bool insert(const CityKey& key, GeoPoint point);
  [[nodiscard]] std::optional<GeoPoint> lookup(const CityKey& key) const;
  [[nodiscard]] std::size_t size() const { return entries_.size(); }
  [[nodiscard]] const std::map<CityKey, GeoPoint>& entries() const { return entries_; }

  /// Reads the `country,region,city,lat,lon` CSV. Rows with unparsable or
  /// out-of-range coordinates, or an empty city/country, are rejected and
  /// counted; a repeated key keeps the last row and counts a duplicate.
  /// Throws ConfigError on a bad header, IoError if unreadable.
  static Gazetteer parse(std::istream& in, GazetteerLoadReport* report = nullptr);
  static Gazetteer load(const std::filesystem::path& path, GazetteerLoadReport* report = nullptr);
  void write(std::ostream& out) const;

 private:
  std::map<CityKey, GeoPoint> entries_;
};

/// A publication with one coordinate slot per address (nullopt = unresolved).
struct GeocodedPublication {
  PublicationRecord record;
  std::vector<std::optional<GeoPoint>> coords;
};

class GeocodedCorpus {
 public:
  GeocodedCorpus() = default;
  explicit GeocodedCorpus(std::vector<GeocodedPublication> publications)
      : publications_(std::move(publications)) {}

  [[nodiscard]] std::span<const GeocodedPublication> publications() const { return publications_; }
  [[nodiscard]] std::size_t size() const { return publications_.size(); }
  [[nodiscard]] auto begin() const { return publications_.begin(); }
  [[nodiscard]] auto end() const { return publications_.end(); }

 private:
  std::vector<GeocodedPublication> publications_;
};

struct GeocodeReport {
  std::uint64_t resolved = 0;
  std::uint64_t unresolved = 0;

  /// resolved / (resolved + unresolved); nullopt when there are no addresses.
  [[nodiscard]] std::optional<double> coverage() const;
};

struct GeocodeResult {
  GeocodedCorpus corpus;
  GeocodeReport report;
};

/// Annotates every address; unresolved ones stay in place so they still count
/// towards the proportion measures.
GeocodeResult geocode_corpus(const Corpus& corpus, const Gazetteer& gazetteer);

void write_geocode_report(std::ostream& out, const GeocodeReport& report);

}  // namespace scigrid
