#include "scigrid/geo.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>

#include <fmt/format.h>

#include "scigrid/error.hpp"
#include "scigrid/text.hpp"

namespace scigrid {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::optional<double> parse_degrees(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

}  // namespace

bool is_valid(GeoPoint p) {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 && p.lon > -180.0 &&
         p.lon <= 180.0;
}

double great_circle_km(GeoPoint a, GeoPoint b) {
  const double half_dlat = std::sin((b.lat - a.lat) * kDegToRad / 2.0);
  const double half_dlon = std::sin((b.lon - a.lon) * kDegToRad / 2.0);
  double h = half_dlat * half_dlat + std::cos(a.lat * kDegToRad) * std::cos(b.lat * kDegToRad) * half_dlon * half_dlon;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusKm * std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
}

UnitVector to_unit_vector(GeoPoint p) {
  const double lat = p.lat * kDegToRad;
  const double lon = p.lon * kDegToRad;
  return {std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)};
}

bool Gazetteer::insert(const CityKey& key, GeoPoint point) {
  const auto [it, inserted] = entries_.insert_or_assign(key, point);
  return !inserted;
}

std::optional<GeoPoint> Gazetteer::lookup(const CityKey& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

Gazetteer Gazetteer::parse(std::istream& in, GazetteerLoadReport* report) {
  if (!in) throw IoError("gazetteer stream is not readable");
  GazetteerLoadReport local;
  GazetteerLoadReport& rep = report ? *report : local;
  rep = {};

  std::string line;
  if (!read_line(in, line)) throw ConfigError("gazetteer is empty");
  const auto header = split_csv_line(line);
  static constexpr std::string_view kHeader[] = {"country", "region", "city", "lat", "lon"};
  bool header_ok = header.size() == 5;
  for (std::size_t i = 0; header_ok && i < 5; ++i) header_ok = normalize_text(header[i]) == kHeader[i];
  if (!header_ok) throw ConfigError("gazetteer header must be 'country,region,city,lat,lon'");

  Gazetteer gazetteer;
  while (read_line(in, line)) {
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++rep.rows;
    const auto cols = split_csv_line(line);
    if (cols.size() != 5) {
      ++rep.rejected;
      continue;
    }
    const auto key = make_city_key(RawAddress{cols[2], cols[0], cols[1]});
    const auto lat = parse_degrees(cols[3]);
    const auto lon = parse_degrees(cols[4]);
    if (!key || !lat || !lon || !is_valid({*lat, *lon})) {
      ++rep.rejected;
      continue;
    }
    if (gazetteer.insert(*key, {*lat, *lon})) ++rep.duplicates;
    ++rep.loaded;
  }
  if (in.bad()) throw IoError("read error on gazetteer");
  return gazetteer;
}

Gazetteer Gazetteer::load(const std::filesystem::path& path, GazetteerLoadReport* report) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open gazetteer: " + path.string());
  return parse(in, report);
}

void Gazetteer::write(std::ostream& out) const {
  out << "country,region,city,lat,lon\n";
  for (const auto& [key, p] : entries_) {
    out << csv_field(key.country) << ',' << csv_field(key.region) << ',' << csv_field(key.city) << ','
        << fmt::format("{:.6f},{:.6f}", p.lat, p.lon) << '\n';
  }
}

std::optional<double> GeocodeReport::coverage() const {
  const std::uint64_t total = resolved + unresolved;
  if (total == 0) return std::nullopt;
  return static_cast<double>(resolved) / static_cast<double>(total);
}

GeocodeResult geocode_corpus(const Corpus& corpus, const Gazetteer& gazetteer) {
  GeocodeReport report;
  std::vector<GeocodedPublication> out;
  out.reserve(corpus.size());
  for (const PublicationRecord& pub : corpus) {
    GeocodedPublication g{pub, {}};
    g.coords.reserve(pub.addresses.size());
    for (const CityKey& key : pub.addresses) {
      auto point = gazetteer.lookup(key);
      ++(point ? report.resolved : report.unresolved);
      g.coords.push_back(point);
    }
    out.push_back(std::move(g));
  }
  return {GeocodedCorpus(std::move(out)), report};
}

void write_geocode_report(std::ostream& out, const GeocodeReport& report) {
  const auto coverage = report.coverage();
  out << "resolved,unresolved,coverage\n"
      << report.resolved << ',' << report.unresolved << ',' << (coverage ? fmt::format("{:.4f}", *coverage) : "")
      << '\n';
}

}  // namespace scigrid
