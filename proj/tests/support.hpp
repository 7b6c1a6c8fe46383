#pragma once

#include <cmath>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include "scigrid/corpus.hpp"
#include "scigrid/geo.hpp"
#include "scigrid/measures.hpp"
#include "scigrid/synth.hpp"

namespace scigrid::test {

struct Addr {
  std::string city;
  std::string country;
  std::string region = {};
};

inline PublicationRecord make_pub(std::string id, int year, std::initializer_list<Addr> addresses,
                                  std::vector<std::string> categories = {}, std::string journal = "Journal") {
  std::vector<RawAddress> raw;
  for (const Addr& a : addresses) raw.push_back({a.city, a.country, a.region});
  PublicationRecord p;
  p.id = std::move(id);
  p.year = year;
  p.journal = std::move(journal);
  p.categories = std::move(categories);
  p.addresses = dedup_addresses(raw);
  return p;
}

inline CityKey key(const std::string& city, const std::string& country, const std::string& region = {}) {
  return *make_city_key({city, country, region});
}

/// Cities for the worked example: three in country A, one each in B and C.
inline Gazetteer toy_gazetteer() {
  Gazetteer g;
  g.insert(key("a1", "A"), {0, 0});
  g.insert(key("a2", "A"), {0, 1});
  g.insert(key("a3", "A"), {1, 0});
  g.insert(key("b", "B"), {0, 10});
  g.insert(key("c", "C"), {10, 0});
  return g;
}

/// Publication X: two addresses in A, one in B, one in C. Y: three in A. Z: one in A.
inline Corpus toy_corpus(int year = 2010) {
  return Corpus({
      make_pub("X", year, {{"a1", "A"}, {"a2", "A"}, {"b", "B"}, {"c", "C"}}),
      make_pub("Y", year, {{"a1", "A"}, {"a2", "A"}, {"a3", "A"}}),
      make_pub("Z", year, {{"a1", "A"}}),
  });
}

inline GeocodedCorpus toy_geocoded(int year = 2010) {
  return geocode_corpus(toy_corpus(year), toy_gazetteer()).corpus;
}

/// |a - b| <= tol * max(1, |b|).
inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

inline bool close(const Measure& a, const Measure& b, double tol) {
  if (a.has_value() != b.has_value()) return false;
  return !a || close(*a, *b, tol);
}

/// Largest relative deviation between the eight measures and the weights, or
/// infinity when definedness differs.
inline double max_deviation(const MeasureSet& a, const MeasureSet& b, bool with_rgcd = true) {
  double worst = 0.0;
  auto cmp = [&](const Measure& x, const Measure& y) {
    if (x.has_value() != y.has_value()) {
      worst = INFINITY;
      return;
    }
    if (x) worst = std::max(worst, std::abs(*x - *y) / std::max(1.0, std::abs(*y)));
  };
  cmp(a.prop_collab_pubs, b.prop_collab_pubs);
  cmp(a.prop_int_relations, b.prop_int_relations);
  cmp(a.mgcd_all, b.mgcd_all);
  cmp(a.mgcd_domestic, b.mgcd_domestic);
  cmp(a.mgcd_international, b.mgcd_international);
  if (with_rgcd) {
    cmp(a.rgcd_all, b.rgcd_all);
    cmp(a.rgcd_domestic, b.rgcd_domestic);
    cmp(a.rgcd_international, b.rgcd_international);
  }
  cmp(a.pub_weight_total, b.pub_weight_total);
  cmp(a.relation_weight_total, b.relation_weight_total);
  cmp(a.resolved_relation_weight, b.resolved_relation_weight);
  return worst;
}

/// Small random synthetic config for property runs.
inline synth::SynthConfig random_config(std::uint64_t seed, int max_pubs = 50, int max_cities = 20) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 17);
  auto below = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  synth::SynthConfig c;
  c.seed = seed;
  c.n_cities = 2 + below(max_cities - 1);
  c.n_countries = 1 + below(std::min(c.n_cities, 6));
  c.n_publications = 1 + below(max_pubs);
  c.international_mixing = static_cast<double>(below(101)) / 100.0;
  c.year_min = 2000;
  c.year_max = 2000 + below(3);
  c.placement = below(2) == 0 ? synth::Placement::uniform : synth::Placement::clustered;
  return c;
}

}  // namespace scigrid::test
