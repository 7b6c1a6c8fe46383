#include "scigrid/synth.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "json.hpp"
#include "scigrid/error.hpp"
#include "scigrid/text.hpp"

namespace scigrid::synth {

namespace {

// mt19937_64 output is fully specified by the standard; the transforms below
// are ours so that draws are identical on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::size_t below(std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = 0;
    do {
      x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
  }

  template <typename Weights>
  std::size_t pick(const Weights& weights) {
    double total = 0.0;
    for (const double w : weights) total += w;
    double u = uniform() * total;
    std::size_t last = 0;
    for (std::size_t i = 0; i < std::size(weights); ++i) {
      if (weights[i] <= 0.0) continue;
      last = i;
      if (u < weights[i]) return i;
      u -= weights[i];
    }
    return last;
  }

  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

double round6(double x) { return std::round(x * 1e6) / 1e6; }

GeoPoint wrap(double lat, double lon) {
  lat = std::clamp(lat, -89.999, 89.999);
  while (lon > 180.0) lon -= 360.0;
  while (lon <= -180.0) lon += 360.0;
  GeoPoint p{round6(lat), round6(lon)};
  if (p.lon <= -180.0) p.lon = 180.0;
  return p;
}

GeoPoint uniform_on_sphere(Rng& rng) {
  const double z = 2.0 * rng.uniform() - 1.0;
  const double lon = 360.0 * rng.uniform() - 180.0;
  return wrap(std::asin(z) * 180.0 / std::numbers::pi, lon);
}

constexpr std::string_view kCategoryStem[] = {"eng", "life", "nat", "soc", "misc"};
constexpr int kCategoriesPerField = 3;

template <typename T>
T get_or(const nlohmann::json& obj, const char* key, T fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("synth config: bad value for '") + key + "'");
  }
}

struct Pair {
  std::size_t a;
  std::size_t b;
};

}  // namespace

void validate(const SynthConfig& c) {
  if (c.n_cities <= 0) throw ConfigError("synth config: n_cities must be positive");
  if (c.n_countries <= 0) throw ConfigError("synth config: n_countries must be positive");
  if (c.n_publications <= 0) throw ConfigError("synth config: n_publications must be positive");
  if (!(c.international_mixing >= 0.0 && c.international_mixing <= 1.0)) {
    throw ConfigError("synth config: international_mixing must be in [0, 1]");
  }
  if (c.year_min > c.year_max) throw ConfigError("synth config: empty year range");
  auto check_weights = [](const auto& w, const char* name) {
    double total = 0.0;
    for (const double x : w) {
      if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError(std::string("synth config: negative weight in ") + name);
      total += x;
    }
    if (!(total > 0.0)) throw ConfigError(std::string("synth config: all-zero ") + name);
  };
  check_weights(c.address_count_weights, "address_count_weights");
  check_weights(c.field_weights, "field_weights");
}

SynthConfig config_from_json(std::string_view json_text) {
  const nlohmann::json obj = nlohmann::json::parse(json_text, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) throw ConfigError("synth config is not a JSON object");
  static constexpr std::string_view kKeys[] = {"seed",         "n_cities",  "n_countries",  "n_publications",
                                               "address_count_weights",     "international_mixing",
                                               "year_min",     "year_max",  "field_weights", "placement"};
  for (const auto& [key, value] : obj.items()) {
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
      throw ConfigError("synth config: unknown key '" + key + "'");
    }
  }
  SynthConfig c;
  c.seed = get_or(obj, "seed", c.seed);
  c.n_cities = get_or(obj, "n_cities", c.n_cities);
  c.n_countries = get_or(obj, "n_countries", c.n_countries);
  c.n_publications = get_or(obj, "n_publications", c.n_publications);
  c.address_count_weights = get_or(obj, "address_count_weights", c.address_count_weights);
  c.international_mixing = get_or(obj, "international_mixing", c.international_mixing);
  c.year_min = get_or(obj, "year_min", c.year_min);
  c.year_max = get_or(obj, "year_max", c.year_max);
  c.field_weights = get_or(obj, "field_weights", c.field_weights);
  const auto placement = get_or<std::string>(obj, "placement", "uniform");
  if (placement == "uniform") {
    c.placement = Placement::uniform;
  } else if (placement == "clustered") {
    c.placement = Placement::clustered;
  } else {
    throw ConfigError("synth config: placement must be 'uniform' or 'clustered'");
  }
  validate(c);
  return c;
}

SynthData generate(const SynthConfig& config) {
  validate(config);
  Rng rng(config.seed);

  const auto n_cities = static_cast<std::size_t>(config.n_cities);
  const auto n_countries = static_cast<std::size_t>(config.n_countries);

  std::vector<GeoPoint> centres(n_countries);
  if (config.placement == Placement::clustered) {
    for (GeoPoint& c : centres) c = uniform_on_sphere(rng);
  }

  struct City {
    CityKey key;
    GeoPoint point;
    std::size_t country;
    double activity;
  };
  std::vector<City> cities;
  std::vector<std::vector<std::size_t>> cities_of(n_countries);
  Gazetteer gazetteer;
  for (std::size_t i = 0; i < n_cities; ++i) {
    const std::size_t country = i % n_countries;
    GeoPoint p;
    double activity = 1.0;
    if (config.placement == Placement::clustered) {
      const GeoPoint c = centres[country];
      const double lat = c.lat + 3.0 * rng.normal();
      const double lon_scale = std::max(std::cos(c.lat * std::numbers::pi / 180.0), 0.05);
      p = wrap(lat, c.lon + 3.0 * rng.normal() / lon_scale);
      activity = 1.0 / static_cast<double>(i + 1);
    } else {
      p = uniform_on_sphere(rng);
    }
    auto key = make_city_key({fmt::format("city-{:05d}", i), fmt::format("c{:03d}", country), {}});
    gazetteer.insert(*key, p);
    cities_of[country].push_back(i);
    cities.push_back({std::move(*key), p, country, activity});
  }

  std::vector<double> all_activity;
  for (const City& c : cities) all_activity.push_back(c.activity);

  auto pick_city_in = [&](std::size_t country, const std::vector<std::size_t>& used) -> std::optional<std::size_t> {
    std::vector<std::size_t> candidates;
    std::vector<double> weights;
    for (const std::size_t c : cities_of[country]) {
      if (std::find(used.begin(), used.end(), c) != used.end()) continue;
      candidates.push_back(c);
      weights.push_back(cities[c].activity);
    }
    if (candidates.empty()) return std::nullopt;
    return candidates[rng.pick(weights)];
  };

  std::vector<PublicationRecord> pubs;
  const auto years = static_cast<std::size_t>(config.year_max - config.year_min + 1);
  for (int p = 0; p < config.n_publications; ++p) {
    PublicationRecord rec;
    rec.id = fmt::format("P{:06d}", p);
    rec.year = config.year_min + static_cast<int>(rng.below(years));
    rec.doc_type = rng.uniform() < 0.8 ? DocType::article : DocType::review;
    rec.journal = fmt::format("Journal of Synthetic Studies {}", rng.below(5) + 1);

    const std::size_t n_categories = 1 + rng.below(3);
    for (std::size_t c = 0; c < n_categories; ++c) {
      const std::size_t f = rng.pick(config.field_weights);
      rec.categories.push_back(fmt::format("{}-{}", kCategoryStem[f], rng.below(kCategoriesPerField) + 1));
    }

    const std::size_t k = 1 + rng.pick(config.address_count_weights);
    const std::size_t home = rng.pick(all_activity);
    std::vector<std::size_t> used{home};
    std::vector<std::size_t> countries_used{cities[home].country};
    while (used.size() < k) {
      std::optional<std::size_t> next;
      if (rng.uniform() < config.international_mixing) {
        std::vector<std::size_t> fresh;
        for (std::size_t c = 0; c < n_countries; ++c) {
          if (!cities_of[c].empty() && std::find(countries_used.begin(), countries_used.end(), c) == countries_used.end()) {
            fresh.push_back(c);
          }
        }
        if (!fresh.empty()) {
          const std::size_t country = fresh[rng.below(fresh.size())];
          next = pick_city_in(country, used);
        }
      } else {
        next = pick_city_in(cities[home].country, used);
      }
      if (!next) break;
      used.push_back(*next);
      countries_used.push_back(cities[*next].country);
    }
    for (const std::size_t c : used) rec.addresses.push_back(cities[c].key);
    std::sort(rec.addresses.begin(), rec.addresses.end());
    pubs.push_back(std::move(rec));
  }

  FieldMap field_map;
  for (const Field f : kBroadFields) {
    for (int i = 1; i <= kCategoriesPerField; ++i) {
      field_map.assign(fmt::format("{}-{}", kCategoryStem[static_cast<std::size_t>(f)], i), f);
    }
  }

  Corpus corpus(std::move(pubs));
  GeocodedCorpus geocoded = geocode_corpus(corpus, gazetteer).corpus;
  return {std::move(corpus), std::move(geocoded), std::move(gazetteer), std::move(field_map)};
}

void write_fixtures(const SynthData& data, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create fixture directory " + dir.string() + ": " + ec.message());
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("corpus.jsonl");
    for (const PublicationRecord& rec : data.corpus) out << to_json_line(rec) << '\n';
    if (!out) throw IoError("write failed for corpus.jsonl");
  }
  {
    auto out = open("gazetteer.csv");
    data.gazetteer.write(out);
    if (!out) throw IoError("write failed for gazetteer.csv");
  }
  {
    auto out = open("fieldmap.csv");
    data.field_map.write(out);
    if (!out) throw IoError("write failed for fieldmap.csv");
  }
}

std::vector<Rational> oracle_pair_shares(std::span<const Rational> counts) {
  std::vector<Rational> products;
  Rational total = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (std::size_t j = i + 1; j < counts.size(); ++j) {
      products.push_back(counts[i] * counts[j]);
      total += products.back();
    }
  }
  if (total == 0) return {};
  for (Rational& p : products) p /= total;
  return products;
}

OracleResult oracle_measures(const GeocodedCorpus& corpus, const Scope& scope, const OracleOptions& options) {
  if (scope.field && !options.field_map) throw ConfigError("oracle: field scope requires a field map");

  std::size_t relations = 0;
  std::map<CityKey, GeoPoint> resolved_cities;
  for (const GeocodedPublication& g : corpus) {
    const std::size_t k = g.record.addresses.size();
    relations += k * (k - (k > 0 ? 1 : 0)) / 2;
    for (std::size_t i = 0; i < k; ++i) {
      if (g.coords[i]) resolved_cities.emplace(g.record.addresses[i], *g.coords[i]);
    }
  }
  if (relations > kOracleMaxRelations || resolved_cities.size() > kOracleMaxCities) {
    throw std::length_error("oracle: corpus exceeds the desk-scale size guard");
  }

  std::optional<std::string> country;
  if (scope.country) country = normalize_text(*scope.country);

  // Field weight straight from the category list.
  auto field_share = [&](const PublicationRecord& pub) -> Rational {
    if (!scope.field) return 1;
    int in_field = 0;
    int mapped = 0;
    for (const std::string& cat : pub.categories) {
      const Field f = options.field_map->lookup(cat);
      if (f == Field::none) continue;
      ++mapped;
      if (f == *scope.field) ++in_field;
    }
    if (in_field == 0) return 0;
    if (options.field_weighting == FieldWeighting::whole) return 1;
    return Rational(in_field, mapped);
  };

  Rational pub_total = 0, collab = 0, rel_total = 0, rel_int = 0, res_dom = 0, res_int = 0;
  long double dist_dom = 0.0L, dist_int = 0.0L;
  std::map<CityKey, Rational> city_n;

  for (const GeocodedPublication& g : corpus) {
    const PublicationRecord& pub = g.record;
    if (!scope.years.contains(pub.year)) continue;
    const Rational fw = field_share(pub);
    if (fw == 0) continue;
    const auto k = static_cast<long long>(pub.addresses.size());

    for (long long a = 0; a < k; ++a) {
      if (!g.coords[static_cast<std::size_t>(a)]) continue;
      Rational& n = city_n[pub.addresses[static_cast<std::size_t>(a)]];
      n += options.count_mode == CountMode::whole ? fw : fw / k;
    }

    long long in_country = k;
    if (country) {
      in_country = 0;
      for (const CityKey& key : pub.addresses) in_country += key.country == *country ? 1 : 0;
    }
    const Rational pw = k == 0 ? Rational(0) : Rational(in_country, k);
    if (pw == 0) continue;
    pub_total += fw * pw;
    if (k >= 2) collab += fw * pw;
    if (k < 2) continue;

    // Every ordered pair (a, b), a != b, carries half of its unordered relation.
    const Rational half_weight = fw / (k * (k - 1));
    for (long long a = 0; a < k; ++a) {
      for (long long b = 0; b < k; ++b) {
        if (a == b) continue;
        const auto& ka = pub.addresses[static_cast<std::size_t>(a)];
        const auto& kb = pub.addresses[static_cast<std::size_t>(b)];
        if (country && ka.country != *country && kb.country != *country) continue;
        const bool domestic = ka.country == kb.country;
        rel_total += half_weight;
        if (!domestic) rel_int += half_weight;
        const auto& pa = g.coords[static_cast<std::size_t>(a)];
        const auto& pb = g.coords[static_cast<std::size_t>(b)];
        if (!pa || !pb) continue;
        const long double d = great_circle_km(*pa, *pb);
        const long double w = half_weight.convert_to<long double>();
        if (domestic) {
          res_dom += half_weight;
          dist_dom += w * d;
        } else {
          res_int += half_weight;
          dist_int += w * d;
        }
      }
    }
  }

  OracleResult out;
  out.pub_weight_total = pub_total;
  out.relation_weight_total = rel_total;
  if (pub_total != 0) out.prop_collab_exact = collab / pub_total;
  if (rel_total != 0) out.prop_int_exact = rel_int / rel_total;

  MeasureSet& m = out.measures;
  m.pub_weight_total = pub_total.convert_to<double>();
  m.collab_pub_weight = collab.convert_to<double>();
  m.relation_weight_total = rel_total.convert_to<double>();
  m.international_relation_weight = rel_int.convert_to<double>();
  m.resolved_domestic_weight = res_dom.convert_to<double>();
  m.resolved_international_weight = res_int.convert_to<double>();
  m.resolved_relation_weight = (res_dom + res_int).convert_to<double>();
  if (out.prop_collab_exact) m.prop_collab_pubs = out.prop_collab_exact->convert_to<double>();
  if (out.prop_int_exact) m.prop_int_relations = out.prop_int_exact->convert_to<double>();
  if (res_dom != 0) m.mgcd_domestic = static_cast<double>(dist_dom / res_dom.convert_to<long double>());
  if (res_int != 0) m.mgcd_international = static_cast<double>(dist_int / res_int.convert_to<long double>());
  if (res_dom + res_int != 0) {
    m.mgcd_all = static_cast<double>((dist_dom + dist_int) / (res_dom + res_int).convert_to<long double>());
  }

  // Random model: every ordered city pair (i, j), i != j, again at half mass.
  std::vector<std::pair<CityKey, Rational>> cities(city_n.begin(), city_n.end());
  Rational mass_dom = 0, mass_int = 0;
  long double rdist_dom = 0.0L, rdist_int = 0.0L;
  for (std::size_t i = 0; i < cities.size(); ++i) {
    for (std::size_t j = 0; j < cities.size(); ++j) {
      if (i == j) continue;
      const CityKey& ki = cities[i].first;
      const CityKey& kj = cities[j].first;
      bool domestic = ki.country == kj.country;
      if (country) {
        const bool in_i = ki.country == *country;
        const bool in_j = kj.country == *country;
        if (!in_i && !in_j) continue;
        domestic = in_i && in_j;
      }
      const Rational mass = cities[i].second * cities[j].second / 2;
      const long double d = great_circle_km(resolved_cities.at(ki), resolved_cities.at(kj));
      if (domestic) {
        mass_dom += mass;
        rdist_dom += mass.convert_to<long double>() * d;
      } else {
        mass_int += mass;
        rdist_int += mass.convert_to<long double>() * d;
      }
    }
  }
  if (rel_total == 0) return out;
  if (mass_dom != 0) m.rgcd_domestic = static_cast<double>(rdist_dom / mass_dom.convert_to<long double>());
  if (mass_int != 0) m.rgcd_international = static_cast<double>(rdist_int / mass_int.convert_to<long double>());
  if (mass_dom + mass_int != 0) {
    m.rgcd_all = static_cast<double>((rdist_dom + rdist_int) / (mass_dom + mass_int).convert_to<long double>());
  }
  return out;
}

}  // namespace scigrid::synth
