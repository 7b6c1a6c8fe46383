#include "scigrid/nullmodel.hpp"

#include <map>

#include "scigrid/error.hpp"
#include "scigrid/parallel.hpp"
#include "scigrid/summation.hpp"
#include "scigrid/text.hpp"

namespace scigrid {

namespace {

// Rows of the upper pair triangle handled per block.
constexpr std::size_t kRowBlock = 64;

struct MassDistance {
  CompensatedSum mass;
  CompensatedSum distance;

  void add(double w, double wd) {
    mass.add(w);
    distance.add(wd);
  }
  void merge(const MassDistance& o) {
    mass.merge(o.mass);
    distance.merge(o.distance);
  }
};

RgcdResult finish(const MassDistance& domestic, const MassDistance& international) {
  RgcdResult r;
  r.pair_mass_domestic = domestic.mass.value();
  r.pair_mass_international = international.mass.value();
  r.pair_mass_all = r.pair_mass_domestic + r.pair_mass_international;
  const double dist_dom = domestic.distance.value();
  const double dist_int = international.distance.value();
  if (r.pair_mass_domestic > 0.0) r.rgcd_domestic = dist_dom / r.pair_mass_domestic;
  if (r.pair_mass_international > 0.0) r.rgcd_international = dist_int / r.pair_mass_international;
  if (r.pair_mass_all > 0.0) r.rgcd_all = (dist_dom + dist_int) / r.pair_mass_all;
  return r;
}

struct BlockPartial {
  MassDistance world_domestic;
  MassDistance world_international;
  std::vector<MassDistance> domestic;       // per queried country slot
  std::vector<MassDistance> international;  // per queried country slot

  explicit BlockPartial(std::size_t slots) : domestic(slots), international(slots) {}

  void merge(const BlockPartial& o) {
    world_domestic.merge(o.world_domestic);
    world_international.merge(o.world_international);
    for (std::size_t s = 0; s < domestic.size(); ++s) {
      domestic[s].merge(o.domestic[s]);
      international[s].merge(o.international[s]);
    }
  }
};

// One pass over the unordered pairs of `table`, producing the world result and
// one result per entry of `countries` (already normalized).
std::pair<RgcdResult, std::vector<RgcdResult>> pair_kernel(const CityCountTable& table,
                                                          const std::vector<std::string>& countries,
                                                          unsigned workers) {
  const std::size_t n = table.cities.size();

  std::map<std::string_view, int> country_ids;
  for (const CityCount& c : table.cities) country_ids.emplace(c.key.country, 0);
  int next_id = 0;
  for (auto& [name, id] : country_ids) id = next_id++;

  std::vector<int> slot_of_country(country_ids.size(), -1);
  for (std::size_t s = 0; s < countries.size(); ++s) {
    if (const auto it = country_ids.find(countries[s]); it != country_ids.end()) {
      slot_of_country[static_cast<std::size_t>(it->second)] = static_cast<int>(s);
    }
  }

  std::vector<UnitVector> unit(n);
  std::vector<double> count(n);
  std::vector<int> cid(n);
  std::vector<int> slot(n);
  for (std::size_t i = 0; i < n; ++i) {
    unit[i] = to_unit_vector(table.cities[i].point);
    count[i] = table.cities[i].n;
    cid[i] = country_ids.at(table.cities[i].key.country);
    slot[i] = slot_of_country[static_cast<std::size_t>(cid[i])];
  }

  const std::size_t n_blocks = (n + kRowBlock - 1) / kRowBlock;
  std::vector<BlockPartial> partial(n_blocks, BlockPartial(countries.size()));
  for_each_block(n_blocks, workers, [&](std::size_t b) {
    BlockPartial& acc = partial[b];
    const std::size_t row_end = std::min(n, (b + 1) * kRowBlock);
    for (std::size_t i = b * kRowBlock; i < row_end; ++i) {
      const UnitVector ui = unit[i];
      const double ni = count[i];
      const int ci = cid[i];
      const bool scatter = !countries.empty();
      MassDistance row_domestic;
      MassDistance row_international;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double nj = count[j];
        const double d = great_circle_km(ui, unit[j]);
        if (cid[j] == ci) {
          row_domestic.add(nj, nj * d);
        } else {
          row_international.add(nj, nj * d);
          if (scatter && slot[j] >= 0) acc.international[static_cast<std::size_t>(slot[j])].add(ni * nj, ni * nj * d);
        }
      }
      const double dm = ni * row_domestic.mass.value();
      const double dd = ni * row_domestic.distance.value();
      const double im = ni * row_international.mass.value();
      const double id = ni * row_international.distance.value();
      acc.world_domestic.add(dm, dd);
      acc.world_international.add(im, id);
      if (slot[i] >= 0) {
        acc.domestic[static_cast<std::size_t>(slot[i])].add(dm, dd);
        acc.international[static_cast<std::size_t>(slot[i])].add(im, id);
      }
    }
  });

  BlockPartial total(countries.size());
  for (const BlockPartial& p : partial) total.merge(p);

  std::vector<RgcdResult> per_country;
  per_country.reserve(countries.size());
  for (std::size_t s = 0; s < countries.size(); ++s) per_country.push_back(finish(total.domestic[s], total.international[s]));
  return {finish(total.world_domestic, total.world_international), std::move(per_country)};
}

}  // namespace

std::string_view to_string(CountMode mode) { return mode == CountMode::whole ? "whole" : "fractional"; }

std::optional<CountMode> parse_count_mode(std::string_view text) {
  const std::string t = normalize_text(text);
  if (t == "whole") return CountMode::whole;
  if (t == "fractional") return CountMode::fractional;
  return std::nullopt;
}

CityCountTable build_city_counts(const GeocodedCorpus& corpus, const Scope& scope, CountMode mode,
                                 const MeasureOptions& options) {
  if (scope.years.empty()) throw ConfigError("scope has an empty year set");
  if (scope.field && !options.field_map) throw ConfigError("field scope requires a field map");

  struct Entry {
    GeoPoint point;
    CompensatedSum n;
  };
  std::map<CityKey, Entry> counts;
  for (const GeocodedPublication& g : corpus) {
    const PublicationRecord& pub = g.record;
    if (!scope.years.contains(pub.year) || pub.addresses.empty()) continue;
    const double fw =
        scope.field ? field_weight(pub, *options.field_map, options.field_weighting, *scope.field) : 1.0;
    if (fw == 0.0) continue;
    const double per_address = mode == CountMode::whole ? fw : fw / static_cast<double>(pub.addresses.size());
    for (std::size_t i = 0; i < pub.addresses.size(); ++i) {
      if (!g.coords[i]) continue;
      auto [it, inserted] = counts.try_emplace(pub.addresses[i], Entry{*g.coords[i], {}});
      it->second.n.add(per_address);
    }
  }

  CityCountTable table;
  table.mode = mode;
  table.cities.reserve(counts.size());
  for (const auto& [key, entry] : counts) {
    const double n = entry.n.value();
    if (n > 0.0) table.cities.push_back({key, entry.point, n});
  }
  return table;
}

std::optional<std::vector<PairShare>> expected_pair_shares(const CityCountTable& table) {
  const auto& c = table.cities;
  if (c.size() < 2) return std::nullopt;
  CompensatedSum total;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j) total.add(c[i].n * c[j].n);
  }
  const double denominator = total.value();
  if (!(denominator > 0.0)) return std::nullopt;
  std::vector<PairShare> shares;
  shares.reserve(c.size() * (c.size() - 1) / 2);
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j) shares.push_back({i, j, c[i].n * c[j].n / denominator});
  }
  return shares;
}

RgcdResult compute_rgcd(const CityCountTable& table, const CountrySel& country) {
  CountrySel target;
  if (country) target = normalize_text(*country);

  const auto& c = table.cities;
  std::vector<UnitVector> unit;
  unit.reserve(c.size());
  for (const CityCount& city : c) unit.push_back(to_unit_vector(city.point));

  MassDistance domestic;
  MassDistance international;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      bool is_domestic = c[i].key.country == c[j].key.country;
      if (target) {
        const bool in_i = c[i].key.country == *target;
        const bool in_j = c[j].key.country == *target;
        if (!in_i && !in_j) continue;
        is_domestic = in_i && in_j;
      }
      const double w = c[i].n * c[j].n;
      const double wd = w * great_circle_km(unit[i], unit[j]);
      (is_domestic ? domestic : international).add(w, wd);
    }
  }
  return finish(domestic, international);
}

std::vector<RgcdResult> rgcd_batch(std::span<const CityCountTable> tables, std::span<const RgcdQuery> queries,
                                   unsigned workers) {
  std::vector<RgcdResult> results(queries.size());
  for (const RgcdQuery& q : queries) {
    if (q.table >= tables.size()) throw ConfigError("rgcd query refers to a missing table");
  }
  for (std::size_t t = 0; t < tables.size(); ++t) {
    std::vector<std::string> countries;
    std::vector<std::size_t> world_queries;
    std::vector<std::pair<std::size_t, std::size_t>> country_queries;  // (query, slot)
    for (std::size_t q = 0; q < queries.size(); ++q) {
      if (queries[q].table != t) continue;
      if (!queries[q].country) {
        world_queries.push_back(q);
        continue;
      }
      std::string c = normalize_text(*queries[q].country);
      auto it = std::find(countries.begin(), countries.end(), c);
      if (it == countries.end()) {
        countries.push_back(std::move(c));
        it = countries.end() - 1;
      }
      country_queries.emplace_back(q, static_cast<std::size_t>(it - countries.begin()));
    }
    if (world_queries.empty() && country_queries.empty()) continue;
    const auto [world, per_country] = pair_kernel(tables[t], countries, workers);
    for (const std::size_t q : world_queries) results[q] = world;
    for (const auto& [q, s] : country_queries) results[q] = per_country[s];
  }
  return results;
}

}  // namespace scigrid
