#pragma once

#include <span>
#include <vector>

#include "scigrid/measures.hpp"

namespace scigrid {

enum class CountMode { whole, fractional };

std::string_view to_string(CountMode mode);
std::optional<CountMode> parse_count_mode(std::string_view text);

struct CityCount {
  CityKey key;
  GeoPoint point;
  double n = 0.0;
};

/// Publication output per resolved city for one (years, field) slice, sorted
/// by CityKey, zero counts omitted.
struct CityCountTable {
  std::vector<CityCount> cities;
  CountMode mode = CountMode::whole;
};

/// whole: n = number of publications listing the city; fractional: each such
/// publication adds 1/k (k = its address count). In a field scope every
/// publication is further multiplied by its field weight. The country part of
/// `scope` is ignored: the random model always draws partners worldwide.
CityCountTable build_city_counts(const GeocodedCorpus& corpus, const Scope& scope, CountMode mode,
                                 const MeasureOptions& options = {});

struct PairShare {
  std::size_t first;   // index into table.cities, first < second
  std::size_t second;
  double share;
};

/// share(i, j) = n_i n_j / sum_{p<q} n_p n_q. Materializes all C(C-1)/2 pairs,
/// so it is meant for inspection of small tables. nullopt for fewer than two
/// cities.
std::optional<std::vector<PairShare>> expected_pair_shares(const CityCountTable& table);

/// Expected distances under the random collaboration model.
/// pair_mass_all is exactly pair_mass_domestic + pair_mass_international.
struct RgcdResult {
  Measure rgcd_all;
  Measure rgcd_domestic;
  Measure rgcd_international;
  double pair_mass_all = 0.0;
  double pair_mass_domestic = 0.0;
  double pair_mass_international = 0.0;
};

/// Single-scope evaluation by a plain loop over unordered pairs. For a country
/// the pair set is: domestic = both endpoints in it, international = exactly
/// one endpoint in it, all = the union.
RgcdResult compute_rgcd(const CityCountTable& table, const CountrySel& country);

struct RgcdQuery {
  std::size_t table = 0;  // index into the tables span
  CountrySel country;
};

/// Evaluates many queries with one pass over the pairs of each table: rows are
/// cut into fixed blocks, blocks run on `workers` threads, and block partial
/// sums merge in block order. Memory grows linearly with city count.
std::vector<RgcdResult> rgcd_batch(std::span<const CityCountTable> tables, std::span<const RgcdQuery> queries,
                                   unsigned workers = 1);

}  // namespace scigrid
