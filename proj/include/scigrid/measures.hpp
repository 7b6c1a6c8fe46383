#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scigrid/corpus.hpp"
#include "scigrid/geo.hpp"

namespace scigrid {

/// A measure value; nullopt means UNDEFINED (empty denominator), never zero.
using Measure = std::optional<double>;

/// Country selector: nullopt is the whole world. Country codes are compared
/// after normalize_text.
using CountrySel = std::optional<std::string>;

/// Field selector: nullopt is ALL fields.
using FieldSel = std::optional<Field>;

struct Scope {
  std::set<int> years;
  CountrySel country;
  FieldSel field;

  static Scope world(std::set<int> years) { return Scope{std::move(years), std::nullopt, std::nullopt}; }
};

std::string country_label(const CountrySel& country);  // "WORLD" or the code
std::string field_label(const FieldSel& field);        // "ALL" or the field code

/// An unordered pair of distinct addresses of one publication.
struct Relation {
  CityKey a;
  CityKey b;
  double weight = 0.0;  // 1 / (k(k-1)/2)
  bool domestic = false;
  std::optional<double> distance_km;  // set iff both endpoints resolved
  std::string source_pub;
};

/// All k(k-1)/2 relations of a publication with k addresses; empty for k < 2.
std::vector<Relation> enumerate_relations(const GeocodedPublication& pub);

/// Share of the publication's addresses located in `country`; 1 for WORLD.
double pub_weight(const PublicationRecord& pub, const CountrySel& country);

/// True if at least one endpoint lies in `country`; always true for WORLD.
bool participates(const Relation& rel, const CountrySel& country);

/// Measures for one scope. The three rgcd fields are filled by the null model
/// (see report.hpp) and are nullopt straight out of compute_measures.
struct MeasureSet {
  Measure prop_collab_pubs;
  Measure prop_int_relations;
  Measure mgcd_all;
  Measure mgcd_domestic;
  Measure mgcd_international;
  Measure rgcd_all;
  Measure rgcd_domestic;
  Measure rgcd_international;

  double pub_weight_total = 0.0;
  double collab_pub_weight = 0.0;
  double relation_weight_total = 0.0;
  double international_relation_weight = 0.0;
  double resolved_relation_weight = 0.0;  // domestic + international
  double resolved_domestic_weight = 0.0;
  double resolved_international_weight = 0.0;
};

struct MeasureOptions {
  /// Required whenever a scope restricts the field.
  const FieldMap* field_map = nullptr;
  FieldWeighting field_weighting = FieldWeighting::fractional;
  unsigned workers = 1;
};

/// Fractional-counting measures for `scope`. Publications contribute
/// pub_weight x field weight; relations contribute their weight x field weight
/// when the scope country participates. Relations with an unresolved endpoint
/// count towards prop_int_relations only. The result does not depend on the
/// worker count: publications are reduced in fixed-size chunks merged in order.
/// Throws ConfigError for an empty year set or a field scope without a map.
MeasureSet compute_measures(const GeocodedCorpus& corpus, const Scope& scope, const MeasureOptions& options = {});

/// 100 * (end - start) / start; UNDEFINED if either input is or start is 0.
Measure relative_change(Measure start, Measure end);

}  // namespace scigrid
