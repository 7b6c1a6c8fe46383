#include "scigrid/measures.hpp"

#include "scigrid/error.hpp"
#include "scigrid/parallel.hpp"
#include "scigrid/summation.hpp"
#include "scigrid/text.hpp"

namespace scigrid {

namespace {

// Publications per reduction chunk. Fixed so partial sums, and therefore the
// rounded result, never depend on the worker count.
constexpr std::size_t kChunkSize = 512;

struct Accumulator {
  CompensatedSum pub_total;
  CompensatedSum collab;
  CompensatedSum relation_total;
  CompensatedSum relation_international;
  CompensatedSum resolved_domestic;
  CompensatedSum resolved_international;
  CompensatedSum distance_domestic;
  CompensatedSum distance_international;

  void merge(const Accumulator& o) {
    pub_total.merge(o.pub_total);
    collab.merge(o.collab);
    relation_total.merge(o.relation_total);
    relation_international.merge(o.relation_international);
    resolved_domestic.merge(o.resolved_domestic);
    resolved_international.merge(o.resolved_international);
    distance_domestic.merge(o.distance_domestic);
    distance_international.merge(o.distance_international);
  }
};

double country_share(const PublicationRecord& pub, const std::string& country) {
  if (pub.addresses.empty()) return 0.0;
  std::size_t in_country = 0;
  for (const CityKey& k : pub.addresses) in_country += k.country == country ? 1 : 0;
  return static_cast<double>(in_country) / static_cast<double>(pub.addresses.size());
}

Measure ratio(double numerator, double denominator) {
  if (!(denominator > 0.0)) return std::nullopt;
  return numerator / denominator;
}

void accumulate(const GeocodedPublication& g, const Scope& scope, const CountrySel& country,
                const MeasureOptions& options, Accumulator& acc) {
  const PublicationRecord& pub = g.record;
  if (!scope.years.contains(pub.year)) return;

  const double fw =
      scope.field ? field_weight(pub, *options.field_map, options.field_weighting, *scope.field) : 1.0;
  if (fw == 0.0) return;

  const double pw = country ? country_share(pub, *country) : 1.0;
  if (pw == 0.0) return;  // no address in the country: no publication weight, no participation

  const std::size_t k = pub.addresses.size();
  acc.pub_total += fw * pw;
  if (k < 2) return;
  acc.collab += fw * pw;

  const double w = fw / (static_cast<double>(k) * static_cast<double>(k - 1) / 2.0);
  for (std::size_t i = 0; i + 1 < k; ++i) {
    const std::string& ci = pub.addresses[i].country;
    for (std::size_t j = i + 1; j < k; ++j) {
      const std::string& cj = pub.addresses[j].country;
      if (country && ci != *country && cj != *country) continue;
      const bool domestic = ci == cj;
      acc.relation_total += w;
      if (!domestic) acc.relation_international += w;
      if (!g.coords[i] || !g.coords[j]) continue;
      const double d = great_circle_km(*g.coords[i], *g.coords[j]);
      if (domestic) {
        acc.resolved_domestic += w;
        acc.distance_domestic += w * d;
      } else {
        acc.resolved_international += w;
        acc.distance_international += w * d;
      }
    }
  }
}

}  // namespace

std::string country_label(const CountrySel& country) { return country ? *country : std::string("WORLD"); }

std::string field_label(const FieldSel& field) { return field ? std::string(to_string(*field)) : std::string("ALL"); }

std::vector<Relation> enumerate_relations(const GeocodedPublication& pub) {
  const auto& addr = pub.record.addresses;
  const std::size_t k = addr.size();
  std::vector<Relation> relations;
  if (k < 2) return relations;
  const double w = 1.0 / (static_cast<double>(k) * static_cast<double>(k - 1) / 2.0);
  relations.reserve(k * (k - 1) / 2);
  for (std::size_t i = 0; i + 1 < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      Relation r{addr[i], addr[j], w, addr[i].country == addr[j].country, std::nullopt, pub.record.id};
      if (pub.coords[i] && pub.coords[j]) r.distance_km = great_circle_km(*pub.coords[i], *pub.coords[j]);
      relations.push_back(std::move(r));
    }
  }
  return relations;
}

double pub_weight(const PublicationRecord& pub, const CountrySel& country) {
  if (!country) return 1.0;
  return country_share(pub, normalize_text(*country));
}

bool participates(const Relation& rel, const CountrySel& country) {
  if (!country) return true;
  const std::string c = normalize_text(*country);
  return rel.a.country == c || rel.b.country == c;
}

MeasureSet compute_measures(const GeocodedCorpus& corpus, const Scope& scope, const MeasureOptions& options) {
  if (scope.years.empty()) throw ConfigError("scope has an empty year set");
  if (scope.field && !options.field_map) throw ConfigError("field scope requires a field map");

  CountrySel country;
  if (scope.country) country = normalize_text(*scope.country);

  const auto pubs = corpus.publications();
  const std::size_t n_chunks = (pubs.size() + kChunkSize - 1) / kChunkSize;
  std::vector<Accumulator> partial(n_chunks);
  for_each_block(n_chunks, options.workers, [&](std::size_t chunk) {
    const std::size_t end = std::min(pubs.size(), (chunk + 1) * kChunkSize);
    for (std::size_t p = chunk * kChunkSize; p < end; ++p) accumulate(pubs[p], scope, country, options, partial[chunk]);
  });
  Accumulator acc;
  for (const Accumulator& a : partial) acc.merge(a);

  MeasureSet m;
  m.pub_weight_total = acc.pub_total.value();
  m.collab_pub_weight = acc.collab.value();
  m.relation_weight_total = acc.relation_total.value();
  m.international_relation_weight = acc.relation_international.value();
  m.resolved_domestic_weight = acc.resolved_domestic.value();
  m.resolved_international_weight = acc.resolved_international.value();
  m.resolved_relation_weight = m.resolved_domestic_weight + m.resolved_international_weight;

  const double dist_dom = acc.distance_domestic.value();
  const double dist_int = acc.distance_international.value();
  m.prop_collab_pubs = ratio(m.collab_pub_weight, m.pub_weight_total);
  m.prop_int_relations = ratio(m.international_relation_weight, m.relation_weight_total);
  m.mgcd_domestic = ratio(dist_dom, m.resolved_domestic_weight);
  m.mgcd_international = ratio(dist_int, m.resolved_international_weight);
  m.mgcd_all = ratio(dist_dom + dist_int, m.resolved_relation_weight);
  return m;
}

Measure relative_change(Measure start, Measure end) {
  if (!start || !end || *start == 0.0) return std::nullopt;
  return 100.0 * (*end - *start) / *start;
}

}  // namespace scigrid
