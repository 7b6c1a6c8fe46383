#include <gtest/gtest.h>

#include <fstream>

#include "scigrid/error.hpp"
#include "scigrid/nullmodel.hpp"
#include "scigrid/report.hpp"
#include "support.hpp"

namespace scigrid {
namespace {

using synth::Rational;

TEST(Generate, DeterministicForSeed) {
  synth::SynthConfig cfg;
  cfg.n_publications = 300;
  cfg.placement = synth::Placement::clustered;
  const auto a = synth::generate(cfg);
  const auto b = synth::generate(cfg);
  ASSERT_EQ(a.corpus.size(), 300u);
  for (std::size_t i = 0; i < a.corpus.size(); ++i) {
    EXPECT_EQ(to_json_line(a.corpus.publications()[i]), to_json_line(b.corpus.publications()[i]));
  }
  EXPECT_EQ(a.gazetteer.entries(), b.gazetteer.entries());
  cfg.seed = 2;
  const auto c = synth::generate(cfg);
  EXPECT_NE(to_json_line(a.corpus.publications()[0]) + to_json_line(a.corpus.publications()[1]),
            to_json_line(c.corpus.publications()[0]) + to_json_line(c.corpus.publications()[1]));
}

TEST(Generate, EveryAddressResolvesAndCitiesAreValid) {
  const auto data = synth::generate(test::random_config(4, 200, 40));
  for (const auto& p : data.geocoded) {
    ASSERT_GE(p.record.addresses.size(), 1u);
    for (const auto& c : p.coords) ASSERT_TRUE(c.has_value());
  }
  for (const auto& [k, p] : data.gazetteer.entries()) EXPECT_TRUE(is_valid(p));
}

TEST(Generate, MixingExtremes) {
  synth::SynthConfig cfg;
  cfg.n_publications = 400;
  cfg.n_cities = 30;
  cfg.n_countries = 5;
  cfg.international_mixing = 0.0;
  EXPECT_EQ(compute_measures(synth::generate(cfg).geocoded, Scope::world({2000})).prop_int_relations, 0.0);
  cfg.international_mixing = 1.0;
  EXPECT_EQ(compute_measures(synth::generate(cfg).geocoded, Scope::world({2000})).prop_int_relations, 1.0);
}

TEST(Validate, RejectsBadConfigs) {
  auto bad = [](auto mutate) {
    synth::SynthConfig c;
    mutate(c);
    return c;
  };
  EXPECT_THROW(synth::validate(bad([](auto& c) { c.n_publications = 0; })), ConfigError);
  EXPECT_THROW(synth::validate(bad([](auto& c) { c.n_cities = -1; })), ConfigError);
  EXPECT_THROW(synth::validate(bad([](auto& c) { c.n_countries = 0; })), ConfigError);
  EXPECT_THROW(synth::validate(bad([](auto& c) { c.international_mixing = 1.5; })), ConfigError);
  EXPECT_THROW(synth::validate(bad([](auto& c) { c.year_min = 2001; })), ConfigError);
  EXPECT_THROW(synth::validate(bad([](auto& c) { c.field_weights = {0, 0, 0, 0, 0}; })), ConfigError);
  EXPECT_THROW(synth::validate(bad([](auto& c) { c.address_count_weights[0] = -1; })), ConfigError);
  EXPECT_NO_THROW(synth::validate(synth::SynthConfig{}));
}

TEST(ConfigFromJson, StrictKeys) {
  const auto c = synth::config_from_json(R"({"seed": 9, "n_cities": 7, "placement": "clustered", "year_max": 2003})");
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.n_cities, 7);
  EXPECT_EQ(c.placement, synth::Placement::clustered);
  EXPECT_EQ(c.year_max, 2003);
  EXPECT_EQ(c.n_publications, synth::SynthConfig{}.n_publications);
  EXPECT_THROW(synth::config_from_json(R"({"sead": 9})"), ConfigError);
  EXPECT_THROW(synth::config_from_json(R"({"n_cities": "many"})"), ConfigError);
  EXPECT_THROW(synth::config_from_json(R"({"placement": "random"})"), ConfigError);
  EXPECT_THROW(synth::config_from_json("[1,2]"), ConfigError);
  EXPECT_THROW(synth::config_from_json("{"), ConfigError);
}

TEST(WriteFixtures, RoundTripsThroughParsers) {
  const auto data = synth::generate(test::random_config(12, 80, 15));
  const auto dir = std::filesystem::temp_directory_path() / "scigrid_synth_fixtures";
  std::filesystem::remove_all(dir);
  synth::write_fixtures(data, dir);
  const auto ingest = parse_corpus_file(dir / "corpus.jsonl");
  EXPECT_EQ(ingest.report.malformed, 0u);
  ASSERT_EQ(ingest.corpus.size(), data.corpus.size());
  for (std::size_t i = 0; i < data.corpus.size(); ++i) {
    EXPECT_EQ(to_json_line(ingest.corpus.publications()[i]), to_json_line(data.corpus.publications()[i]));
  }
  EXPECT_EQ(Gazetteer::load(dir / "gazetteer.csv").entries(), data.gazetteer.entries());
  EXPECT_EQ(FieldMap::load(dir / "fieldmap.csv").entries(), data.field_map.entries());
  std::filesystem::remove_all(dir);
}

TEST(Oracle, WorkedExampleIsExact) {
  const auto geo = test::toy_geocoded();
  const auto a = synth::oracle_measures(geo, Scope{{2010}, "A", std::nullopt});
  EXPECT_EQ(*a.prop_collab_exact, Rational(3, 5));
  EXPECT_EQ(*a.prop_int_exact, Rational(4, 11));
  EXPECT_EQ(a.pub_weight_total, Rational(5, 2));
  EXPECT_NEAR(*a.measures.mgcd_all, 473.8702146235799, 1e-9);
  EXPECT_NEAR(*a.measures.rgcd_all, 623.545574229599, 1e-9);

  const auto w = synth::oracle_measures(geo, Scope::world({2010}));
  EXPECT_EQ(*w.prop_collab_exact, Rational(2, 3));
  EXPECT_EQ(*w.prop_int_exact, Rational(5, 12));
  EXPECT_EQ(w.relation_weight_total, Rational(2));
  EXPECT_NEAR(*w.measures.rgcd_domestic, 119.56862900453424, 1e-9);
}

TEST(Oracle, PairSharesAreExact) {
  const std::vector<Rational> counts{10, 20, 60};
  const auto shares = synth::oracle_pair_shares(counts);
  ASSERT_EQ(shares.size(), 3u);
  EXPECT_EQ(shares[0], Rational(1, 10));
  EXPECT_EQ(shares[1], Rational(3, 10));
  EXPECT_EQ(shares[2], Rational(3, 5));
  EXPECT_EQ(shares[0] * 100 + shares[1] * 200 + shares[2] * 300, Rational(250));
  EXPECT_TRUE(synth::oracle_pair_shares(std::vector<Rational>{4}).empty());
}

TEST(Oracle, SizeGuard) {
  auto cfg = synth::SynthConfig{};
  cfg.n_cities = static_cast<int>(synth::kOracleMaxCities) + 1;
  cfg.n_publications = 5000;
  const auto data = synth::generate(cfg);
  EXPECT_THROW(synth::oracle_measures(data.geocoded, Scope::world({2000})), std::length_error);
}

// Engine against the independent brute-force evaluation over many random
// corpora, every scope kind, both count modes and both field weightings.
TEST(Oracle, AgreesWithEngineOnRandomCorpora) {
  int compared = 0;
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    const auto cfg = test::random_config(seed);
    const auto data = synth::generate(cfg);
    const CountMode mode = seed % 2 ? CountMode::whole : CountMode::fractional;
    const FieldWeighting weighting = seed % 3 ? FieldWeighting::fractional : FieldWeighting::whole;

    TableRequest req;
    for (int y = cfg.year_min; y <= cfg.year_max; ++y) req.years.push_back(y);
    req.countries = {std::nullopt, "c000"};
    if (cfg.n_countries > 1) req.countries.push_back("c001");
    req.fields = {std::nullopt, static_cast<Field>(seed % 4)};
    req.count_mode = mode;
    req.options.field_map = &data.field_map;
    req.options.field_weighting = weighting;
    req.options.workers = 1 + static_cast<unsigned>(seed % 3);
    const auto rows = yearly_table(data.geocoded, req);

    synth::OracleOptions opt{&data.field_map, weighting, mode};
    for (const ScopeRow& row : rows) {
      const auto ref = synth::oracle_measures(data.geocoded, Scope{{row.year}, row.country, row.field}, opt);
      ASSERT_LE(test::max_deviation(row.measures, ref.measures), 1e-9)
          << "seed " << seed << " year " << row.year << " " << country_label(row.country) << " "
          << field_label(row.field);
      ++compared;
    }
  }
  EXPECT_GT(compared, 5000);
}

}  // namespace
}  // namespace scigrid
