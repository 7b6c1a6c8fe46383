#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "scigrid/error.hpp"
#include "scigrid/geo.hpp"
#include "support.hpp"

namespace scigrid {
namespace {

using test::key;

// Written independently of the library: plain asin haversine.
double reference_haversine_km(double lat1, double lon1, double lat2, double lon2) {
  const double r = 6371.0088;
  const double to_rad = 3.14159265358979323846 / 180.0;
  const double p1 = lat1 * to_rad, p2 = lat2 * to_rad;
  const double dp = (lat2 - lat1) * to_rad, dl = (lon2 - lon1) * to_rad;
  const double h = std::pow(std::sin(dp / 2), 2) + std::cos(p1) * std::cos(p2) * std::pow(std::sin(dl / 2), 2);
  return 2 * r * std::asin(std::sqrt(h));
}

GeoPoint random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> lat(-90.0, 90.0);
  std::uniform_real_distribution<double> lon(-179.999999, 180.0);
  return {lat(rng), lon(rng)};
}

TEST(GreatCircle, IdenticalPointsAreZero) {
  EXPECT_EQ(great_circle_km(GeoPoint{52.16, 4.49}, GeoPoint{52.16, 4.49}), 0.0);
  EXPECT_EQ(great_circle_km(to_unit_vector({52.16, 4.49}), to_unit_vector({52.16, 4.49})), 0.0);
}

TEST(GreatCircle, AntipodalAndQuarterCircumference) {
  EXPECT_NEAR(great_circle_km(GeoPoint{0, 0}, GeoPoint{0, 180}), 20015.115, 1e-3);
  EXPECT_NEAR(great_circle_km(GeoPoint{0, 0}, GeoPoint{0, 90}), 10007.557, 1e-3);
  EXPECT_NEAR(great_circle_km(GeoPoint{90, 0}, GeoPoint{-90, 0}), std::numbers::pi * kEarthRadiusKm, 1e-9);
}

TEST(GreatCircle, ParisLondonMatchesIndependentOracle) {
  const double oracle = reference_haversine_km(48.8566, 2.3522, 51.5074, -0.1278);
  EXPECT_NEAR(oracle, 343.556535, 1e-6);  // frozen from the oracle
  EXPECT_NEAR(great_circle_km(GeoPoint{48.8566, 2.3522}, GeoPoint{51.5074, -0.1278}), oracle, 1e-9);
}

TEST(GreatCircle, SymmetryRangeAndTriangleInequality) {
  std::mt19937_64 rng(20240601);
  const double max_km = std::numbers::pi * kEarthRadiusKm;
  for (int i = 0; i < 20000; ++i) {
    const GeoPoint a = random_point(rng), b = random_point(rng), c = random_point(rng);
    const double ab = great_circle_km(a, b);
    ASSERT_EQ(ab, great_circle_km(b, a));
    ASSERT_GE(ab, 0.0);
    ASSERT_LE(ab, max_km);
    ASSERT_LE(great_circle_km(a, c), ab + great_circle_km(b, c) + 1e-6);
  }
}

TEST(GreatCircle, UnitVectorFormAgreesWithHaversine) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 20000; ++i) {
    const GeoPoint a = random_point(rng), b = random_point(rng);
    const double h = great_circle_km(a, b);
    const double v = great_circle_km(to_unit_vector(a), to_unit_vector(b));
    ASSERT_NEAR(v, h, 1e-9 * std::max(1.0, h));
  }
  // Short separations stay accurate too.
  const GeoPoint a{52.16, 4.49}, b{52.16001, 4.49001};
  EXPECT_NEAR(great_circle_km(to_unit_vector(a), to_unit_vector(b)), great_circle_km(a, b), 1e-9);
}

TEST(Gazetteer, LoadsRowsAndAppliesPolicies) {
  std::istringstream in(
      "country,region,city,lat,lon\n"
      "NL,,Leiden,52.16,4.49\n"
      "NL,,Atlantis,95.0,4.0\n"
      "NL,,Delft,52.0,-180\n"
      "NL,,Rotterdam,abc,4.4\n"
      "US,OH,Springfield,39.92,-83.81\n"
      "US,IL,Springfield,39.78,-89.65\n"
      "NL,,Delft,52.01,4.36\n"
      "NL,,Delft,52.0116,4.3571\n"
      "short,row\n");
  GazetteerLoadReport report;
  const Gazetteer g = Gazetteer::parse(in, &report);
  EXPECT_EQ(report.rows, 9u);
  EXPECT_EQ(report.rejected, 4u);
  EXPECT_EQ(report.duplicates, 1u);
  EXPECT_EQ(report.loaded, 5u);
  EXPECT_EQ(g.size(), 4u);
  EXPECT_EQ(g.lookup(key("Leiden", "NL")), (GeoPoint{52.16, 4.49}));
  EXPECT_EQ(g.lookup(key("delft", "nl")), (GeoPoint{52.0116, 4.3571}));  // last row wins
  EXPECT_EQ(g.lookup(key("Springfield", "US", "IL")), (GeoPoint{39.78, -89.65}));
  EXPECT_FALSE(g.lookup(key("Atlantis", "NL")));
}

TEST(Gazetteer, HeaderAndFileErrors) {
  std::istringstream bad("lat,lon\n1,2\n");
  EXPECT_THROW(Gazetteer::parse(bad), ConfigError);
  EXPECT_THROW(Gazetteer::load("/nonexistent/gazetteer.csv"), IoError);
}

TEST(Gazetteer, WriteThenParseIsIdentity) {
  Gazetteer g;
  g.insert(key("Washington, D.C.", "US", "DC"), {38.9072, -77.0369});
  g.insert(key("Leiden", "NL"), {52.16, 4.49});
  std::stringstream buffer;
  g.write(buffer);
  const Gazetteer back = Gazetteer::parse(buffer);
  EXPECT_EQ(back.entries(), g.entries());
}

TEST(GeocodeCorpus, CoverageCountsAddresses) {
  std::vector<PublicationRecord> pubs;
  Gazetteer g;
  for (int p = 0; p < 25; ++p) {
    PublicationRecord rec;
    rec.id = std::to_string(p);
    rec.year = 2010;
    for (int a = 0; a < 4; ++a) {
      CityKey k = key("city" + std::to_string(p * 4 + a), "XX");
      if (p * 4 + a != 7 && p * 4 + a != 50) g.insert(k, {0.1 * a, 0.1 * p});
      rec.addresses.push_back(std::move(k));
    }
    pubs.push_back(std::move(rec));
  }
  const Corpus corpus(std::move(pubs));
  const GeocodeResult r = geocode_corpus(corpus, g);
  EXPECT_EQ(r.report.resolved, 98u);
  EXPECT_EQ(r.report.unresolved, 2u);
  EXPECT_NEAR(*r.report.coverage(), 0.980, 1e-12);
  ASSERT_EQ(r.corpus.size(), corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    EXPECT_EQ(r.corpus.publications()[i].record.addresses.size(), 4u);
    EXPECT_EQ(r.corpus.publications()[i].coords.size(), 4u);
  }
  EXPECT_FALSE(r.corpus.publications()[1].coords[3]);

  std::ostringstream out;
  write_geocode_report(out, r.report);
  EXPECT_EQ(out.str(), "resolved,unresolved,coverage\n98,2,0.9800\n");
}

TEST(GeocodeCorpus, FullAndEmptyCoverage) {
  const GeocodeResult full = geocode_corpus(test::toy_corpus(), test::toy_gazetteer());
  EXPECT_EQ(*full.report.coverage(), 1.0);
  EXPECT_FALSE(geocode_corpus(Corpus{}, test::toy_gazetteer()).report.coverage());
}

}  // namespace
}  // namespace scigrid
