#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "scigrid/geo.hpp"
#include "scigrid/measures.hpp"
#include "scigrid/nullmodel.hpp"

namespace scigrid::synth {

enum class Placement { uniform, clustered };

struct SynthConfig {
  std::uint64_t seed = 1;
  int n_cities = 20;
  int n_countries = 4;
  int n_publications = 50;
  /// Relative weights of address counts 1..8.
  std::array<double, 8> address_count_weights{2, 3, 2, 1, 1, 0.5, 0.25, 0.25};
  /// Probability that each additional address comes from a country not yet on
  /// the publication (otherwise from the first address's country).
  double international_mixing = 0.3;
  int year_min = 2000;
  int year_max = 2000;
  /// Relative weights of ENG, LIFE, NAT, SOC, NONE per drawn category.
  std::array<double, 5> field_weights{1, 1, 1, 1, 0.25};
  /// clustered: cities gather around a per-country centre and city activity
  /// follows a 1/rank law; uniform: cities uniform on the sphere, equal activity.
  Placement placement = Placement::uniform;
};

/// Throws ConfigError for non-positive counts, probabilities out of range,
/// an empty year range, or all-zero weights.
void validate(const SynthConfig& config);

/// Parses a JSON object; absent keys keep their defaults. Throws ConfigError.
SynthConfig config_from_json(std::string_view json_text);

struct SynthData {
  Corpus corpus;
  GeocodedCorpus geocoded;
  Gazetteer gazetteer;
  FieldMap field_map;
};

/// Deterministic for a given config. Uses std::mt19937_64 (bit-exact across
/// standard libraries) with in-house uniform/normal transforms, since the
/// standard distributions are implementation-defined.
SynthData generate(const SynthConfig& config);

/// corpus.jsonl, gazetteer.csv, fieldmap.csv. Throws IoError.
void write_fixtures(const SynthData& data, const std::filesystem::path& dir);

using Rational = boost::multiprecision::cpp_rational;

struct OracleOptions {
  const FieldMap* field_map = nullptr;
  FieldWeighting field_weighting = FieldWeighting::fractional;
  CountMode count_mode = CountMode::whole;
};

struct OracleResult {
  MeasureSet measures;  // all eight measures, rgcd included
  std::optional<Rational> prop_collab_exact;
  std::optional<Rational> prop_int_exact;
  Rational pub_weight_total;
  Rational relation_weight_total;
};

/// Exact random-model pair shares n_i n_j / sum_{p<q} n_p n_q for i < j in
/// lexicographic order. Empty for fewer than two positive counts.
std::vector<Rational> oracle_pair_shares(std::span<const Rational> counts);

inline constexpr std::size_t kOracleMaxRelations = 10'000;
inline constexpr std::size_t kOracleMaxCities = 500;

/// Brute-force reference for every measure: enumerates each relation and each
/// city pair directly, with exact rational weights. Shares no summation or pair
/// enumeration code with compute_measures / the null model kernels.
/// Throws std::length_error above kOracleMaxRelations / kOracleMaxCities.
OracleResult oracle_measures(const GeocodedCorpus& corpus, const Scope& scope, const OracleOptions& options = {});

}  // namespace scigrid::synth
