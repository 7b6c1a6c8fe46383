#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "scigrid/measures.hpp"
#include "scigrid/nullmodel.hpp"

namespace scigrid {

/// The eight reported measures, in the row order of the field summary table.
enum class MeasureId {
  mgcd_all,
  rgcd_all,
  mgcd_domestic,
  rgcd_domestic,
  mgcd_international,
  rgcd_international,
  prop_collab_pubs,
  prop_int_relations,
};

inline constexpr MeasureId kAllMeasures[] = {
    MeasureId::mgcd_all,           MeasureId::rgcd_all,           MeasureId::mgcd_domestic,
    MeasureId::rgcd_domestic,      MeasureId::mgcd_international, MeasureId::rgcd_international,
    MeasureId::prop_collab_pubs,   MeasureId::prop_int_relations,
};

std::string_view to_string(MeasureId id);
Measure measure_value(const MeasureSet& set, MeasureId id);
bool is_distance(MeasureId id);

struct ScopeRow {
  int year = 0;
  CountrySel country;
  FieldSel field;
  MeasureSet measures;
};

struct TableRequest {
  std::vector<int> years;
  std::vector<CountrySel> countries;  // nullopt entry = WORLD
  std::vector<FieldSel> fields;       // nullopt entry = ALL
  CountMode count_mode = CountMode::whole;
  MeasureOptions options;
  std::vector<double> concentration_thresholds{0.5};
};

/// One row per (year, field, country) in request order, with MGCD and RGCD
/// measures. RGCD stays UNDEFINED for a scope without collaborative relations.
/// RGCDs for all countries of a (year, field) slice share one pass
/// over that slice's city pairs.
std::vector<ScopeRow> yearly_table(const GeocodedCorpus& corpus, const TableRequest& request);

struct TrendRecord {
  CountrySel country;
  FieldSel field;
  int year_start = 0;
  int year_end = 0;
  MeasureId measure = MeasureId::mgcd_all;
  Measure value_start;
  Measure value_end;
  Measure change_pct;
};

/// Relative change of every measure between the rows of `year_start` and
/// `year_end`, for every (country, field) present in both.
std::vector<TrendRecord> trends(const std::vector<ScopeRow>& rows, int year_start, int year_end);

enum class Quadrant { dom_exp_int_exp, dom_con_int_exp, dom_exp_int_con, dom_con_int_con };

std::string_view to_string(Quadrant q);

struct QuadrantClass {
  std::optional<Quadrant> quadrant;  // nullopt when either delta is undefined
  bool zero_boundary = false;        // a delta was exactly 0 and counted as expansion
};

QuadrantClass classify_quadrant(Measure delta_domestic_pct, Measure delta_international_pct);

struct QuadrantRow {
  CountrySel country;
  FieldSel field;
  Measure delta_domestic_pct;
  Measure delta_international_pct;
  QuadrantClass classification;
};

/// Quadrants from MGCD Domestic / International changes, one per non-world
/// (country, field) scope found in `trend_records`.
std::vector<QuadrantRow> quadrants(const std::vector<TrendRecord>& trend_records);

/// Smallest k such that the k largest city counts reach threshold x total.
/// Equal counts are taken in CityKey order. nullopt for an empty table.
/// Throws ConfigError unless 0 < threshold <= 1.
std::optional<std::size_t> city_concentration(const CityCountTable& table, double threshold);

struct ConcentrationRow {
  int year = 0;
  FieldSel field;
  CountMode mode = CountMode::whole;
  double threshold = 0.5;
  std::size_t cities = 0;
  double total = 0.0;
  std::optional<std::size_t> needed;
};

struct Report {
  int year_start = 0;
  int year_end = 0;
  std::vector<ScopeRow> rows;
  std::vector<TrendRecord> trend_records;
  std::vector<QuadrantRow> quadrant_rows;
  std::vector<ConcentrationRow> concentration_rows;
};

Report build_report(const GeocodedCorpus& corpus, const TableRequest& request);

enum class OutputFormat { csv, json };

std::optional<OutputFormat> parse_output_format(std::string_view text);

std::string format_distance(Measure km);       // 1 decimal, empty if undefined
std::string format_proportion(Measure p);      // 4 decimals
std::string format_change(Measure pct);        // 1 decimal
std::string format_weight(double w);           // 6 decimals

/// File name -> content for measures.{csv,json}, trends.csv, quadrants.csv,
/// concentration.csv and field_summary.csv. Byte-stable for equal input.
std::map<std::string, std::string> render_report(const Report& report, OutputFormat format);

/// Writes every file into `dir` (created if missing). Throws IoError.
void emit(const std::map<std::string, std::string>& files, const std::filesystem::path& dir);

}  // namespace scigrid
