#include "scigrid/report.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "scigrid/error.hpp"
#include "scigrid/summation.hpp"
#include "scigrid/text.hpp"

namespace scigrid {

namespace {

std::string fixed(double v, int decimals) {
  std::string s = fmt::format("{:.{}f}", v, decimals);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string format_measure(MeasureId id, Measure v) {
  return is_distance(id) ? format_distance(v) : format_proportion(v);
}

// Value as written, read back; keeps json and csv numerically identical.
nlohmann::ordered_json json_number(const std::string& formatted) {
  if (formatted.empty()) return nullptr;
  return std::stod(formatted);
}

CountrySel normalized(const CountrySel& c) {
  if (!c) return std::nullopt;
  return normalize_text(*c);
}

template <typename OnSlice>
std::vector<ScopeRow> build_rows(const GeocodedCorpus& corpus, const TableRequest& request, OnSlice&& on_slice) {
  std::vector<CountrySel> countries;
  for (const CountrySel& c : request.countries) countries.push_back(normalized(c));

  std::vector<ScopeRow> rows;
  for (const int year : request.years) {
    for (const FieldSel& field : request.fields) {
      const Scope slice{{year}, std::nullopt, field};
      const CityCountTable table = build_city_counts(corpus, slice, request.count_mode, request.options);
      on_slice(year, field, table);

      std::vector<RgcdQuery> queries;
      const std::size_t first_row = rows.size();
      for (const CountrySel& country : countries) {
        const Scope scope{{year}, country, field};
        rows.push_back({year, country, field, compute_measures(corpus, scope, request.options)});
        queries.push_back({0, country});
      }
      const auto rgcd = rgcd_batch(std::span(&table, 1), queries, request.options.workers);
      for (std::size_t q = 0; q < rgcd.size(); ++q) {
        MeasureSet& m = rows[first_row + q].measures;
        if (m.relation_weight_total == 0.0) continue;  // no collaborations to compare against
        m.rgcd_all = rgcd[q].rgcd_all;
        m.rgcd_domestic = rgcd[q].rgcd_domestic;
        m.rgcd_international = rgcd[q].rgcd_international;
      }
    }
  }
  return rows;
}

std::string scope_id(const CountrySel& country, const FieldSel& field) {
  return country_label(country) + '\x1f' + field_label(field);
}

}  // namespace

std::string_view to_string(MeasureId id) {
  switch (id) {
    case MeasureId::mgcd_all: return "mgcd_all";
    case MeasureId::rgcd_all: return "rgcd_all";
    case MeasureId::mgcd_domestic: return "mgcd_domestic";
    case MeasureId::rgcd_domestic: return "rgcd_domestic";
    case MeasureId::mgcd_international: return "mgcd_international";
    case MeasureId::rgcd_international: return "rgcd_international";
    case MeasureId::prop_collab_pubs: return "prop_collab_pubs";
    case MeasureId::prop_int_relations: return "prop_int_relations";
  }
  return "";
}

Measure measure_value(const MeasureSet& set, MeasureId id) {
  switch (id) {
    case MeasureId::mgcd_all: return set.mgcd_all;
    case MeasureId::rgcd_all: return set.rgcd_all;
    case MeasureId::mgcd_domestic: return set.mgcd_domestic;
    case MeasureId::rgcd_domestic: return set.rgcd_domestic;
    case MeasureId::mgcd_international: return set.mgcd_international;
    case MeasureId::rgcd_international: return set.rgcd_international;
    case MeasureId::prop_collab_pubs: return set.prop_collab_pubs;
    case MeasureId::prop_int_relations: return set.prop_int_relations;
  }
  return std::nullopt;
}

bool is_distance(MeasureId id) { return id != MeasureId::prop_collab_pubs && id != MeasureId::prop_int_relations; }

std::vector<ScopeRow> yearly_table(const GeocodedCorpus& corpus, const TableRequest& request) {
  return build_rows(corpus, request, [](int, const FieldSel&, const CityCountTable&) {});
}

std::vector<TrendRecord> trends(const std::vector<ScopeRow>& rows, int year_start, int year_end) {
  std::vector<TrendRecord> out;
  for (const ScopeRow& start : rows) {
    if (start.year != year_start) continue;
    const auto end = std::find_if(rows.begin(), rows.end(), [&](const ScopeRow& r) {
      return r.year == year_end && r.country == start.country && r.field == start.field;
    });
    if (end == rows.end()) continue;
    for (const MeasureId id : kAllMeasures) {
      const Measure a = measure_value(start.measures, id);
      const Measure b = measure_value(end->measures, id);
      out.push_back({start.country, start.field, year_start, year_end, id, a, b, relative_change(a, b)});
    }
  }
  return out;
}

std::string_view to_string(Quadrant q) {
  switch (q) {
    case Quadrant::dom_exp_int_exp: return "DomExp_IntExp";
    case Quadrant::dom_con_int_exp: return "DomCon_IntExp";
    case Quadrant::dom_exp_int_con: return "DomExp_IntCon";
    case Quadrant::dom_con_int_con: return "DomCon_IntCon";
  }
  return "";
}

QuadrantClass classify_quadrant(Measure delta_domestic_pct, Measure delta_international_pct) {
  if (!delta_domestic_pct || !delta_international_pct) return {};
  const bool dom_exp = *delta_domestic_pct >= 0.0;
  const bool int_exp = *delta_international_pct >= 0.0;
  QuadrantClass c;
  c.zero_boundary = *delta_domestic_pct == 0.0 || *delta_international_pct == 0.0;
  if (dom_exp) {
    c.quadrant = int_exp ? Quadrant::dom_exp_int_exp : Quadrant::dom_exp_int_con;
  } else {
    c.quadrant = int_exp ? Quadrant::dom_con_int_exp : Quadrant::dom_con_int_con;
  }
  return c;
}

std::vector<QuadrantRow> quadrants(const std::vector<TrendRecord>& trend_records) {
  std::vector<QuadrantRow> out;
  std::vector<std::string> seen;
  for (const TrendRecord& t : trend_records) {
    if (!t.country) continue;
    const std::string id = scope_id(t.country, t.field);
    if (std::find(seen.begin(), seen.end(), id) != seen.end()) continue;
    seen.push_back(id);
    QuadrantRow row{t.country, t.field, std::nullopt, std::nullopt, {}};
    for (const TrendRecord& u : trend_records) {
      if (u.country != t.country || u.field != t.field) continue;
      if (u.measure == MeasureId::mgcd_domestic) row.delta_domestic_pct = u.change_pct;
      if (u.measure == MeasureId::mgcd_international) row.delta_international_pct = u.change_pct;
    }
    row.classification = classify_quadrant(row.delta_domestic_pct, row.delta_international_pct);
    out.push_back(std::move(row));
  }
  return out;
}

std::optional<std::size_t> city_concentration(const CityCountTable& table, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw ConfigError("concentration threshold must be in (0, 1]");
  const auto& cities = table.cities;
  if (cities.empty()) return std::nullopt;

  std::vector<std::size_t> order(cities.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (cities[a].n != cities[b].n) return cities[a].n > cities[b].n;
    return cities[a].key < cities[b].key;
  });

  CompensatedSum total;
  for (const CityCount& c : cities) total.add(c.n);
  const double target = threshold * total.value();

  CompensatedSum running;
  for (std::size_t k = 0; k < order.size(); ++k) {
    running.add(cities[order[k]].n);
    if (running.value() >= target) return k + 1;
  }
  return order.size();
}

Report build_report(const GeocodedCorpus& corpus, const TableRequest& request) {
  if (request.years.empty()) throw ConfigError("report needs at least one year");
  for (const double t : request.concentration_thresholds) {
    if (!(t > 0.0 && t <= 1.0)) throw ConfigError("concentration threshold must be in (0, 1]");
  }
  Report report;
  report.year_start = request.years.front();
  report.year_end = request.years.back();
  report.rows = build_rows(corpus, request, [&](int year, const FieldSel& field, const CityCountTable& table) {
    CompensatedSum total;
    for (const CityCount& c : table.cities) total.add(c.n);
    for (const double t : request.concentration_thresholds) {
      report.concentration_rows.push_back(
          {year, field, request.count_mode, t, table.cities.size(), total.value(), city_concentration(table, t)});
    }
  });
  report.trend_records = trends(report.rows, report.year_start, report.year_end);
  report.quadrant_rows = quadrants(report.trend_records);
  return report;
}

std::optional<OutputFormat> parse_output_format(std::string_view text) {
  const std::string t = normalize_text(text);
  if (t == "csv") return OutputFormat::csv;
  if (t == "json") return OutputFormat::json;
  return std::nullopt;
}

std::string format_distance(Measure km) { return km ? fixed(*km, 1) : std::string(); }
std::string format_proportion(Measure p) { return p ? fixed(*p, 4) : std::string(); }
std::string format_change(Measure pct) { return pct ? fixed(*pct, 1) : std::string(); }
std::string format_weight(double w) { return fixed(w, 6); }

std::map<std::string, std::string> render_report(const Report& report, OutputFormat format) {
  std::map<std::string, std::string> files;

  static constexpr const char* kWeightColumns[] = {"pub_weight_total", "collab_pub_weight", "relation_weight_total",
                                                    "international_relation_weight", "resolved_relation_weight"};
  auto weights = [](const MeasureSet& m) {
    return std::array<double, 5>{m.pub_weight_total, m.collab_pub_weight, m.relation_weight_total,
                                 m.international_relation_weight, m.resolved_relation_weight};
  };

  if (format == OutputFormat::csv) {
    std::ostringstream out;
    out << "year,country,field";
    for (const MeasureId id : kAllMeasures) out << ',' << to_string(id);
    for (const char* w : kWeightColumns) out << ',' << w;
    out << '\n';
    for (const ScopeRow& r : report.rows) {
      out << r.year << ',' << csv_field(country_label(r.country)) << ',' << field_label(r.field);
      for (const MeasureId id : kAllMeasures) out << ',' << format_measure(id, measure_value(r.measures, id));
      for (const double w : weights(r.measures)) out << ',' << format_weight(w);
      out << '\n';
    }
    files["measures.csv"] = out.str();
  } else {
    auto rows = nlohmann::ordered_json::array();
    for (const ScopeRow& r : report.rows) {
      nlohmann::ordered_json row;
      row["year"] = r.year;
      row["country"] = country_label(r.country);
      row["field"] = field_label(r.field);
      for (const MeasureId id : kAllMeasures) {
        row[std::string(to_string(id))] = json_number(format_measure(id, measure_value(r.measures, id)));
      }
      const auto w = weights(r.measures);
      for (std::size_t i = 0; i < w.size(); ++i) row[kWeightColumns[i]] = json_number(format_weight(w[i]));
      rows.push_back(std::move(row));
    }
    files["measures.json"] = rows.dump(2) + "\n";
  }

  {
    std::ostringstream out;
    out << "country,field,measure,year_start,year_end,value_start,value_end,relative_change_pct\n";
    for (const TrendRecord& t : report.trend_records) {
      out << csv_field(country_label(t.country)) << ',' << field_label(t.field) << ',' << to_string(t.measure) << ','
          << t.year_start << ',' << t.year_end << ',' << format_measure(t.measure, t.value_start) << ','
          << format_measure(t.measure, t.value_end) << ',' << format_change(t.change_pct) << '\n';
    }
    files["trends.csv"] = out.str();
  }

  {
    std::ostringstream out;
    out << "country,field,year_start,year_end,delta_mgcd_domestic_pct,delta_mgcd_international_pct,quadrant,"
           "zero_boundary\n";
    for (const QuadrantRow& q : report.quadrant_rows) {
      out << csv_field(country_label(q.country)) << ',' << field_label(q.field) << ',' << report.year_start << ','
          << report.year_end << ',' << format_change(q.delta_domestic_pct) << ','
          << format_change(q.delta_international_pct) << ','
          << (q.classification.quadrant ? to_string(*q.classification.quadrant) : "") << ','
          << (q.classification.zero_boundary ? "true" : "false") << '\n';
    }
    files["quadrants.csv"] = out.str();
  }

  {
    std::ostringstream out;
    out << "year,field,count_mode,threshold,cities,total_count,cities_needed\n";
    for (const ConcentrationRow& c : report.concentration_rows) {
      out << c.year << ',' << field_label(c.field) << ',' << to_string(c.mode) << ',' << fixed(c.threshold, 4) << ','
          << c.cities << ',' << format_weight(c.total) << ',' << (c.needed ? std::to_string(*c.needed) : "") << '\n';
    }
    files["concentration.csv"] = out.str();
  }

  {
    // End-year value with its relative change, measures x fields per country.
    std::vector<FieldSel> fields;
    const FieldSel order[] = {std::nullopt, Field::eng, Field::life, Field::nat, Field::soc};
    for (const FieldSel& f : order) {
      if (std::any_of(report.trend_records.begin(), report.trend_records.end(),
                      [&](const TrendRecord& t) { return t.field == f; })) {
        fields.push_back(f);
      }
    }
    std::vector<CountrySel> countries;
    for (const TrendRecord& t : report.trend_records) {
      if (std::find(countries.begin(), countries.end(), t.country) == countries.end()) countries.push_back(t.country);
    }
    std::ostringstream out;
    out << "country,measure";
    for (const FieldSel& f : fields) out << ',' << field_label(f);
    out << '\n';
    for (const CountrySel& c : countries) {
      for (const MeasureId id : kAllMeasures) {
        out << csv_field(country_label(c)) << ',' << to_string(id);
        for (const FieldSel& f : fields) {
          const auto t = std::find_if(report.trend_records.begin(), report.trend_records.end(),
                                      [&](const TrendRecord& r) { return r.country == c && r.field == f && r.measure == id; });
          out << ',';
          if (t == report.trend_records.end() || !t->value_end) continue;
          out << format_measure(id, t->value_end);
          if (t->change_pct) out << " (" << format_change(t->change_pct) << ')';
        }
        out << '\n';
      }
    }
    files["field_summary.csv"] = out.str();
  }
  return files;
}

void emit(const std::map<std::string, std::string>& files, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  for (const auto& [name, content] : files) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) throw IoError("write failed for " + path.string());
  }
}

}  // namespace scigrid
