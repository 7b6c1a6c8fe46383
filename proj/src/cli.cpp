#include "scigrid/cli.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <memory>
#include <ostream>
#include <sstream>

#include <openssl/evp.h>

#include "json.hpp"
#include "scigrid/error.hpp"
#include "scigrid/geo.hpp"
#include "scigrid/synth.hpp"
#include "scigrid/text.hpp"

#ifndef SCIGRID_VERSION
#define SCIGRID_VERSION "0.0.0"
#endif

namespace scigrid::cli {

namespace {

using OrderedJson = nlohmann::ordered_json;

std::string sha256_bytes(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &length) != 1) {
    throw IoError("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("read error on " + path.string());
  return buffer.str();
}

void require_file(const std::filesystem::path& path, const char* what) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) throw IoError(std::string(what) + " not found: " + path.string());
}

void report_error(std::ostream& err, const char* kind, int code, std::string_view message) {
  OrderedJson line;
  line["error"] = kind;
  line["exit"] = code;
  line["message"] = message;
  err << line.dump() << '\n';
}

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    body();
    return kExitOk;
  } catch (const ConfigError& e) {
    report_error(err, "config", kExitConfig, e.what());
    return kExitConfig;
  } catch (const IoError& e) {
    report_error(err, "io", kExitIo, e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    report_error(err, "internal", kExitIo, e.what());
    return kExitIo;
  }
}

std::vector<FieldSel> resolve_fields(const RunConfig& config) {
  std::vector<FieldSel> fields;
  const std::vector<std::string> names = config.fields.empty() ? std::vector<std::string>{"ALL"} : config.fields;
  for (const std::string& name : names) {
    FieldSel sel;
    if (normalize_text(name) != "all") {
      const auto f = parse_field(name);
      if (!f || *f == Field::none) throw ConfigError("unknown field '" + name + "'");
      sel = *f;
    }
    if (std::find(fields.begin(), fields.end(), sel) == fields.end()) fields.push_back(sel);
  }
  return fields;
}

std::vector<CountrySel> resolve_countries(const RunConfig& config, const Corpus& corpus) {
  std::vector<CountrySel> countries{std::nullopt};
  auto add = [&](std::string c) {
    CountrySel sel = std::move(c);
    if (std::find(countries.begin(), countries.end(), sel) == countries.end()) countries.push_back(std::move(sel));
  };
  for (const std::string& name : config.countries) {
    const std::string c = normalize_text(name);
    if (c.empty()) throw ConfigError("empty country code");
    if (c == "world") continue;
    if (c == "all") {
      std::set<std::string> present;
      for (const PublicationRecord& pub : corpus) {
        for (const CityKey& k : pub.addresses) present.insert(k.country);
      }
      for (const std::string& p : present) add(p);
      continue;
    }
    add(c);
  }
  return countries;
}

OrderedJson config_json(const RunConfig& c) {
  OrderedJson j;
  j["input"] = c.input.generic_string();
  j["gazetteer"] = c.gazetteer.generic_string();
  j["field_map"] = c.field_map ? OrderedJson(c.field_map->generic_string()) : OrderedJson(nullptr);
  j["years"] = std::to_string(c.year_start) + ":" + std::to_string(c.year_end);
  j["countries"] = c.countries;
  j["fields"] = c.fields;
  j["exclude_journals"] = c.exclude_journals ? OrderedJson(*c.exclude_journals) : OrderedJson(nullptr);
  j["count_mode"] = std::string(to_string(c.count_mode));
  j["field_weighting"] = c.field_weighting == FieldWeighting::whole ? "whole" : "fractional";
  j["format"] = c.format == OutputFormat::csv ? "csv" : "json";
  j["concentration_threshold"] = c.concentration_threshold;
  return j;
}

}  // namespace

std::string_view tool_version() { return SCIGRID_VERSION; }

std::string sha256_file(const std::filesystem::path& path) { return sha256_bytes(read_file(path)); }

std::pair<int, int> parse_year_range(std::string_view text) {
  auto parse_year = [&](std::string_view s) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
      throw ConfigError("invalid year range '" + std::string(text) + "' (expected A:B)");
    }
    return value;
  };
  const auto colon = text.find(':');
  const int a = parse_year(text.substr(0, colon));
  const int b = colon == std::string_view::npos ? a : parse_year(text.substr(colon + 1));
  if (a > b) throw ConfigError("empty year range '" + std::string(text) + "'");
  return {a, b};
}

int run(const RunConfig& config, std::ostream& err) {
  return guarded(err, [&] {
    if (config.year_start > config.year_end) throw ConfigError("empty year range");
    if (config.workers == 0) throw ConfigError("--workers must be at least 1");
    if (!(config.concentration_threshold > 0.0 && config.concentration_threshold <= 1.0)) {
      throw ConfigError("concentration threshold must be in (0, 1]");
    }
    if (config.out.empty()) throw ConfigError("--out is required");
    const auto fields = resolve_fields(config);
    const bool field_scopes = std::any_of(fields.begin(), fields.end(), [](const FieldSel& f) { return f.has_value(); });
    if (field_scopes && !config.field_map) throw ConfigError("field scopes need --field-map");
    if (config.exclude_journals) filter_journals(Corpus{}, *config.exclude_journals);  // validates the pattern

    require_file(config.input, "input");
    require_file(config.gazetteer, "gazetteer");
    if (config.field_map) require_file(*config.field_map, "field map");
    {
      std::error_code ec;
      if (std::filesystem::exists(config.out, ec) && !std::filesystem::is_directory(config.out, ec)) {
        throw IoError("output path exists and is not a directory: " + config.out.string());
      }
    }

    IngestResult ingest = parse_corpus_file(config.input);
    GazetteerLoadReport gazetteer_report;
    const Gazetteer gazetteer = Gazetteer::load(config.gazetteer, &gazetteer_report);
    FieldMap field_map;
    if (config.field_map) field_map = FieldMap::load(*config.field_map);

    Corpus corpus = std::move(ingest.corpus);
    std::uint64_t excluded = 0;
    if (config.exclude_journals) {
      const std::size_t before = corpus.size();
      corpus = filter_journals(corpus, *config.exclude_journals);
      excluded = before - corpus.size();
    }
    const GeocodeResult geocoded = geocode_corpus(corpus, gazetteer);

    TableRequest request;
    for (int y = config.year_start; y <= config.year_end; ++y) request.years.push_back(y);
    request.countries = resolve_countries(config, corpus);
    request.fields = fields;
    request.count_mode = config.count_mode;
    request.options.field_map = &field_map;
    request.options.field_weighting = config.field_weighting;
    request.options.workers = config.workers;
    request.concentration_thresholds = {config.concentration_threshold};

    const Report report = build_report(geocoded.corpus, request);
    auto files = render_report(report, config.format);
    {
      std::ostringstream out;
      write_ingest_report(out, ingest.report);
      files["ingest_report.csv"] = out.str();
    }
    {
      std::ostringstream out;
      write_geocode_report(out, geocoded.report);
      files["geocode_report.csv"] = out.str();
    }
    {
      std::ostringstream out;
      out << "rows,loaded,rejected,duplicates\n"
          << gazetteer_report.rows << ',' << gazetteer_report.loaded << ',' << gazetteer_report.rejected << ','
          << gazetteer_report.duplicates << '\n';
      files["gazetteer_report.csv"] = out.str();
    }

    OrderedJson manifest;
    manifest["tool"] = "scigrid";
    manifest["version"] = std::string(tool_version());
    manifest["config"] = config_json(config);
    OrderedJson inputs;
    inputs["input"] = sha256_file(config.input);
    inputs["gazetteer"] = sha256_file(config.gazetteer);
    if (config.field_map) inputs["field_map"] = sha256_file(*config.field_map);
    manifest["input_sha256"] = std::move(inputs);
    OrderedJson model;
    model["earth_radius_km"] = kEarthRadiusKm;
    model["distance"] = "haversine";
    model["self_pairs"] = "excluded";
    model["rgcd_country_pairs"] = "participation";
    model["unresolved_addresses"] = "kept for proportions, excluded from distances and city counts";
    manifest["model"] = std::move(model);
    manifest["journals_excluded"] = excluded;
    OrderedJson outputs;
    for (const auto& [name, content] : files) outputs[name] = sha256_bytes(content);
    manifest["output_sha256"] = std::move(outputs);
    files["manifest.json"] = manifest.dump(2) + "\n";

    emit(files, config.out);
  });
}

int replay(const std::filesystem::path& manifest_path, const std::filesystem::path& out, unsigned workers,
           std::ostream& err) {
  RunConfig config;
  const int status = guarded(err, [&] {
    const nlohmann::json manifest = nlohmann::json::parse(read_file(manifest_path), nullptr, false);
    if (manifest.is_discarded() || !manifest.contains("config")) throw ConfigError("not a scigrid manifest");
    try {
      const auto& c = manifest.at("config");
      config.input = c.at("input").get<std::string>();
      config.gazetteer = c.at("gazetteer").get<std::string>();
      if (!c.at("field_map").is_null()) config.field_map = c.at("field_map").get<std::string>();
      std::tie(config.year_start, config.year_end) = parse_year_range(c.at("years").get<std::string>());
      config.countries = c.at("countries").get<std::vector<std::string>>();
      config.fields = c.at("fields").get<std::vector<std::string>>();
      if (!c.at("exclude_journals").is_null()) config.exclude_journals = c.at("exclude_journals").get<std::string>();
      const auto mode = parse_count_mode(c.at("count_mode").get<std::string>());
      if (!mode) throw ConfigError("manifest: bad count_mode");
      config.count_mode = *mode;
      config.field_weighting =
          c.at("field_weighting").get<std::string>() == "whole" ? FieldWeighting::whole : FieldWeighting::fractional;
      const auto format = parse_output_format(c.at("format").get<std::string>());
      if (!format) throw ConfigError("manifest: bad format");
      config.format = *format;
      config.concentration_threshold = c.at("concentration_threshold").get<double>();

      const auto& sums = manifest.at("input_sha256");
      auto check = [&](const char* key, const std::filesystem::path& path) {
        require_file(path, key);
        if (sums.at(key).get<std::string>() != sha256_file(path)) {
          throw ConfigError(std::string("manifest: ") + key + " checksum mismatch for " + path.string());
        }
      };
      check("input", config.input);
      check("gazetteer", config.gazetteer);
      if (config.field_map) check("field_map", *config.field_map);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("manifest: ") + e.what());
    }
    config.out = out;
    config.workers = workers;
  });
  if (status != kExitOk) return status;
  return run(config, err);
}

int generate(const std::filesystem::path& synth_config, const std::filesystem::path& out, std::ostream& err) {
  return guarded(err, [&] {
    require_file(synth_config, "synth config");
    const synth::SynthConfig config = synth::config_from_json(read_file(synth_config));
    synth::write_fixtures(synth::generate(config), out);
  });
}

}  // namespace scigrid::cli
