#include "scigrid/corpus.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <regex>
#include <unordered_set>

#include "json.hpp"
#include "scigrid/error.hpp"
#include "scigrid/text.hpp"

namespace scigrid {

namespace {

using Json = nlohmann::json;

constexpr std::array<std::string_view, 9> kRegionBearing = {
    "us", "usa", "u.s.", "u.s.a.", "united states", "united states of america", "ca", "can", "canada",
};

struct Malformed {};

const Json& require(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw Malformed{};
  return *it;
}

std::string require_string(const Json& obj, const char* key) {
  const Json& v = require(obj, key);
  if (!v.is_string()) throw Malformed{};
  return v.get<std::string>();
}

std::string optional_string(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_string()) throw Malformed{};
  return it->get<std::string>();
}

struct ParsedLine {
  PublicationRecord record;
  std::size_t raw_address_count = 0;
};

ParsedLine parse_line(std::string_view line, const CorpusConfig& config) {
  Json obj = Json::parse(line, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) throw Malformed{};

  ParsedLine parsed;
  PublicationRecord& rec = parsed.record;
  rec.id = require_string(obj, "id");
  if (rec.id.empty()) throw Malformed{};

  const Json& year = require(obj, "year");
  if (!year.is_number_integer()) throw Malformed{};
  const auto y = year.get<long long>();
  if (y < config.min_year || y > config.max_year) throw Malformed{};
  rec.year = static_cast<int>(y);

  rec.doc_type = parse_doc_type(require_string(obj, "doc_type"));
  rec.journal = optional_string(obj, "journal");

  if (const auto it = obj.find("categories"); it != obj.end() && !it->is_null()) {
    if (!it->is_array()) throw Malformed{};
    for (const Json& c : *it) {
      if (!c.is_string()) throw Malformed{};
      rec.categories.push_back(c.get<std::string>());
    }
  }

  const Json& addresses = require(obj, "addresses");
  if (!addresses.is_array()) throw Malformed{};
  std::vector<RawAddress> raw;
  raw.reserve(addresses.size());
  for (const Json& a : addresses) {
    if (!a.is_object()) throw Malformed{};
    RawAddress addr{require_string(a, "city"), require_string(a, "country"), optional_string(a, "region")};
    if (!make_city_key(addr)) throw Malformed{};
    raw.push_back(std::move(addr));
  }
  parsed.raw_address_count = raw.size();
  rec.addresses = dedup_addresses(raw);
  return parsed;
}

}  // namespace

bool region_bearing_country(std::string_view normalized_country) {
  return std::find(kRegionBearing.begin(), kRegionBearing.end(), normalized_country) != kRegionBearing.end();
}

std::optional<CityKey> make_city_key(const RawAddress& raw) {
  CityKey key{normalize_text(raw.country), {}, normalize_text(raw.city)};
  if (key.country.empty() || key.city.empty()) return std::nullopt;
  if (region_bearing_country(key.country)) key.region = normalize_text(raw.region);
  return key;
}

std::vector<CityKey> dedup_addresses(std::span<const RawAddress> raw) {
  std::vector<CityKey> keys;
  keys.reserve(raw.size());
  for (const RawAddress& a : raw) {
    if (auto key = make_city_key(a)) keys.push_back(std::move(*key));
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

std::string_view to_string(DocType type) {
  switch (type) {
    case DocType::article: return "article";
    case DocType::review: return "review";
    case DocType::other: return "other";
  }
  return "other";
}

DocType parse_doc_type(std::string_view text) {
  const std::string t = normalize_text(text);
  if (t == "article") return DocType::article;
  if (t == "review") return DocType::review;
  return DocType::other;
}

IngestReport& IngestReport::operator+=(const IngestReport& other) {
  read += other.read;
  admitted += other.admitted;
  rejected_doctype += other.rejected_doctype;
  rejected_no_address += other.rejected_no_address;
  malformed += other.malformed;
  return *this;
}

IngestResult parse_corpus(std::istream& in, const CorpusConfig& config) {
  if (!in) throw IoError("publication stream is not readable");
  IngestReport report;
  std::vector<PublicationRecord> admitted;
  std::unordered_set<std::string> seen_ids;

  std::string line;
  while (read_line(in, line)) {
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++report.read;
    ParsedLine parsed;
    try {
      parsed = parse_line(line, config);
    } catch (const Malformed&) {
      ++report.malformed;
      continue;
    }
    if (!seen_ids.insert(parsed.record.id).second) {
      ++report.malformed;
      continue;
    }
    if (parsed.record.doc_type == DocType::other) {
      ++report.rejected_doctype;
      continue;
    }
    if (parsed.record.addresses.empty()) {
      ++report.rejected_no_address;
      continue;
    }
    ++report.admitted;
    admitted.push_back(std::move(parsed.record));
  }
  if (in.bad()) throw IoError("read error on publication stream");
  return {Corpus(std::move(admitted)), report};
}

IngestResult parse_corpus_file(const std::filesystem::path& path, const CorpusConfig& config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open publication file: " + path.string());
  return parse_corpus(in, config);
}

std::string to_json_line(const PublicationRecord& record) {
  nlohmann::ordered_json obj;
  obj["id"] = record.id;
  obj["year"] = record.year;
  obj["doc_type"] = std::string(to_string(record.doc_type));
  obj["journal"] = record.journal;
  obj["categories"] = record.categories;
  auto addresses = nlohmann::ordered_json::array();
  for (const CityKey& k : record.addresses) {
    nlohmann::ordered_json a;
    a["city"] = k.city;
    a["country"] = k.country;
    if (!k.region.empty()) a["region"] = k.region;
    addresses.push_back(std::move(a));
  }
  obj["addresses"] = std::move(addresses);
  return obj.dump();
}

void write_ingest_report(std::ostream& out, const IngestReport& report) {
  out << "read,admitted,rejected_doctype,rejected_no_address,malformed\n"
      << report.read << ',' << report.admitted << ',' << report.rejected_doctype << ','
      << report.rejected_no_address << ',' << report.malformed << '\n';
}

Corpus filter_journals(const Corpus& corpus, std::string_view pattern) {
  if (pattern.empty()) return corpus;
  std::regex re;
  try {
    re = std::regex(pattern.begin(), pattern.end(), std::regex::ECMAScript | std::regex::icase);
  } catch (const std::regex_error& e) {
    throw ConfigError("invalid journal exclusion pattern '" + std::string(pattern) + "': " + e.what());
  }
  std::vector<PublicationRecord> kept;
  kept.reserve(corpus.size());
  for (const PublicationRecord& pub : corpus) {
    if (!std::regex_search(pub.journal, re)) kept.push_back(pub);
  }
  return Corpus(std::move(kept));
}

std::string_view to_string(Field field) {
  switch (field) {
    case Field::eng: return "ENG";
    case Field::life: return "LIFE";
    case Field::nat: return "NAT";
    case Field::soc: return "SOC";
    case Field::none: return "NONE";
  }
  return "NONE";
}

std::optional<Field> parse_field(std::string_view text) {
  const std::string t = normalize_text(text);
  if (t == "eng") return Field::eng;
  if (t == "life") return Field::life;
  if (t == "nat") return Field::nat;
  if (t == "soc") return Field::soc;
  if (t == "none") return Field::none;
  return std::nullopt;
}

void FieldMap::assign(std::string_view category, Field field) {
  std::string key = normalize_text(category);
  const auto [it, inserted] = fields_.emplace(std::move(key), field);
  if (!inserted && it->second != field) {
    throw ConfigError("category '" + std::string(category) + "' mapped to both " + std::string(to_string(it->second)) +
                      " and " + std::string(to_string(field)));
  }
}

Field FieldMap::lookup(std::string_view category) const {
  const auto it = fields_.find(normalize_text(category));
  return it == fields_.end() ? Field::none : it->second;
}

FieldMap FieldMap::parse(std::istream& in) {
  if (!in) throw IoError("field map stream is not readable");
  std::string line;
  if (!read_line(in, line)) throw ConfigError("field map is empty");
  const auto header = split_csv_line(line);
  if (header.size() != 2 || normalize_text(header[0]) != "category" || normalize_text(header[1]) != "broad_field") {
    throw ConfigError("field map header must be 'category,broad_field'");
  }
  FieldMap map;
  std::size_t line_no = 1;
  while (read_line(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto cols = split_csv_line(line);
    if (cols.size() != 2) throw ConfigError("field map line " + std::to_string(line_no) + ": expected 2 columns");
    const auto field = parse_field(cols[1]);
    if (!field) throw ConfigError("field map line " + std::to_string(line_no) + ": unknown broad field '" + cols[1] + "'");
    if (normalize_text(cols[0]).empty()) throw ConfigError("field map line " + std::to_string(line_no) + ": empty category");
    map.assign(cols[0], *field);
  }
  if (in.bad()) throw IoError("read error on field map");
  return map;
}

FieldMap FieldMap::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open field map: " + path.string());
  return parse(in);
}

void FieldMap::write(std::ostream& out) const {
  out << "category,broad_field\n";
  for (const auto& [category, field] : fields_) out << csv_field(category) << ',' << to_string(field) << '\n';
}

std::vector<FieldShare> assign_fields(const PublicationRecord& record, const FieldMap& map, FieldWeighting mode) {
  std::array<int, 4> counts{};
  int mapped = 0;
  for (const std::string& category : record.categories) {
    const Field f = map.lookup(category);
    if (f == Field::none) continue;
    ++counts[static_cast<std::size_t>(f)];
    ++mapped;
  }
  std::vector<FieldShare> shares;
  for (const Field f : kBroadFields) {
    const int c = counts[static_cast<std::size_t>(f)];
    if (c == 0) continue;
    shares.push_back({f, mode == FieldWeighting::whole ? 1.0 : static_cast<double>(c) / mapped});
  }
  return shares;
}

double field_weight(const PublicationRecord& record, const FieldMap& map, FieldWeighting mode, Field field) {
  for (const FieldShare& s : assign_fields(record, map, mode)) {
    if (s.field == field) return s.weight;
  }
  return 0.0;
}

}  // namespace scigrid
