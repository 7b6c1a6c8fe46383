#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scigrid {

/// An address as it appears in the source record, before normalization.
struct RawAddress {
  std::string city;
  std::string country;
  std::string region;  // only meaningful for US and Canada
};

/// Normalized city identity. `region` is empty unless the country is the US
/// or Canada. Ordered by (country, region, city).
struct CityKey {
  std::string country;
  std::string region;
  std::string city;

  auto operator<=>(const CityKey&) const = default;
  bool operator==(const CityKey&) const = default;
};

/// True for the normalized spellings of the two countries whose addresses
/// carry a state/province ("us", "usa", "united states", "ca", "canada", ...).
bool region_bearing_country(std::string_view normalized_country);

/// Builds the key for one raw address, or nullopt if city or country is empty
/// after normalization.
std::optional<CityKey> make_city_key(const RawAddress& raw);

/// Keys for a raw address list: normalized, duplicates removed, sorted.
/// Addresses with an empty city or country are dropped.
std::vector<CityKey> dedup_addresses(std::span<const RawAddress> raw);

enum class DocType { article, review, other };

std::string_view to_string(DocType type);
DocType parse_doc_type(std::string_view text);

struct PublicationRecord {
  std::string id;
  int year = 0;
  DocType doc_type = DocType::article;
  std::string journal;
  std::vector<std::string> categories;
  std::vector<CityKey> addresses;  // deduplicated and sorted
};

/// Immutable set of admitted publications, in input order.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<PublicationRecord> publications) : publications_(std::move(publications)) {}

  [[nodiscard]] std::span<const PublicationRecord> publications() const { return publications_; }
  [[nodiscard]] std::size_t size() const { return publications_.size(); }
  [[nodiscard]] bool empty() const { return publications_.empty(); }
  [[nodiscard]] auto begin() const { return publications_.begin(); }
  [[nodiscard]] auto end() const { return publications_.end(); }

 private:
  std::vector<PublicationRecord> publications_;
};

struct CorpusConfig {
  int min_year = 1;
  int max_year = 9999;
};

/// Ingest counters. read == admitted + rejected_doctype + rejected_no_address
/// + malformed holds after every ingest.
struct IngestReport {
  std::uint64_t read = 0;
  std::uint64_t admitted = 0;
  std::uint64_t rejected_doctype = 0;
  std::uint64_t rejected_no_address = 0;
  std::uint64_t malformed = 0;

  IngestReport& operator+=(const IngestReport& other);
  [[nodiscard]] bool balanced() const {
    return read == admitted + rejected_doctype + rejected_no_address + malformed;
  }
  bool operator==(const IngestReport&) const = default;
};

struct IngestResult {
  Corpus corpus;
  IngestReport report;
};

/// Parses line-delimited JSON publication records. Blank lines are ignored.
/// A line that fails to parse, lacks a required field, has a year outside
/// `config`, an empty city/country, or repeats an earlier id counts as
/// malformed and is skipped. Throws IoError if the stream goes bad.
IngestResult parse_corpus(std::istream& in, const CorpusConfig& config = {});
IngestResult parse_corpus_file(const std::filesystem::path& path, const CorpusConfig& config = {});

/// One JSON line in the input format; parse_corpus reads it back unchanged.
std::string to_json_line(const PublicationRecord& record);

/// `read,admitted,rejected_doctype,rejected_no_address,malformed` plus one row.
void write_ingest_report(std::ostream& out, const IngestReport& report);

/// Drops publications whose journal title matches `pattern`, an ECMAScript
/// regular expression searched case-insensitively (a plain word therefore acts
/// as a substring test). An empty pattern returns the corpus unchanged.
/// Throws ConfigError for an invalid expression.
Corpus filter_journals(const Corpus& corpus, std::string_view pattern);

enum class Field { eng, life, nat, soc, none };

inline constexpr Field kBroadFields[] = {Field::eng, Field::life, Field::nat, Field::soc};

std::string_view to_string(Field field);
std::optional<Field> parse_field(std::string_view text);

/// Subject category -> broad field. Unknown categories resolve to Field::none.
class FieldMap {
 public:
  /// Throws ConfigError if the category is already mapped to a different field.
  void assign(std::string_view category, Field field);
  [[nodiscard]] Field lookup(std::string_view category) const;
  [[nodiscard]] std::size_t size() const { return fields_.size(); }
  [[nodiscard]] const std::map<std::string, Field, std::less<>>& entries() const { return fields_; }

  /// Reads the `category,broad_field` CSV. Throws ConfigError on a bad header,
  /// an unknown field code, or a conflicting duplicate; IoError if unreadable.
  static FieldMap parse(std::istream& in);
  static FieldMap load(const std::filesystem::path& path);
  void write(std::ostream& out) const;

 private:
  std::map<std::string, Field, std::less<>> fields_;
};

enum class FieldWeighting { fractional, whole };

struct FieldShare {
  Field field;
  double weight;
  bool operator==(const FieldShare&) const = default;
};

/// Broad-field shares of one publication, in Field enum order. Categories that
/// map to Field::none are left out of the denominator; a publication with no
/// mapped category yields an empty list.
std::vector<FieldShare> assign_fields(const PublicationRecord& record, const FieldMap& map, FieldWeighting mode);

/// Weight of `field` in assign_fields(record, map, mode), 0 if absent.
double field_weight(const PublicationRecord& record, const FieldMap& map, FieldWeighting mode, Field field);

}  // namespace scigrid
