#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "scigrid/corpus.hpp"
#include "scigrid/nullmodel.hpp"
#include "scigrid/report.hpp"

namespace scigrid::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitIo = 2;

std::string_view tool_version();

struct RunConfig {
  std::filesystem::path input;
  std::filesystem::path gazetteer;
  std::optional<std::filesystem::path> field_map;
  int year_start = 0;
  int year_end = 0;
  /// Extra country scopes besides WORLD; {"ALL"} means every country present.
  std::vector<std::string> countries;
  /// Field scopes; "ALL" and/or broad field codes. Empty means {"ALL"}.
  std::vector<std::string> fields;
  std::optional<std::string> exclude_journals;
  CountMode count_mode = CountMode::whole;
  FieldWeighting field_weighting = FieldWeighting::fractional;
  std::filesystem::path out;
  OutputFormat format = OutputFormat::csv;
  unsigned workers = 1;
  double concentration_threshold = 0.5;
};

/// Parses "A:B" (or a single year "A"). Throws ConfigError.
std::pair<int, int> parse_year_range(std::string_view text);

/// Full analysis run. Every input is read and every output rendered before
/// anything is written, so a failing run leaves no partial output. On error a
/// single JSON line {"error": kind, "exit": code, "message": ...} goes to `err`.
/// Returns kExitOk, kExitConfig or kExitIo.
int run(const RunConfig& config, std::ostream& err);

/// Re-executes the run recorded in a manifest.json, writing into `out`.
/// Refuses (kExitConfig) if an input's checksum no longer matches.
int replay(const std::filesystem::path& manifest, const std::filesystem::path& out, unsigned workers,
           std::ostream& err);

/// Writes synthetic fixtures described by a JSON synth config.
int generate(const std::filesystem::path& synth_config, const std::filesystem::path& out, std::ostream& err);

/// Hex SHA-256 of a file's bytes. Throws IoError.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace scigrid::cli
