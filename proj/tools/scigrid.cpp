// scigrid: geographical collaboration distance measures from city-level
// publication addresses.

#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "scigrid/cli.hpp"
#include "scigrid/error.hpp"

namespace {

int config_failure(std::string_view message) {
  nlohmann::ordered_json line;
  line["error"] = "config";
  line["exit"] = scigrid::cli::kExitConfig;
  line["message"] = message;
  std::cerr << line.dump() << '\n';
  return scigrid::cli::kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace scigrid;

  CLI::App app{"scigrid: mean and random geographical collaboration distances"};
  app.set_version_flag("--version", std::string(cli::tool_version()));
  app.require_subcommand(1);

  cli::RunConfig config;
  config.workers = std::max(1u, std::thread::hardware_concurrency());
  std::string years;
  std::string field_map;
  std::string exclude;
  std::string count_mode = "whole";
  std::string weighting = "fractional";
  std::string format = "csv";

  auto* run = app.add_subcommand("run", "Compute measures, trends, quadrants and concentration");
  run->add_option("--input", config.input, "Publication records (JSON lines)")->required();
  run->add_option("--gazetteer", config.gazetteer, "Gazetteer CSV (country,region,city,lat,lon)")->required();
  run->add_option("--field-map", field_map, "Category to broad field CSV (category,broad_field)");
  run->add_option("--years", years, "Year range A:B")->required();
  run->add_option("--countries", config.countries, "Country scopes besides WORLD, or ALL")->delimiter(',');
  run->add_option("--fields", config.fields, "ALL and/or ENG,LIFE,NAT,SOC")->delimiter(',');
  run->add_option("--exclude-journals", exclude, "Drop journals whose title matches (case-insensitive regex)");
  run->add_option("--count-mode", count_mode, "City counts for the random model: whole|fractional");
  run->add_option("--field-weighting", weighting, "Multi-field publications: fractional|whole");
  run->add_option("--out", config.out, "Output directory")->required();
  run->add_option("--format", format, "Measure table format: csv|json");
  run->add_option("--workers", config.workers, "Worker threads (results do not depend on it)");
  run->add_option("--concentration-threshold", config.concentration_threshold, "Output share for concentration.csv");

  std::string manifest;
  std::string replay_out;
  unsigned replay_workers = config.workers;
  auto* replay = app.add_subcommand("replay", "Re-run the analysis recorded in a manifest.json");
  replay->add_option("manifest", manifest, "manifest.json of an earlier run")->required();
  replay->add_option("--out", replay_out, "Output directory")->required();
  replay->add_option("--workers", replay_workers, "Worker threads");

  std::string synth_config;
  std::string synth_out;
  auto* generate = app.add_subcommand("generate", "Write synthetic corpus, gazetteer and field map fixtures");
  generate->add_option("config", synth_config, "Synthetic corpus config (JSON)")->required();
  generate->add_option("--out", synth_out, "Fixture directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return config_failure(e.what());
  }

  if (*run) {
    try {
      std::tie(config.year_start, config.year_end) = cli::parse_year_range(years);
      if (!field_map.empty()) config.field_map = field_map;
      if (!exclude.empty()) config.exclude_journals = exclude;
      const auto mode = parse_count_mode(count_mode);
      if (!mode) throw ConfigError("--count-mode must be whole or fractional");
      config.count_mode = *mode;
      if (weighting == "whole") {
        config.field_weighting = FieldWeighting::whole;
      } else if (weighting != "fractional") {
        throw ConfigError("--field-weighting must be fractional or whole");
      }
      const auto fmt = parse_output_format(format);
      if (!fmt) throw ConfigError("--format must be csv or json");
      config.format = *fmt;
    } catch (const ConfigError& e) {
      return config_failure(e.what());
    }
    return cli::run(config, std::cerr);
  }
  if (*replay) return cli::replay(manifest, replay_out, replay_workers, std::cerr);
  return cli::generate(synth_config, synth_out, std::cerr);
}
