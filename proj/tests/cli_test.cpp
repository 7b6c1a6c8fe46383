#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "scigrid/cli.hpp"
#include "scigrid/error.hpp"
#include "scigrid/text.hpp"
#include "support.hpp"

namespace scigrid {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> read_dir(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = slurp(e.path());
  return out;
}

int shell(const std::string& args) {
  const std::string cmd = std::string(SCIGRID_BIN) + " " + args + " 2>" + (fs::temp_directory_path() / "scigrid_cli_err").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() / ("scigrid_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
    std::ofstream(root_ / "synth.json") << R"({"seed": 3, "n_cities": 40, "n_countries": 4, "n_publications": 600,
      "year_min": 2001, "year_max": 2003, "placement": "clustered"})";
    ASSERT_EQ(shell("generate " + (root_ / "synth.json").string() + " --out " + (root_ / "fx").string()), 0);
  }
  void TearDown() override { fs::remove_all(root_); }

  std::string run_args(const fs::path& out, const std::string& extra = {}, fs::path gazetteer = {}) const {
    if (gazetteer.empty()) gazetteer = root_ / "fx" / "gazetteer.csv";
    return "run --input " + (root_ / "fx" / "corpus.jsonl").string() + " --gazetteer " + gazetteer.string() +
           " --field-map " + (root_ / "fx" / "fieldmap.csv").string() +
           " --years 2001:2003 --countries ALL --fields ALL,ENG,LIFE,NAT,SOC --out " + out.string() + " " + extra;
  }

  cli::RunConfig config(const fs::path& out) const {
    cli::RunConfig c;
    c.input = root_ / "fx" / "corpus.jsonl";
    c.gazetteer = root_ / "fx" / "gazetteer.csv";
    c.field_map = root_ / "fx" / "fieldmap.csv";
    c.year_start = 2001;
    c.year_end = 2003;
    c.countries = {"ALL"};
    c.out = out;
    return c;
  }

  fs::path root_;
};

TEST_F(CliTest, WorkerCountDoesNotChangeOutput) {
  ASSERT_EQ(shell(run_args(root_ / "w1", "--workers 1")), 0);
  ASSERT_EQ(shell(run_args(root_ / "w8", "--workers 8")), 0);
  const auto a = read_dir(root_ / "w1");
  const auto b = read_dir(root_ / "w8");
  EXPECT_EQ(a, b);
  for (const char* name : {"measures.csv", "trends.csv", "quadrants.csv", "concentration.csv", "field_summary.csv",
                           "ingest_report.csv", "geocode_report.csv", "gazetteer_report.csv", "manifest.json"}) {
    EXPECT_TRUE(a.count(name)) << name;
  }
}

TEST_F(CliTest, ManifestRecordsInputsAndOutputs) {
  ASSERT_EQ(shell(run_args(root_ / "o")), 0);
  const auto m = nlohmann::json::parse(slurp(root_ / "o" / "manifest.json"));
  EXPECT_EQ(m.at("input_sha256").at("input"), cli::sha256_file(root_ / "fx" / "corpus.jsonl"));
  EXPECT_EQ(m.at("config").at("years"), "2001:2003");
  EXPECT_FALSE(m.at("config").contains("workers"));
  for (const auto& [name, digest] : m.at("output_sha256").items()) {
    EXPECT_EQ(digest, cli::sha256_file(root_ / "o" / name)) << name;
  }
}

TEST_F(CliTest, ReplayIsByteIdentical) {
  ASSERT_EQ(shell(run_args(root_ / "first")), 0);
  ASSERT_EQ(shell("replay " + (root_ / "first" / "manifest.json").string() + " --out " + (root_ / "again").string() +
                  " --workers 3"),
            0);
  EXPECT_EQ(read_dir(root_ / "first"), read_dir(root_ / "again"));

  std::ofstream(root_ / "fx" / "corpus.jsonl", std::ios::app) << "\n";
  EXPECT_EQ(shell("replay " + (root_ / "first" / "manifest.json").string() + " --out " + (root_ / "third").string()), 1);
}

TEST_F(CliTest, MissingGazetteerIsIoErrorWithoutOutput) {
  std::ostringstream err;
  auto c = config(root_ / "none");
  c.gazetteer = root_ / "missing.csv";
  EXPECT_EQ(cli::run(c, err), cli::kExitIo);
  EXPECT_FALSE(fs::exists(root_ / "none"));
  const auto line = nlohmann::json::parse(err.str());
  EXPECT_EQ(line.at("error"), "io");
  EXPECT_EQ(line.at("exit"), 2);

  EXPECT_EQ(shell(run_args(root_ / "none2", {}, root_ / "missing.csv")), 2);
  EXPECT_FALSE(fs::exists(root_ / "none2"));
}

TEST_F(CliTest, ConfigErrorsExitOne) {
  std::ostringstream err;
  auto c = config(root_ / "bad");
  c.exclude_journals = "([unclosed";
  EXPECT_EQ(cli::run(c, err), cli::kExitConfig);
  EXPECT_EQ(nlohmann::json::parse(err.str()).at("error"), "config");
  EXPECT_FALSE(fs::exists(root_ / "bad"));

  EXPECT_EQ(shell(run_args(root_ / "bad2", "--count-mode half")), 1);
  EXPECT_EQ(shell(run_args(root_ / "bad3", "--fields PHYS")), 1);
  EXPECT_EQ(shell(run_args(root_ / "bad4", "--years 2003:2001")), 1);
  EXPECT_EQ(shell(run_args(root_ / "bad5", "--concentration-threshold 0")), 1);
  EXPECT_EQ(shell("run --bogus"), 1);

  std::ofstream(root_ / "zero.json") << R"({"n_publications": 0})";
  EXPECT_EQ(shell("generate " + (root_ / "zero.json").string() + " --out " + (root_ / "zfx").string()), 1);
  EXPECT_FALSE(fs::exists(root_ / "zfx"));
}

TEST_F(CliTest, JsonFormatWritesMeasuresJson) {
  ASSERT_EQ(shell(run_args(root_ / "j", "--format json")), 0);
  EXPECT_TRUE(fs::exists(root_ / "j" / "measures.json"));
  EXPECT_FALSE(fs::exists(root_ / "j" / "measures.csv"));
  const auto rows = nlohmann::json::parse(slurp(root_ / "j" / "measures.json"));
  EXPECT_EQ(rows.size(), 3u * 5u * 5u);  // years x (WORLD + 4 countries) x fields
}

TEST(ParseYearRange, Forms) {
  EXPECT_EQ(cli::parse_year_range("2008:2015"), std::make_pair(2008, 2015));
  EXPECT_EQ(cli::parse_year_range("2010"), std::make_pair(2010, 2010));
  EXPECT_THROW(cli::parse_year_range("2015:2008"), ConfigError);
  EXPECT_THROW(cli::parse_year_range("abc"), ConfigError);
  EXPECT_THROW(cli::parse_year_range("2008:"), ConfigError);
}

TEST(Sha256, KnownDigest) {
  const auto p = fs::temp_directory_path() / "scigrid_sha_abc";
  std::ofstream(p, std::ios::binary) << "abc";
  EXPECT_EQ(cli::sha256_file(p), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  fs::remove(p);
  EXPECT_THROW(cli::sha256_file(p), IoError);
}

}  // namespace
}  // namespace scigrid
