// Copyright 2026 The innodex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "innodex/config.hpp"
#include "innodex/errors.hpp"
#include "innodex/metrics.hpp"
#include "innodex/pipeline.hpp"
#include "innodex/poi.hpp"
#include "testutil.hpp"

using namespace innodex;

namespace {

std::filesystem::path demo_city() {
  return std::filesystem::path(INNODEX_FIXTURE_DIR) / "demo_city";
}

// Each test works on its own copy so nothing can dirty the checked-in
// fixture.
std::filesystem::path copy_city(const testutil::TempDir& tmp) {
  std::filesystem::path dst = tmp.path() / "city";
  std::filesystem::copy(demo_city(), dst, std::filesystem::copy_options::recursive);
  return dst;
}

config::PipelineConfig city_config(const testutil::TempDir& tmp,
                                   const std::filesystem::path& city) {
  config::PipelineConfig cfg = config::load_config(city / "config.json");
  cfg.output_dir = tmp.path() / "out";
  return cfg;
}

std::string minimal_config_json() {
  return R"({
  "zones_path": "zones.geojson",
  "tracts_path": "tracts.geojson",
  "census_path": "census.csv",
  "permits_path": "permits.csv",
  "cassette_dir": "cassettes"
})";
}

int run_cli(const std::string& args) {
  std::string cmd = std::string("\"") + INNODEX_BIN + "\" " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::map<std::string, std::string> dir_contents(const std::filesystem::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    files[std::filesystem::relative(entry.path(), root).string()] =
        testutil::read_text(entry.path());
  }
  return files;
}

}  // namespace

TEST_CASE("config: minimal file fills every default") {
  testutil::TempDir tmp("cfg_min");
  auto p = tmp.path() / "config.json";
  testutil::write_text(p, minimal_config_json());
  config::PipelineConfig cfg = config::load_config(p);

  CHECK(cfg.keywords == poi::default_keywords());
  CHECK(cfg.keywords.size() == 12);
  CHECK(cfg.tags == poi::default_tags());
  CHECK(cfg.k_classes == 5);
  CHECK(cfg.crosswalk_samples == 2000);
  CHECK(cfg.random_seed == 0);
  CHECK(cfg.zip_property == "ZIP5");
  CHECK(cfg.tract_id_property == "GEOID");
  CHECK_FALSE(cfg.region.has_value());
  CHECK_FALSE(cfg.registry_path.has_value());
  CHECK(cfg.correlation_columns == metrics::feature_columns());
  CHECK(cfg.render_variables ==
        std::vector<std::string>{"location_count", "vacancy_rate", "pct_white"});
  // All known sources get replay-mode defaults.
  REQUIRE(cfg.sources.count("keyword_search"));
  REQUIRE(cfg.sources.count("tag_query"));
  REQUIRE(cfg.sources.count("jobs"));
  CHECK(cfg.sources.at("jobs").mode == net::Mode::kReplay);

  // Relative paths resolve against the config file's directory.
  CHECK(cfg.zones_path == tmp.path() / "zones.geojson");
  CHECK(cfg.cassette_dir == tmp.path() / "cassettes");
}

TEST_CASE("config: unknown keys and malformed bodies are refused") {
  testutil::TempDir tmp("cfg_bad");
  auto p = tmp.path() / "config.json";
  testutil::write_text(p, R"({"zones_path": "z", "tracts_path": "t", "census_path": "c",
                             "permits_path": "p", "cassette_dir": "d", "randm_seed": 5})");
  CHECK_THROWS_WITH_AS(config::load_config(p), doctest::Contains("randm_seed"), ConfigError);

  auto p2 = tmp.path() / "broken.json";
  testutil::write_text(p2, "{not json");
  CHECK_THROWS_AS(config::load_config(p2), ConfigError);

  auto p3 = tmp.path() / "missing.json";
  testutil::write_text(p3, R"({"zones_path": "z"})");
  CHECK_THROWS_AS(config::load_config(p3), ConfigError);

  CHECK_THROWS_AS(config::load_config(tmp.path() / "nonexistent.json"), ConfigError);

  auto p4 = tmp.path() / "badsource.json";
  testutil::write_text(p4, R"({"zones_path": "z", "tracts_path": "t", "census_path": "c",
                              "permits_path": "p", "cassette_dir": "d",
                              "sources": {"mystery": {"mode": "replay"}}})");
  CHECK_THROWS_WITH_AS(config::load_config(p4), doctest::Contains("mystery"), ConfigError);
}

TEST_CASE("config: cassette dir env override wins over the file") {
  testutil::TempDir tmp("cfg_env");
  auto p = tmp.path() / "config.json";
  testutil::write_text(p, minimal_config_json());
  std::filesystem::path override_dir = tmp.path() / "elsewhere";
  setenv("INNODEX_CASSETTE_DIR", override_dir.c_str(), 1);
  config::PipelineConfig cfg = config::load_config(p);
  unsetenv("INNODEX_CASSETTE_DIR");
  CHECK(cfg.cassette_dir == override_dir);
}

TEST_CASE("config: validation demands existing inputs and sane numbers") {
  testutil::TempDir tmp("cfg_val");
  auto city = copy_city(tmp);
  config::PipelineConfig cfg = city_config(tmp, city);
  CHECK_NOTHROW(config::validate_config(cfg));

  config::PipelineConfig missing = cfg;
  missing.census_path = tmp.path() / "nope.csv";
  CHECK_THROWS_WITH_AS(config::validate_config(missing), doctest::Contains("nope.csv"),
                       ConfigError);

  config::PipelineConfig bad_k = cfg;
  bad_k.k_classes = 1;
  CHECK_THROWS_AS(config::validate_config(bad_k), ConfigError);

  config::PipelineConfig bad_samples = cfg;
  bad_samples.crosswalk_samples = 0;
  CHECK_THROWS_AS(config::validate_config(bad_samples), ConfigError);

  config::PipelineConfig bad_column = cfg;
  bad_column.correlation_columns = {"location_count", "not_a_column"};
  CHECK_THROWS_WITH_AS(config::validate_config(bad_column), doctest::Contains("not_a_column"),
                       ConfigError);

  config::PipelineConfig bad_variable = cfg;
  bad_variable.render_variables = {"mystery_metric"};
  CHECK_THROWS_WITH_AS(config::validate_config(bad_variable),
                       doctest::Contains("mystery_metric"), ConfigError);
}

TEST_CASE("config: fingerprint tracks semantics, not locations") {
  testutil::TempDir tmp("cfg_fp");
  auto city = copy_city(tmp);
  config::PipelineConfig cfg = city_config(tmp, city);
  std::string base = config::params_fingerprint(cfg);
  CHECK(base.size() == 64);

  config::PipelineConfig moved = cfg;
  moved.output_dir = tmp.path() / "somewhere_else";
  moved.cassette_dir = tmp.path() / "other_cassettes";
  moved.zones_path = tmp.path() / "other_zones.geojson";
  CHECK(config::params_fingerprint(moved) == base);  // inputs are hashed by content elsewhere

  config::PipelineConfig reseeded = cfg;
  reseeded.random_seed += 1;
  CHECK(config::params_fingerprint(reseeded) != base);

  config::PipelineConfig reworded = cfg;
  reworded.keywords.push_back("maker space");
  CHECK(config::params_fingerprint(reworded) != base);

  config::PipelineConfig reclassed = cfg;
  reclassed.k_classes = 7;
  CHECK(config::params_fingerprint(reclassed) != base);
}

TEST_CASE("stages: full flow writes artifacts and an honest manifest") {
  testutil::TempDir tmp("stages");
  auto city = copy_city(tmp);
  config::PipelineConfig cfg = city_config(tmp, city);

  pipeline::StageSummary fetch = pipeline::stage_fetch(cfg);
  CHECK(fetch.stage == "fetch");
  CHECK(fetch.counts.at("keyword_records") > 0);
  CHECK(fetch.counts.at("job_postings") == 100);
  CHECK(fetch.counts.at("registry_records") == 12);

  pipeline::StageSummary aggregate = pipeline::stage_aggregate(cfg);
  CHECK(aggregate.counts.at("zones") == 35);
  CHECK(aggregate.counts.at("feature_rows") == 35);
  CHECK(aggregate.counts.at("crosswalk_unassigned_tracts") == 1);

  pipeline::StageSummary correlate = pipeline::stage_correlate(cfg);
  CHECK(correlate.counts.at("matrix_columns") == 15);

  pipeline::StageSummary render = pipeline::stage_render(cfg);
  CHECK(render.counts.at("zones_rendered") == 35);

  for (const char* name :
       {"pois.keyword_search.jsonl", "pois.tag_query.jsonl", "jobs.jsonl",
        "pois.registry.jsonl", "crosswalk.csv", "features.csv", "features.jsonl",
        "correlation.csv", "correlation.json", "loglog.json", "correlation.svg",
        "location_count.choropleth.geojson", "location_count.map.svg",
        "vacancy_rate.map.svg", "pct_white.map.svg", "report.txt", "manifest.json"}) {
    CHECK(std::filesystem::exists(cfg.output_dir / name));
  }

  std::string manifest_text = testutil::read_text(cfg.output_dir / "manifest.json");
  auto doc = nlohmann::ordered_json::parse(manifest_text);
  CHECK(doc.at("format") == "innodex-manifest-v1");
  CHECK(doc.at("params_sha256") == config::params_fingerprint(cfg));
  for (const char* stage : {"fetch", "aggregate", "correlate", "render"}) {
    REQUIRE(doc.at("stages").contains(stage));
    for (const auto& [name, hash] : doc.at("stages").at(stage).at("artifacts").items()) {
      CHECK(hash.get<std::string>().size() == 64);
      CHECK(std::filesystem::exists(cfg.output_dir / name));
    }
  }
  // Reproducibility depends on the manifest never recording wall-clock
  // facts: the key set is closed.
  std::vector<std::string> top_keys;
  for (const auto& [key, value] : doc.items()) top_keys.push_back(key);
  CHECK(top_keys == std::vector<std::string>{"format", "params_sha256", "random_seed",
                                             "inputs", "stages"});
  for (const auto& [stage, body] : doc.at("stages").items()) {
    std::vector<std::string> stage_keys;
    for (const auto& [key, value] : body.items()) stage_keys.push_back(key);
    CHECK(stage_keys == std::vector<std::string>{"artifacts", "counts"});
  }

  std::string report = testutil::read_text(cfg.output_dir / "report.txt");
  CHECK(report.find("zones: 35") != std::string::npos);
  CHECK(report.find("top zips by location_count") != std::string::npos);
  CHECK(report.find("log-log") != std::string::npos);
}

TEST_CASE("stages: refuse to run out of order or on tampered artifacts") {
  testutil::TempDir tmp("guards");
  auto city = copy_city(tmp);
  config::PipelineConfig cfg = city_config(tmp, city);

  // correlate with no prior stages: no manifest at all.
  CHECK_THROWS_WITH_AS(pipeline::stage_correlate(cfg), doctest::Contains("correlate"),
                       DataError);

  pipeline::stage_fetch(cfg);
  // aggregate has not run yet.
  CHECK_THROWS_WITH_AS(pipeline::stage_correlate(cfg), doctest::Contains("aggregate"),
                       DataError);

  pipeline::stage_aggregate(cfg);
  // Tamper with an upstream artifact: the hash check must catch it.
  {
    std::ofstream f(cfg.output_dir / "features.csv", std::ios::binary | std::ios::app);
    f << "tampered\n";
  }
  CHECK_THROWS_WITH_AS(pipeline::stage_correlate(cfg), doctest::Contains("features.csv"),
                       DataError);
}

TEST_CASE("stages: changed parameters invalidate the manifest") {
  testutil::TempDir tmp("params");
  auto city = copy_city(tmp);
  config::PipelineConfig cfg = city_config(tmp, city);
  pipeline::stage_fetch(cfg);
  pipeline::stage_aggregate(cfg);

  config::PipelineConfig reseeded = cfg;
  reseeded.random_seed += 1;
  CHECK_THROWS_WITH_AS(pipeline::stage_correlate(reseeded), doctest::Contains("re-run"),
                       DataError);

  // The original parameters still work.
  CHECK_NOTHROW(pipeline::stage_correlate(cfg));
}

TEST_CASE("stages: changed input bytes invalidate the manifest") {
  testutil::TempDir tmp("inputs");
  auto city = copy_city(tmp);
  config::PipelineConfig cfg = city_config(tmp, city);
  pipeline::stage_fetch(cfg);
  {
    std::ofstream f(cfg.permits_path, std::ios::binary | std::ios::app);
    f << "P99999,-71.05,42.35,commercial,1,2020-01-01\n";
  }
  CHECK_THROWS_WITH_AS(pipeline::stage_aggregate(cfg), doctest::Contains("permits"), DataError);
}

TEST_CASE("cli: validate-config succeeds; error classes map to exit codes") {
  testutil::TempDir tmp("cli");
  auto city = copy_city(tmp);
  std::string cfg_arg = "-c \"" + (city / "config.json").string() + "\"";
  std::string out_arg = " --output-dir \"" + (tmp.path() / "out").string() + "\"";

  CHECK(run_cli(cfg_arg + " validate-config") == 0);
  CHECK(run_cli("-c \"" + (tmp.path() / "absent.json").string() + "\" validate-config") == 2);
  // correlate without aggregate: a data error, exit 3.
  CHECK(run_cli(cfg_arg + out_arg + " correlate") == 3);
  // Bad flag value caught by validation: k_classes 1 is unusable.
  CHECK(run_cli(cfg_arg + out_arg + " --k-classes 1 run") == 2);
}

TEST_CASE("cli: fetch --source writes exactly that source's artifact") {
  testutil::TempDir tmp("cli_fetch");
  auto city = copy_city(tmp);
  std::filesystem::path out = tmp.path() / "out";
  std::string base = "-c \"" + (city / "config.json").string() + "\" --output-dir \"" +
                     out.string() + "\"";
  CHECK(run_cli(base + " fetch --source keyword_search") == 0);
  CHECK(std::filesystem::exists(out / "pois.keyword_search.jsonl"));
  CHECK_FALSE(std::filesystem::exists(out / "jobs.jsonl"));
  CHECK(run_cli(base + " fetch --source jobs") == 0);
  CHECK(std::filesystem::exists(out / "jobs.jsonl"));
  // An unknown source name is a config error.
  CHECK(run_cli(base + " fetch --source carrier_pigeon") == 2);
}

TEST_CASE("cli: run equals the four subcommands byte for byte") {
  testutil::TempDir tmp("cli_run");
  auto city = copy_city(tmp);
  std::filesystem::path out_a = tmp.path() / "a";
  std::filesystem::path out_b = tmp.path() / "b";
  std::string cfg_arg = "-c \"" + (city / "config.json").string() + "\"";

  CHECK(run_cli(cfg_arg + " --output-dir \"" + out_a.string() + "\" run") == 0);
  std::string b = cfg_arg + " --output-dir \"" + out_b.string() + "\"";
  CHECK(run_cli(b + " fetch") == 0);
  CHECK(run_cli(b + " aggregate") == 0);
  CHECK(run_cli(b + " correlate") == 0);
  CHECK(run_cli(b + " render") == 0);

  auto a_files = dir_contents(out_a);
  auto b_files = dir_contents(out_b);
  REQUIRE(a_files.size() == b_files.size());
  for (const auto& [name, bytes] : a_files) {
    REQUIRE(b_files.count(name));
    CHECK(bytes == b_files.at(name));
  }
}
