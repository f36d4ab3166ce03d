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

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "innodex/config.hpp"
#include "innodex/errors.hpp"
#include "innodex/pipeline.hpp"

namespace {

void print_summary(const innodex::pipeline::StageSummary& s) {
  std::printf("[%s]", s.stage.c_str());
  for (const auto& [key, value] : s.counts) {
    std::printf(" %s=%lld", key.c_str(), static_cast<long long>(value));
  }
  std::printf("\n");
  for (const std::string& w : s.warnings) {
    std::fprintf(stderr, "warning: %s\n", w.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zip-level innovation index pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir_flag;
  std::string cassette_dir_flag;
  std::string seed_flag;
  int k_classes_flag = -1;
  app.add_option("-c,--config", config_path, "pipeline config file (JSON)")->required();
  app.add_option("--output-dir", output_dir_flag, "override the configured output directory");
  app.add_option("--cassette-dir", cassette_dir_flag, "override the configured cassette directory");
  app.add_option("--seed", seed_flag, "override the configured random seed");
  app.add_option("--k-classes", k_classes_flag, "override the configured choropleth class count");

  std::string source_filter;
  CLI::App* cmd_fetch = app.add_subcommand("fetch", "pull sources and write normalized records");
  cmd_fetch->add_option("--source", source_filter,
                        "only this source (keyword_search, tag_query, jobs, registry)");
  CLI::App* cmd_aggregate =
      app.add_subcommand("aggregate", "spatial join, crosswalk, and feature matrix");
  CLI::App* cmd_correlate = app.add_subcommand("correlate", "correlation matrix and diagnostics");
  CLI::App* cmd_render = app.add_subcommand("render", "choropleths, heatmap, and report");
  CLI::App* cmd_run = app.add_subcommand("run", "all stages in order");
  CLI::App* cmd_validate =
      app.add_subcommand("validate-config", "check the config and print resolved values");

  CLI11_PARSE(app, argc, argv);

  try {
    innodex::config::PipelineConfig cfg = innodex::config::load_config(config_path);
    if (!output_dir_flag.empty()) cfg.output_dir = output_dir_flag;
    if (!cassette_dir_flag.empty()) cfg.cassette_dir = cassette_dir_flag;
    if (!seed_flag.empty()) cfg.random_seed = std::stoull(seed_flag);
    if (k_classes_flag >= 0) cfg.k_classes = k_classes_flag;

    if (cmd_validate->parsed()) {
      innodex::config::validate_config(cfg);
      std::fputs(innodex::config::resolved_config_text(cfg).c_str(), stdout);
      return 0;
    }
    if (cmd_fetch->parsed()) {
      print_summary(innodex::pipeline::stage_fetch(cfg, source_filter));
      return 0;
    }
    if (cmd_aggregate->parsed()) {
      print_summary(innodex::pipeline::stage_aggregate(cfg));
      return 0;
    }
    if (cmd_correlate->parsed()) {
      print_summary(innodex::pipeline::stage_correlate(cfg));
      return 0;
    }
    if (cmd_render->parsed()) {
      print_summary(innodex::pipeline::stage_render(cfg));
      return 0;
    }
    if (cmd_run->parsed()) {
      for (const auto& summary : innodex::pipeline::run_pipeline(cfg)) {
        print_summary(summary);
      }
      return 0;
    }
  } catch (const innodex::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const innodex::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const innodex::SourceError& e) {
    std::fprintf(stderr, "source error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
