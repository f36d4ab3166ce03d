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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "innodex/cassette.hpp"
#include "innodex/geo.hpp"
#include "innodex/tabular.hpp"

namespace innodex::config {

inline constexpr const char* kSourceKeyword = "keyword_search";
inline constexpr const char* kSourceTag = "tag_query";
inline constexpr const char* kSourceJobs = "jobs";
inline constexpr const char* kSourceRegistry = "registry";

struct SourceSettings {
  net::Mode mode = net::Mode::kReplay;
  double rate_limit_rps = 1.0;
  std::string base_url;  // live mode only
};

struct PipelineConfig {
  // Inputs; relative entries in the file resolve against the config's
  // directory.
  std::filesystem::path zones_path;
  std::filesystem::path tracts_path;
  std::filesystem::path census_path;
  std::filesystem::path permits_path;
  std::optional<std::filesystem::path> registry_path;  // optional extra source
  std::filesystem::path cassette_dir;
  std::filesystem::path output_dir = "out";

  uint64_t random_seed = 0;
  int k_classes = 5;
  int crosswalk_samples = tabular::kDefaultCrosswalkSamples;
  std::vector<std::string> keywords;  // defaults to poi::default_keywords()
  std::vector<std::string> tags;      // defaults to poi::default_tags()
  std::string zip_property = "ZIP5";
  std::string tract_id_property = "GEOID";
  std::optional<geo::BoundingBox> region;  // default: zone-set bounds
  std::map<std::string, SourceSettings> sources;  // keyword_search, tag_query, jobs
  tabular::CensusColumnMap census_columns;
  std::vector<std::string> correlation_columns;  // default: all feature columns
  std::vector<std::string> render_variables;     // default: location_count,
                                                 // vacancy_rate, pct_white
};

/// Parses a JSON config file, filling defaults and resolving relative paths
/// against the file's directory. The INNODEX_CASSETTE_DIR environment
/// variable, when set, overrides the configured cassette directory (command
/// line flags outrank both). Throws ConfigError on malformed or unknown
/// keys.
PipelineConfig load_config(const std::filesystem::path& path);

/// Existence and sanity checks: every referenced path must exist, class
/// and sample counts must be usable, column names must be known. Throws
/// ConfigError.
void validate_config(const PipelineConfig& config);

/// Resolved configuration as pretty JSON, for `validate-config` output.
std::string resolved_config_text(const PipelineConfig& config);

/// sha256 over the semantic parameters (seed, keywords, tags, classing,
/// column choices, source modes). Input files are content-hashed separately
/// in the manifest, and output locations do not affect results, so neither
/// belongs in this fingerprint.
std::string params_fingerprint(const PipelineConfig& config);

}  // namespace innodex::config
