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
#include <map>
#include <string>
#include <vector>

#include "innodex/config.hpp"

namespace innodex::pipeline {

struct StageSummary {
  std::string stage;
  std::map<std::string, int64_t> counts;   // recorded in the manifest
  std::vector<std::string> artifacts;      // file names under output_dir
  std::vector<std::string> warnings;       // non-fatal data-quality notes
};

// Stages hand work to each other only through files in output_dir, plus
// manifest.json recording the config fingerprint, input content hashes,
// per-stage counts, and artifact hashes. Each stage refuses to run on a
// missing or stale upstream (hash mismatch against the manifest), names
// itself in every error, and removes its partial outputs on failure.

/// fetch: pulls POI/job sources (replay or live), normalizes, dedupes, and
/// writes the per-source JSONL artifacts. `source_filter` empty = all
/// sources; otherwise one of keyword_search, tag_query, jobs, registry.
StageSummary stage_fetch(const config::PipelineConfig& cfg, const std::string& source_filter = "");

/// aggregate: spatial join, crosswalk, census reallocation, permit and job
/// counting, and the assembled feature matrix (features.csv/.jsonl,
/// crosswalk.csv).
StageSummary stage_aggregate(const config::PipelineConfig& cfg);

/// correlate: correlation matrix over the configured columns plus the
/// locations-vs-ratings log-log diagnostic (correlation.csv/.json,
/// loglog.json).
StageSummary stage_correlate(const config::PipelineConfig& cfg);

/// render: choropleths for the configured variables, the correlation
/// heatmap, and the plain-text top-5 report.
StageSummary stage_render(const config::PipelineConfig& cfg);

/// The full fetch -> aggregate -> correlate -> render composition, calling
/// exactly the stage functions above so outputs are byte-identical to
/// running the subcommands one at a time.
std::vector<StageSummary> run_pipeline(const config::PipelineConfig& cfg);

}  // namespace innodex::pipeline
