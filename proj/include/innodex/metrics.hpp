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

#include "innodex/geo.hpp"
#include "innodex/poi.hpp"
#include "innodex/tabular.hpp"

namespace innodex::metrics {

struct ZipInnovationMetrics {
  std::string zip_id;
  int64_t location_count = 0;
  int64_t total_rating_count = 0;
  std::optional<double> weighted_mean_rating;  // null when no assigned POI is rated
};

struct MetricsResult {
  std::vector<ZipInnovationMetrics> rows;  // one per zone, sorted by zip_id
  ZipInnovationMetrics unassigned;         // POIs falling outside every zone
};

/// Per-zip innovation metrics from a deduped single-source POI list:
/// location_count = assigned POIs, total_rating_count = sum of their
/// rating counts, weighted_mean_rating = mean rating weighted by rating
/// count over the rated POIs. Rating counts on unrated records (possible
/// in junk source data) enter the total but never the mean. Every zone
/// gets a row; unassigned POIs accrue to the diagnostic row.
MetricsResult zip_innovation_metrics(const std::vector<poi::PoiRecord>& pois,
                                     const geo::ZoneSet& zs);

struct JobCounts {
  std::map<std::string, int64_t> by_zip;  // only zips with at least one posting
  int64_t unknown_zip = 0;                // zip present but not in the zone set
  int64_t no_zip = 0;                     // postings without an extractable zip
};

/// Postings per zip. Only postings with a zip matching the zone set count;
/// the rest land in the diagnostic tallies.
JobCounts job_zip_counts(const std::vector<poi::JobPosting>& postings, const geo::ZoneSet& zs);

struct ZipFeatureVector {
  std::string zip_id;
  int64_t location_count = 0;
  int64_t total_rating_count = 0;
  std::optional<double> weighted_mean_rating;
  std::optional<int64_t> osm_location_count;  // null = source did not cover this zip
  std::optional<int64_t> job_count;           // null = source did not cover this zip
  int64_t permit_count = 0;
  double permit_value_usd = 0.0;
  int64_t pop_total = 0;
  std::optional<double> pct_white;
  std::optional<double> pct_black;
  std::optional<double> pct_hispanic;
  std::optional<double> vacancy_rate;
  std::optional<double> median_income_usd;
  std::optional<double> median_home_value_usd;
  std::optional<double> permit_value_per_business;
};

/// permit_value_usd spread over the zip's innovation locations; null when
/// the zip has none.
std::optional<double> per_business_normalization(const ZipFeatureVector& row);

/// Full outer join on zip_id across every zone in the set, sorted by
/// zip_id, exactly one row per zone. Missing keyword/permit data reads as
/// a true zero; missing OSM/job data reads as null (those sources do not
/// cover every zip, and silence is not absence); missing census coverage
/// leaves zero population with null ratios and medians. Throws DataError
/// if an input row names a zip outside the zone set.
std::vector<ZipFeatureVector> assemble_feature_matrix(
    const MetricsResult& keyword_metrics, const MetricsResult& osm_metrics,
    const std::vector<tabular::ZipSocioRow>& socio, const tabular::PermitCounts& permits,
    const JobCounts& jobs, const geo::ZoneSet& zs);

/// Value-column names in the exported order (innovation metrics first).
const std::vector<std::string>& feature_columns();

/// Numeric value of a named column, null for null cells. Throws
/// ConfigError on an unknown column name.
std::optional<double> feature_value(const ZipFeatureVector& row, const std::string& column);

// Exports: CSV with fixed column order and empty cells for nulls, plus a
// JSONL mirror with the same key order.
void write_feature_csv(const std::filesystem::path& path,
                       const std::vector<ZipFeatureVector>& rows);
std::vector<ZipFeatureVector> read_feature_csv(const std::filesystem::path& path);
void write_feature_jsonl(const std::filesystem::path& path,
                         const std::vector<ZipFeatureVector>& rows);

}  // namespace innodex::metrics
