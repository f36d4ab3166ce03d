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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "innodex/geo.hpp"

namespace innodex::tabular {

struct TractRow {
  std::string tract_id;
  int64_t pop_total = 0;
  int64_t pop_white = 0;
  int64_t pop_black = 0;
  int64_t pop_hispanic = 0;
  int64_t vacant_units = 0;
  int64_t housing_units = 0;
  std::optional<double> median_income_usd;      // positive when present
  std::optional<double> median_home_value_usd;  // positive when present
};

// Census CSVs in the wild name these columns inconsistently; the mapping
// lives in config, not code.
struct CensusColumnMap {
  std::string tract_id = "tract_id";
  std::string pop_total = "pop_total";
  std::string pop_white = "pop_white";
  std::string pop_black = "pop_black";
  std::string pop_hispanic = "pop_hispanic";
  std::string vacant_units = "vacant_units";
  std::string housing_units = "housing_units";
  std::string median_income_usd = "median_income_usd";
  std::string median_home_value_usd = "median_home_value_usd";
};

/// Loads and validates census tract rows. Throws DataError on negative
/// counts, subgroup exceeding its universe, or nonpositive medians.
std::vector<TractRow> load_census_csv(const std::filesystem::path& path,
                                      const CensusColumnMap& columns = {});

struct CrosswalkEntry {
  std::string tract_id;
  std::string zip_id;
  double weight = 0.0;  // in (0, 1]
};

struct CrosswalkResult {
  std::vector<CrosswalkEntry> entries;       // sorted by (tract_id, zip_id)
  std::vector<std::string> unassigned_tracts;  // no sampled point hit any zone
  std::vector<std::string> partial_tracts;     // some mass falls outside all zones
};

inline constexpr int kDefaultCrosswalkSamples = 2000;

/// Area-overlap weights tract -> zip, approximated by uniform Monte Carlo
/// sampling inside each tract (seeded per tract, so results do not depend
/// on thread count or tract order). Weights below 1e-3 are dropped and the
/// rest renormalized; tracts with at least 0.1% of their sampled area
/// outside every zone are flagged partial, and their weights sum to the
/// in-zone fraction instead of 1.
CrosswalkResult build_crosswalk_serial(const std::vector<geo::NamedMultiPolygon>& tracts,
                                       const geo::ZoneSet& zs,
                                       int samples = kDefaultCrosswalkSamples,
                                       uint64_t seed = 0);
CrosswalkResult build_crosswalk(const std::vector<geo::NamedMultiPolygon>& tracts,
                                const geo::ZoneSet& zs, int samples = kDefaultCrosswalkSamples,
                                uint64_t seed = 0);

void write_crosswalk_csv(const std::filesystem::path& path,
                         const std::vector<CrosswalkEntry>& entries);
std::vector<CrosswalkEntry> read_crosswalk_csv(const std::filesystem::path& path);

struct ZipSocioRow {
  std::string zip_id;
  int64_t pop_total = 0;
  int64_t pop_white = 0;
  int64_t pop_black = 0;
  int64_t pop_hispanic = 0;
  int64_t vacant_units = 0;
  int64_t housing_units = 0;
  std::optional<double> pct_white;
  std::optional<double> pct_black;
  std::optional<double> pct_hispanic;
  std::optional<double> vacancy_rate;
  std::optional<double> median_income_usd;
  std::optional<double> median_home_value_usd;
};

/// Reallocates tract variables to zips through the crosswalk. Counts are
/// weight-summed then rounded half-to-even; ratios are derived from the
/// rounded counts; medians become weighted means of tract medians (income
/// by population, home value by housing units), nulls excluded with the
/// weights renormalized. A zip with zero rounded population keeps its row
/// with null ratios. Output sorted by zip_id. Throws DataError if the
/// crosswalk references an unknown tract.
std::vector<ZipSocioRow> tract_to_zip(const std::vector<TractRow>& tracts,
                                      const std::vector<CrosswalkEntry>& xw);

enum class Occupancy { kCommercial, kMixed, kResidential, kOther };

std::string to_string(Occupancy o);

struct PermitRecord {
  std::string permit_id;
  geo::GeoPoint location;
  Occupancy occupancy_class = Occupancy::kOther;
  std::optional<double> declared_value_usd;  // nonnegative when present
  std::chrono::year_month_day issued_date{};
};

/// Permits CSV with columns permit_id, lon, lat, occupancy, declared_value,
/// issued_date (ISO dates). Unrecognized occupancy strings map to "other".
/// Throws DataError on duplicate permit_id, bad coordinates, negative
/// values, or invalid dates.
std::vector<PermitRecord> load_permits_csv(const std::filesystem::path& path);

/// Keeps exactly the commercial and mixed-use permits, order preserved.
std::vector<PermitRecord> filter_permits(const std::vector<PermitRecord>& permits);

struct PermitZipStats {
  int64_t permit_count = 0;
  double permit_value_usd = 0.0;
  int64_t null_value_count = 0;  // permits counted but carrying no value
};

struct PermitCounts {
  std::map<std::string, PermitZipStats> by_zip;
  PermitZipStats unassigned;  // permits outside every zone
};

/// Per-zip permit counts and declared-value sums; null values add 0 to the
/// sum and bump null_value_count. Callers pass already-filtered permits.
PermitCounts permit_zip_counts(const std::vector<PermitRecord>& permits, const geo::ZoneSet& zs);

}  // namespace innodex::tabular
