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
#include <optional>
#include <string>
#include <vector>

#include "innodex/geo.hpp"

namespace innodex::poi {

enum class Source {
  kKeywordSearch,
  kTagQuery,
  kRegistry,
};

std::string to_string(Source s);
Source source_from_string(const std::string& s);

struct PoiRecord {
  Source source = Source::kKeywordSearch;
  std::string place_id;  // stable per source, nonempty
  std::string name;
  geo::GeoPoint location;
  std::optional<double> rating;  // [1.0, 5.0] when present
  int64_t rating_count = 0;
  std::vector<std::string> matched_terms;  // sorted, unique
};

struct JobPosting {
  std::string posting_id;
  std::string title;
  std::optional<std::string> zip_id;  // null = no extractable zip; excluded from counts
  std::optional<geo::GeoPoint> location;
};

/// The default search terms, in query order.
const std::vector<std::string>& default_keywords();

/// The default map tags, key=value form.
const std::vector<std::string>& default_tags();

/// Enforces record invariants in place: sorts and dedupes matched_terms,
/// nulls the rating when rating_count is 0 (a mean of zero ratings is
/// meaningless). Throws DataError on empty place_id, negative rating_count,
/// out-of-range rating, or invalid location.
void normalize(std::vector<PoiRecord>& records);

struct DedupeResult {
  std::vector<PoiRecord> records;
  std::vector<std::string> warnings;  // data-quality notes, non-fatal
};

/// Collapses to one record per (source, place_id): matched_terms become the
/// union over duplicates; rating and location come from the duplicate with
/// the largest rating_count (ties keep the first encountered). Duplicates
/// whose locations disagree by more than 100 m produce a warning. Output is
/// ordered by (source, place_id). Idempotent.
DedupeResult dedupe(std::vector<PoiRecord> records);

// JSONL persistence with a fixed key order so replay runs are byte-equal.
void write_poi_jsonl(const std::filesystem::path& path, const std::vector<PoiRecord>& records);
std::vector<PoiRecord> read_poi_jsonl(const std::filesystem::path& path);
void write_jobs_jsonl(const std::filesystem::path& path, const std::vector<JobPosting>& postings);
std::vector<JobPosting> read_jobs_jsonl(const std::filesystem::path& path);

}  // namespace innodex::poi
