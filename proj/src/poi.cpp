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

#include "innodex/poi.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <utility>

#include <nlohmann/json.hpp>

#include "innodex/errors.hpp"

namespace innodex::poi {

using ordered_json = nlohmann::ordered_json;

std::string to_string(Source s) {
  switch (s) {
    case Source::kKeywordSearch: return "keyword_search";
    case Source::kTagQuery: return "tag_query";
    case Source::kRegistry: return "registry";
  }
  throw ConfigError("unknown poi source enum value");
}

Source source_from_string(const std::string& s) {
  if (s == "keyword_search") return Source::kKeywordSearch;
  if (s == "tag_query") return Source::kTagQuery;
  if (s == "registry") return Source::kRegistry;
  throw ConfigError("unknown poi source '" + s + "'");
}

const std::vector<std::string>& default_keywords() {
  static const std::vector<std::string> kTerms = {
      "innovation hubs", "clustering",      "innovation center",   "startups",
      "innovation districts", "open innovation", "tech hub",       "technology park",
      "incubator",       "accelerators",    "regional innovation", "co-working space",
  };
  return kTerms;
}

const std::vector<std::string>& default_tags() {
  static const std::vector<std::string> kTags = {
      "company=startup",
      "office=coworking",
      "office=research",
  };
  return kTags;
}

void normalize(std::vector<PoiRecord>& records) {
  for (PoiRecord& r : records) {
    if (r.place_id.empty()) {
      throw DataError("poi: record '" + r.name + "' has empty place_id");
    }
    if (r.rating_count < 0) {
      throw DataError("poi " + r.place_id + ": negative rating_count");
    }
    if (!geo::is_valid(r.location)) {
      throw DataError("poi " + r.place_id + ": invalid location");
    }
    if (r.rating_count == 0) {
      r.rating.reset();
    }
    if (r.rating && (*r.rating < 1.0 || *r.rating > 5.0)) {
      throw DataError("poi " + r.place_id + ": rating " + std::to_string(*r.rating) +
                      " outside [1.0, 5.0]");
    }
    std::sort(r.matched_terms.begin(), r.matched_terms.end());
    r.matched_terms.erase(std::unique(r.matched_terms.begin(), r.matched_terms.end()),
                          r.matched_terms.end());
  }
}

DedupeResult dedupe(std::vector<PoiRecord> records) {
  // Map key (source, place_id) orders the output; the group tracks the
  // best representative seen so far plus the term union.
  struct Group {
    PoiRecord rep;
    std::vector<std::string> terms;
    bool location_conflict = false;
  };
  std::map<std::pair<int, std::string>, Group> groups;
  for (PoiRecord& r : records) {
    auto key = std::make_pair(static_cast<int>(r.source), r.place_id);
    auto it = groups.find(key);
    if (it == groups.end()) {
      Group g;
      g.terms = r.matched_terms;
      g.rep = std::move(r);
      groups.emplace(std::move(key), std::move(g));
      continue;
    }
    Group& g = it->second;
    g.terms.insert(g.terms.end(), r.matched_terms.begin(), r.matched_terms.end());
    if (geo::distance_m(g.rep.location, r.location) > 100.0) {
      g.location_conflict = true;
    }
    // Strictly larger wins; ties keep the earlier record.
    if (r.rating_count > g.rep.rating_count) {
      g.rep = std::move(r);
    }
  }
  DedupeResult out;
  out.records.reserve(groups.size());
  for (auto& [key, g] : groups) {
    if (g.location_conflict) {
      out.warnings.push_back("poi " + to_string(g.rep.source) + "/" + g.rep.place_id +
                             ": duplicate records more than 100 m apart, kept the one with " +
                             std::to_string(g.rep.rating_count) + " ratings");
    }
    std::sort(g.terms.begin(), g.terms.end());
    g.terms.erase(std::unique(g.terms.begin(), g.terms.end()), g.terms.end());
    g.rep.matched_terms = std::move(g.terms);
    out.records.push_back(std::move(g.rep));
  }
  return out;
}

namespace {

ordered_json poi_to_json(const PoiRecord& r) {
  ordered_json j;
  j["source"] = to_string(r.source);
  j["place_id"] = r.place_id;
  j["name"] = r.name;
  j["lon"] = r.location.lon;
  j["lat"] = r.location.lat;
  if (r.rating) {
    j["rating"] = *r.rating;
  } else {
    j["rating"] = nullptr;
  }
  j["rating_count"] = r.rating_count;
  j["matched_terms"] = r.matched_terms;
  return j;
}

PoiRecord poi_from_json(const ordered_json& j, const std::string& where) {
  try {
    PoiRecord r;
    r.source = source_from_string(j.at("source").get<std::string>());
    r.place_id = j.at("place_id").get<std::string>();
    r.name = j.at("name").get<std::string>();
    r.location = {j.at("lon").get<double>(), j.at("lat").get<double>()};
    if (!j.at("rating").is_null()) r.rating = j.at("rating").get<double>();
    r.rating_count = j.at("rating_count").get<int64_t>();
    r.matched_terms = j.at("matched_terms").get<std::vector<std::string>>();
    return r;
  } catch (const ordered_json::exception& e) {
    throw DataError(where + ": " + e.what());
  }
}

ordered_json job_to_json(const JobPosting& p) {
  ordered_json j;
  j["posting_id"] = p.posting_id;
  j["title"] = p.title;
  if (p.zip_id) {
    j["zip_id"] = *p.zip_id;
  } else {
    j["zip_id"] = nullptr;
  }
  if (p.location) {
    j["lon"] = p.location->lon;
    j["lat"] = p.location->lat;
  } else {
    j["lon"] = nullptr;
    j["lat"] = nullptr;
  }
  return j;
}

JobPosting job_from_json(const ordered_json& j, const std::string& where) {
  try {
    JobPosting p;
    p.posting_id = j.at("posting_id").get<std::string>();
    p.title = j.at("title").get<std::string>();
    if (!j.at("zip_id").is_null()) p.zip_id = j.at("zip_id").get<std::string>();
    if (!j.at("lon").is_null() && !j.at("lat").is_null()) {
      p.location = geo::GeoPoint{j.at("lon").get<double>(), j.at("lat").get<double>()};
    }
    return p;
  } catch (const ordered_json::exception& e) {
    throw DataError(where + ": " + e.what());
  }
}

template <typename T, typename ToJson>
void write_jsonl(const std::filesystem::path& path, const std::vector<T>& items, ToJson to_json) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  for (const T& item : items) {
    out << to_json(item).dump() << '\n';
  }
  if (!out.flush()) throw DataError("short write to " + path.string());
}

template <typename T, typename FromJson>
std::vector<T> read_jsonl(const std::filesystem::path& path, FromJson from_json) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<T> items;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::string where = path.filename().string() + ":" + std::to_string(line_no);
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const ordered_json::parse_error& e) {
      throw DataError(where + ": " + e.what());
    }
    items.push_back(from_json(j, where));
  }
  return items;
}

}  // namespace

void write_poi_jsonl(const std::filesystem::path& path, const std::vector<PoiRecord>& records) {
  write_jsonl(path, records, poi_to_json);
}

std::vector<PoiRecord> read_poi_jsonl(const std::filesystem::path& path) {
  return read_jsonl<PoiRecord>(path, poi_from_json);
}

void write_jobs_jsonl(const std::filesystem::path& path, const std::vector<JobPosting>& postings) {
  write_jsonl(path, postings, job_to_json);
}

std::vector<JobPosting> read_jobs_jsonl(const std::filesystem::path& path) {
  return read_jsonl<JobPosting>(path, job_from_json);
}

}  // namespace innodex::poi
