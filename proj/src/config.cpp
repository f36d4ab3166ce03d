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

#include "innodex/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

#include <nlohmann/json.hpp>

#include "innodex/errors.hpp"
#include "innodex/hash.hpp"
#include "innodex/metrics.hpp"
#include "innodex/poi.hpp"

namespace innodex::config {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

const std::vector<std::string>& known_source_names() {
  static const std::vector<std::string> kNames = {kSourceKeyword, kSourceTag, kSourceJobs};
  return kNames;
}

net::Mode parse_mode(const std::string& s, const std::string& source) {
  if (s == "replay") return net::Mode::kReplay;
  if (s == "live") return net::Mode::kLive;
  throw ConfigError("source " + source + ": mode must be 'live' or 'replay', got '" + s + "'");
}

std::string mode_string(net::Mode m) {
  return m == net::Mode::kLive ? "live" : "replay";
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  return p.is_absolute() ? p : base / p;
}

void check_keys(const json& obj, const std::vector<std::string>& allowed,
                const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

}  // namespace

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config " + path.string() + ": not a JSON object");
  check_keys(doc,
             {"zones_path", "tracts_path", "census_path", "permits_path", "registry_path",
              "cassette_dir", "output_dir", "random_seed", "k_classes", "crosswalk_samples",
              "keywords", "tags", "zip_property", "tract_id_property", "region", "sources",
              "census_columns", "correlation_columns", "render_variables"},
             "config");

  std::filesystem::path base = std::filesystem::absolute(path).parent_path();
  PipelineConfig c;
  try {
    auto require_path = [&](const char* key) {
      if (!doc.contains(key)) throw ConfigError(std::string("config: missing '") + key + "'");
      return resolve(base, doc[key].get<std::string>());
    };
    c.zones_path = require_path("zones_path");
    c.tracts_path = require_path("tracts_path");
    c.census_path = require_path("census_path");
    c.permits_path = require_path("permits_path");
    if (doc.contains("registry_path") && !doc["registry_path"].is_null()) {
      c.registry_path = resolve(base, doc["registry_path"].get<std::string>());
    }
    c.cassette_dir = require_path("cassette_dir");
    if (doc.contains("output_dir")) c.output_dir = resolve(base, doc["output_dir"].get<std::string>());
    if (doc.contains("random_seed")) c.random_seed = doc["random_seed"].get<uint64_t>();
    if (doc.contains("k_classes")) c.k_classes = doc["k_classes"].get<int>();
    if (doc.contains("crosswalk_samples")) {
      c.crosswalk_samples = doc["crosswalk_samples"].get<int>();
    }
    c.keywords = doc.contains("keywords") ? doc["keywords"].get<std::vector<std::string>>()
                                          : poi::default_keywords();
    c.tags = doc.contains("tags") ? doc["tags"].get<std::vector<std::string>>()
                                  : poi::default_tags();
    if (doc.contains("zip_property")) c.zip_property = doc["zip_property"].get<std::string>();
    if (doc.contains("tract_id_property")) {
      c.tract_id_property = doc["tract_id_property"].get<std::string>();
    }
    if (doc.contains("region") && !doc["region"].is_null()) {
      const json& r = doc["region"];
      check_keys(r, {"min_lon", "min_lat", "max_lon", "max_lat"}, "config region");
      geo::BoundingBox box;
      box.min_lon = r.at("min_lon").get<double>();
      box.min_lat = r.at("min_lat").get<double>();
      box.max_lon = r.at("max_lon").get<double>();
      box.max_lat = r.at("max_lat").get<double>();
      c.region = box;
    }
    for (const std::string& name : known_source_names()) {
      c.sources[name] = SourceSettings{};
    }
    if (doc.contains("sources")) {
      for (const auto& [name, body] : doc["sources"].items()) {
        if (std::find(known_source_names().begin(), known_source_names().end(), name) ==
            known_source_names().end()) {
          throw ConfigError("config: unknown source '" + name + "'");
        }
        check_keys(body, {"mode", "rate_limit_rps", "base_url"}, "config source " + name);
        SourceSettings& s = c.sources[name];
        if (body.contains("mode")) s.mode = parse_mode(body["mode"].get<std::string>(), name);
        if (body.contains("rate_limit_rps")) s.rate_limit_rps = body["rate_limit_rps"].get<double>();
        if (body.contains("base_url")) s.base_url = body["base_url"].get<std::string>();
      }
    }
    if (doc.contains("census_columns")) {
      const json& cc = doc["census_columns"];
      check_keys(cc,
                 {"tract_id", "pop_total", "pop_white", "pop_black", "pop_hispanic",
                  "vacant_units", "housing_units", "median_income_usd", "median_home_value_usd"},
                 "config census_columns");
      tabular::CensusColumnMap& m = c.census_columns;
      if (cc.contains("tract_id")) m.tract_id = cc["tract_id"].get<std::string>();
      if (cc.contains("pop_total")) m.pop_total = cc["pop_total"].get<std::string>();
      if (cc.contains("pop_white")) m.pop_white = cc["pop_white"].get<std::string>();
      if (cc.contains("pop_black")) m.pop_black = cc["pop_black"].get<std::string>();
      if (cc.contains("pop_hispanic")) m.pop_hispanic = cc["pop_hispanic"].get<std::string>();
      if (cc.contains("vacant_units")) m.vacant_units = cc["vacant_units"].get<std::string>();
      if (cc.contains("housing_units")) m.housing_units = cc["housing_units"].get<std::string>();
      if (cc.contains("median_income_usd")) {
        m.median_income_usd = cc["median_income_usd"].get<std::string>();
      }
      if (cc.contains("median_home_value_usd")) {
        m.median_home_value_usd = cc["median_home_value_usd"].get<std::string>();
      }
    }
    c.correlation_columns = doc.contains("correlation_columns")
                                ? doc["correlation_columns"].get<std::vector<std::string>>()
                                : metrics::feature_columns();
    c.render_variables = doc.contains("render_variables")
                             ? doc["render_variables"].get<std::vector<std::string>>()
                             : std::vector<std::string>{"location_count", "vacancy_rate",
                                                        "pct_white"};
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }

  if (const char* env = std::getenv("INNODEX_CASSETTE_DIR"); env != nullptr && *env != '\0') {
    c.cassette_dir = env;
  }
  return c;
}

void validate_config(const PipelineConfig& c) {
  auto require_exists = [](const std::filesystem::path& p, const char* what) {
    if (!std::filesystem::exists(p)) {
      throw ConfigError(std::string(what) + " does not exist: " + p.string());
    }
  };
  require_exists(c.zones_path, "zones_path");
  require_exists(c.tracts_path, "tracts_path");
  require_exists(c.census_path, "census_path");
  require_exists(c.permits_path, "permits_path");
  if (c.registry_path) require_exists(*c.registry_path, "registry_path");
  require_exists(c.cassette_dir, "cassette_dir");
  if (c.k_classes < 2) {
    throw ConfigError("k_classes must be at least 2, got " + std::to_string(c.k_classes));
  }
  if (c.crosswalk_samples < 1) {
    throw ConfigError("crosswalk_samples must be positive");
  }
  if (c.keywords.empty()) throw ConfigError("keyword list is empty");
  if (c.tags.empty()) throw ConfigError("tag list is empty");
  if (c.region && c.region->degenerate()) throw ConfigError("region is degenerate");
  for (const auto& [name, s] : c.sources) {
    if (s.rate_limit_rps <= 0.0) {
      throw ConfigError("source " + name + ": rate_limit_rps must be positive");
    }
    if (s.mode == net::Mode::kLive && s.base_url.empty()) {
      throw ConfigError("source " + name + ": live mode requires base_url");
    }
  }
  if (c.correlation_columns.size() < 2) {
    throw ConfigError("correlation_columns needs at least 2 columns");
  }
  const std::vector<std::string>& known = metrics::feature_columns();
  auto check_column = [&](const std::string& name, const char* where) {
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw ConfigError(std::string(where) + ": unknown feature column '" + name + "'");
    }
  };
  for (const std::string& name : c.correlation_columns) check_column(name, "correlation_columns");
  for (const std::string& name : c.render_variables) check_column(name, "render_variables");
}

namespace {

// Everything that changes what the pipeline computes, and nothing that
// merely changes where files live.
ordered_json params_json(const PipelineConfig& c) {
  ordered_json j;
  j["random_seed"] = c.random_seed;
  j["k_classes"] = c.k_classes;
  j["crosswalk_samples"] = c.crosswalk_samples;
  j["keywords"] = c.keywords;
  j["tags"] = c.tags;
  j["zip_property"] = c.zip_property;
  j["tract_id_property"] = c.tract_id_property;
  if (c.region) {
    j["region"] = {{"min_lon", c.region->min_lon},
                   {"min_lat", c.region->min_lat},
                   {"max_lon", c.region->max_lon},
                   {"max_lat", c.region->max_lat}};
  } else {
    j["region"] = "zone_bounds";
  }
  ordered_json sources;
  for (const auto& [name, s] : c.sources) {
    sources[name] = {{"mode", mode_string(s.mode)},
                     {"rate_limit_rps", s.rate_limit_rps},
                     {"base_url", s.base_url}};
  }
  j["sources"] = std::move(sources);
  j["census_columns"] = {{"tract_id", c.census_columns.tract_id},
                         {"pop_total", c.census_columns.pop_total},
                         {"pop_white", c.census_columns.pop_white},
                         {"pop_black", c.census_columns.pop_black},
                         {"pop_hispanic", c.census_columns.pop_hispanic},
                         {"vacant_units", c.census_columns.vacant_units},
                         {"housing_units", c.census_columns.housing_units},
                         {"median_income_usd", c.census_columns.median_income_usd},
                         {"median_home_value_usd", c.census_columns.median_home_value_usd}};
  j["correlation_columns"] = c.correlation_columns;
  j["render_variables"] = c.render_variables;
  j["registry_enabled"] = c.registry_path.has_value();
  return j;
}

}  // namespace

std::string resolved_config_text(const PipelineConfig& c) {
  ordered_json j;
  j["zones_path"] = c.zones_path.string();
  j["tracts_path"] = c.tracts_path.string();
  j["census_path"] = c.census_path.string();
  j["permits_path"] = c.permits_path.string();
  j["registry_path"] =
      c.registry_path ? ordered_json(c.registry_path->string()) : ordered_json(nullptr);
  j["cassette_dir"] = c.cassette_dir.string();
  j["output_dir"] = c.output_dir.string();
  // items() keeps a reference to its json; the temporary must outlive it.
  ordered_json params = params_json(c);
  for (auto& [key, value] : params.items()) {
    j[key] = value;
  }
  return j.dump(2) + "\n";
}

std::string params_fingerprint(const PipelineConfig& c) {
  return sha256_hex(params_json(c).dump());
}

}  // namespace innodex::config
