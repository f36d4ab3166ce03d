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

#include "innodex/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "innodex/cassette.hpp"
#include "innodex/errors.hpp"
#include "innodex/geojson.hpp"
#include "innodex/hash.hpp"
#include "innodex/metrics.hpp"
#include "innodex/poi.hpp"
#include "innodex/render.hpp"
#include "innodex/stats.hpp"
#include "innodex/tabular.hpp"

namespace innodex::pipeline {

namespace {

using nlohmann::ordered_json;

constexpr const char* kManifestName = "manifest.json";
constexpr const char* kStageOrder[] = {"fetch", "aggregate", "correlate", "render"};

// Removes everything a failed stage managed to write, so no half-made
// artifact survives to confuse a later run.
class StageGuard {
 public:
  explicit StageGuard(std::filesystem::path dir) : dir_(std::move(dir)) {}
  ~StageGuard() {
    if (committed_) return;
    for (const std::string& name : written_) {
      std::error_code ec;
      std::filesystem::remove(dir_ / name, ec);
    }
  }
  StageGuard(const StageGuard&) = delete;
  StageGuard& operator=(const StageGuard&) = delete;

  std::filesystem::path track(const std::string& name) {
    written_.push_back(name);
    return dir_ / name;
  }
  void commit() { committed_ = true; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> written_;
  bool committed_ = false;
};

std::string hash_of_optional(const std::optional<std::filesystem::path>& p) {
  return p ? sha256_file_hex(*p) : std::string();
}

/// One hash standing for the whole cassette directory: per-file hashes
/// concatenated in sorted relative-path order.
std::string cassette_dir_hash(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  if (std::filesystem::exists(dir)) {
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
  }
  std::vector<std::string> lines;
  lines.reserve(files.size());
  for (const std::filesystem::path& f : files) {
    lines.push_back(std::filesystem::relative(f, dir).generic_string() + ":" +
                    sha256_file_hex(f) + "\n");
  }
  std::sort(lines.begin(), lines.end());
  std::string blob;
  for (const std::string& line : lines) blob += line;
  return sha256_hex(blob);
}

ordered_json inputs_json(const config::PipelineConfig& cfg) {
  ordered_json j;
  j["zones"] = sha256_file_hex(cfg.zones_path);
  j["tracts"] = sha256_file_hex(cfg.tracts_path);
  j["census"] = sha256_file_hex(cfg.census_path);
  j["permits"] = sha256_file_hex(cfg.permits_path);
  j["registry"] = cfg.registry_path ? ordered_json(hash_of_optional(cfg.registry_path))
                                    : ordered_json(nullptr);
  j["cassettes"] = cassette_dir_hash(cfg.cassette_dir);
  return j;
}

std::filesystem::path manifest_path(const config::PipelineConfig& cfg) {
  return cfg.output_dir / kManifestName;
}

void write_manifest(const config::PipelineConfig& cfg, const ordered_json& doc) {
  // Canonical stage order regardless of which subcommand ran last.
  ordered_json out;
  out["format"] = "innodex-manifest-v1";
  out["params_sha256"] = doc.at("params_sha256");
  out["random_seed"] = doc.at("random_seed");
  out["inputs"] = doc.at("inputs");
  ordered_json stages = ordered_json::object();
  for (const char* name : kStageOrder) {
    if (doc.at("stages").contains(name)) stages[name] = doc.at("stages").at(name);
  }
  out["stages"] = std::move(stages);

  std::filesystem::path tmp = manifest_path(cfg);
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f || !(f << out.dump(2) << '\n').flush()) {
      throw DataError("cannot write " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, manifest_path(cfg));
}

ordered_json fresh_manifest(const config::PipelineConfig& cfg, ordered_json inputs) {
  ordered_json doc;
  doc["params_sha256"] = config::params_fingerprint(cfg);
  doc["random_seed"] = cfg.random_seed;
  doc["inputs"] = std::move(inputs);
  doc["stages"] = ordered_json::object();
  return doc;
}

ordered_json load_manifest(const config::PipelineConfig& cfg) {
  std::filesystem::path mp = manifest_path(cfg);
  if (!std::filesystem::exists(mp)) {
    throw DataError("no " + std::string(kManifestName) + " in " + cfg.output_dir.string() +
                    "; run the earlier stages first (fetch, aggregate, correlate, render)");
  }
  std::ifstream in(mp, std::ios::binary);
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const ordered_json::parse_error& e) {
    throw DataError(mp.string() + " is corrupt: " + e.what());
  }
  return doc;
}

/// Loads the manifest and refuses to proceed when the configuration, an
/// input file, or a required upstream artifact no longer matches what the
/// manifest recorded.
ordered_json load_manifest_checked(const config::PipelineConfig& cfg,
                                   const std::vector<std::string>& required_stages) {
  ordered_json doc = load_manifest(cfg);
  if (doc.value("params_sha256", "") != config::params_fingerprint(cfg)) {
    throw DataError(
        "configuration parameters changed since the manifest was written; re-run from fetch");
  }
  ordered_json current = inputs_json(cfg);
  for (const auto& [key, hash] : current.items()) {
    if (!doc.at("inputs").contains(key) || doc.at("inputs").at(key) != hash) {
      throw DataError("input '" + key +
                      "' changed since the manifest was written (hash mismatch); re-run from "
                      "fetch");
    }
  }
  for (const std::string& stage : required_stages) {
    if (!doc.at("stages").contains(stage)) {
      throw DataError("stage '" + stage + "' has not run yet; run it first");
    }
    for (const auto& [name, hash] : doc.at("stages").at(stage).at("artifacts").items()) {
      std::filesystem::path p = cfg.output_dir / name;
      if (!std::filesystem::exists(p) || sha256_file_hex(p) != hash.get<std::string>()) {
        throw DataError("artifact '" + name + "' from stage '" + stage +
                        "' is missing or was modified (hash mismatch); re-run that stage");
      }
    }
  }
  return doc;
}

void drop_stages_from(ordered_json& doc, const std::string& first_stale) {
  bool stale = false;
  for (const char* name : kStageOrder) {
    if (name == first_stale) stale = true;
    if (stale) doc["stages"].erase(name);
  }
}

ordered_json counts_json(const std::map<std::string, int64_t>& counts) {
  ordered_json j = ordered_json::object();
  for (const auto& [key, value] : counts) j[key] = value;
  return j;
}

void record_stage(ordered_json& doc, const config::PipelineConfig& cfg, StageSummary& summary,
                  StageGuard& guard) {
  std::sort(summary.artifacts.begin(), summary.artifacts.end());
  ordered_json artifacts = ordered_json::object();
  for (const std::string& name : summary.artifacts) {
    artifacts[name] = sha256_file_hex(cfg.output_dir / name);
  }
  doc["stages"][summary.stage] = {{"artifacts", std::move(artifacts)},
                                  {"counts", counts_json(summary.counts)}};
  write_manifest(cfg, doc);
  guard.commit();
}

template <typename Fn>
StageSummary named_stage(const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(stage) + ": " + e.what());
  } catch (const SourceError& e) {
    throw SourceError(std::string(stage) + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(std::string(stage) + ": " + e.what());
  }
}

geo::ZoneSet load_zone_set(const config::PipelineConfig& cfg) {
  return geo::ZoneSet(geo::load_zones_geojson(cfg.zones_path, cfg.zip_property));
}

net::SourceClient make_client(const config::PipelineConfig& cfg, const std::string& name) {
  const config::SourceSettings& s = cfg.sources.at(name);
  net::SourceConfig sc;
  sc.mode = s.mode;
  sc.rate_limit_rps = s.rate_limit_rps;
  sc.base_url = s.base_url;
  return net::SourceClient(name, sc, cfg.cassette_dir);
}

}  // namespace

StageSummary stage_fetch(const config::PipelineConfig& cfg, const std::string& source_filter) {
  return named_stage("fetch", [&]() -> StageSummary {
    static const std::vector<std::string> kFilters = {"", config::kSourceKeyword,
                                                      config::kSourceTag, config::kSourceJobs,
                                                      config::kSourceRegistry};
    if (std::find(kFilters.begin(), kFilters.end(), source_filter) == kFilters.end()) {
      throw ConfigError("unknown source '" + source_filter + "'");
    }
    if (source_filter == config::kSourceRegistry && !cfg.registry_path) {
      throw ConfigError("registry fetch requested but registry_path is not configured");
    }
    config::validate_config(cfg);
    std::filesystem::create_directories(cfg.output_dir);
    StageGuard guard(cfg.output_dir);
    StageSummary summary;
    summary.stage = "fetch";

    auto wants = [&](const char* name) {
      return source_filter.empty() || source_filter == name;
    };
    std::optional<geo::BoundingBox> region;
    auto fetch_region = [&]() -> const geo::BoundingBox& {
      if (!region) region = cfg.region ? *cfg.region : load_zone_set(cfg).bounds();
      return *region;
    };

    if (wants(config::kSourceKeyword)) {
      net::SourceClient client = make_client(cfg, config::kSourceKeyword);
      std::vector<poi::PoiRecord> raw;
      for (const std::string& term : cfg.keywords) {
        std::vector<poi::PoiRecord> batch = net::keyword_fetch(client, term, fetch_region());
        raw.insert(raw.end(), std::make_move_iterator(batch.begin()),
                   std::make_move_iterator(batch.end()));
      }
      summary.counts["keyword_records_raw"] = static_cast<int64_t>(raw.size());
      poi::normalize(raw);
      poi::DedupeResult deduped = poi::dedupe(std::move(raw));
      summary.counts["keyword_records"] = static_cast<int64_t>(deduped.records.size());
      summary.counts["keyword_dedupe_warnings"] = static_cast<int64_t>(deduped.warnings.size());
      summary.warnings.insert(summary.warnings.end(), deduped.warnings.begin(),
                              deduped.warnings.end());
      poi::write_poi_jsonl(guard.track("pois.keyword_search.jsonl"), deduped.records);
      summary.artifacts.push_back("pois.keyword_search.jsonl");
    }

    if (wants(config::kSourceTag)) {
      net::SourceClient client = make_client(cfg, config::kSourceTag);
      std::vector<poi::PoiRecord> raw = net::tag_fetch(client, cfg.tags, fetch_region());
      summary.counts["tag_records_raw"] = static_cast<int64_t>(raw.size());
      poi::normalize(raw);
      poi::DedupeResult deduped = poi::dedupe(std::move(raw));
      summary.counts["tag_records"] = static_cast<int64_t>(deduped.records.size());
      summary.counts["tag_dedupe_warnings"] = static_cast<int64_t>(deduped.warnings.size());
      summary.warnings.insert(summary.warnings.end(), deduped.warnings.begin(),
                              deduped.warnings.end());
      poi::write_poi_jsonl(guard.track("pois.tag_query.jsonl"), deduped.records);
      summary.artifacts.push_back("pois.tag_query.jsonl");
    }

    if (wants(config::kSourceJobs)) {
      net::SourceClient client = make_client(cfg, config::kSourceJobs);
      std::vector<poi::JobPosting> postings = net::job_fetch(client, fetch_region());
      summary.counts["job_postings"] = static_cast<int64_t>(postings.size());
      int64_t with_zip = 0;
      for (const poi::JobPosting& p : postings) {
        if (p.zip_id) ++with_zip;
      }
      summary.counts["job_postings_with_zip"] = with_zip;
      poi::write_jobs_jsonl(guard.track("jobs.jsonl"), postings);
      summary.artifacts.push_back("jobs.jsonl");
    }

    if (wants(config::kSourceRegistry) && cfg.registry_path) {
      std::vector<poi::PoiRecord> raw = net::load_registry_jsonl(*cfg.registry_path);
      poi::normalize(raw);
      poi::DedupeResult deduped = poi::dedupe(std::move(raw));
      summary.counts["registry_records"] = static_cast<int64_t>(deduped.records.size());
      summary.warnings.insert(summary.warnings.end(), deduped.warnings.begin(),
                              deduped.warnings.end());
      poi::write_poi_jsonl(guard.track("pois.registry.jsonl"), deduped.records);
      summary.artifacts.push_back("pois.registry.jsonl");
    }

    // Inputs are hashed after fetching: live mode records new cassettes,
    // and the manifest must describe the directory later stages will see.
    ordered_json inputs = inputs_json(cfg);
    ordered_json doc;
    bool merged = false;
    if (std::filesystem::exists(manifest_path(cfg))) {
      try {
        doc = load_manifest(cfg);
        merged = doc.value("params_sha256", "") == config::params_fingerprint(cfg) &&
                 doc.at("inputs") == inputs && doc.at("stages").contains("fetch");
      } catch (const DataError&) {
        merged = false;
      }
    }
    if (!merged) {
      doc = fresh_manifest(cfg, std::move(inputs));
      doc["stages"]["fetch"] = {{"artifacts", ordered_json::object()},
                                {"counts", ordered_json::object()}};
    }
    // Filtered fetches accumulate into the existing fetch record; anything
    // downstream is stale either way.
    drop_stages_from(doc, "aggregate");
    ordered_json& fetch_stage = doc["stages"]["fetch"];
    for (const std::string& name : summary.artifacts) {
      fetch_stage["artifacts"][name] = sha256_file_hex(cfg.output_dir / name);
    }
    // items() keeps a reference to its json; the temporary must outlive it.
    ordered_json new_counts = counts_json(summary.counts);
    for (const auto& [key, value] : new_counts.items()) {
      fetch_stage["counts"][key] = value;
    }
    // Re-sort the artifact and count keys for a canonical manifest.
    {
      ordered_json sorted_artifacts = ordered_json::object();
      std::vector<std::string> names;
      for (const auto& [name, hash] : fetch_stage["artifacts"].items()) names.push_back(name);
      std::sort(names.begin(), names.end());
      for (const std::string& name : names) {
        sorted_artifacts[name] = fetch_stage["artifacts"][name];
      }
      fetch_stage["artifacts"] = std::move(sorted_artifacts);
      ordered_json sorted_counts = ordered_json::object();
      std::vector<std::string> keys;
      for (const auto& [key, value] : fetch_stage["counts"].items()) keys.push_back(key);
      std::sort(keys.begin(), keys.end());
      for (const std::string& key : keys) sorted_counts[key] = fetch_stage["counts"][key];
      fetch_stage["counts"] = std::move(sorted_counts);
    }
    write_manifest(cfg, doc);
    guard.commit();
    return summary;
  });
}

StageSummary stage_aggregate(const config::PipelineConfig& cfg) {
  return named_stage("aggregate", [&]() -> StageSummary {
    config::validate_config(cfg);
    ordered_json doc = load_manifest_checked(cfg, {"fetch"});
    const ordered_json& fetch_artifacts = doc.at("stages").at("fetch").at("artifacts");
    for (const char* needed : {"pois.keyword_search.jsonl", "pois.tag_query.jsonl", "jobs.jsonl"}) {
      if (!fetch_artifacts.contains(needed)) {
        throw DataError(std::string("fetch artifact '") + needed +
                        "' is missing from the manifest; run fetch for that source");
      }
    }
    StageGuard guard(cfg.output_dir);
    StageSummary summary;
    summary.stage = "aggregate";

    geo::ZoneSet zs = load_zone_set(cfg);
    std::vector<geo::NamedMultiPolygon> tracts =
        geo::load_named_polygons(cfg.tracts_path, cfg.tract_id_property);
    std::vector<tabular::TractRow> census =
        tabular::load_census_csv(cfg.census_path, cfg.census_columns);
    std::vector<tabular::PermitRecord> permits = tabular::load_permits_csv(cfg.permits_path);
    std::vector<poi::PoiRecord> keyword_pois =
        poi::read_poi_jsonl(cfg.output_dir / "pois.keyword_search.jsonl");
    std::vector<poi::PoiRecord> tag_pois =
        poi::read_poi_jsonl(cfg.output_dir / "pois.tag_query.jsonl");
    std::vector<poi::JobPosting> postings = poi::read_jobs_jsonl(cfg.output_dir / "jobs.jsonl");

    summary.counts["zones"] = static_cast<int64_t>(zs.size());
    summary.counts["tracts"] = static_cast<int64_t>(tracts.size());

    tabular::CrosswalkResult xw =
        tabular::build_crosswalk(tracts, zs, cfg.crosswalk_samples, cfg.random_seed);
    tabular::write_crosswalk_csv(guard.track("crosswalk.csv"), xw.entries);
    summary.artifacts.push_back("crosswalk.csv");
    summary.counts["crosswalk_entries"] = static_cast<int64_t>(xw.entries.size());
    summary.counts["crosswalk_unassigned_tracts"] =
        static_cast<int64_t>(xw.unassigned_tracts.size());
    summary.counts["crosswalk_partial_tracts"] = static_cast<int64_t>(xw.partial_tracts.size());
    for (const std::string& tract_id : xw.unassigned_tracts) {
      summary.warnings.push_back("tract " + tract_id + " lies outside every zone");
    }

    std::vector<tabular::ZipSocioRow> socio = tabular::tract_to_zip(census, xw.entries);
    summary.counts["socio_rows"] = static_cast<int64_t>(socio.size());

    metrics::MetricsResult keyword_metrics = metrics::zip_innovation_metrics(keyword_pois, zs);
    metrics::MetricsResult osm_metrics = metrics::zip_innovation_metrics(tag_pois, zs);
    summary.counts["keyword_pois"] = static_cast<int64_t>(keyword_pois.size());
    summary.counts["keyword_pois_unassigned"] = keyword_metrics.unassigned.location_count;
    summary.counts["osm_pois"] = static_cast<int64_t>(tag_pois.size());
    summary.counts["osm_pois_unassigned"] = osm_metrics.unassigned.location_count;

    std::vector<tabular::PermitRecord> kept = tabular::filter_permits(permits);
    tabular::PermitCounts permit_counts = tabular::permit_zip_counts(kept, zs);
    summary.counts["permits_input"] = static_cast<int64_t>(permits.size());
    summary.counts["permits_kept"] = static_cast<int64_t>(kept.size());
    summary.counts["permits_unassigned"] = permit_counts.unassigned.permit_count;

    metrics::JobCounts job_counts = metrics::job_zip_counts(postings, zs);
    int64_t jobs_in_zips = 0;
    for (const auto& [zip_id, count] : job_counts.by_zip) jobs_in_zips += count;
    summary.counts["jobs_in_zips"] = jobs_in_zips;
    summary.counts["jobs_unknown_zip"] = job_counts.unknown_zip;
    summary.counts["jobs_no_zip"] = job_counts.no_zip;

    std::vector<metrics::ZipFeatureVector> features = metrics::assemble_feature_matrix(
        keyword_metrics, osm_metrics, socio, permit_counts, job_counts, zs);
    summary.counts["feature_rows"] = static_cast<int64_t>(features.size());
    metrics::write_feature_csv(guard.track("features.csv"), features);
    summary.artifacts.push_back("features.csv");
    metrics::write_feature_jsonl(guard.track("features.jsonl"), features);
    summary.artifacts.push_back("features.jsonl");

    drop_stages_from(doc, "correlate");
    record_stage(doc, cfg, summary, guard);
    return summary;
  });
}

StageSummary stage_correlate(const config::PipelineConfig& cfg) {
  return named_stage("correlate", [&]() -> StageSummary {
    config::validate_config(cfg);
    ordered_json doc = load_manifest_checked(cfg, {"fetch", "aggregate"});
    StageGuard guard(cfg.output_dir);
    StageSummary summary;
    summary.stage = "correlate";

    std::vector<metrics::ZipFeatureVector> features =
        metrics::read_feature_csv(cfg.output_dir / "features.csv");
    std::vector<stats::Column> columns;
    columns.reserve(cfg.correlation_columns.size());
    for (const std::string& name : cfg.correlation_columns) {
      stats::Column col;
      col.reserve(features.size());
      for (const metrics::ZipFeatureVector& row : features) {
        col.push_back(metrics::feature_value(row, name));
      }
      columns.push_back(std::move(col));
    }
    stats::CorrelationMatrix matrix = stats::correlation_matrix(cfg.correlation_columns, columns);
    stats::write_matrix_csv(guard.track("correlation.csv"), matrix);
    summary.artifacts.push_back("correlation.csv");
    stats::write_matrix_json(guard.track("correlation.json"), matrix);
    summary.artifacts.push_back("correlation.json");

    summary.counts["matrix_columns"] = static_cast<int64_t>(matrix.columns.size());
    summary.counts["matrix_rows_in"] = static_cast<int64_t>(features.size());
    int64_t defined = 0;
    for (const auto& row : matrix.r) {
      for (const std::optional<double>& cell : row) {
        if (cell) ++defined;
      }
    }
    summary.counts["matrix_defined_cells"] = defined;

    // Scaling diagnostic between the two canonical index counts.
    stats::Column locations, ratings;
    for (const metrics::ZipFeatureVector& row : features) {
      locations.push_back(metrics::feature_value(row, "location_count"));
      ratings.push_back(metrics::feature_value(row, "total_rating_count"));
    }
    stats::LogLogResult loglog = stats::loglog_slope(locations, ratings);
    ordered_json lj;
    lj["x"] = "location_count";
    lj["y"] = "total_rating_count";
    lj["n"] = loglog.n;
    if (loglog.fit) {
      lj["slope"] = loglog.fit->slope;
      lj["intercept"] = loglog.fit->intercept;
      lj["r2"] = loglog.fit->r2;
    } else {
      lj["slope"] = nullptr;
      lj["intercept"] = nullptr;
      lj["r2"] = nullptr;
      lj["reason"] = loglog.reason;
    }
    {
      std::filesystem::path p = guard.track("loglog.json");
      std::ofstream out(p, std::ios::binary | std::ios::trunc);
      if (!out || !(out << lj.dump(2) << '\n').flush()) {
        throw DataError("cannot write " + p.string());
      }
    }
    summary.artifacts.push_back("loglog.json");
    summary.counts["loglog_pairs"] = loglog.n;

    drop_stages_from(doc, "render");
    record_stage(doc, cfg, summary, guard);
    return summary;
  });
}

namespace {

void append_top5(std::string& report, const std::vector<metrics::ZipFeatureVector>& features,
                 const std::string& column) {
  struct Entry {
    std::string zip_id;
    double value;
  };
  std::vector<Entry> entries;
  for (const metrics::ZipFeatureVector& row : features) {
    std::optional<double> v = metrics::feature_value(row, column);
    if (v) entries.push_back({row.zip_id, *v});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.zip_id < b.zip_id;
  });
  report += "top zips by " + column + ":\n";
  if (entries.empty()) {
    report += "  (no data)\n";
  }
  char buf[128];
  for (size_t i = 0; i < entries.size() && i < 5; ++i) {
    std::snprintf(buf, sizeof buf, "  %zu. %s  %.6g\n", i + 1, entries[i].zip_id.c_str(),
                  entries[i].value);
    report += buf;
  }
  report += "\n";
}

}  // namespace

StageSummary stage_render(const config::PipelineConfig& cfg) {
  return named_stage("render", [&]() -> StageSummary {
    config::validate_config(cfg);
    ordered_json doc = load_manifest_checked(cfg, {"fetch", "aggregate", "correlate"});
    StageGuard guard(cfg.output_dir);
    StageSummary summary;
    summary.stage = "render";

    geo::ZoneSet zs = load_zone_set(cfg);
    std::vector<metrics::ZipFeatureVector> features =
        metrics::read_feature_csv(cfg.output_dir / "features.csv");
    stats::CorrelationMatrix matrix = stats::read_matrix_json(cfg.output_dir / "correlation.json");

    auto write_text = [&](const std::string& name, const std::string& body) {
      std::filesystem::path p = guard.track(name);
      std::ofstream out(p, std::ios::binary | std::ios::trunc);
      if (!out || !(out << body).flush()) throw DataError("cannot write " + p.string());
      summary.artifacts.push_back(name);
    };

    for (const std::string& variable : cfg.render_variables) {
      std::map<std::string, std::optional<double>> values;
      for (const metrics::ZipFeatureVector& row : features) {
        values[row.zip_id] = metrics::feature_value(row, variable);
      }
      render::ChoroplethOptions options;
      options.k_classes = cfg.k_classes;
      render::ChoroplethArtifacts art = render::render_choropleth(zs, variable, values, options);
      write_text(variable + ".choropleth.geojson", art.geojson);
      write_text(variable + ".map.svg", art.svg);
    }
    write_text("correlation.svg", render::render_corr_heatmap(matrix));

    std::string report;
    report += "innovation index report\n";
    report += "=======================\n\n";
    report += "zones: " + std::to_string(zs.size()) + "\n\n";
    for (const char* column : {"location_count", "total_rating_count", "weighted_mean_rating"}) {
      append_top5(report, features, column);
    }
    {
      std::ifstream in(cfg.output_dir / "loglog.json", std::ios::binary);
      ordered_json lj = ordered_json::parse(in);
      char buf[160];
      if (lj.at("slope").is_null()) {
        report += "locations vs total ratings (log-log): not defined (" +
                  lj.value("reason", std::string("unknown")) + ")\n";
      } else {
        std::snprintf(buf, sizeof buf,
                      "locations vs total ratings (log-log): slope %.4f, r2 %.4f, n %lld\n",
                      lj.at("slope").get<double>(), lj.at("r2").get<double>(),
                      static_cast<long long>(lj.at("n").get<int64_t>()));
        report += buf;
      }
    }
    write_text("report.txt", report);

    summary.counts["choropleth_variables"] = static_cast<int64_t>(cfg.render_variables.size());
    summary.counts["zones_rendered"] = static_cast<int64_t>(zs.size());

    record_stage(doc, cfg, summary, guard);
    return summary;
  });
}

std::vector<StageSummary> run_pipeline(const config::PipelineConfig& cfg) {
  std::vector<StageSummary> summaries;
  summaries.push_back(stage_fetch(cfg));
  summaries.push_back(stage_aggregate(cfg));
  summaries.push_back(stage_correlate(cfg));
  summaries.push_back(stage_render(cfg));
  return summaries;
}

}  // namespace innodex::pipeline
