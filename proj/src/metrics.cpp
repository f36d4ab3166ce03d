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

#include "innodex/metrics.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "innodex/csv.hpp"
#include "innodex/errors.hpp"

namespace innodex::metrics {

namespace {

struct RatingAccumulator {
  int64_t locations = 0;
  int64_t total_count = 0;
  double weighted_sum = 0.0;   // Σ rating · rating_count over rated POIs
  int64_t rated_count = 0;     // Σ rating_count over rated POIs

  void add(const poi::PoiRecord& r) {
    locations += 1;
    total_count += r.rating_count;
    if (r.rating) {
      weighted_sum += *r.rating * static_cast<double>(r.rating_count);
      rated_count += r.rating_count;
    }
  }

  void finish(ZipInnovationMetrics& m) const {
    m.location_count = locations;
    m.total_rating_count = total_count;
    if (rated_count > 0) {
      m.weighted_mean_rating = weighted_sum / static_cast<double>(rated_count);
    }
  }
};

}  // namespace

MetricsResult zip_innovation_metrics(const std::vector<poi::PoiRecord>& pois,
                                     const geo::ZoneSet& zs) {
  std::vector<geo::GeoPoint> points;
  points.reserve(pois.size());
  for (const poi::PoiRecord& r : pois) points.push_back(r.location);
  std::vector<int32_t> assignment = geo::assign_zones(zs, points);

  std::vector<RatingAccumulator> per_zone(zs.size());
  RatingAccumulator unassigned;
  for (size_t i = 0; i < pois.size(); ++i) {
    if (assignment[i] < 0) {
      unassigned.add(pois[i]);
    } else {
      per_zone[assignment[i]].add(pois[i]);
    }
  }

  MetricsResult result;
  result.rows.resize(zs.size());
  for (size_t zi = 0; zi < zs.size(); ++zi) {
    result.rows[zi].zip_id = zs.zones()[zi].zip_id;
    per_zone[zi].finish(result.rows[zi]);
  }
  std::sort(result.rows.begin(), result.rows.end(),
            [](const ZipInnovationMetrics& a, const ZipInnovationMetrics& b) {
              return a.zip_id < b.zip_id;
            });
  result.unassigned.zip_id = "unassigned";
  unassigned.finish(result.unassigned);
  return result;
}

JobCounts job_zip_counts(const std::vector<poi::JobPosting>& postings, const geo::ZoneSet& zs) {
  JobCounts counts;
  for (const poi::JobPosting& p : postings) {
    if (!p.zip_id) {
      counts.no_zip += 1;
    } else if (zs.find_zip(*p.zip_id) < 0) {
      counts.unknown_zip += 1;
    } else {
      counts.by_zip[*p.zip_id] += 1;
    }
  }
  return counts;
}

std::optional<double> per_business_normalization(const ZipFeatureVector& row) {
  if (row.location_count < 1) return std::nullopt;
  return row.permit_value_usd / static_cast<double>(row.location_count);
}

std::vector<ZipFeatureVector> assemble_feature_matrix(
    const MetricsResult& keyword_metrics, const MetricsResult& osm_metrics,
    const std::vector<tabular::ZipSocioRow>& socio, const tabular::PermitCounts& permits,
    const JobCounts& jobs, const geo::ZoneSet& zs) {
  auto check_zip = [&](const std::string& zip_id, const char* input) {
    if (zs.find_zip(zip_id) < 0) {
      throw DataError(std::string(input) + " row names zip " + zip_id +
                      ", which is not in the zone set");
    }
  };

  std::map<std::string, const ZipInnovationMetrics*> keyword_by_zip;
  for (const ZipInnovationMetrics& m : keyword_metrics.rows) {
    check_zip(m.zip_id, "keyword metrics");
    keyword_by_zip[m.zip_id] = &m;
  }
  std::map<std::string, const ZipInnovationMetrics*> osm_by_zip;
  for (const ZipInnovationMetrics& m : osm_metrics.rows) {
    check_zip(m.zip_id, "osm metrics");
    osm_by_zip[m.zip_id] = &m;
  }
  std::map<std::string, const tabular::ZipSocioRow*> socio_by_zip;
  for (const tabular::ZipSocioRow& s : socio) {
    check_zip(s.zip_id, "census");
    socio_by_zip[s.zip_id] = &s;
  }
  for (const auto& [zip_id, stats] : permits.by_zip) check_zip(zip_id, "permit");
  for (const auto& [zip_id, count] : jobs.by_zip) check_zip(zip_id, "job");

  std::vector<std::string> zips;
  zips.reserve(zs.size());
  for (const geo::ZipZone& z : zs.zones()) zips.push_back(z.zip_id);
  std::sort(zips.begin(), zips.end());

  std::vector<ZipFeatureVector> rows;
  rows.reserve(zips.size());
  for (const std::string& zip_id : zips) {
    ZipFeatureVector row;
    row.zip_id = zip_id;
    if (auto it = keyword_by_zip.find(zip_id); it != keyword_by_zip.end()) {
      row.location_count = it->second->location_count;
      row.total_rating_count = it->second->total_rating_count;
      row.weighted_mean_rating = it->second->weighted_mean_rating;
    }
    if (auto it = osm_by_zip.find(zip_id); it != osm_by_zip.end()) {
      // Zero from a partial-coverage source is indistinguishable from "not
      // covered"; it stays null rather than inventing an observed zero.
      if (it->second->location_count > 0) {
        row.osm_location_count = it->second->location_count;
      }
    }
    if (auto it = jobs.by_zip.find(zip_id); it != jobs.by_zip.end()) {
      row.job_count = it->second;
    }
    if (auto it = permits.by_zip.find(zip_id); it != permits.by_zip.end()) {
      row.permit_count = it->second.permit_count;
      row.permit_value_usd = it->second.permit_value_usd;
    }
    if (auto it = socio_by_zip.find(zip_id); it != socio_by_zip.end()) {
      const tabular::ZipSocioRow& s = *it->second;
      row.pop_total = s.pop_total;
      row.pct_white = s.pct_white;
      row.pct_black = s.pct_black;
      row.pct_hispanic = s.pct_hispanic;
      row.vacancy_rate = s.vacancy_rate;
      row.median_income_usd = s.median_income_usd;
      row.median_home_value_usd = s.median_home_value_usd;
    }
    row.permit_value_per_business = per_business_normalization(row);
    rows.push_back(std::move(row));
  }
  return rows;
}

const std::vector<std::string>& feature_columns() {
  static const std::vector<std::string> kColumns = {
      "location_count",     "total_rating_count",
      "weighted_mean_rating", "osm_location_count",
      "job_count",          "permit_count",
      "permit_value_usd",   "pop_total",
      "pct_white",          "pct_black",
      "pct_hispanic",       "vacancy_rate",
      "median_income_usd",  "median_home_value_usd",
      "permit_value_per_business",
  };
  return kColumns;
}

std::optional<double> feature_value(const ZipFeatureVector& row, const std::string& column) {
  auto from_int = [](int64_t v) { return std::optional<double>(static_cast<double>(v)); };
  auto from_opt_int = [](const std::optional<int64_t>& v) {
    return v ? std::optional<double>(static_cast<double>(*v)) : std::nullopt;
  };
  if (column == "location_count") return from_int(row.location_count);
  if (column == "total_rating_count") return from_int(row.total_rating_count);
  if (column == "weighted_mean_rating") return row.weighted_mean_rating;
  if (column == "osm_location_count") return from_opt_int(row.osm_location_count);
  if (column == "job_count") return from_opt_int(row.job_count);
  if (column == "permit_count") return from_int(row.permit_count);
  if (column == "permit_value_usd") return std::optional<double>(row.permit_value_usd);
  if (column == "pop_total") return from_int(row.pop_total);
  if (column == "pct_white") return row.pct_white;
  if (column == "pct_black") return row.pct_black;
  if (column == "pct_hispanic") return row.pct_hispanic;
  if (column == "vacancy_rate") return row.vacancy_rate;
  if (column == "median_income_usd") return row.median_income_usd;
  if (column == "median_home_value_usd") return row.median_home_value_usd;
  if (column == "permit_value_per_business") return row.permit_value_per_business;
  throw ConfigError("unknown feature column '" + column + "'");
}

namespace {

std::string opt_double_cell(const std::optional<double>& v) {
  return v ? csv::format_double(*v) : "";
}

std::string opt_int_cell(const std::optional<int64_t>& v) {
  return v ? std::to_string(*v) : "";
}

}  // namespace

void write_feature_csv(const std::filesystem::path& path,
                       const std::vector<ZipFeatureVector>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  std::vector<std::string> header = {"zip_id"};
  header.insert(header.end(), feature_columns().begin(), feature_columns().end());
  csv::write_row(out, header);
  for (const ZipFeatureVector& r : rows) {
    csv::write_row(out, {r.zip_id, std::to_string(r.location_count),
                         std::to_string(r.total_rating_count),
                         opt_double_cell(r.weighted_mean_rating),
                         opt_int_cell(r.osm_location_count), opt_int_cell(r.job_count),
                         std::to_string(r.permit_count), csv::format_double(r.permit_value_usd),
                         std::to_string(r.pop_total), opt_double_cell(r.pct_white),
                         opt_double_cell(r.pct_black), opt_double_cell(r.pct_hispanic),
                         opt_double_cell(r.vacancy_rate), opt_double_cell(r.median_income_usd),
                         opt_double_cell(r.median_home_value_usd),
                         opt_double_cell(r.permit_value_per_business)});
  }
  if (!out.flush()) throw DataError("short write to " + path.string());
}

std::vector<ZipFeatureVector> read_feature_csv(const std::filesystem::path& path) {
  csv::Table table = csv::read_file(path);
  const std::string ctx = "feature csv " + path.string();
  std::vector<size_t> idx;
  idx.push_back(table.require_column("zip_id", ctx));
  for (const std::string& name : feature_columns()) {
    idx.push_back(table.require_column(name, ctx));
  }
  auto opt_double_of = [&ctx](const std::string& cell) { return csv::parse_opt_double(cell, ctx); };
  auto opt_int_of = [&ctx](const std::string& cell) -> std::optional<int64_t> {
    if (cell.empty()) return std::nullopt;
    return csv::parse_long(cell, ctx);
  };
  std::vector<ZipFeatureVector> rows;
  rows.reserve(table.rows.size());
  for (const std::vector<std::string>& raw : table.rows) {
    ZipFeatureVector r;
    size_t k = 0;
    r.zip_id = raw[idx[k++]];
    r.location_count = csv::parse_long(raw[idx[k++]], ctx);
    r.total_rating_count = csv::parse_long(raw[idx[k++]], ctx);
    r.weighted_mean_rating = opt_double_of(raw[idx[k++]]);
    r.osm_location_count = opt_int_of(raw[idx[k++]]);
    r.job_count = opt_int_of(raw[idx[k++]]);
    r.permit_count = csv::parse_long(raw[idx[k++]], ctx);
    r.permit_value_usd = csv::parse_double(raw[idx[k++]], ctx);
    r.pop_total = csv::parse_long(raw[idx[k++]], ctx);
    r.pct_white = opt_double_of(raw[idx[k++]]);
    r.pct_black = opt_double_of(raw[idx[k++]]);
    r.pct_hispanic = opt_double_of(raw[idx[k++]]);
    r.vacancy_rate = opt_double_of(raw[idx[k++]]);
    r.median_income_usd = opt_double_of(raw[idx[k++]]);
    r.median_home_value_usd = opt_double_of(raw[idx[k++]]);
    r.permit_value_per_business = opt_double_of(raw[idx[k++]]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_feature_jsonl(const std::filesystem::path& path,
                         const std::vector<ZipFeatureVector>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  auto opt_double_json = [](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  auto opt_int_json = [](const std::optional<int64_t>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  for (const ZipFeatureVector& r : rows) {
    nlohmann::ordered_json j;
    j["zip_id"] = r.zip_id;
    j["location_count"] = r.location_count;
    j["total_rating_count"] = r.total_rating_count;
    j["weighted_mean_rating"] = opt_double_json(r.weighted_mean_rating);
    j["osm_location_count"] = opt_int_json(r.osm_location_count);
    j["job_count"] = opt_int_json(r.job_count);
    j["permit_count"] = r.permit_count;
    j["permit_value_usd"] = r.permit_value_usd;
    j["pop_total"] = r.pop_total;
    j["pct_white"] = opt_double_json(r.pct_white);
    j["pct_black"] = opt_double_json(r.pct_black);
    j["pct_hispanic"] = opt_double_json(r.pct_hispanic);
    j["vacancy_rate"] = opt_double_json(r.vacancy_rate);
    j["median_income_usd"] = opt_double_json(r.median_income_usd);
    j["median_home_value_usd"] = opt_double_json(r.median_home_value_usd);
    j["permit_value_per_business"] = opt_double_json(r.permit_value_per_business);
    out << j.dump() << '\n';
  }
  if (!out.flush()) throw DataError("short write to " + path.string());
}

}  // namespace innodex::metrics
