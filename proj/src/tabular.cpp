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

#include "innodex/tabular.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include "innodex/csv.hpp"
#include "innodex/errors.hpp"
#include "innodex/rng.hpp"

namespace innodex::tabular {

namespace {

int64_t parse_count(const std::string& cell, const std::string& tract_id, const char* field) {
  int64_t v;
  try {
    v = csv::parse_long(cell, field);
  } catch (const DataError&) {
    throw DataError("census tract " + tract_id + ": " + field + " '" + cell +
                    "' is not an integer");
  }
  if (v < 0) {
    throw DataError("census tract " + tract_id + ": negative " + std::string(field));
  }
  return v;
}

}  // namespace

std::vector<TractRow> load_census_csv(const std::filesystem::path& path,
                                      const CensusColumnMap& columns) {
  csv::Table table = csv::read_file(path);
  const std::string ctx = "census csv " + path.string();
  size_t c_id = table.require_column(columns.tract_id, ctx);
  size_t c_pop = table.require_column(columns.pop_total, ctx);
  size_t c_white = table.require_column(columns.pop_white, ctx);
  size_t c_black = table.require_column(columns.pop_black, ctx);
  size_t c_hisp = table.require_column(columns.pop_hispanic, ctx);
  size_t c_vac = table.require_column(columns.vacant_units, ctx);
  size_t c_units = table.require_column(columns.housing_units, ctx);
  size_t c_inc = table.require_column(columns.median_income_usd, ctx);
  size_t c_home = table.require_column(columns.median_home_value_usd, ctx);

  std::vector<TractRow> rows;
  rows.reserve(table.rows.size());
  for (const std::vector<std::string>& raw : table.rows) {
    TractRow r;
    r.tract_id = raw[c_id];
    if (r.tract_id.empty()) throw DataError("census: empty tract_id in " + path.string());
    r.pop_total = parse_count(raw[c_pop], r.tract_id, "pop_total");
    r.pop_white = parse_count(raw[c_white], r.tract_id, "pop_white");
    r.pop_black = parse_count(raw[c_black], r.tract_id, "pop_black");
    r.pop_hispanic = parse_count(raw[c_hisp], r.tract_id, "pop_hispanic");
    r.vacant_units = parse_count(raw[c_vac], r.tract_id, "vacant_units");
    r.housing_units = parse_count(raw[c_units], r.tract_id, "housing_units");
    if (r.pop_white > r.pop_total || r.pop_black > r.pop_total) {
      throw DataError("census tract " + r.tract_id + ": race count exceeds pop_total");
    }
    if (r.vacant_units > r.housing_units) {
      throw DataError("census tract " + r.tract_id + ": vacant_units exceeds housing_units");
    }
    r.median_income_usd = csv::parse_opt_double(raw[c_inc], "census tract " + r.tract_id);
    r.median_home_value_usd = csv::parse_opt_double(raw[c_home], "census tract " + r.tract_id);
    if ((r.median_income_usd && *r.median_income_usd <= 0.0) ||
        (r.median_home_value_usd && *r.median_home_value_usd <= 0.0)) {
      throw DataError("census tract " + r.tract_id + ": nonpositive median");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

struct TractCrosswalk {
  std::vector<CrosswalkEntry> entries;  // sorted by zip_id
  bool unassigned = false;
  bool partial = false;
};

// Weight fraction below which a sliver overlap is treated as sampling
// noise, and the matching threshold for mass outside every zone.
constexpr double kWeightFloor = 1e-3;

TractCrosswalk crosswalk_one(const geo::NamedMultiPolygon& tract, const geo::ZoneSet& zs,
                             int samples, uint64_t seed) {
  TractCrosswalk out;
  const geo::BoundingBox& box = tract.bbox;
  if (box.degenerate()) {
    out.unassigned = true;
    return out;
  }
  // Seeded by tract id, not by position in the batch: every schedule of the
  // parallel loop draws the identical point stream.
  SplitMix64 gen(seed ^ fnv1a64(tract.id));
  // Ordered map: weight accumulation below runs in zone-index order, so
  // the floating-point results never depend on hash-table layout.
  std::map<int32_t, int64_t> zone_hits;
  int64_t inside = 0;
  int64_t unassigned_hits = 0;
  const int64_t attempt_cap = static_cast<int64_t>(samples) * 200;
  for (int64_t attempt = 0; attempt < attempt_cap && inside < samples; ++attempt) {
    geo::GeoPoint p{gen.range(box.min_lon, box.max_lon), gen.range(box.min_lat, box.max_lat)};
    if (!geo::multipolygon_contains(p, tract.polygons)) continue;
    ++inside;
    int32_t zi = zs.assign_index(p);
    if (zi < 0) {
      ++unassigned_hits;
    } else {
      ++zone_hits[zi];
    }
  }
  if (inside == 0 || zone_hits.empty()) {
    out.unassigned = true;
    return out;
  }
  double n = static_cast<double>(inside);
  double outside_frac = static_cast<double>(unassigned_hits) / n;
  double kept_mass = 0.0;
  for (const auto& [zi, hits] : zone_hits) {
    double w = static_cast<double>(hits) / n;
    if (w < kWeightFloor) continue;
    kept_mass += w;
    out.entries.push_back({tract.id, zs.zones()[zi].zip_id, w});
  }
  if (out.entries.empty()) {
    out.unassigned = true;
    return out;
  }
  // Fully-inside tracts renormalize to exactly 1; tracts leaking real mass
  // outside the zone set keep only their in-zone fraction and get flagged.
  double target = 1.0;
  if (outside_frac >= kWeightFloor) {
    out.partial = true;
    target = 1.0 - outside_frac;
  }
  double scale = target / kept_mass;
  for (CrosswalkEntry& e : out.entries) e.weight *= scale;
  std::sort(out.entries.begin(), out.entries.end(),
            [](const CrosswalkEntry& a, const CrosswalkEntry& b) { return a.zip_id < b.zip_id; });
  return out;
}

CrosswalkResult merge_crosswalks(const std::vector<geo::NamedMultiPolygon>& tracts,
                                 std::vector<TractCrosswalk>& parts) {
  // Deterministic merge: tract_id order, regardless of how parts were made.
  std::vector<size_t> order(tracts.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return tracts[a].id < tracts[b].id; });
  CrosswalkResult result;
  for (size_t i : order) {
    TractCrosswalk& part = parts[i];
    if (part.unassigned) result.unassigned_tracts.push_back(tracts[i].id);
    if (part.partial) result.partial_tracts.push_back(tracts[i].id);
    result.entries.insert(result.entries.end(), std::make_move_iterator(part.entries.begin()),
                          std::make_move_iterator(part.entries.end()));
  }
  return result;
}

}  // namespace

CrosswalkResult build_crosswalk_serial(const std::vector<geo::NamedMultiPolygon>& tracts,
                                       const geo::ZoneSet& zs, int samples, uint64_t seed) {
  std::vector<TractCrosswalk> parts(tracts.size());
  for (size_t i = 0; i < tracts.size(); ++i) {
    parts[i] = crosswalk_one(tracts[i], zs, samples, seed);
  }
  return merge_crosswalks(tracts, parts);
}

CrosswalkResult build_crosswalk(const std::vector<geo::NamedMultiPolygon>& tracts,
                                const geo::ZoneSet& zs, int samples, uint64_t seed) {
  std::vector<TractCrosswalk> parts(tracts.size());
  int64_t n = static_cast<int64_t>(tracts.size());
#pragma omp parallel for schedule(dynamic)
  for (int64_t i = 0; i < n; ++i) {
    parts[i] = crosswalk_one(tracts[i], zs, samples, seed);
  }
  return merge_crosswalks(tracts, parts);
}

void write_crosswalk_csv(const std::filesystem::path& path,
                         const std::vector<CrosswalkEntry>& entries) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  csv::write_row(out, {"tract_id", "zip_id", "weight"});
  for (const CrosswalkEntry& e : entries) {
    csv::write_row(out, {e.tract_id, e.zip_id, csv::format_double(e.weight)});
  }
  if (!out.flush()) throw DataError("short write to " + path.string());
}

std::vector<CrosswalkEntry> read_crosswalk_csv(const std::filesystem::path& path) {
  csv::Table table = csv::read_file(path);
  const std::string ctx = "crosswalk csv " + path.string();
  size_t c_tract = table.require_column("tract_id", ctx);
  size_t c_zip = table.require_column("zip_id", ctx);
  size_t c_weight = table.require_column("weight", ctx);
  std::vector<CrosswalkEntry> entries;
  entries.reserve(table.rows.size());
  for (const std::vector<std::string>& raw : table.rows) {
    CrosswalkEntry e{raw[c_tract], raw[c_zip], csv::parse_double(raw[c_weight], ctx)};
    if (e.weight <= 0.0 || e.weight > 1.0 + 1e-12) {
      throw DataError("crosswalk " + e.tract_id + "->" + e.zip_id + ": weight " +
                      raw[c_weight] + " outside (0, 1]");
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

namespace {

// Banker's rounding, independent of the FP environment.
int64_t round_half_even(double x) {
  double f = std::floor(x);
  double frac = x - f;
  if (frac > 0.5) return static_cast<int64_t>(f) + 1;
  if (frac < 0.5) return static_cast<int64_t>(f);
  int64_t lo = static_cast<int64_t>(f);
  return (lo % 2 == 0) ? lo : lo + 1;
}

struct ZipAccumulator {
  double pop_total = 0.0;
  double pop_white = 0.0;
  double pop_black = 0.0;
  double pop_hispanic = 0.0;
  double vacant_units = 0.0;
  double housing_units = 0.0;
  double income_weighted = 0.0;
  double income_weight = 0.0;
  double home_weighted = 0.0;
  double home_weight = 0.0;
};

}  // namespace

std::vector<ZipSocioRow> tract_to_zip(const std::vector<TractRow>& tracts,
                                      const std::vector<CrosswalkEntry>& xw) {
  std::unordered_map<std::string, const TractRow*> by_id;
  by_id.reserve(tracts.size());
  for (const TractRow& t : tracts) by_id[t.tract_id] = &t;

  std::map<std::string, ZipAccumulator> acc;
  for (const CrosswalkEntry& e : xw) {
    auto it = by_id.find(e.tract_id);
    if (it == by_id.end()) {
      throw DataError("crosswalk references unknown tract " + e.tract_id);
    }
    const TractRow& t = *it->second;
    ZipAccumulator& a = acc[e.zip_id];
    a.pop_total += e.weight * static_cast<double>(t.pop_total);
    a.pop_white += e.weight * static_cast<double>(t.pop_white);
    a.pop_black += e.weight * static_cast<double>(t.pop_black);
    a.pop_hispanic += e.weight * static_cast<double>(t.pop_hispanic);
    a.vacant_units += e.weight * static_cast<double>(t.vacant_units);
    a.housing_units += e.weight * static_cast<double>(t.housing_units);
    if (t.median_income_usd) {
      double w = e.weight * static_cast<double>(t.pop_total);
      a.income_weighted += w * *t.median_income_usd;
      a.income_weight += w;
    }
    if (t.median_home_value_usd) {
      double w = e.weight * static_cast<double>(t.housing_units);
      a.home_weighted += w * *t.median_home_value_usd;
      a.home_weight += w;
    }
  }

  std::vector<ZipSocioRow> rows;
  rows.reserve(acc.size());
  for (const auto& [zip_id, a] : acc) {
    ZipSocioRow r;
    r.zip_id = zip_id;
    r.pop_total = round_half_even(a.pop_total);
    r.pop_white = round_half_even(a.pop_white);
    r.pop_black = round_half_even(a.pop_black);
    r.pop_hispanic = round_half_even(a.pop_hispanic);
    r.vacant_units = round_half_even(a.vacant_units);
    r.housing_units = round_half_even(a.housing_units);
    // Ratios come from the rounded counts, after summation, so the
    // published row is internally consistent.
    if (r.pop_total > 0) {
      r.pct_white = static_cast<double>(r.pop_white) / static_cast<double>(r.pop_total);
      r.pct_black = static_cast<double>(r.pop_black) / static_cast<double>(r.pop_total);
      r.pct_hispanic = static_cast<double>(r.pop_hispanic) / static_cast<double>(r.pop_total);
    }
    if (r.housing_units > 0) {
      r.vacancy_rate = static_cast<double>(r.vacant_units) / static_cast<double>(r.housing_units);
    }
    if (a.income_weight > 0.0) r.median_income_usd = a.income_weighted / a.income_weight;
    if (a.home_weight > 0.0) r.median_home_value_usd = a.home_weighted / a.home_weight;
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string to_string(Occupancy o) {
  switch (o) {
    case Occupancy::kCommercial: return "commercial";
    case Occupancy::kMixed: return "mixed";
    case Occupancy::kResidential: return "residential";
    case Occupancy::kOther: return "other";
  }
  throw ConfigError("unknown occupancy enum value");
}

namespace {

Occupancy parse_occupancy(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "commercial") return Occupancy::kCommercial;
  if (s == "mixed") return Occupancy::kMixed;
  if (s == "residential") return Occupancy::kResidential;
  return Occupancy::kOther;
}

std::chrono::year_month_day parse_date(const std::string& s, const std::string& permit_id) {
  int y = 0;
  unsigned m = 0, d = 0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto r1 = std::from_chars(b, e, y);
  if (r1.ec != std::errc{} || r1.ptr == e || *r1.ptr != '-') {
    throw DataError("permit " + permit_id + ": bad issued_date '" + s + "'");
  }
  auto r2 = std::from_chars(r1.ptr + 1, e, m);
  if (r2.ec != std::errc{} || r2.ptr == e || *r2.ptr != '-') {
    throw DataError("permit " + permit_id + ": bad issued_date '" + s + "'");
  }
  auto r3 = std::from_chars(r2.ptr + 1, e, d);
  if (r3.ec != std::errc{} || r3.ptr != e) {
    throw DataError("permit " + permit_id + ": bad issued_date '" + s + "'");
  }
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                  std::chrono::day{d}};
  if (!ymd.ok()) {
    throw DataError("permit " + permit_id + ": invalid date '" + s + "'");
  }
  return ymd;
}

}  // namespace

std::vector<PermitRecord> load_permits_csv(const std::filesystem::path& path) {
  csv::Table table = csv::read_file(path);
  const std::string ctx = "permits csv " + path.string();
  size_t c_id = table.require_column("permit_id", ctx);
  size_t c_lon = table.require_column("lon", ctx);
  size_t c_lat = table.require_column("lat", ctx);
  size_t c_occ = table.require_column("occupancy", ctx);
  size_t c_val = table.require_column("declared_value", ctx);
  size_t c_date = table.require_column("issued_date", ctx);

  std::vector<PermitRecord> permits;
  permits.reserve(table.rows.size());
  std::unordered_map<std::string, bool> seen;
  for (const std::vector<std::string>& raw : table.rows) {
    PermitRecord p;
    p.permit_id = raw[c_id];
    if (p.permit_id.empty()) throw DataError("permits: empty permit_id in " + path.string());
    if (!seen.emplace(p.permit_id, true).second) {
      throw DataError("permits: duplicate permit_id " + p.permit_id);
    }
    p.location = {csv::parse_double(raw[c_lon], "permit " + p.permit_id),
                  csv::parse_double(raw[c_lat], "permit " + p.permit_id)};
    if (!geo::is_valid(p.location)) {
      throw DataError("permit " + p.permit_id + ": invalid location");
    }
    p.occupancy_class = parse_occupancy(raw[c_occ]);
    p.declared_value_usd = csv::parse_opt_double(raw[c_val], "permit " + p.permit_id);
    if (p.declared_value_usd && *p.declared_value_usd < 0.0) {
      throw DataError("permit " + p.permit_id + ": negative declared_value");
    }
    p.issued_date = parse_date(raw[c_date], p.permit_id);
    permits.push_back(std::move(p));
  }
  return permits;
}

std::vector<PermitRecord> filter_permits(const std::vector<PermitRecord>& permits) {
  std::vector<PermitRecord> out;
  out.reserve(permits.size());
  for (const PermitRecord& p : permits) {
    if (p.occupancy_class == Occupancy::kCommercial || p.occupancy_class == Occupancy::kMixed) {
      out.push_back(p);
    }
  }
  return out;
}

PermitCounts permit_zip_counts(const std::vector<PermitRecord>& permits, const geo::ZoneSet& zs) {
  std::vector<geo::GeoPoint> points;
  points.reserve(permits.size());
  for (const PermitRecord& p : permits) points.push_back(p.location);
  std::vector<int32_t> assignment = geo::assign_zones(zs, points);

  PermitCounts counts;
  for (size_t i = 0; i < permits.size(); ++i) {
    PermitZipStats& stats = assignment[i] < 0
                                ? counts.unassigned
                                : counts.by_zip[zs.zones()[assignment[i]].zip_id];
    stats.permit_count += 1;
    if (permits[i].declared_value_usd) {
      stats.permit_value_usd += *permits[i].declared_value_usd;
    } else {
      stats.null_value_count += 1;
    }
  }
  return counts;
}

}  // namespace innodex::tabular
