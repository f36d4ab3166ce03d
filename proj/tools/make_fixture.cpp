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

// Regenerates the committed demo_city fixture, the unit-test cassettes,
// and the small render goldens. Everything is a pure function of the
// constants below; run it only when the fixture design itself changes,
// then re-audit the expected counts.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "innodex/cassette.hpp"
#include "innodex/csv.hpp"
#include "innodex/geo.hpp"
#include "innodex/render.hpp"
#include "innodex/rng.hpp"
#include "innodex/stats.hpp"

namespace {

using innodex::geo::BoundingBox;
using innodex::geo::GeoPoint;
using innodex::geo::PolygonWithHoles;
using innodex::geo::Ring;
using innodex::geo::ZipZone;
using innodex::geo::ZoneSet;
using innodex::fnv1a64;
using innodex::SplitMix64;
using nlohmann::ordered_json;

// Demo city frame: a 7x5 zip lattice, tract grid overhanging it slightly.
constexpr int kZoneCols = 7;
constexpr int kZoneRows = 5;
constexpr double kLonMin = -71.19, kLonMax = -70.99;
constexpr double kLatMin = 42.23, kLatMax = 42.40;
constexpr int kTractCols = 10;
constexpr int kTractRows = 6;
constexpr double kTractLonMin = -71.20, kTractLonMax = -70.98;
constexpr double kTractLatMin = 42.225, kTractLatMax = 42.405;
const char* kHoleZip = "02117";  // gets a rectangular hole (unzoned land)

std::filesystem::path g_root;

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << content).flush()) {
    std::fprintf(stderr, "cannot write %s\n", path.string().c_str());
    std::exit(1);
  }
}

SplitMix64 keyed_rng(const std::string& key) {
  return SplitMix64(fnv1a64(key) ^ 0x9d3f07a25c81e6b4ULL);
}

std::string zone_id(int c, int r) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%05d", 2101 + r * kZoneCols + c);
  return buf;
}

// Lattice nodes, jittered in the interior only so the outer frame stays on
// the exact rectangle. Edge-subdivision points are derived per edge, so
// neighboring zones share vertex sequences exactly (watertight joins).
GeoPoint node(int c, int r) {
  double lon = kLonMin + (kLonMax - kLonMin) * c / kZoneCols;
  double lat = kLatMin + (kLatMax - kLatMin) * r / kZoneRows;
  if (c > 0 && c < kZoneCols && r > 0 && r < kZoneRows) {
    SplitMix64 g = keyed_rng("node:" + std::to_string(c) + "," + std::to_string(r));
    lon += (g.u01() - 0.5) * 0.006;
    lat += (g.u01() - 0.5) * 0.006;
  }
  return {lon, lat};
}

// Two interior points along the edge between nodes a and b, with a small
// lateral wobble keyed by the edge name.
std::vector<GeoPoint> edge_points(const GeoPoint& a, const GeoPoint& b, const std::string& key) {
  SplitMix64 g = keyed_rng("edge:" + key);
  std::vector<GeoPoint> pts;
  for (double t : {1.0 / 3.0, 2.0 / 3.0}) {
    double lon = a.lon + (b.lon - a.lon) * t;
    double lat = a.lat + (b.lat - a.lat) * t;
    double wobble = (g.u01() - 0.5) * 0.0025;
    // Perpendicular wobble: rotate the edge direction a quarter turn.
    double dx = b.lon - a.lon, dy = b.lat - a.lat;
    double len = std::sqrt(dx * dx + dy * dy);
    pts.push_back({lon - dy / len * wobble, lat + dx / len * wobble});
  }
  return pts;
}

std::string h_edge_key(int c, int r) { return "h:" + std::to_string(c) + "," + std::to_string(r); }
std::string v_edge_key(int c, int r) { return "v:" + std::to_string(c) + "," + std::to_string(r); }

Ring zone_ring(int c, int r) {
  GeoPoint sw = node(c, r), se = node(c + 1, r), ne = node(c + 1, r + 1), nw = node(c, r + 1);
  Ring ring;
  auto push_forward = [&](const GeoPoint& from, const GeoPoint& to, const std::string& key) {
    ring.push_back(from);
    for (const GeoPoint& p : edge_points(from, to, key)) ring.push_back(p);
  };
  auto push_reverse = [&](const GeoPoint& from, const GeoPoint& to, const std::string& key) {
    // The shared edge is always parameterized from its canonical endpoint
    // (lower c/r), so the neighbor reuses identical points.
    ring.push_back(from);
    std::vector<GeoPoint> pts = edge_points(to, from, key);
    ring.push_back(pts[1]);
    ring.push_back(pts[0]);
  };
  push_forward(sw, se, h_edge_key(c, r));          // south edge, west->east
  push_forward(se, ne, v_edge_key(c + 1, r));      // east edge, south->north
  push_reverse(ne, nw, h_edge_key(c, r + 1));      // north edge reuses west->east points
  push_reverse(nw, sw, v_edge_key(c, r));          // west edge reuses south->north points
  ring.push_back(sw);
  return ring;
}

Ring hole_ring(const Ring& outer) {
  double lon = 0.0, lat = 0.0;
  size_t n = outer.size() - 1;
  for (size_t i = 0; i < n; ++i) {
    lon += outer[i].lon;
    lat += outer[i].lat;
  }
  lon /= static_cast<double>(n);
  lat /= static_cast<double>(n);
  double half_w = (kLonMax - kLonMin) / kZoneCols * 0.16;
  double half_h = (kLatMax - kLatMin) / kZoneRows * 0.16;
  return {{lon - half_w, lat - half_h},
          {lon + half_w, lat - half_h},
          {lon + half_w, lat + half_h},
          {lon - half_w, lat + half_h},
          {lon - half_w, lat - half_h}};
}

ordered_json ring_coords(const Ring& ring) {
  ordered_json arr = ordered_json::array();
  for (const GeoPoint& p : ring) arr.push_back({p.lon, p.lat});
  return arr;
}

std::vector<ZipZone> build_zones() {
  std::vector<ZipZone> zones;
  for (int r = 0; r < kZoneRows; ++r) {
    for (int c = 0; c < kZoneCols; ++c) {
      ZipZone z;
      z.zip_id = zone_id(c, r);
      PolygonWithHoles poly;
      poly.outer = zone_ring(c, r);
      if (z.zip_id == kHoleZip) poly.holes.push_back(hole_ring(poly.outer));
      z.polygons.push_back(std::move(poly));
      zones.push_back(std::move(z));
    }
  }
  return zones;
}

void write_zones_geojson(const std::vector<ZipZone>& zones) {
  ordered_json features = ordered_json::array();
  for (const ZipZone& z : zones) {
    ordered_json f;
    f["type"] = "Feature";
    f["properties"]["ZIP5"] = z.zip_id;
    ordered_json rings = ordered_json::array();
    rings.push_back(ring_coords(z.polygons[0].outer));
    for (const Ring& hole : z.polygons[0].holes) rings.push_back(ring_coords(hole));
    f["geometry"]["type"] = "Polygon";
    f["geometry"]["coordinates"] = std::move(rings);
    features.push_back(std::move(f));
  }
  ordered_json doc;
  doc["type"] = "FeatureCollection";
  doc["features"] = std::move(features);
  write_file(g_root / "fixtures/demo_city/zones.geojson", doc.dump() + "\n");
}

std::string tract_id(int idx) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "25025%06d", (idx + 1) * 100);
  return buf;
}

struct TractBox {
  std::string id;
  double lon0, lat0, lon1, lat1;
};

std::vector<TractBox> build_tracts() {
  std::vector<TractBox> tracts;
  for (int r = 0; r < kTractRows; ++r) {
    for (int c = 0; c < kTractCols; ++c) {
      TractBox t;
      t.id = tract_id(r * kTractCols + c);
      t.lon0 = kTractLonMin + (kTractLonMax - kTractLonMin) * c / kTractCols;
      t.lon1 = kTractLonMin + (kTractLonMax - kTractLonMin) * (c + 1) / kTractCols;
      t.lat0 = kTractLatMin + (kTractLatMax - kTractLatMin) * r / kTractRows;
      t.lat1 = kTractLatMin + (kTractLatMax - kTractLatMin) * (r + 1) / kTractRows;
      tracts.push_back(std::move(t));
    }
  }
  // One tract far outside the city, to exercise the unassigned path.
  tracts.push_back({"25025999900", -70.90, 42.50, -70.88, 42.52});
  return tracts;
}

void write_tracts_geojson(const std::vector<TractBox>& tracts) {
  ordered_json features = ordered_json::array();
  for (const TractBox& t : tracts) {
    ordered_json f;
    f["type"] = "Feature";
    f["properties"]["GEOID"] = t.id;
    Ring ring = {{t.lon0, t.lat0}, {t.lon1, t.lat0}, {t.lon1, t.lat1},
                 {t.lon0, t.lat1}, {t.lon0, t.lat0}};
    ordered_json rings = ordered_json::array();
    rings.push_back(ring_coords(ring));
    f["geometry"]["type"] = "Polygon";
    f["geometry"]["coordinates"] = std::move(rings);
    features.push_back(std::move(f));
  }
  ordered_json doc;
  doc["type"] = "FeatureCollection";
  doc["features"] = std::move(features);
  write_file(g_root / "fixtures/demo_city/tracts.geojson", doc.dump() + "\n");
}

// Socio-economic gradient: the northeast corner plays downtown (dense
// innovation activity, higher income, whiter, per the shape of the source
// city) and the southwest is residential.
double sw_ness(double lon, double lat) {
  double u = (lon - kLonMin) / (kLonMax - kLonMin);
  double v = (lat - kLatMin) / (kLatMax - kLatMin);
  return std::clamp(1.0 - (u + v) * 0.5, 0.0, 1.0);
}

void write_census_csv(const std::vector<TractBox>& tracts) {
  std::string out;
  out +=
      "tract_id,pop_total,pop_white,pop_black,pop_hispanic,vacant_units,housing_units,"
      "median_income_usd,median_home_value_usd\n";
  for (const TractBox& t : tracts) {
    SplitMix64 g = keyed_rng("census:" + t.id);
    double gradient = sw_ness((t.lon0 + t.lon1) * 0.5, (t.lat0 + t.lat1) * 0.5);
    int64_t pop = static_cast<int64_t>(1500.0 + 2500.0 * (0.4 + 0.6 * gradient) + g.u01() * 800.0);
    double pct_white = 0.35 + 0.45 * (1.0 - gradient) + (g.u01() - 0.5) * 0.08;
    double pct_black = 0.05 + 0.38 * gradient + (g.u01() - 0.5) * 0.06;
    double pct_hisp = 0.05 + 0.30 * gradient + (g.u01() - 0.5) * 0.06;
    int64_t white = static_cast<int64_t>(static_cast<double>(pop) * std::clamp(pct_white, 0.05, 0.90));
    int64_t black = static_cast<int64_t>(static_cast<double>(pop) * std::clamp(pct_black, 0.02, 0.80));
    int64_t hisp = static_cast<int64_t>(static_cast<double>(pop) * std::clamp(pct_hisp, 0.02, 0.80));
    int64_t housing = static_cast<int64_t>(static_cast<double>(pop) / (1.8 + 0.5 * g.u01()));
    double vac_rate = 0.03 + 0.10 * gradient + g.u01() * 0.04;
    int64_t vacant = static_cast<int64_t>(static_cast<double>(housing) * vac_rate);
    std::string income, home;
    if (g.u01() >= 0.08) {
      income = std::to_string(
          static_cast<int64_t>(45000.0 + 90000.0 * (1.0 - gradient) + g.u01() * 8000.0));
    }
    if (g.u01() >= 0.08) {
      home = std::to_string(
          static_cast<int64_t>(280000.0 + 520000.0 * (1.0 - gradient) + g.u01() * 30000.0));
    }
    out += t.id + "," + std::to_string(pop) + "," + std::to_string(white) + "," +
           std::to_string(black) + "," + std::to_string(hisp) + "," + std::to_string(vacant) +
           "," + std::to_string(housing) + "," + income + "," + home + "\n";
  }
  write_file(g_root / "fixtures/demo_city/census.csv", out);
}

// Rejection-samples a point in the city with a northeast-heavy density;
// redraws while the point lands in a keep-empty zone (or, when
// `allow_unassigned` is false, outside every zone).
GeoPoint draw_poi_point(SplitMix64& g, const ZoneSet& zs, bool allow_unassigned) {
  for (int tries = 0; tries < 4000; ++tries) {
    double u = g.u01(), v = g.u01(), accept = g.u01();
    double ne = 1.0 - sw_ness(kLonMin + u * (kLonMax - kLonMin), kLatMin + v * (kLatMax - kLatMin));
    if (accept > 0.15 + 0.85 * ne * ne) continue;
    GeoPoint p{kLonMin + u * (kLonMax - kLonMin), kLatMin + v * (kLatMax - kLatMin)};
    auto zip = zs.assign(p);
    if (!zip && !allow_unassigned) continue;
    if (zip && (*zip == "02101" || *zip == "02108")) continue;  // keep these POI-free
    return p;
  }
  std::fprintf(stderr, "poi rejection sampling failed\n");
  std::exit(1);
}

struct Place {
  std::string id;
  std::string name;
  GeoPoint location;
  std::optional<double> rating;
  int64_t rating_count = 0;
  std::vector<std::string> terms;
};

std::string cassette_file(const std::string& source, const std::string& query,
                          const BoundingBox& region) {
  return source + "/" + innodex::net::request_key(source, query, region) + ".json";
}

void write_places_cassette(const std::filesystem::path& dir, const std::string& source,
                           const std::string& query, const BoundingBox& region,
                           const std::vector<const Place*>& places, bool with_ratings) {
  ordered_json results = ordered_json::array();
  for (const Place* p : places) {
    ordered_json item;
    item["place_id"] = p->id;
    item["name"] = p->name;
    item["lon"] = p->location.lon;
    item["lat"] = p->location.lat;
    if (with_ratings) {
      item["rating"] = p->rating ? ordered_json(*p->rating) : ordered_json(nullptr);
      item["rating_count"] = p->rating_count;
    }
    results.push_back(std::move(item));
  }
  ordered_json doc;
  doc["results"] = std::move(results);
  write_file(dir / cassette_file(source, query, region), doc.dump() + "\n");
}

std::vector<Place> build_keyword_places(const ZoneSet& zs) {
  const std::vector<std::string>& keywords = innodex::poi::default_keywords();
  // Popularity weights: a few workhorse terms and a long tail, echoing how
  // such searches behave.
  const std::vector<double> weights = {0.8, 0.4, 0.7, 2.2, 0.5, 0.4, 1.4, 0.6, 1.8, 1.2, 0.3, 1.1};
  double total_w = 0.0;
  for (double w : weights) total_w += w;

  std::vector<Place> places;
  SplitMix64 g = keyed_rng("keyword-places");
  for (int i = 1; i <= 237; ++i) {
    Place p;
    char buf[8];
    std::snprintf(buf, sizeof buf, "GP%04d", i);
    p.id = buf;
    p.name = "Place " + std::string(buf);
    p.location = draw_poi_point(g, zs, /*allow_unassigned=*/false);
    double ne = 1.0 - sw_ness(p.location.lon, p.location.lat);
    double draw = g.u01();
    p.rating_count = static_cast<int64_t>(draw * draw * 500.0 * (0.25 + 0.75 * ne));
    if (p.rating_count > 0) {
      p.rating = std::round((3.0 + 2.0 * g.u01()) * 10.0) / 10.0;
    } else if (g.u01() < 0.5) {
      // Raw feeds sometimes carry a stale rating with zero count; the
      // normalizer is expected to null it.
      p.rating = std::round((3.0 + 2.0 * g.u01()) * 10.0) / 10.0;
    }
    int n_terms = g.u01() < 0.25 ? (g.u01() < 0.2 ? 3 : 2) : 1;
    while (static_cast<int>(p.terms.size()) < n_terms) {
      double pick = g.u01() * total_w;
      for (size_t k = 0; k < keywords.size(); ++k) {
        pick -= weights[k];
        if (pick <= 0.0) {
          if (std::find(p.terms.begin(), p.terms.end(), keywords[k]) == p.terms.end()) {
            p.terms.push_back(keywords[k]);
          }
          break;
        }
      }
    }
    places.push_back(std::move(p));
  }
  // Three places inside the unzoned hole: they must show up in the
  // unassigned diagnostics.
  ZipZone hole_zone;
  for (const ZipZone& z : zs.zones()) {
    if (z.zip_id == kHoleZip) hole_zone = z;
  }
  const Ring& hole = hole_zone.polygons[0].holes[0];
  double hole_cx = (hole[0].lon + hole[2].lon) * 0.5;
  double hole_cy = (hole[0].lat + hole[2].lat) * 0.5;
  for (int i = 0; i < 3; ++i) {
    Place p;
    char buf[8];
    std::snprintf(buf, sizeof buf, "GP%04d", 238 + i);
    p.id = buf;
    p.name = "Place " + std::string(buf);
    p.location = {hole_cx + (i - 1) * 0.0008, hole_cy + (i - 1) * 0.0006};
    p.rating_count = 5 + i;
    p.rating = 4.0;
    p.terms = {"startups"};
    places.push_back(std::move(p));
  }
  return places;
}

void write_keyword_cassettes(const std::vector<Place>& places, const BoundingBox& region) {
  std::filesystem::path dir = g_root / "fixtures/demo_city/cassettes";
  for (const std::string& term : innodex::poi::default_keywords()) {
    std::vector<const Place*> matched;
    for (const Place& p : places) {
      if (std::find(p.terms.begin(), p.terms.end(), term) != p.terms.end()) {
        matched.push_back(&p);
      }
    }
    // One deliberate cross-keyword location conflict: the duplicate sits
    // about 200 m away and must trigger a dedupe warning.
    std::vector<Place> patched;
    if (term == "tech hub") {
      for (const Place& p : places) {
        if (p.id == "GP0013" &&
            std::find(p.terms.begin(), p.terms.end(), term) == p.terms.end()) {
          Place dup = p;
          dup.location.lon += 0.0020;
          dup.rating_count = std::max<int64_t>(0, dup.rating_count - 1);
          patched.push_back(std::move(dup));
        }
      }
      for (const Place& p : patched) matched.push_back(&p);
      std::sort(matched.begin(), matched.end(),
                [](const Place* a, const Place* b) { return a->id < b->id; });
    }
    write_places_cassette(dir, "keyword_search", term, region, matched, /*with_ratings=*/true);
  }
}

std::vector<Place> build_tag_places(const ZoneSet& zs) {
  std::vector<Place> places;
  SplitMix64 g = keyed_rng("tag-places");
  const std::vector<std::pair<std::string, int>> plan = {
      {"office=coworking", 20}, {"company=startup", 12}, {"office=research", 8}};
  int serial = 1;
  for (const auto& [tag, count] : plan) {
    for (int i = 0; i < count; ++i) {
      Place p;
      char buf[16];
      std::snprintf(buf, sizeof buf, "OS%04d", serial++);
      p.id = buf;
      p.name = "Site " + std::string(buf);
      p.location = draw_poi_point(g, zs, /*allow_unassigned=*/false);
      p.terms = {tag};
      places.push_back(std::move(p));
    }
  }
  return places;
}

void write_tag_cassettes(const std::vector<Place>& places, const BoundingBox& region) {
  std::filesystem::path dir = g_root / "fixtures/demo_city/cassettes";
  for (const std::string& tag : innodex::poi::default_tags()) {
    std::vector<const Place*> matched;
    for (const Place& p : places) {
      if (p.terms[0] == tag) matched.push_back(&p);
    }
    write_places_cassette(dir, "tag_query", tag, region, matched, /*with_ratings=*/false);
  }
}

void write_jobs_cassette(const ZoneSet& zs, const BoundingBox& region) {
  SplitMix64 g = keyed_rng("jobs");
  const std::vector<std::string> titles = {"Software Engineer", "Data Analyst", "QA Engineer",
                                           "Product Manager", "Research Scientist",
                                           "Systems Administrator"};
  ordered_json postings = ordered_json::array();
  for (int i = 1; i <= 100; ++i) {
    ordered_json item;
    char buf[8];
    std::snprintf(buf, sizeof buf, "JB%04d", i);
    item["posting_id"] = buf;
    item["title"] = titles[static_cast<size_t>(g.u01() * 6.0) % titles.size()];
    if (i % 10 == 3 || i % 10 == 7 || i % 10 == 0) {
      item["zip"] = nullptr;  // 30 postings without an extractable zip
    } else if (i == 41) {
      item["zip"] = "90210";  // valid-looking zip outside the city
    } else if (i == 42) {
      item["zip"] = "10001";
    } else {
      GeoPoint p = draw_poi_point(g, zs, /*allow_unassigned=*/false);
      item["zip"] = *zs.assign(p);
    }
    if (g.u01() < 0.5) {
      GeoPoint p = draw_poi_point(g, zs, /*allow_unassigned=*/false);
      item["lon"] = p.lon;
      item["lat"] = p.lat;
    } else {
      item["lon"] = nullptr;
      item["lat"] = nullptr;
    }
    postings.push_back(std::move(item));
  }
  ordered_json doc;
  doc["postings"] = std::move(postings);
  write_file(g_root / "fixtures/demo_city/cassettes" /
                 cassette_file("jobs", "technology", region),
             doc.dump() + "\n");
}

std::string format_date(int64_t day_offset) {
  std::chrono::sys_days base = std::chrono::year{2019} / 1 / 1;
  std::chrono::year_month_day ymd{base + std::chrono::days{day_offset}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

void write_permits_csv(const ZoneSet& zs) {
  SplitMix64 g = keyed_rng("permits");
  const std::vector<std::string> occupancies = {"commercial", "mixed", "residential", "other"};
  const std::vector<double> occ_weights = {0.35, 0.23, 0.38, 0.04};
  std::string out = "permit_id,lon,lat,occupancy,declared_value,issued_date\n";

  ZipZone hole_zone;
  for (const ZipZone& z : zs.zones()) {
    if (z.zip_id == kHoleZip) hole_zone = z;
  }
  const Ring& hole = hole_zone.polygons[0].holes[0];
  double hole_cx = (hole[0].lon + hole[2].lon) * 0.5;
  double hole_cy = (hole[0].lat + hole[2].lat) * 0.5;

  for (int i = 1; i <= 520; ++i) {
    char buf[12];
    std::snprintf(buf, sizeof buf, "PM%05d", i);
    GeoPoint p;
    if (i >= 515 && i <= 518) {
      p = {hole_cx + (i - 516) * 0.0007, hole_cy - (i - 516) * 0.0005};  // unzoned hole
    } else if (i >= 519) {
      p = {-70.95, 42.41 + (i - 519) * 0.01};  // outside the city frame
    } else {
      double u = g.u01(), v = g.u01();
      p = {kLonMin + u * (kLonMax - kLonMin), kLatMin + v * (kLatMax - kLatMin)};
    }
    double pick = g.u01();
    size_t occ = 0;
    for (; occ + 1 < occ_weights.size(); ++occ) {
      pick -= occ_weights[occ];
      if (pick <= 0.0) break;
    }
    std::string value;
    if (g.u01() >= 0.06) {
      double ne = 1.0 - sw_ness(p.lon, p.lat);
      double draw = g.u01();
      value = std::to_string(
          static_cast<int64_t>(20000.0 + draw * draw * 1500000.0 * (0.2 + 0.8 * ne)));
    }
    int64_t day = static_cast<int64_t>(g.u01() * 2555.0);
    out += std::string(buf) + "," + innodex::csv::format_double(p.lon) + "," +
           innodex::csv::format_double(p.lat) + "," + occupancies[occ] + "," + value + "," +
           format_date(day) + "\n";
  }
  write_file(g_root / "fixtures/demo_city/permits.csv", out);
}

void write_registry_jsonl(const ZoneSet& zs) {
  SplitMix64 g = keyed_rng("registry");
  std::string out;
  for (int i = 1; i <= 12; ++i) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "CB%03d", i);
    GeoPoint p = draw_poi_point(g, zs, /*allow_unassigned=*/false);
    ordered_json j;
    j["source"] = "registry";
    j["place_id"] = buf;
    j["name"] = "Venture " + std::string(buf);
    j["lon"] = p.lon;
    j["lat"] = p.lat;
    j["rating"] = nullptr;
    j["rating_count"] = 0;
    j["matched_terms"] = {"registry_export"};
    out += j.dump() + "\n";
  }
  write_file(g_root / "fixtures/demo_city/registry.jsonl", out);
}

void write_config_json() {
  ordered_json cfg;
  cfg["zones_path"] = "zones.geojson";
  cfg["tracts_path"] = "tracts.geojson";
  cfg["census_path"] = "census.csv";
  cfg["permits_path"] = "permits.csv";
  cfg["registry_path"] = "registry.jsonl";
  cfg["cassette_dir"] = "cassettes";
  cfg["output_dir"] = "out";
  cfg["random_seed"] = 20260815;
  cfg["k_classes"] = 5;
  cfg["crosswalk_samples"] = 2000;
  cfg["region"] = {{"min_lon", kLonMin},
                   {"min_lat", kLatMin},
                   {"max_lon", kLonMax},
                   {"max_lat", kLatMax}};
  cfg["sources"] = {{"keyword_search", {{"mode", "replay"}, {"rate_limit_rps", 2.0}}},
                    {"tag_query", {{"mode", "replay"}, {"rate_limit_rps", 2.0}}},
                    {"jobs", {{"mode", "replay"}, {"rate_limit_rps", 2.0}}}};
  cfg["render_variables"] = {"location_count", "vacancy_rate", "pct_white"};
  write_file(g_root / "fixtures/demo_city/config.json", cfg.dump(2) + "\n");
}

// Small standalone cassettes for unit tests, over their own region.
void write_unit_cassettes() {
  BoundingBox region{-71.20, 42.20, -70.90, 42.45};
  std::filesystem::path dir = g_root / "fixtures/unit/cassettes";

  ordered_json incubator;
  incubator["results"] = ordered_json::array();
  const struct {
    const char* id;
    double lon, lat;
    double rating;
    bool has_rating;
    int64_t count;
  } kIncubator[] = {
      {"F001", -71.05, 42.35, 4.0, true, 10},  {"F002", -71.06, 42.36, 5.0, true, 30},
      {"F003", -71.10, 42.30, 3.5, true, 4},   {"F004", -71.12, 42.31, 4.8, true, 120},
      {"F005", -71.02, 42.40, 3.9, true, 57},  {"F006", -70.95, 42.22, 4.2, true, 8},
      {"F007", -71.08, 42.33, 4.5, true, 0},
  };
  for (const auto& r : kIncubator) {
    ordered_json item;
    item["place_id"] = r.id;
    item["name"] = std::string("Fixture ") + r.id;
    item["lon"] = r.lon;
    item["lat"] = r.lat;
    item["rating"] = r.has_rating ? ordered_json(r.rating) : ordered_json(nullptr);
    item["rating_count"] = r.count;
    incubator["results"].push_back(std::move(item));
  }
  write_file(dir / cassette_file("keyword_search", "incubator", region),
             incubator.dump() + "\n");
  write_file(dir / cassette_file("keyword_search", "clustering", region),
             std::string("{\"results\":[]}\n"));

  ordered_json coworking;
  coworking["results"] = ordered_json::array();
  for (int i = 1; i <= 3; ++i) {
    ordered_json item;
    char buf[8];
    std::snprintf(buf, sizeof buf, "T%03d", i);
    item["place_id"] = buf;
    item["name"] = std::string("Space ") + buf;
    item["lon"] = -71.00 - i * 0.01;
    item["lat"] = 42.30 + i * 0.01;
    coworking["results"].push_back(std::move(item));
  }
  write_file(dir / cassette_file("tag_query", "office=coworking", region),
             coworking.dump() + "\n");
  write_file(dir / cassette_file("tag_query", "company=startup", region),
             std::string("{\"results\":[]}\n"));
  // office=research has no cassette on purpose: replay mode must fail
  // with a configuration error.

  ordered_json jobs;
  jobs["postings"] = ordered_json::array();
  for (int i = 1; i <= 10; ++i) {
    ordered_json item;
    char buf[8];
    std::snprintf(buf, sizeof buf, "J%03d", i);
    item["posting_id"] = buf;
    item["title"] = "Role " + std::to_string(i);
    if (i == 2 || i == 5 || i == 8 || i == 10) {
      item["zip"] = nullptr;
    } else if (i == 7) {
      item["zip"] = "90210";
    } else {
      char zbuf[8];
      std::snprintf(zbuf, sizeof zbuf, "%05d", 2100 + i);
      item["zip"] = zbuf;
    }
    item["lon"] = nullptr;
    item["lat"] = nullptr;
    jobs["postings"].push_back(std::move(item));
  }
  write_file(dir / cassette_file("jobs", "technology", region), jobs.dump() + "\n");
}

// Mini render goldens: tiny enough to eyeball, stable enough to diff.
void write_render_goldens() {
  auto square = [](const char* zip, double lon0, double lat0) {
    ZipZone z;
    z.zip_id = zip;
    z.polygons.push_back(PolygonWithHoles{
        {{lon0, lat0}, {lon0 + 1, lat0}, {lon0 + 1, lat0 + 1}, {lon0, lat0 + 1}, {lon0, lat0}},
        {}});
    return z;
  };
  ZoneSet zs({square("00001", 0, 0), square("00002", 1, 0), square("00003", 0, 1)});
  std::map<std::string, std::optional<double>> values = {
      {"00001", 1.0}, {"00002", 5.0}, {"00003", std::nullopt}};
  innodex::render::ChoroplethOptions options;
  options.k_classes = 2;
  innodex::render::ChoroplethArtifacts art =
      innodex::render::render_choropleth(zs, "location_count", values, options);
  write_file(g_root / "tests/golden/mini_location.choropleth.geojson", art.geojson);
  write_file(g_root / "tests/golden/mini_location.map.svg", art.svg);

  innodex::stats::CorrelationMatrix m;
  m.columns = {"alpha", "beta", "gamma"};
  m.r = {{1.0, -0.52, std::nullopt}, {-0.52, 1.0, 0.97}, {std::nullopt, 0.97, 1.0}};
  m.n = {{12, 10, 2}, {10, 12, 11}, {2, 11, 12}};
  write_file(g_root / "tests/golden/mini_corr.svg", innodex::render::render_corr_heatmap(m));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <repo-root>\n", argv[0]);
    return 1;
  }
  g_root = argv[1];

  std::vector<ZipZone> zones = build_zones();
  write_zones_geojson(zones);
  ZoneSet zs(std::move(zones));

  std::vector<TractBox> tracts = build_tracts();
  write_tracts_geojson(tracts);
  write_census_csv(tracts);

  BoundingBox region{kLonMin, kLatMin, kLonMax, kLatMax};
  std::vector<Place> keyword_places = build_keyword_places(zs);
  write_keyword_cassettes(keyword_places, region);
  std::vector<Place> tag_places = build_tag_places(zs);
  write_tag_cassettes(tag_places, region);
  write_jobs_cassette(zs, region);
  write_permits_csv(zs);
  write_registry_jsonl(zs);
  write_config_json();
  write_unit_cassettes();
  write_render_goldens();

  std::printf("fixture written under %s\n", g_root.string().c_str());
  return 0;
}
