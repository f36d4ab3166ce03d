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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "innodex/errors.hpp"
#include "innodex/geo.hpp"
#include "innodex/geojson.hpp"
#include "innodex/rng.hpp"
#include "testutil.hpp"

using namespace innodex;
using geo::GeoPoint;
using geo::PolygonWithHoles;
using geo::Ring;
using geo::ZipZone;
using geo::ZoneSet;

namespace {

ZipZone square_zone(const std::string& zip, double lon0, double lat0, double side) {
  ZipZone z;
  z.zip_id = zip;
  z.polygons.push_back(PolygonWithHoles{{{lon0, lat0},
                                         {lon0 + side, lat0},
                                         {lon0 + side, lat0 + side},
                                         {lon0, lat0 + side},
                                         {lon0, lat0}},
                                        {}});
  return z;
}

Ring rotate_start(const Ring& ring, size_t k) {
  // Rotating a closed ring: drop the closing vertex, rotate, re-close.
  Ring open(ring.begin(), ring.end() - 1);
  std::rotate(open.begin(), open.begin() + static_cast<long>(k % open.size()), open.end());
  open.push_back(open.front());
  return open;
}

Ring reverse_ring(const Ring& ring) {
  Ring r(ring.rbegin(), ring.rend());
  return r;
}

/// Irregular star-shaped closed ring around (clon, clat).
Ring random_ring(SplitMix64& g, double clon, double clat, double scale, int n_vertices) {
  Ring ring;
  for (int i = 0; i < n_vertices; ++i) {
    double angle = 2.0 * std::numbers::pi * i / n_vertices;
    double radius = scale * (0.5 + 0.5 * g.u01());
    ring.push_back({clon + radius * std::cos(angle), clat + radius * std::sin(angle)});
  }
  ring.push_back(ring.front());
  return ring;
}

}  // namespace

TEST_CASE("area: hand-derived small square near the equator") {
  // 0.01 x 0.01 degrees at lat ~0: each side is 0.01 deg * (6371 km * pi/180)
  // = 1.11195 km, longitude barely shortened by cos(0.005 deg). The expected
  // value here is computed by hand from the sphere radius, not by calling
  // the code under test.
  ZipZone z = square_zone("00001", 0.0, 0.0, 0.01);
  double side_km = 0.01 * 6371.0 * std::numbers::pi / 180.0;
  double expected = side_km * side_km * std::cos(0.005 * std::numbers::pi / 180.0);
  double got = geo::polygon_area_km2(z);
  CHECK(got == doctest::Approx(expected).epsilon(1e-9));
  CHECK(std::abs(got - 1.2364) < 1e-3);  // magnitude pinned independently
}

TEST_CASE("area: longitude compression grows with latitude") {
  ZipZone equator = square_zone("00001", 10.0, 0.0, 0.01);
  ZipZone north = square_zone("00002", 10.0, 60.0, 0.01);
  double ratio = geo::polygon_area_km2(north) / geo::polygon_area_km2(equator);
  // cos(60.005 deg) / cos(0.005 deg) is almost exactly 1/2.
  CHECK(ratio == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("area: triangle is half its bounding square") {
  ZipZone square = square_zone("00001", 0.0, 0.0, 1.0);
  ZipZone tri;
  tri.zip_id = "00002";
  tri.polygons.push_back(PolygonWithHoles{{{0, 0}, {1, 0}, {0, 1}, {0, 0}}, {}});
  // The square's mean latitude (0.5) differs from the triangle's (1/3), so
  // compare the triangle against a hand-scaled half square at its own
  // reference latitude rather than naively halving.
  double side_km = geo::kKmPerDegree;
  double expected = 0.5 * side_km * side_km * std::cos((1.0 / 3.0) * std::numbers::pi / 180.0);
  CHECK(geo::polygon_area_km2(tri) == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("area: hole equal to the outer ring cancels to zero") {
  ZipZone z = square_zone("00001", 0.0, 0.0, 1.0);
  z.polygons[0].holes.push_back(z.polygons[0].outer);
  CHECK(geo::polygon_area_km2(z) == 0.0);
}

TEST_CASE("area: hole subtracts its own area") {
  ZipZone plain = square_zone("00001", 0.0, 0.0, 1.0);
  ZipZone holed = square_zone("00002", 0.0, 0.0, 1.0);
  holed.polygons[0].holes.push_back(
      Ring{{0.25, 0.25}, {0.75, 0.25}, {0.75, 0.75}, {0.25, 0.75}, {0.25, 0.25}});
  double whole = geo::polygon_area_km2(plain);
  double with_hole = geo::polygon_area_km2(holed);
  // The hole is a quarter of the outer square (up to the tiny cos(mean lat)
  // factor shared by both).
  CHECK(with_hole == doctest::Approx(whole * 0.75).epsilon(1e-9));
}

TEST_CASE("area: invariant under start-vertex rotation and orientation reversal") {
  SplitMix64 g(42);
  for (int trial = 0; trial < 50; ++trial) {
    ZipZone z;
    z.zip_id = "00001";
    z.polygons.push_back(
        PolygonWithHoles{random_ring(g, g.range(-70.0, 70.0), g.range(-60.0, 60.0), 0.1,
                                     3 + static_cast<int>(g.below(9))),
                         {}});
    double base = geo::polygon_area_km2(z);
    CHECK(base > 0.0);
    // Rotation reorders the shoelace terms; with coordinates up to ~70
    // degrees the cancellation pushes rounding noise to ~1e-11 relative.
    ZipZone rotated = z;
    rotated.polygons[0].outer = rotate_start(z.polygons[0].outer, 1 + g.below(5));
    CHECK(geo::polygon_area_km2(rotated) == doctest::Approx(base).epsilon(1e-9));
    ZipZone reversed = z;
    reversed.polygons[0].outer = reverse_ring(z.polygons[0].outer);
    CHECK(geo::polygon_area_km2(reversed) == doctest::Approx(base).epsilon(1e-9));
  }
}

TEST_CASE("validation: ring and zip invariants are enforced") {
  ZipZone open = square_zone("00001", 0.0, 0.0, 1.0);
  open.polygons[0].outer.pop_back();  // no longer closed (4 points, open)
  CHECK_THROWS_AS(geo::validate_zone(open), DataError);

  ZipZone tiny;
  tiny.zip_id = "00001";
  tiny.polygons.push_back(PolygonWithHoles{{{0, 0}, {1, 0}, {0, 0}}, {}});
  CHECK_THROWS_AS(geo::validate_zone(tiny), DataError);

  ZipZone bad_zip = square_zone("ABCDE", 0.0, 0.0, 1.0);
  CHECK_THROWS_AS(geo::validate_zone(bad_zip), DataError);
  ZipZone short_zip = square_zone("1234", 0.0, 0.0, 1.0);
  CHECK_THROWS_AS(geo::validate_zone(short_zip), DataError);

  ZipZone off_earth = square_zone("00001", 179.5, 0.0, 1.0);  // lon 180.5
  CHECK_THROWS_AS(geo::validate_zone(off_earth), DataError);

  ZipZone empty;
  empty.zip_id = "00001";
  CHECK_THROWS_AS(geo::validate_zone(empty), DataError);

  // Errors should name the offending zone.
  try {
    geo::validate_zone(open);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("00001") != std::string::npos);
  }
}

TEST_CASE("validation: ZoneSet rejects duplicates and degenerate zones") {
  CHECK_THROWS_AS(ZoneSet({square_zone("00001", 0, 0, 1), square_zone("00001", 2, 0, 1)}),
                  DataError);
  ZipZone degenerate;
  degenerate.zip_id = "00002";
  degenerate.polygons.push_back(PolygonWithHoles{{{0, 0}, {1, 1}, {2, 2}, {0, 0}}, {}});
  CHECK_THROWS_AS(ZoneSet({degenerate}), DataError);
}

TEST_CASE("containment: unit-square basics") {
  ZipZone z = square_zone("00001", 0.0, 0.0, 1.0);
  CHECK(geo::point_in_polygon({0.5, 0.5}, z));
  CHECK_FALSE(geo::point_in_polygon({2.0, 2.0}, z));
  // Boundary-inclusive rule, cross-checked against the winding oracle.
  GeoPoint edge{0.0, 0.5};
  CHECK(geo::point_in_polygon(edge, z));
  CHECK(testutil::oracle_contains(edge, z));
  for (const GeoPoint corner : {GeoPoint{0, 0}, GeoPoint{1, 0}, GeoPoint{1, 1}, GeoPoint{0, 1}}) {
    CHECK(geo::point_in_polygon(corner, z));
    CHECK(testutil::oracle_contains(corner, z));
  }
}

TEST_CASE("containment: holes excluded, hole boundary included") {
  ZipZone z = square_zone("00001", 0.0, 0.0, 1.0);
  z.polygons[0].holes.push_back(
      Ring{{0.25, 0.25}, {0.75, 0.25}, {0.75, 0.75}, {0.25, 0.75}, {0.25, 0.25}});
  CHECK_FALSE(geo::point_in_polygon({0.5, 0.5}, z));             // hole interior
  CHECK(geo::point_in_polygon({0.25, 0.5}, z));                  // hole border
  CHECK(geo::point_in_polygon({0.1, 0.1}, z));                   // annulus
  CHECK(testutil::oracle_contains({0.25, 0.5}, z));
  CHECK_FALSE(testutil::oracle_contains({0.5, 0.5}, z));
}

TEST_CASE("containment: agrees with winding oracle on random polygons and points") {
  SplitMix64 g(7);
  for (int trial = 0; trial < 40; ++trial) {
    ZipZone z;
    z.zip_id = "00001";
    z.polygons.push_back(
        PolygonWithHoles{random_ring(g, 0.0, 0.0, 1.0, 3 + static_cast<int>(g.below(10))), {}});
    for (int i = 0; i < 200; ++i) {
      GeoPoint p{g.range(-1.5, 1.5), g.range(-1.5, 1.5)};
      CHECK(geo::point_in_polygon(p, z) == testutil::oracle_contains(p, z));
    }
    // Vertices and edge midpoints are the adversarial cases. A midpoint of
    // a random-coordinate edge sits within an ulp of the segment, where two
    // different crossing predicates may legitimately disagree; demand
    // agreement only when the oracle is stable across a small neighborhood.
    const Ring& ring = z.polygons[0].outer;
    for (size_t i = 0; i + 1 < ring.size(); ++i) {
      CHECK(geo::point_in_polygon(ring[i], z));
      GeoPoint mid{(ring[i].lon + ring[i + 1].lon) / 2, (ring[i].lat + ring[i + 1].lat) / 2};
      bool o_mid = testutil::oracle_contains(mid, z);
      bool stable = true;
      const double kNudge = 1e-12;
      for (double dl : {-kNudge, kNudge}) {
        for (double dp : {-kNudge, kNudge}) {
          if (testutil::oracle_contains({mid.lon + dl, mid.lat + dp}, z) != o_mid) stable = false;
        }
      }
      if (stable) CHECK(geo::point_in_polygon(mid, z) == o_mid);
    }
  }
}

TEST_CASE("containment: invariant under ring-start rotation") {
  SplitMix64 g(11);
  ZipZone z;
  z.zip_id = "00001";
  z.polygons.push_back(PolygonWithHoles{random_ring(g, 0.0, 0.0, 1.0, 9), {}});
  for (int i = 0; i < 300; ++i) {
    GeoPoint p{g.range(-1.5, 1.5), g.range(-1.5, 1.5)};
    bool base = geo::point_in_polygon(p, z);
    for (size_t k = 1; k < 9; k += 3) {
      ZipZone rotated = z;
      rotated.polygons[0].outer = rotate_start(z.polygons[0].outer, k);
      CHECK(geo::point_in_polygon(p, rotated) == base);
    }
  }
}

TEST_CASE("assignment: interior, exterior, and the lexicographic tie-break") {
  // Deliberately registered in non-lexicographic order: the tie-break must
  // come from the zip ids, not from zone positions.
  ZoneSet zs({square_zone("02110", 1.0, 0.0, 1.0), square_zone("02109", 0.0, 0.0, 1.0)});
  CHECK(zs.assign({0.5, 0.5}) == "02109");
  CHECK(zs.assign({1.5, 0.5}) == "02110");
  CHECK_FALSE(zs.assign({5.0, 5.0}).has_value());
  // Shared edge lon=1: both zones contain it.
  CHECK(zs.assign({1.0, 0.5}) == "02109");
  // Shared corner.
  CHECK(zs.assign({1.0, 0.0}) == "02109");
  // Same inputs, same answer (pure function).
  CHECK(zs.assign({1.0, 0.5}) == "02109");
}

TEST_CASE("assignment: candidate index is a superset filter") {
  SplitMix64 g(13);
  std::vector<ZipZone> zones;
  for (int i = 0; i < 30; ++i) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%05d", 10000 + i);
    zones.push_back(square_zone(buf, g.range(-1.0, 1.0), g.range(-1.0, 1.0), g.range(0.05, 0.6)));
  }
  ZoneSet zs(zones);
  std::vector<int32_t> cand;
  for (int i = 0; i < 2000; ++i) {
    GeoPoint p{g.range(-1.2, 1.8), g.range(-1.2, 1.8)};
    zs.candidates(p, cand);
    std::set<int32_t> cset(cand.begin(), cand.end());
    for (size_t zi = 0; zi < zs.zones().size(); ++zi) {
      if (testutil::oracle_contains(p, zs.zones()[zi])) {
        CHECK(cset.count(static_cast<int32_t>(zi)) == 1);
      }
    }
  }
}

TEST_CASE("assignment: indexed result equals exhaustive scan on the city fixture") {
  ZoneSet zs(geo::load_zones_geojson(
      std::filesystem::path(INNODEX_FIXTURE_DIR) / "demo_city/zones.geojson"));
  CHECK(zs.size() == 35);
  SplitMix64 g(20260815);
  const geo::BoundingBox& b = zs.bounds();
  double pad_lon = (b.max_lon - b.min_lon) * 0.1;
  double pad_lat = (b.max_lat - b.min_lat) * 0.1;
  for (int i = 0; i < 2000; ++i) {
    GeoPoint p{g.range(b.min_lon - pad_lon, b.max_lon + pad_lon),
               g.range(b.min_lat - pad_lat, b.max_lat + pad_lat)};
    CHECK(zs.assign_index(p) == testutil::oracle_assign(p, zs));
  }
}

TEST_CASE("assignment: batch kernel matches serial reference bit for bit") {
  ZoneSet zs(geo::load_zones_geojson(
      std::filesystem::path(INNODEX_FIXTURE_DIR) / "demo_city/zones.geojson"));
  SplitMix64 g(99);
  std::vector<GeoPoint> pts(20000);
  const geo::BoundingBox& b = zs.bounds();
  for (GeoPoint& p : pts) {
    p = {g.range(b.min_lon - 0.02, b.max_lon + 0.02), g.range(b.min_lat - 0.02, b.max_lat + 0.02)};
  }
  std::vector<int32_t> serial = geo::assign_zones_serial(zs, pts);
  std::vector<int32_t> parallel = geo::assign_zones(zs, pts);
  REQUIRE(serial.size() == pts.size());
  CHECK(serial == parallel);
  for (size_t i = 0; i < 500; ++i) {  // spot-check against the scalar path
    CHECK(serial[i] == zs.assign_index(pts[i]));
  }
}

TEST_CASE("geojson: fixture zones parse with ids, holes, and positive areas") {
  ZoneSet zs(geo::load_zones_geojson(
      std::filesystem::path(INNODEX_FIXTURE_DIR) / "demo_city/zones.geojson"));
  REQUIRE(zs.size() == 35);
  std::set<std::string> ids;
  size_t holed = 0;
  for (const ZipZone& z : zs.zones()) {
    ids.insert(z.zip_id);
    CHECK(z.area_km2 > 0.0);
    CHECK(z.zip_id.size() == 5);
    for (const auto& poly : z.polygons) holed += poly.holes.size();
  }
  CHECK(ids.size() == 35);
  CHECK(*ids.begin() == "02101");
  CHECK(*ids.rbegin() == "02135");
  CHECK(holed == 1);
}

TEST_CASE("geojson: numeric zip properties are zero-padded, errors carry context") {
  testutil::TempDir tmp("geojson");
  auto path = tmp.path() / "zones.geojson";
  testutil::write_text(path, R"({"type":"FeatureCollection","features":[
    {"type":"Feature","properties":{"ZIP5":2101},
     "geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,1],[0,0]]]}}]})");
  ZoneSet zs(geo::load_zones_geojson(path));
  REQUIRE(zs.size() == 1);
  CHECK(zs.zones()[0].zip_id == "02101");

  auto bad = tmp.path() / "bad.geojson";
  testutil::write_text(bad, R"({"type":"FeatureCollection","features":[
    {"type":"Feature","properties":{"WRONG":"02101"},
     "geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,1],[0,0]]]}}]})");
  CHECK_THROWS_AS(geo::load_zones_geojson(bad), DataError);
  try {
    geo::load_zones_geojson(bad);
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("feature 0") != std::string::npos);
  }
}

TEST_CASE("geojson: named multipolygons load tract ids verbatim") {
  std::vector<geo::NamedMultiPolygon> tracts = geo::load_named_polygons(
      std::filesystem::path(INNODEX_FIXTURE_DIR) / "demo_city/tracts.geojson");
  CHECK(tracts.size() == 61);
  std::set<std::string> ids;
  for (const auto& t : tracts) {
    ids.insert(t.id);
    CHECK_FALSE(t.bbox.degenerate());
  }
  CHECK(ids.count("25025999900") == 1);
  CHECK(ids.size() == 61);
}

TEST_CASE("distance: equirectangular scale") {
  // 0.01 degrees of latitude is 0.01 * 111.195 km regardless of longitude.
  double d = geo::distance_m({-71.0, 42.0}, {-71.0, 42.01});
  CHECK(d == doctest::Approx(0.01 * geo::kKmPerDegree * 1000.0).epsilon(1e-9));
  // A degree of longitude shrinks with cos(latitude).
  double dlon = geo::distance_m({-71.0, 42.0}, {-70.99, 42.0});
  CHECK(dlon < d);
  CHECK(dlon == doctest::Approx(d * std::cos(42.0 * std::numbers::pi / 180.0)).epsilon(1e-3));
}
