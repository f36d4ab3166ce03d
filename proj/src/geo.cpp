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

#include "innodex/geo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "innodex/errors.hpp"

namespace innodex::geo {

bool is_valid(const GeoPoint& p) {
  return std::isfinite(p.lon) && std::isfinite(p.lat) && p.lon >= -180.0 && p.lon <= 180.0 &&
         p.lat >= -90.0 && p.lat <= 90.0;
}

void BoundingBox::expand(const GeoPoint& p) {
  min_lon = std::min(min_lon, p.lon);
  min_lat = std::min(min_lat, p.lat);
  max_lon = std::max(max_lon, p.lon);
  max_lat = std::max(max_lat, p.lat);
}

void BoundingBox::expand(const BoundingBox& other) {
  if (other.empty()) return;
  min_lon = std::min(min_lon, other.min_lon);
  min_lat = std::min(min_lat, other.min_lat);
  max_lon = std::max(max_lon, other.max_lon);
  max_lat = std::max(max_lat, other.max_lat);
}

bool BoundingBox::contains(const GeoPoint& p) const {
  return p.lon >= min_lon && p.lon <= max_lon && p.lat >= min_lat && p.lat <= max_lat;
}

double distance_m(const GeoPoint& a, const GeoPoint& b) {
  double mean_lat = (a.lat + b.lat) * 0.5 * std::numbers::pi / 180.0;
  double dx = (a.lon - b.lon) * std::cos(mean_lat);
  double dy = a.lat - b.lat;
  return std::sqrt(dx * dx + dy * dy) * kKmPerDegree * 1000.0;
}

namespace {

// Exact on-segment test: zero cross product plus bbox containment, all in
// exact double comparisons. No epsilon; boundary means boundary.
bool on_segment(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) {
  double cross = (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
  if (cross != 0.0) return false;
  return p.lon >= std::min(a.lon, b.lon) && p.lon <= std::max(a.lon, b.lon) &&
         p.lat >= std::min(a.lat, b.lat) && p.lat <= std::max(a.lat, b.lat);
}

// Even-odd crossing count for the strict interior. Half-open rule on the
// vertex latitudes keeps vertices from double-counting.
bool ray_crossings_odd(const GeoPoint& p, const Ring& ring) {
  bool inside = false;
  size_t n = ring.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const GeoPoint& a = ring[i];
    const GeoPoint& b = ring[j];
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      double x_cross = (b.lon - a.lon) * (p.lat - a.lat) / (b.lat - a.lat) + a.lon;
      if (p.lon < x_cross) inside = !inside;
    }
  }
  return inside;
}

bool ring_contains(const GeoPoint& p, const Ring& ring) {
  if (point_on_ring(p, ring)) return true;
  return ray_crossings_odd(p, ring);
}

}  // namespace

bool point_on_ring(const GeoPoint& p, const Ring& ring) {
  for (size_t i = 0; i + 1 < ring.size(); ++i) {
    if (on_segment(p, ring[i], ring[i + 1])) return true;
  }
  return false;
}

bool multipolygon_contains(const GeoPoint& p, std::span<const PolygonWithHoles> polygons) {
  for (const PolygonWithHoles& poly : polygons) {
    if (!ring_contains(p, poly.outer)) continue;
    bool in_hole_interior = false;
    for (const Ring& hole : poly.holes) {
      // A point on the hole's boundary still belongs to the shape.
      if (point_on_ring(p, hole)) return true;
      if (ray_crossings_odd(p, hole)) {
        in_hole_interior = true;
        break;
      }
    }
    if (!in_hole_interior) return true;
  }
  return false;
}

BoundingBox multipolygon_bounds(std::span<const PolygonWithHoles> polygons) {
  BoundingBox box;
  for (const PolygonWithHoles& poly : polygons) {
    for (const GeoPoint& p : poly.outer) box.expand(p);
  }
  return box;
}

namespace {

void validate_ring(const Ring& ring, const std::string& zone_id, const char* kind) {
  if (ring.size() < 4) {
    throw DataError("zone " + zone_id + ": " + kind + " ring has " +
                    std::to_string(ring.size()) + " points, need at least 4");
  }
  if (!(ring.front() == ring.back())) {
    throw DataError("zone " + zone_id + ": " + kind + " ring is not closed");
  }
  for (const GeoPoint& p : ring) {
    if (!is_valid(p)) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "(%g, %g)", p.lon, p.lat);
      throw DataError("zone " + zone_id + ": invalid coordinate " + buf);
    }
  }
}

}  // namespace

void validate_zone(const ZipZone& zone) {
  if (zone.zip_id.size() != 5 ||
      !std::all_of(zone.zip_id.begin(), zone.zip_id.end(),
                   [](unsigned char c) { return c >= '0' && c <= '9'; })) {
    throw DataError("zone '" + zone.zip_id + "': zip_id is not a 5-digit string");
  }
  if (zone.polygons.empty()) {
    throw DataError("zone " + zone.zip_id + ": no polygons");
  }
  for (const PolygonWithHoles& poly : zone.polygons) {
    validate_ring(poly.outer, zone.zip_id, "outer");
    for (const Ring& hole : poly.holes) validate_ring(hole, zone.zip_id, "hole");
  }
}

namespace {

// Shoelace on the plane (lon·cos(lat0), lat), absolute value, in km².
double ring_area_km2(const Ring& ring, double cos_lat0) {
  double acc = 0.0;
  for (size_t i = 0; i + 1 < ring.size(); ++i) {
    double x0 = ring[i].lon * cos_lat0;
    double y0 = ring[i].lat;
    double x1 = ring[i + 1].lon * cos_lat0;
    double y1 = ring[i + 1].lat;
    acc += x0 * y1 - x1 * y0;
  }
  return std::abs(acc) * 0.5 * kKmPerDegree * kKmPerDegree;
}

}  // namespace

double polygon_area_km2(const ZipZone& zone) {
  validate_zone(zone);
  // Reference latitude: mean over outer-ring vertices, skipping each ring's
  // duplicated closing point so it is not weighted twice.
  double lat_sum = 0.0;
  size_t lat_n = 0;
  for (const PolygonWithHoles& poly : zone.polygons) {
    for (size_t i = 0; i + 1 < poly.outer.size(); ++i) {
      lat_sum += poly.outer[i].lat;
      ++lat_n;
    }
  }
  double cos_lat0 = std::cos((lat_sum / static_cast<double>(lat_n)) * std::numbers::pi / 180.0);
  double total = 0.0;
  for (const PolygonWithHoles& poly : zone.polygons) {
    double a = ring_area_km2(poly.outer, cos_lat0);
    for (const Ring& hole : poly.holes) a -= ring_area_km2(hole, cos_lat0);
    total += std::max(0.0, a);
  }
  return total;
}

bool point_in_polygon(const GeoPoint& p, const ZipZone& zone) {
  if (!is_valid(p)) return false;
  return multipolygon_contains(p, zone.polygons);
}

ZoneSet::ZoneSet(std::vector<ZipZone> zones) : zones_(std::move(zones)) {
  for (ZipZone& z : zones_) {
    validate_zone(z);
    z.area_km2 = polygon_area_km2(z);
    if (z.area_km2 <= 0.0) {
      throw DataError("zone " + z.zip_id + ": degenerate polygon, area is 0");
    }
    z.bbox = multipolygon_bounds(z.polygons);
    bounds_.expand(z.bbox);
  }
  for (size_t i = 0; i < zones_.size(); ++i) {
    for (size_t j = i + 1; j < zones_.size(); ++j) {
      if (zones_[i].zip_id == zones_[j].zip_id) {
        throw DataError("duplicate zip_id " + zones_[i].zip_id);
      }
    }
  }
  if (zones_.empty() || bounds_.degenerate()) return;

  // Roughly 4 cells per zone; clamp keeps tiny and huge inputs sane.
  int n = static_cast<int>(std::ceil(std::sqrt(4.0 * static_cast<double>(zones_.size()))));
  grid_nx_ = std::clamp(n, 8, 256);
  grid_ny_ = grid_nx_;
  cell_w_ = (bounds_.max_lon - bounds_.min_lon) / grid_nx_;
  cell_h_ = (bounds_.max_lat - bounds_.min_lat) / grid_ny_;
  cells_.assign(static_cast<size_t>(grid_nx_) * grid_ny_, {});

  auto col_of = [&](double lon) {
    return std::clamp(static_cast<int>((lon - bounds_.min_lon) / cell_w_), 0, grid_nx_ - 1);
  };
  auto row_of = [&](double lat) {
    return std::clamp(static_cast<int>((lat - bounds_.min_lat) / cell_h_), 0, grid_ny_ - 1);
  };
  for (size_t zi = 0; zi < zones_.size(); ++zi) {
    const BoundingBox& b = zones_[zi].bbox;
    int c0 = col_of(b.min_lon), c1 = col_of(b.max_lon);
    int r0 = row_of(b.min_lat), r1 = row_of(b.max_lat);
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) {
        cells_[static_cast<size_t>(r) * grid_nx_ + c].push_back(static_cast<int32_t>(zi));
      }
    }
  }
}

void ZoneSet::candidates(const GeoPoint& p, std::vector<int32_t>& out) const {
  out.clear();
  if (cells_.empty() || !bounds_.contains(p)) return;
  int c = std::clamp(static_cast<int>((p.lon - bounds_.min_lon) / cell_w_), 0, grid_nx_ - 1);
  int r = std::clamp(static_cast<int>((p.lat - bounds_.min_lat) / cell_h_), 0, grid_ny_ - 1);
  for (int32_t zi : cells_[static_cast<size_t>(r) * grid_nx_ + c]) {
    if (zones_[zi].bbox.contains(p)) out.push_back(zi);
  }
}

int32_t ZoneSet::assign_index(const GeoPoint& p) const {
  if (!is_valid(p)) return -1;
  thread_local std::vector<int32_t> cand;
  candidates(p, cand);
  int32_t best = -1;
  for (int32_t zi : cand) {
    if (!point_in_polygon(p, zones_[zi])) continue;
    if (best < 0 || zones_[zi].zip_id < zones_[best].zip_id) best = zi;
  }
  return best;
}

std::optional<std::string> ZoneSet::assign(const GeoPoint& p) const {
  int32_t idx = assign_index(p);
  if (idx < 0) return std::nullopt;
  return zones_[idx].zip_id;
}

int32_t ZoneSet::find_zip(std::string_view zip_id) const {
  for (size_t i = 0; i < zones_.size(); ++i) {
    if (zones_[i].zip_id == zip_id) return static_cast<int32_t>(i);
  }
  return -1;
}

std::vector<int32_t> assign_zones_serial(const ZoneSet& zs, std::span<const GeoPoint> points) {
  std::vector<int32_t> out(points.size(), -1);
  for (size_t i = 0; i < points.size(); ++i) {
    out[i] = zs.assign_index(points[i]);
  }
  return out;
}

std::vector<int32_t> assign_zones(const ZoneSet& zs, std::span<const GeoPoint> points) {
  std::vector<int32_t> out(points.size(), -1);
  int64_t n = static_cast<int64_t>(points.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (int64_t i = 0; i < n; ++i) {
    out[i] = zs.assign_index(points[i]);
  }
  return out;
}

}  // namespace innodex::geo
