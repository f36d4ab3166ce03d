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
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace innodex::geo {

// Planar equirectangular approximation throughout: longitudes scaled by
// cos(reference latitude), one degree of latitude = kKmPerDegree. Fine at
// city scale and bit-reproducible, which geodesic libraries are not.
inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kKmPerDegree = kEarthRadiusKm * std::numbers::pi / 180.0;

struct GeoPoint {
  double lon = 0.0;
  double lat = 0.0;

  bool operator==(const GeoPoint&) const = default;
};

/// Finite and within [-180,180] x [-90,90].
bool is_valid(const GeoPoint& p);

struct BoundingBox {
  double min_lon = 180.0;
  double min_lat = 90.0;
  double max_lon = -180.0;
  double max_lat = -90.0;

  void expand(const GeoPoint& p);
  void expand(const BoundingBox& other);
  bool contains(const GeoPoint& p) const;
  bool empty() const { return min_lon > max_lon || min_lat > max_lat; }
  bool degenerate() const { return empty() || min_lon >= max_lon || min_lat >= max_lat; }
};

/// Approximate ground distance, equirectangular.
double distance_m(const GeoPoint& a, const GeoPoint& b);

// A ring is closed: first point equals last, at least 4 points total.
using Ring = std::vector<GeoPoint>;

struct PolygonWithHoles {
  Ring outer;
  std::vector<Ring> holes;
};

/// Boundary-inclusive containment in a multipolygon (hole boundaries are
/// part of the shape; hole interiors are not).
bool multipolygon_contains(const GeoPoint& p, std::span<const PolygonWithHoles> polygons);
BoundingBox multipolygon_bounds(std::span<const PolygonWithHoles> polygons);

/// Exact test for p lying on one of the ring's segments.
bool point_on_ring(const GeoPoint& p, const Ring& ring);

struct ZipZone {
  std::string zip_id;  // 5-digit string
  std::vector<PolygonWithHoles> polygons;
  double area_km2 = 0.0;  // derived, filled by ZoneSet construction
  BoundingBox bbox;       // derived
};

/// Ring/zip invariants; throws DataError naming the zone.
void validate_zone(const ZipZone& zone);

/// Shoelace area on the equirectangular plane centered at the zone's mean
/// latitude; outer rings minus holes, in km². Validates the zone first.
double polygon_area_km2(const ZipZone& zone);

/// Boundary-inclusive even-odd containment.
bool point_in_polygon(const GeoPoint& p, const ZipZone& zone);

// Arbitrary named multipolygon (census tracts and similar).
struct NamedMultiPolygon {
  std::string id;
  std::vector<PolygonWithHoles> polygons;
  BoundingBox bbox;
};

// Immutable zone collection with a uniform-grid candidate index. The index
// only prunes: candidates(p) is always a superset of the zones containing p.
// Safe for concurrent queries.
class ZoneSet {
 public:
  explicit ZoneSet(std::vector<ZipZone> zones);

  const std::vector<ZipZone>& zones() const { return zones_; }
  size_t size() const { return zones_.size(); }
  const BoundingBox& bounds() const { return bounds_; }

  /// Zone indices whose bbox may contain p.
  void candidates(const GeoPoint& p, std::vector<int32_t>& out) const;

  /// Index of the containing zone, ties broken toward the lexicographically
  /// smallest zip_id; -1 when no zone contains p.
  int32_t assign_index(const GeoPoint& p) const;

  /// zip_id of the containing zone, or nullopt.
  std::optional<std::string> assign(const GeoPoint& p) const;

  /// Index of a zip_id, or -1.
  int32_t find_zip(std::string_view zip_id) const;

 private:
  std::vector<ZipZone> zones_;
  BoundingBox bounds_;
  int grid_nx_ = 0;
  int grid_ny_ = 0;
  double cell_w_ = 0.0;
  double cell_h_ = 0.0;
  std::vector<std::vector<int32_t>> cells_;
};

// Batch spatial-join kernel. The OpenMP version is the production path;
// the serial version is the reference it is tested against. Both return
// one zone index per input point (-1 = unassigned) in input order.
std::vector<int32_t> assign_zones_serial(const ZoneSet& zs, std::span<const GeoPoint> points);
std::vector<int32_t> assign_zones(const ZoneSet& zs, std::span<const GeoPoint> points);

}  // namespace innodex::geo
