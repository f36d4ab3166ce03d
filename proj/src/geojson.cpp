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

#include "innodex/geojson.hpp"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "innodex/errors.hpp"

namespace innodex::geo {

namespace {

using nlohmann::json;

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("geojson: cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError("geojson: " + path.string() + ": " + e.what());
  }
}

Ring parse_ring(const json& coords, const std::string& where) {
  if (!coords.is_array()) throw DataError(where + ": ring is not an array");
  Ring ring;
  ring.reserve(coords.size());
  for (const json& pos : coords) {
    if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number()) {
      throw DataError(where + ": position is not [lon, lat]");
    }
    ring.push_back({pos[0].get<double>(), pos[1].get<double>()});
  }
  return ring;
}

PolygonWithHoles parse_polygon(const json& coords, const std::string& where) {
  if (!coords.is_array() || coords.empty()) {
    throw DataError(where + ": polygon has no rings");
  }
  PolygonWithHoles poly;
  poly.outer = parse_ring(coords[0], where);
  for (size_t i = 1; i < coords.size(); ++i) {
    poly.holes.push_back(parse_ring(coords[i], where));
  }
  return poly;
}

std::vector<PolygonWithHoles> parse_geometry(const json& geom, const std::string& where) {
  if (!geom.is_object() || !geom.contains("type") || !geom.contains("coordinates")) {
    throw DataError(where + ": feature has no usable geometry");
  }
  const std::string type = geom["type"].get<std::string>();
  std::vector<PolygonWithHoles> polys;
  if (type == "Polygon") {
    polys.push_back(parse_polygon(geom["coordinates"], where));
  } else if (type == "MultiPolygon") {
    for (const json& p : geom["coordinates"]) {
      polys.push_back(parse_polygon(p, where));
    }
  } else {
    throw DataError(where + ": unsupported geometry type '" + type + "'");
  }
  return polys;
}

std::string id_from_property(const json& props, const std::string& key, bool zero_pad,
                             const std::string& where) {
  if (!props.is_object() || !props.contains(key)) {
    throw DataError(where + ": missing property '" + key + "'");
  }
  const json& v = props[key];
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) {
    // Shapefile conversions often strip leading zeros from zips.
    char buf[32];
    if (zero_pad) {
      std::snprintf(buf, sizeof buf, "%05lld", static_cast<long long>(v.get<int64_t>()));
    } else {
      std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v.get<int64_t>()));
    }
    return buf;
  }
  throw DataError(where + ": property '" + key + "' is neither string nor integer");
}

}  // namespace

std::vector<ZipZone> load_zones_geojson(const std::filesystem::path& path,
                                        const std::string& zip_property) {
  json doc = parse_file(path);
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features")) {
    throw DataError("geojson: " + path.string() + ": not a FeatureCollection");
  }
  std::vector<ZipZone> zones;
  size_t idx = 0;
  for (const json& feature : doc["features"]) {
    std::string where = path.filename().string() + " feature " + std::to_string(idx++);
    ZipZone z;
    z.zip_id = id_from_property(feature.value("properties", json::object()), zip_property,
                                /*zero_pad=*/true, where);
    z.polygons = parse_geometry(feature.value("geometry", json()), where + " (" + z.zip_id + ")");
    zones.push_back(std::move(z));
  }
  return zones;
}

std::vector<NamedMultiPolygon> load_named_polygons(const std::filesystem::path& path,
                                                   const std::string& id_property) {
  json doc = parse_file(path);
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features")) {
    throw DataError("geojson: " + path.string() + ": not a FeatureCollection");
  }
  std::vector<NamedMultiPolygon> out;
  size_t idx = 0;
  for (const json& feature : doc["features"]) {
    std::string where = path.filename().string() + " feature " + std::to_string(idx++);
    NamedMultiPolygon m;
    m.id = id_from_property(feature.value("properties", json::object()), id_property,
                            /*zero_pad=*/false, where);
    m.polygons = parse_geometry(feature.value("geometry", json()), where + " (" + m.id + ")");
    m.bbox = multipolygon_bounds(m.polygons);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace innodex::geo
