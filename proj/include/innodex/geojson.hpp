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

#include <filesystem>
#include <string>
#include <vector>

#include "innodex/geo.hpp"

namespace innodex::geo {

/// Reads a GeoJSON FeatureCollection of Polygon/MultiPolygon features into
/// zip zones. `zip_property` names the feature property carrying the zip
/// code; numeric values are zero-padded to 5 digits. Throws DataError on
/// malformed input.
std::vector<ZipZone> load_zones_geojson(const std::filesystem::path& path,
                                        const std::string& zip_property = "ZIP5");

/// Same reader for arbitrary named regions (census tracts and similar);
/// the id property is kept verbatim.
std::vector<NamedMultiPolygon> load_named_polygons(const std::filesystem::path& path,
                                                   const std::string& id_property = "GEOID");

}  // namespace innodex::geo
