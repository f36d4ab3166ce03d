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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "innodex/geo.hpp"
#include "innodex/stats.hpp"

namespace innodex::render {

/// Empirical quantile breakpoints at 1/k .. (k-1)/k (linear interpolation
/// between order statistics). Nulls are ignored; duplicate breakpoints and
/// breakpoints at or above the maximum collapse away, so the result is
/// strictly increasing and every class is reachable. Throws ConfigError on
/// k < 2, DataError when every value is null.
std::vector<double> quantile_classes(const stats::Column& values, int k);

/// Class index of v: the number of breakpoints strictly below it. Monotone
/// in v; values on a breakpoint fall in the lower class.
int class_of(double v, const std::vector<double>& breakpoints);

/// Light-to-dark sequential fill for class cls of n_classes; the single
/// class of a collapsed scale renders full dark.
std::string sequential_color(int cls, int n_classes);

/// Diverging fill anchored at 0: blue for r=-1, neutral at 0, red for r=+1.
std::string diverging_color(double r);

struct ChoroplethOptions {
  int k_classes = 5;
  // Extra per-zone circle whose area scales with the value, matching the
  // "size indicates level" encoding some maps use. Off by default.
  bool circle_overlay = false;
};

struct ChoroplethArtifacts {
  std::string geojson;
  std::string svg;
};

/// Choropleth of one variable over the zone set, byte-deterministic for
/// fixed inputs. Zips missing from `values` or carrying null render as
/// hatched no-data zones. The GeoJSON mirrors per-zone {value, class}
/// properties; the SVG is a fixed 1000x1000 canvas with an equirectangular
/// fit of the zone-set bounds and a legend of class ranges. Throws
/// DataError when `values` names a zip outside the zone set.
ChoroplethArtifacts render_choropleth(const geo::ZoneSet& zs, const std::string& variable,
                                      const std::map<std::string, std::optional<double>>& values,
                                      const ChoroplethOptions& options = {});

/// Correlation heatmap: square grid in matrix order, diverging palette
/// anchored at r=0, cells annotated to 2 decimals, null cells grey and
/// unannotated. Byte-deterministic.
std::string render_corr_heatmap(const stats::CorrelationMatrix& m);

}  // namespace innodex::render
