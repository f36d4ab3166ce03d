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

// Times each parallel kernel against its serial reference on synthetic
// inputs and verifies the outputs match bit for bit. The parallel paths
// must be drop-in replacements, not approximations.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include <omp.h>

#include "innodex/geo.hpp"
#include "innodex/rng.hpp"
#include "innodex/stats.hpp"
#include "innodex/tabular.hpp"

namespace {

using innodex::geo::GeoPoint;
using innodex::geo::PolygonWithHoles;
using innodex::geo::ZipZone;
using innodex::geo::ZoneSet;
using innodex::SplitMix64;

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

ZoneSet make_grid_zones(int cols, int rows) {
  std::vector<ZipZone> zones;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "%05d", 10000 + r * cols + c);
      double lon0 = -71.5 + 0.01 * c, lat0 = 42.0 + 0.01 * r;
      ZipZone z;
      z.zip_id = buf;
      z.polygons.push_back(PolygonWithHoles{{{lon0, lat0},
                                             {lon0 + 0.01, lat0},
                                             {lon0 + 0.01, lat0 + 0.01},
                                             {lon0, lat0 + 0.01},
                                             {lon0, lat0}},
                                            {}});
      zones.push_back(std::move(z));
    }
  }
  return ZoneSet(std::move(zones));
}

void bench_assign(const ZoneSet& zs) {
  SplitMix64 g(7);
  std::vector<GeoPoint> pts(400000);
  for (GeoPoint& p : pts) {
    p.lon = -71.55 + g.u01() * 0.45;
    p.lat = 41.95 + g.u01() * 0.35;
  }
  double t0 = now_s();
  std::vector<int32_t> serial = innodex::geo::assign_zones_serial(zs, pts);
  double t1 = now_s();
  std::vector<int32_t> parallel = innodex::geo::assign_zones(zs, pts);
  double t2 = now_s();
  bool ok = serial == parallel;
  std::printf("assign_zones        serial %8.3fs  parallel %8.3fs  speedup %5.2fx  %s\n",
              t1 - t0, t2 - t1, (t1 - t0) / (t2 - t1), ok ? "exact" : "MISMATCH");
  if (!ok) std::exit(1);
}

void bench_crosswalk(const ZoneSet& zs) {
  std::vector<innodex::geo::NamedMultiPolygon> tracts;
  SplitMix64 g(11);
  for (int i = 0; i < 600; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "25025%06d", i + 1);
    double lon0 = -71.52 + g.u01() * 0.40, lat0 = 41.98 + g.u01() * 0.30;
    innodex::geo::NamedMultiPolygon t;
    t.id = buf;
    t.polygons.push_back(PolygonWithHoles{{{lon0, lat0},
                                           {lon0 + 0.02, lat0},
                                           {lon0 + 0.02, lat0 + 0.02},
                                           {lon0, lat0 + 0.02},
                                           {lon0, lat0}},
                                          {}});
    t.bbox = innodex::geo::multipolygon_bounds(t.polygons);
    tracts.push_back(std::move(t));
  }
  double t0 = now_s();
  innodex::tabular::CrosswalkResult serial =
      innodex::tabular::build_crosswalk_serial(tracts, zs, 4000, 99);
  double t1 = now_s();
  innodex::tabular::CrosswalkResult parallel =
      innodex::tabular::build_crosswalk(tracts, zs, 4000, 99);
  double t2 = now_s();
  bool ok = serial.entries.size() == parallel.entries.size() &&
            serial.unassigned_tracts == parallel.unassigned_tracts &&
            serial.partial_tracts == parallel.partial_tracts;
  for (size_t i = 0; ok && i < serial.entries.size(); ++i) {
    const auto& a = serial.entries[i];
    const auto& b = parallel.entries[i];
    ok = a.tract_id == b.tract_id && a.zip_id == b.zip_id && a.weight == b.weight;
  }
  std::printf("build_crosswalk     serial %8.3fs  parallel %8.3fs  speedup %5.2fx  %s\n",
              t1 - t0, t2 - t1, (t1 - t0) / (t2 - t1), ok ? "exact" : "MISMATCH");
  if (!ok) std::exit(1);
}

void bench_correlation() {
  SplitMix64 g(13);
  size_t cols = 48, rows = 20000;
  std::vector<innodex::stats::Column> data(cols, innodex::stats::Column(rows));
  std::vector<std::string> names(cols);
  for (size_t j = 0; j < cols; ++j) {
    names[j] = "col" + std::to_string(j);
    for (size_t i = 0; i < rows; ++i) {
      if (g.u01() < 0.05) continue;  // leave a null
      data[j][i] = g.u01() * 10.0 + static_cast<double>(j);
    }
  }
  double t0 = now_s();
  innodex::stats::CorrelationMatrix serial =
      innodex::stats::correlation_matrix_serial(names, data);
  double t1 = now_s();
  innodex::stats::CorrelationMatrix parallel = innodex::stats::correlation_matrix(names, data);
  double t2 = now_s();
  bool ok = serial.r == parallel.r && serial.n == parallel.n;
  std::printf("correlation_matrix  serial %8.3fs  parallel %8.3fs  speedup %5.2fx  %s\n",
              t1 - t0, t2 - t1, (t1 - t0) / (t2 - t1), ok ? "exact" : "MISMATCH");
  if (!ok) std::exit(1);
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  ZoneSet zs = make_grid_zones(40, 30);
  bench_assign(zs);
  bench_crosswalk(zs);
  bench_correlation();
  return 0;
}
