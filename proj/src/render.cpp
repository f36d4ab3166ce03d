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

#include "innodex/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "innodex/errors.hpp"

namespace innodex::render {

namespace {

// All numeric output in the SVG goes through fixed-precision snprintf, so
// artifacts are byte-identical across platforms and runs.
#if defined(__GNUC__)
__attribute__((format(printf, 2, 3)))
#endif
void append_fmt(std::string& out, const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  int n = std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  if (n < 0 || static_cast<size_t>(n) >= sizeof buf) {
    throw DataError("svg: formatted chunk too long");
  }
  out.append(buf, static_cast<size_t>(n));
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct Rgb {
  int r, g, b;
};

std::string lerp_hex(Rgb a, Rgb b, double t) {
  auto ch = [&](int ca, int cb) {
    return static_cast<int>(static_cast<double>(ca) + (static_cast<double>(cb - ca)) * t + 0.5);
  };
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", ch(a.r, b.r), ch(a.g, b.g), ch(a.b, b.b));
  return buf;
}

constexpr Rgb kSeqLight{247, 251, 255};   // near-white blue
constexpr Rgb kSeqDark{8, 48, 107};       // deep blue
constexpr Rgb kDivNeg{33, 102, 172};      // blue at r=-1
constexpr Rgb kDivMid{247, 247, 247};     // neutral at r=0
constexpr Rgb kDivPos{178, 24, 43};       // red at r=+1

}  // namespace

std::vector<double> quantile_classes(const stats::Column& values, int k) {
  if (k < 2) {
    throw ConfigError("quantile classes: k must be at least 2, got " + std::to_string(k));
  }
  std::vector<double> v;
  v.reserve(values.size());
  for (const std::optional<double>& x : values) {
    if (x) v.push_back(*x);
  }
  if (v.empty()) {
    throw DataError("quantile classes: every value is null");
  }
  std::sort(v.begin(), v.end());
  double vmax = v.back();
  std::vector<double> breakpoints;
  for (int i = 1; i < k; ++i) {
    double h = static_cast<double>(v.size() - 1) * (static_cast<double>(i) / k);
    size_t lo = static_cast<size_t>(h);
    double q = v[lo];
    if (lo + 1 < v.size()) q += (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
    // A breakpoint at or above the max would strand an empty top class;
    // equal breakpoints mean the data cannot fill k classes.
    if (q >= vmax) continue;
    if (!breakpoints.empty() && q <= breakpoints.back()) continue;
    breakpoints.push_back(q);
  }
  return breakpoints;
}

int class_of(double v, const std::vector<double>& breakpoints) {
  return static_cast<int>(std::lower_bound(breakpoints.begin(), breakpoints.end(), v) -
                          breakpoints.begin());
}

std::string sequential_color(int cls, int n_classes) {
  double t = n_classes <= 1 ? 1.0 : static_cast<double>(cls) / static_cast<double>(n_classes - 1);
  return lerp_hex(kSeqLight, kSeqDark, t);
}

std::string diverging_color(double r) {
  r = std::clamp(r, -1.0, 1.0);
  if (r < 0.0) return lerp_hex(kDivMid, kDivNeg, -r);
  return lerp_hex(kDivMid, kDivPos, r);
}

namespace {

// Fixed canvas and map layout shared by every choropleth.
constexpr double kCanvas = 1000.0;
constexpr double kMapX0 = 20.0;
constexpr double kMapY0 = 50.0;
constexpr double kMapX1 = 980.0;
constexpr double kMapY1 = 850.0;
constexpr double kLegendY = 880.0;

struct Projection {
  double min_lon, max_lat, cos0, scale, off_x, off_y;

  double x(double lon) const { return off_x + (lon - min_lon) * cos0 * scale; }
  double y(double lat) const { return off_y + (max_lat - lat) * scale; }
};

Projection fit_projection(const geo::BoundingBox& bbox) {
  Projection p;
  p.min_lon = bbox.min_lon;
  p.max_lat = bbox.max_lat;
  double mid_lat = (bbox.min_lat + bbox.max_lat) * 0.5;
  p.cos0 = std::cos(mid_lat * std::numbers::pi / 180.0);
  double w = kMapX1 - kMapX0;
  double h = kMapY1 - kMapY0;
  double dlon = (bbox.max_lon - bbox.min_lon) * p.cos0;
  double dlat = bbox.max_lat - bbox.min_lat;
  p.scale = std::min(w / dlon, h / dlat);
  p.off_x = kMapX0 + (w - dlon * p.scale) * 0.5;
  p.off_y = kMapY0 + (h - dlat * p.scale) * 0.5;
  return p;
}

void append_ring_path(std::string& d, const geo::Ring& ring, const Projection& proj) {
  for (size_t i = 0; i + 1 < ring.size(); ++i) {
    append_fmt(d, "%s%.2f,%.2f", i == 0 ? "M" : "L", proj.x(ring[i].lon), proj.y(ring[i].lat));
  }
  d += "Z";
}

std::string zone_path(const geo::ZipZone& zone, const Projection& proj) {
  std::string d;
  for (const geo::PolygonWithHoles& poly : zone.polygons) {
    append_ring_path(d, poly.outer, proj);
    for (const geo::Ring& hole : poly.holes) append_ring_path(d, hole, proj);
  }
  return d;
}

}  // namespace

ChoroplethArtifacts render_choropleth(const geo::ZoneSet& zs, const std::string& variable,
                                      const std::map<std::string, std::optional<double>>& values,
                                      const ChoroplethOptions& options) {
  for (const auto& [zip_id, v] : values) {
    if (zs.find_zip(zip_id) < 0) {
      throw DataError("choropleth values name zip " + zip_id + ", which is not in the zone set");
    }
  }

  std::vector<int32_t> order(zs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int32_t>(i);
  std::sort(order.begin(), order.end(), [&](int32_t a, int32_t b) {
    return zs.zones()[a].zip_id < zs.zones()[b].zip_id;
  });

  stats::Column non_null;
  double vmin = 0.0, vmax = 0.0;
  bool any = false;
  auto value_of = [&](const std::string& zip_id) -> std::optional<double> {
    auto it = values.find(zip_id);
    return it == values.end() ? std::nullopt : it->second;
  };
  for (int32_t zi : order) {
    std::optional<double> v = value_of(zs.zones()[zi].zip_id);
    non_null.push_back(v);
    if (v) {
      vmin = any ? std::min(vmin, *v) : *v;
      vmax = any ? std::max(vmax, *v) : *v;
      any = true;
    }
  }
  std::vector<double> breakpoints;
  if (any) breakpoints = quantile_classes(non_null, options.k_classes);
  int n_classes = static_cast<int>(breakpoints.size()) + 1;

  // GeoJSON mirror: one feature per zone with the classed value attached.
  nlohmann::ordered_json features = nlohmann::ordered_json::array();
  for (int32_t zi : order) {
    const geo::ZipZone& zone = zs.zones()[zi];
    std::optional<double> v = value_of(zone.zip_id);
    nlohmann::ordered_json f;
    f["type"] = "Feature";
    f["properties"]["zip_id"] = zone.zip_id;
    f["properties"]["variable"] = variable;
    f["properties"]["value"] = v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
    f["properties"]["class"] = v ? nlohmann::ordered_json(class_of(*v, breakpoints))
                                 : nlohmann::ordered_json(nullptr);
    nlohmann::ordered_json polys = nlohmann::ordered_json::array();
    for (const geo::PolygonWithHoles& poly : zone.polygons) {
      nlohmann::ordered_json rings = nlohmann::ordered_json::array();
      auto ring_json = [](const geo::Ring& ring) {
        nlohmann::ordered_json out = nlohmann::ordered_json::array();
        for (const geo::GeoPoint& p : ring) out.push_back({p.lon, p.lat});
        return out;
      };
      rings.push_back(ring_json(poly.outer));
      for (const geo::Ring& hole : poly.holes) rings.push_back(ring_json(hole));
      polys.push_back(std::move(rings));
    }
    f["geometry"]["type"] = "MultiPolygon";
    f["geometry"]["coordinates"] = std::move(polys);
    features.push_back(std::move(f));
  }
  nlohmann::ordered_json doc;
  doc["type"] = "FeatureCollection";
  doc["features"] = std::move(features);

  ChoroplethArtifacts out;
  out.geojson = doc.dump() + "\n";

  // SVG map.
  Projection proj = fit_projection(zs.bounds());
  std::string& svg = out.svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  append_fmt(svg,
             "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
             "viewBox=\"0 0 %.0f %.0f\">\n",
             kCanvas, kCanvas, kCanvas, kCanvas);
  svg +=
      "<defs><pattern id=\"nodata\" width=\"8\" height=\"8\" patternUnits=\"userSpaceOnUse\" "
      "patternTransform=\"rotate(45)\"><rect width=\"8\" height=\"8\" fill=\"#e8e8e8\"/>"
      "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"8\" stroke=\"#9a9a9a\" stroke-width=\"2\"/>"
      "</pattern></defs>\n";
  svg += "<rect width=\"1000\" height=\"1000\" fill=\"#ffffff\"/>\n";
  append_fmt(svg,
             "<text x=\"20\" y=\"32\" font-family=\"sans-serif\" font-size=\"20\">%s</text>\n",
             xml_escape(variable).c_str());
  for (int32_t zi : order) {
    const geo::ZipZone& zone = zs.zones()[zi];
    std::optional<double> v = value_of(zone.zip_id);
    std::string fill =
        v ? sequential_color(class_of(*v, breakpoints), n_classes) : std::string("url(#nodata)");
    append_fmt(svg,
               "<path d=\"%s\" fill=\"%s\" fill-rule=\"evenodd\" stroke=\"#333333\" "
               "stroke-width=\"0.8\"><title>%s</title></path>\n",
               zone_path(zone, proj).c_str(), fill.c_str(), xml_escape(zone.zip_id).c_str());
  }
  if (options.circle_overlay && any && vmax > 0.0) {
    for (int32_t zi : order) {
      const geo::ZipZone& zone = zs.zones()[zi];
      std::optional<double> v = value_of(zone.zip_id);
      if (!v || *v <= 0.0) continue;
      double cx = proj.x((zone.bbox.min_lon + zone.bbox.max_lon) * 0.5);
      double cy = proj.y((zone.bbox.min_lat + zone.bbox.max_lat) * 0.5);
      // Area-proportional encoding: radius grows with the square root.
      double radius = 28.0 * std::sqrt(*v / vmax);
      append_fmt(svg,
                 "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"%.2f\" fill=\"#000000\" "
                 "fill-opacity=\"0.35\"/>\n",
                 cx, cy, radius);
    }
  }
  // Legend: one swatch per effective class with its value range.
  if (!any) {
    append_fmt(svg,
               "<text x=\"20\" y=\"%.0f\" font-family=\"sans-serif\" font-size=\"12\">"
               "no data</text>\n",
               kLegendY + 13.0);
  } else {
    double step = 950.0 / n_classes;
    double swatch_w = std::min(24.0, step - 8.0);
    for (int cls = 0; cls < n_classes; ++cls) {
      double lo = cls == 0 ? vmin : breakpoints[cls - 1];
      double hi = cls == n_classes - 1 ? vmax : breakpoints[cls];
      double x = 20.0 + step * cls;
      append_fmt(svg,
                 "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"16\" fill=\"%s\" "
                 "stroke=\"#333333\" stroke-width=\"0.5\"/>\n",
                 x, kLegendY, swatch_w, sequential_color(cls, n_classes).c_str());
      append_fmt(svg,
                 "<text x=\"%.2f\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"12\">"
                 "%.4g to %.4g</text>\n",
                 x + swatch_w + 6.0, kLegendY + 13.0, lo, hi);
    }
  }
  svg += "</svg>\n";
  return out;
}

std::string render_corr_heatmap(const stats::CorrelationMatrix& m) {
  size_t k = m.columns.size();
  if (k == 0 || m.r.size() != k || m.n.size() != k) {
    throw ConfigError("heatmap: malformed correlation matrix");
  }
  constexpr double kMargin = 240.0;
  constexpr double kArea = 740.0;
  double cell = kArea / static_cast<double>(k);
  double font = std::min(cell * 0.28, 14.0);

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg +=
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"1000\" "
      "viewBox=\"0 0 1000 1000\">\n";
  svg += "<rect width=\"1000\" height=\"1000\" fill=\"#ffffff\"/>\n";
  for (size_t j = 0; j < k; ++j) {
    double x = kMargin + (static_cast<double>(j) + 0.5) * cell;
    append_fmt(svg,
               "<text x=\"%.2f\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"12\" "
               "text-anchor=\"start\" transform=\"rotate(-45 %.2f %.2f)\">%s</text>\n",
               x, kMargin - 8.0, x, kMargin - 8.0, xml_escape(m.columns[j]).c_str());
  }
  for (size_t i = 0; i < k; ++i) {
    double y = kMargin + (static_cast<double>(i) + 0.5) * cell + 4.0;
    append_fmt(svg,
               "<text x=\"%.2f\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"12\" "
               "text-anchor=\"end\">%s</text>\n",
               kMargin - 8.0, y, xml_escape(m.columns[i]).c_str());
  }
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = 0; j < k; ++j) {
      double x = kMargin + static_cast<double>(j) * cell;
      double y = kMargin + static_cast<double>(i) * cell;
      const std::optional<double>& r = m.r[i][j];
      std::string fill = r ? diverging_color(*r) : std::string("#cccccc");
      append_fmt(svg,
                 "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"%s\" "
                 "stroke=\"#ffffff\" stroke-width=\"1\"/>\n",
                 x, y, cell, cell, fill.c_str());
      if (r) {
        const char* text_fill = std::abs(*r) > 0.6 ? "#ffffff" : "#111111";
        append_fmt(svg,
                   "<text x=\"%.2f\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"%.1f\" "
                   "text-anchor=\"middle\" fill=\"%s\">%.2f</text>\n",
                   x + cell * 0.5, y + cell * 0.5 + font * 0.35, font, text_fill, *r);
      }
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace innodex::render
