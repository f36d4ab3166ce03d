#!/usr/bin/env python3
# Copyright 2026 The innodex Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Independent audit of the demo_city fixture.

Recomputes every manifest count that tests/acceptance.cpp pins, using
shapely for the geometry and haversine distances instead of the pipeline's
own planar code. Prints one line per count plus an UNCERTAIN warning for
any tract or crosswalk weight close enough to the 1e-3 Monte Carlo
threshold that a 2,000-sample run could land on either side.

Usage: python3 tools/audit_fixture.py [fixtures/demo_city]
"""

import csv
import hashlib
import json
import math
import sys
from pathlib import Path

from shapely.geometry import Point, Polygon, MultiPolygon, shape
from shapely.ops import unary_union

WEIGHT_FLOOR = 1e-3
# Exact fractions inside this band can flip the 2,000-sample MC verdict.
UNCERTAIN_LO = 2e-4
UNCERTAIN_HI = 5e-3

# Built-in query lists, used whenever config.json leaves them unset. Kept in
# sync with the pipeline defaults by tests/test_poi.cpp.
DEFAULT_KEYWORDS = [
    "innovation hubs", "clustering", "innovation center", "startups",
    "innovation districts", "open innovation", "tech hub", "technology park",
    "incubator", "accelerators", "regional innovation", "co-working space",
]
DEFAULT_TAGS = ["company=startup", "office=coworking", "office=research"]


def haversine_m(lon1, lat1, lon2, lat2):
    r = 6371000.0
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp = p2 - p1
    dl = math.radians(lon2 - lon1)
    a = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2 * r * math.asin(math.sqrt(a))


def cassette_path(root, source, query, region):
    key = "%.6f,%.6f,%.6f,%.6f" % (
        region["min_lon"], region["min_lat"], region["max_lon"], region["max_lat"])
    digest = hashlib.sha256((source + "|" + query + "|" + key).encode()).hexdigest()
    return root / source / (digest + ".json")


def load_multipolygons(path, id_property):
    out = []
    doc = json.loads(Path(path).read_text())
    for feature in doc["features"]:
        geom = shape(feature["geometry"])
        if isinstance(geom, Polygon):
            geom = MultiPolygon([geom])
        out.append((feature["properties"][id_property], geom))
    return out


def dedupe_replay(batches):
    """Replays the pipeline's dedupe law: group by place id in fetch order,
    the representative is replaced only by a strictly larger rating_count,
    and a group warns when any member sits over 100 m from the current
    representative. Distances here are haversine, not the pipeline's planar
    approximation; the fixture keeps duplicates either well under or well
    over 100 m so both formulas agree."""
    groups = {}  # id -> [rep_record]
    order = []
    warned = set()
    for records in batches:
        for rec in records:
            pid = rec["place_id"]
            if pid not in groups:
                groups[pid] = rec
                order.append(pid)
                continue
            rep = groups[pid]
            d = haversine_m(rep["lon"], rep["lat"], rec["lon"], rec["lat"])
            if d > 100.0:
                warned.add(pid)
            if 80.0 < d < 125.0:
                print(f"UNCERTAIN: duplicate {pid} separated by {d:.1f} m, "
                      "near the 100 m warning threshold")
            if rec.get("rating_count", 0) > rep.get("rating_count", 0):
                groups[pid] = rec
    return [groups[pid] for pid in order], warned


def covered_by_any(point, zones):
    return any(z.covers(point) for _, z in zones)


def main():
    fixture = Path(sys.argv[1] if len(sys.argv) > 1 else "fixtures/demo_city")
    cfg = json.loads((fixture / "config.json").read_text())
    region = cfg["region"]
    cassettes = fixture / cfg.get("cassette_dir", "cassettes")

    zones = load_multipolygons(fixture / Path(cfg["zones_path"]).name,
                               cfg.get("zip_property", "ZIP5"))
    tracts = load_multipolygons(fixture / Path(cfg["tracts_path"]).name,
                                cfg.get("tract_id_property", "GEOID"))
    coverage = unary_union([g for _, g in zones])
    zone_ids = {zid for zid, _ in zones}
    counts = {"zones": len(zones), "tracts": len(tracts)}

    # --- keyword POIs ------------------------------------------------------
    batches = []
    raw_total = 0
    for term in cfg.get("keywords", DEFAULT_KEYWORDS):
        path = cassette_path(cassettes, "keyword_search", term, region)
        body = json.loads(path.read_text())
        batches.append(body["results"])
        raw_total += len(body["results"])
    keyword_records, kw_warned = dedupe_replay(batches)
    counts["keyword_records_raw"] = raw_total
    counts["keyword_records"] = len(keyword_records)
    counts["keyword_dedupe_warnings"] = len(kw_warned)
    counts["keyword_pois"] = len(keyword_records)
    unassigned = [r["place_id"] for r in keyword_records
                  if not covered_by_any(Point(r["lon"], r["lat"]), zones)]
    counts["keyword_pois_unassigned"] = len(unassigned)
    print("keyword POIs outside every zone:", sorted(unassigned))
    poi_zips = set()
    for rec in keyword_records:
        pt = Point(rec["lon"], rec["lat"])
        hits = sorted(zid for zid, g in zones if g.covers(pt))
        if hits:
            poi_zips.add(hits[0])
    print("zips with zero keyword POIs:", sorted(zone_ids - poi_zips))

    # --- tag POIs -----------------------------------------------------------
    batches = []
    raw_total = 0
    for tag in cfg.get("tags", DEFAULT_TAGS):
        path = cassette_path(cassettes, "tag_query", tag, region)
        body = json.loads(path.read_text())
        batches.append(body["results"])
        raw_total += len(body["results"])
    tag_records, tag_warned = dedupe_replay(batches)
    counts["tag_records_raw"] = raw_total
    counts["tag_records"] = len(tag_records)
    counts["tag_dedupe_warnings"] = len(tag_warned)
    counts["osm_pois"] = len(tag_records)
    counts["osm_pois_unassigned"] = sum(
        1 for r in tag_records if not covered_by_any(Point(r["lon"], r["lat"]), zones))
    osm_zips = set()
    for rec in tag_records:
        pt = Point(rec["lon"], rec["lat"])
        hits = sorted(zid for zid, g in zones if g.covers(pt))
        if hits:
            osm_zips.add(hits[0])
    print("zips with zero tag POIs:", sorted(zone_ids - osm_zips))

    # --- jobs ----------------------------------------------------------------
    body = json.loads(cassette_path(cassettes, "jobs", "technology", region).read_text())
    postings = body["postings"]
    counts["job_postings"] = len(postings)
    in_zips = unknown = no_zip = 0
    job_zips = set()
    for p in postings:
        z = p.get("zip")
        if not isinstance(z, str) or len(z) != 5 or not z.isdigit():
            no_zip += 1
        elif z in zone_ids:
            in_zips += 1
            job_zips.add(z)
        else:
            unknown += 1
    counts["job_postings_with_zip"] = in_zips + unknown
    counts["jobs_in_zips"] = in_zips
    counts["jobs_unknown_zip"] = unknown
    counts["jobs_no_zip"] = no_zip
    print("zips with zero job postings:", sorted(zone_ids - job_zips))

    # --- registry -------------------------------------------------------------
    registry = [json.loads(line)
                for line in (fixture / Path(cfg["registry_path"]).name)
                .read_text().splitlines() if line.strip()]
    counts["registry_records"] = len({r["place_id"] for r in registry})

    # --- permits ---------------------------------------------------------------
    with open(fixture / Path(cfg["permits_path"]).name, newline="") as fh:
        rows = list(csv.DictReader(fh))
    counts["permits_input"] = len(rows)
    kept = [r for r in rows if r["occupancy"].strip().lower() in ("commercial", "mixed")]
    counts["permits_kept"] = len(kept)
    counts["permits_unassigned"] = sum(
        1 for r in kept
        if not covered_by_any(Point(float(r["lon"]), float(r["lat"])), zones))

    # --- census / crosswalk ------------------------------------------------------
    with open(fixture / Path(cfg["census_path"]).name, newline="") as fh:
        census = list(csv.DictReader(fh))
    assert len(census) == len(tracts), "census rows != tract polygons"

    unassigned_tracts = []
    partial_tracts = []
    entry_count = 0
    for tid, geom in tracts:
        area = geom.area
        inter = geom.intersection(coverage)
        inside = inter.area / area if area > 0 else 0.0
        outside = 1.0 - inside
        if inter.is_empty or inside <= 0.0:
            unassigned_tracts.append(tid)
            continue
        if UNCERTAIN_LO <= outside <= UNCERTAIN_HI:
            print(f"UNCERTAIN: tract {tid} outside fraction {outside:.6f} "
                  "sits near the 1e-3 partial threshold")
        if outside >= WEIGHT_FLOOR:
            partial_tracts.append(tid)
        for zid, zgeom in zones:
            frac = geom.intersection(zgeom).area / area
            if UNCERTAIN_LO <= frac <= UNCERTAIN_HI:
                print(f"UNCERTAIN: tract {tid} x zone {zid} weight {frac:.6f} "
                      "sits near the 1e-3 floor")
            if frac >= WEIGHT_FLOOR:
                entry_count += 1
    counts["crosswalk_unassigned_tracts"] = len(unassigned_tracts)
    counts["crosswalk_partial_tracts"] = len(partial_tracts)
    counts["crosswalk_entries"] = entry_count
    print("unassigned tracts:", sorted(unassigned_tracts))
    print("partial tracts:", sorted(partial_tracts))

    counts["socio_rows"] = len(zones)
    counts["feature_rows"] = len(zones)

    print()
    for key in sorted(counts):
        print(f"{key} = {counts[key]}")


if __name__ == "__main__":
    main()
