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
#include <map>
#include <set>

#include "innodex/cassette.hpp"
#include "innodex/errors.hpp"
#include "innodex/poi.hpp"
#include "innodex/rng.hpp"
#include "testutil.hpp"

using namespace innodex;
using poi::PoiRecord;
using poi::Source;

namespace {

const geo::BoundingBox kUnitRegion{-71.20, 42.20, -70.90, 42.45};

std::filesystem::path unit_cassettes() {
  return std::filesystem::path(INNODEX_FIXTURE_DIR) / "unit/cassettes";
}

net::SourceClient replay_client(const std::string& source) {
  return net::SourceClient(source, net::SourceConfig{net::Mode::kReplay, 1.0, ""},
                           unit_cassettes());
}

PoiRecord make_record(const std::string& id, double lon, double lat,
                      std::optional<double> rating, int64_t count,
                      std::vector<std::string> terms, Source source = Source::kKeywordSearch) {
  PoiRecord r;
  r.source = source;
  r.place_id = id;
  r.name = "P " + id;
  r.location = {lon, lat};
  r.rating = rating;
  r.rating_count = count;
  r.matched_terms = std::move(terms);
  return r;
}

}  // namespace

TEST_CASE("defaults: the twelve search keywords and three map tags") {
  const auto& kw = poi::default_keywords();
  REQUIRE(kw.size() == 12);
  // Pinned verbatim: these strings are the data contract with the cassette
  // fixtures, so any drift must fail loudly.
  CHECK(kw == std::vector<std::string>{"innovation hubs", "clustering", "innovation center",
                                       "startups", "innovation districts", "open innovation",
                                       "tech hub", "technology park", "incubator",
                                       "accelerators", "regional innovation", "co-working space"});
  CHECK(poi::default_tags() ==
        std::vector<std::string>{"company=startup", "office=coworking", "office=research"});
}

TEST_CASE("normalize: zero-count ratings are nulled, terms sorted unique") {
  std::vector<PoiRecord> recs = {
      make_record("A", -71.0, 42.3, 4.5, 0, {"startups", "incubator", "startups"}),
      make_record("B", -71.0, 42.3, 3.0, 7, {"tech hub"}),
  };
  poi::normalize(recs);
  CHECK_FALSE(recs[0].rating.has_value());  // mean of zero ratings is meaningless
  CHECK(recs[0].matched_terms == std::vector<std::string>{"incubator", "startups"});
  CHECK(recs[1].rating == 3.0);
}

TEST_CASE("normalize: invalid records are rejected with data errors") {
  auto one = [](PoiRecord r) {
    std::vector<PoiRecord> v{std::move(r)};
    poi::normalize(v);
    return v;
  };
  CHECK_THROWS_AS(one(make_record("", -71, 42.3, 4.0, 1, {})), DataError);
  CHECK_THROWS_AS(one(make_record("A", -71, 42.3, 4.0, -1, {})), DataError);
  CHECK_THROWS_AS(one(make_record("A", -71, 42.3, 0.5, 3, {})), DataError);  // rating < 1
  CHECK_THROWS_AS(one(make_record("A", -71, 42.3, 5.5, 3, {})), DataError);  // rating > 5
  CHECK_THROWS_AS(one(make_record("A", -200.0, 42.3, 4.0, 3, {})), DataError);
  CHECK_NOTHROW(one(make_record("A", -71, 42.3, std::nullopt, 3, {})));  // null rating fine
}

TEST_CASE("dedupe: one record per id with term union") {
  // The canonical duplicate case: one place retrieved under two keywords.
  std::vector<PoiRecord> recs = {
      make_record("X", -71.05, 42.35, 4.0, 10, {"startups"}),
      make_record("X", -71.05, 42.35, 4.2, 25, {"incubator"}),
  };
  poi::DedupeResult res = poi::dedupe(recs);
  REQUIRE(res.records.size() == 1);
  CHECK(res.records[0].matched_terms == std::vector<std::string>{"incubator", "startups"});
  CHECK(res.records[0].rating == 4.2);  // larger rating_count wins
  CHECK(res.records[0].rating_count == 25);
  CHECK(res.warnings.empty());
}

TEST_CASE("dedupe: ties keep the first record; far-apart locations warn") {
  std::vector<PoiRecord> tied = {
      make_record("X", -71.05, 42.35, 4.0, 10, {"a"}),
      make_record("X", -71.05, 42.35, 3.0, 10, {"b"}),
  };
  poi::DedupeResult res = poi::dedupe(tied);
  REQUIRE(res.records.size() == 1);
  CHECK(res.records[0].rating == 4.0);

  // ~0.003 degrees of longitude at lat 42 is ~250 m: conflicting locations.
  std::vector<PoiRecord> moved = {
      make_record("X", -71.050, 42.35, 4.0, 10, {"a"}),
      make_record("X", -71.047, 42.35, 4.5, 99, {"b"}),
  };
  res = poi::dedupe(moved);
  REQUIRE(res.records.size() == 1);
  CHECK(res.records[0].rating_count == 99);
  REQUIRE(res.warnings.size() == 1);
  CHECK(res.warnings[0].find("X") != std::string::npos);

  // 30 m apart: same venue as far as this data is concerned, no warning.
  std::vector<PoiRecord> close = {
      make_record("X", -71.0500, 42.35, 4.0, 10, {"a"}),
      make_record("X", -71.0504, 42.35, 4.5, 99, {"b"}),
  };
  CHECK(poi::dedupe(close).warnings.empty());
}

TEST_CASE("dedupe: sources never merge; output ordered by (source, id)") {
  std::vector<PoiRecord> recs = {
      make_record("X", -71.0, 42.3, std::nullopt, 0, {"office=coworking"}, Source::kTagQuery),
      make_record("X", -71.0, 42.3, 4.0, 5, {"startups"}, Source::kKeywordSearch),
      make_record("A", -71.0, 42.3, 4.0, 5, {"startups"}, Source::kKeywordSearch),
  };
  poi::DedupeResult res = poi::dedupe(recs);
  REQUIRE(res.records.size() == 3);
  CHECK(res.records[0].place_id == "A");
  CHECK(res.records[0].source == Source::kKeywordSearch);
  CHECK(res.records[1].place_id == "X");
  CHECK(res.records[1].source == Source::kKeywordSearch);
  CHECK(res.records[2].source == Source::kTagQuery);
}

TEST_CASE("dedupe: laws hold on randomized duplicate-injected sets") {
  SplitMix64 g(31337);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<PoiRecord> recs;
    int n_ids = 1 + static_cast<int>(g.below(12));
    std::set<std::pair<int, std::string>> distinct;
    std::map<std::string, std::set<std::string>> terms_by_id;
    for (int i = 0; i < n_ids; ++i) {
      std::string id = "ID" + std::to_string(g.below(8));  // collisions intended
      int copies = 1 + static_cast<int>(g.below(3));
      for (int c = 0; c < copies; ++c) {
        std::string term = "term" + std::to_string(g.below(5));
        recs.push_back(make_record(id, -71.0 + g.u01() * 1e-4, 42.3 + g.u01() * 1e-4,
                                   1.0 + 4.0 * g.u01(), static_cast<int64_t>(g.below(50)),
                                   {term}));
        distinct.insert({0, id});
        terms_by_id[id].insert(term);
      }
    }
    poi::DedupeResult once = poi::dedupe(recs);
    poi::DedupeResult twice = poi::dedupe(once.records);

    CHECK(once.records.size() <= recs.size());
    CHECK(once.records.size() == distinct.size());
    CHECK(twice.records.size() == once.records.size());
    for (size_t i = 0; i < once.records.size(); ++i) {
      const PoiRecord& a = once.records[i];
      const PoiRecord& b = twice.records[i];
      CHECK(a.place_id == b.place_id);
      CHECK(a.rating == b.rating);
      CHECK(a.rating_count == b.rating_count);
      CHECK(a.matched_terms == b.matched_terms);
      // Union preservation: every term seen for this id survives.
      std::set<std::string> got(a.matched_terms.begin(), a.matched_terms.end());
      CHECK(got == terms_by_id[a.place_id]);
    }
    // Sorted output.
    CHECK(std::is_sorted(once.records.begin(), once.records.end(),
                         [](const PoiRecord& a, const PoiRecord& b) {
                           return std::tie(a.source, a.place_id) < std::tie(b.source, b.place_id);
                         }));
  }
  CHECK(poi::dedupe({}).records.empty());
}

TEST_CASE("jsonl: round-trip with stable bytes") {
  testutil::TempDir tmp("jsonl");
  std::vector<PoiRecord> recs = {
      make_record("A1", -71.01, 42.31, 4.5, 12, {"incubator", "startups"}),
      make_record("B2", -71.02, 42.32, std::nullopt, 0, {"office=coworking"}, Source::kTagQuery),
  };
  auto p1 = tmp.path() / "a.jsonl";
  auto p2 = tmp.path() / "b.jsonl";
  poi::write_poi_jsonl(p1, recs);
  std::vector<PoiRecord> back = poi::read_poi_jsonl(p1);
  REQUIRE(back.size() == 2);
  CHECK(back[0].place_id == "A1");
  CHECK(back[0].rating == 4.5);
  CHECK(back[1].source == Source::kTagQuery);
  CHECK_FALSE(back[1].rating.has_value());
  poi::write_poi_jsonl(p2, back);
  CHECK(testutil::read_text(p1) == testutil::read_text(p2));

  std::vector<poi::JobPosting> jobs = {
      {"J1", "Engineer", std::string("02101"), geo::GeoPoint{-71.0, 42.3}},
      {"J2", "Analyst", std::nullopt, std::nullopt},
  };
  auto j1 = tmp.path() / "jobs.jsonl";
  poi::write_jobs_jsonl(j1, jobs);
  std::vector<poi::JobPosting> jback = poi::read_jobs_jsonl(j1);
  REQUIRE(jback.size() == 2);
  CHECK(jback[0].zip_id == "02101");
  CHECK_FALSE(jback[1].zip_id.has_value());
  CHECK_FALSE(jback[1].location.has_value());
}

TEST_CASE("keyword_fetch: replay returns the committed fixture records") {
  net::SourceClient client = replay_client("keyword_search");
  std::vector<PoiRecord> recs = net::keyword_fetch(client, "incubator", kUnitRegion);
  REQUIRE(recs.size() == 7);
  for (int i = 0; i < 7; ++i) {
    CHECK(recs[i].place_id == "F00" + std::to_string(i + 1));
    CHECK(recs[i].source == Source::kKeywordSearch);
    CHECK(recs[i].matched_terms == std::vector<std::string>{"incubator"});
  }
  CHECK(recs[6].rating_count == 0);  // F007: rating present but no ratings backing it

  // Zero matches is an empty list, not an error.
  CHECK(net::keyword_fetch(client, "clustering", kUnitRegion).empty());

  // Determinism contract: byte-identical cassette replay.
  std::string a = client.fetch_raw("incubator", kUnitRegion);
  std::string b = client.fetch_raw("incubator", kUnitRegion);
  CHECK(a == b);
}

TEST_CASE("keyword_fetch: missing cassette in replay mode is a config error") {
  net::SourceClient client = replay_client("keyword_search");
  CHECK_THROWS_AS(net::keyword_fetch(client, "never recorded", kUnitRegion), ConfigError);
}

TEST_CASE("fetch: degenerate regions are rejected up front") {
  net::SourceClient client = replay_client("keyword_search");
  geo::BoundingBox flat{-71.0, 42.0, -71.0, 43.0};
  CHECK_THROWS_AS(net::keyword_fetch(client, "incubator", flat), ConfigError);
}

TEST_CASE("tag_fetch: replay fixtures, no ratings, per-tag cassettes") {
  net::SourceClient client = replay_client("tag_query");
  std::vector<PoiRecord> recs =
      net::tag_fetch(client, {"office=coworking", "company=startup"}, kUnitRegion);
  REQUIRE(recs.size() == 3);  // coworking has 3, startup cassette is empty
  for (const PoiRecord& r : recs) {
    CHECK(r.source == Source::kTagQuery);
    CHECK_FALSE(r.rating.has_value());
    CHECK(r.rating_count == 0);
    CHECK(r.matched_terms == std::vector<std::string>{"office=coworking"});
  }
  CHECK_THROWS_AS(net::tag_fetch(client, {}, kUnitRegion), ConfigError);
  // office=research has no committed cassette.
  CHECK_THROWS_AS(net::tag_fetch(client, {"office=research"}, kUnitRegion), ConfigError);
}

TEST_CASE("job_fetch: postings without extractable zips come back null") {
  net::SourceClient client = replay_client("jobs");
  std::vector<poi::JobPosting> jobs = net::job_fetch(client, kUnitRegion);
  REQUIRE(jobs.size() == 10);
  int with_zip = 0;
  for (const auto& j : jobs) with_zip += j.zip_id.has_value() ? 1 : 0;
  CHECK(with_zip == 6);
  // The out-of-city zip is retained here; assignment happens downstream.
  bool saw_90210 = false;
  for (const auto& j : jobs) saw_90210 |= (j.zip_id && *j.zip_id == "90210");
  CHECK(saw_90210);
}

TEST_CASE("live mode: retries with exponential backoff, then records a cassette") {
  testutil::TempDir tmp("live");
  int calls = 0;
  std::vector<std::chrono::milliseconds> naps;
  net::Hooks hooks;
  hooks.transport = [&](const std::string&) -> std::string {
    if (++calls < 3) throw SourceError("transient upstream failure");
    return R"({"results":[{"place_id":"L1","name":"Live","lon":-71.0,"lat":42.3,)"
           R"("rating":4.0,"rating_count":3}]})";
  };
  hooks.sleep = [&](std::chrono::milliseconds d) { naps.push_back(d); };
  auto t0 = std::chrono::steady_clock::now();
  hooks.now = [&] { return t0; };

  net::SourceClient client("keyword_search",
                           net::SourceConfig{net::Mode::kLive, 1000.0, "http://fake.test/api"},
                           tmp.path(), hooks);
  std::vector<PoiRecord> recs = net::keyword_fetch(client, "incubator", kUnitRegion);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].place_id == "L1");
  CHECK(calls == 3);
  // Two retries: 100 ms then 200 ms. Rate-limiter naps at this rps are ~1 ms
  // and are filtered out so only the backoff schedule remains.
  std::vector<std::chrono::milliseconds> backoffs;
  for (auto d : naps) {
    if (d.count() >= 100) backoffs.push_back(d);
  }
  REQUIRE(backoffs.size() == 2);
  CHECK(backoffs[0] == std::chrono::milliseconds(100));
  CHECK(backoffs[1] == std::chrono::milliseconds(200));

  // The successful body was recorded: replay now works offline.
  net::SourceClient replay("keyword_search", net::SourceConfig{net::Mode::kReplay, 1.0, ""},
                           tmp.path());
  std::vector<PoiRecord> again = net::keyword_fetch(replay, "incubator", kUnitRegion);
  REQUIRE(again.size() == 1);
  CHECK(again[0].place_id == "L1");
}

TEST_CASE("live mode: six straight failures exhaust the retry budget") {
  testutil::TempDir tmp("live_fail");
  int calls = 0;
  net::Hooks hooks;
  hooks.transport = [&](const std::string&) -> std::string {
    ++calls;
    throw SourceError("boom");
  };
  hooks.sleep = [](std::chrono::milliseconds) {};
  net::SourceClient client("jobs", net::SourceConfig{net::Mode::kLive, 1000.0, "http://f.test/"},
                           tmp.path(), hooks);
  CHECK_THROWS_AS(net::job_fetch(client, kUnitRegion), SourceError);
  CHECK(calls == 6);  // initial attempt + 5 retries
}

TEST_CASE("rate limiter: second immediate request waits for a token") {
  auto t0 = std::chrono::steady_clock::now();
  auto now = t0;
  std::vector<std::chrono::milliseconds> naps;
  net::RateLimiter limiter(
      2.0, [&] { return now; },
      [&](std::chrono::milliseconds d) {
        naps.push_back(d);
        now += d;  // sleeping advances the fake clock
      });
  limiter.acquire();  // first token is free
  limiter.acquire();  // must wait ~1/2 s at 2 rps
  REQUIRE_FALSE(naps.empty());
  int64_t total = 0;
  for (auto d : naps) total += d.count();
  CHECK(total >= 450);
  CHECK(total <= 550);
}

TEST_CASE("registry: pre-exported rows load; wrong source is rejected") {
  std::vector<PoiRecord> recs = net::load_registry_jsonl(
      std::filesystem::path(INNODEX_FIXTURE_DIR) / "demo_city/registry.jsonl");
  REQUIRE(recs.size() == 12);
  for (const auto& r : recs) {
    CHECK(r.source == Source::kRegistry);
    CHECK(r.place_id.substr(0, 2) == "CB");
  }

  testutil::TempDir tmp("registry");
  auto bad = tmp.path() / "bad.jsonl";
  testutil::write_text(bad,
                       R"({"source":"keyword_search","place_id":"K1","name":"n",)"
                       R"("lon":-71.0,"lat":42.3,"rating":null,"rating_count":0,)"
                       R"("matched_terms":[]})"
                       "\n");
  CHECK_THROWS_AS(net::load_registry_jsonl(bad), DataError);
}
