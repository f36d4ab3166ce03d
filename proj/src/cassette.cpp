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

#include "innodex/cassette.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "innodex/errors.hpp"
#include "innodex/hash.hpp"

namespace innodex::net {

namespace {

using nlohmann::json;

std::string http_get(const std::string& host, const std::string& target) {
  httplib::Client cli(host);
  cli.set_connection_timeout(10);
  cli.set_read_timeout(30);
  httplib::Result res = cli.Get(target);
  if (!res) {
    throw SourceError("GET " + host + target + ": " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw SourceError("GET " + host + target + ": HTTP " + std::to_string(res->status));
  }
  return res->body;
}

std::string url_encode(const std::string& s) {
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      char buf[4];
      std::snprintf(buf, sizeof buf, "%%%02X", c);
      out += buf;
    }
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string region_key(const geo::BoundingBox& region) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f", region.min_lon, region.min_lat,
                region.max_lon, region.max_lat);
  return buf;
}

std::string request_key(const std::string& source_name, const std::string& query,
                        const geo::BoundingBox& region) {
  return sha256_hex(source_name + "|" + query + "|" + region_key(region));
}

RateLimiter::RateLimiter(double rps, ClockFn now, SleepFn sleep)
    : rps_(rps > 0.0 ? rps : 1.0), tokens_(1.0), last_(now ? now() : std::chrono::steady_clock::now()),
      now_(std::move(now)), sleep_(std::move(sleep)) {
  if (!now_) now_ = [] { return std::chrono::steady_clock::now(); };
  if (!sleep_) sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

void RateLimiter::acquire() {
  auto t = now_();
  double elapsed = std::chrono::duration<double>(t - last_).count();
  last_ = t;
  tokens_ = std::min(1.0, tokens_ + elapsed * rps_);
  if (tokens_ < 1.0) {
    double wait_s = (1.0 - tokens_) / rps_;
    sleep_(std::chrono::milliseconds(static_cast<int64_t>(wait_s * 1000.0 + 0.5)));
    tokens_ = 1.0;
    last_ = now_();
  }
  tokens_ -= 1.0;
}

SourceClient::SourceClient(std::string source_name, SourceConfig config,
                           std::filesystem::path cassette_dir, Hooks hooks)
    : source_name_(std::move(source_name)),
      config_(std::move(config)),
      cassette_dir_(std::move(cassette_dir)),
      hooks_(std::move(hooks)),
      limiter_(config_.rate_limit_rps, hooks_.now, hooks_.sleep) {
  if (!hooks_.transport) hooks_.transport = default_transport;
  if (!hooks_.sleep) hooks_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::filesystem::path SourceClient::cassette_path(const std::string& key) const {
  return cassette_dir_ / source_name_ / (key + ".json");
}

std::string SourceClient::fetch_raw(const std::string& query, const geo::BoundingBox& region) {
  if (region.degenerate()) {
    throw ConfigError("source " + source_name_ + ": degenerate fetch region");
  }
  std::string key = request_key(source_name_, query, region);
  std::filesystem::path path = cassette_path(key);

  if (config_.mode == Mode::kReplay) {
    if (!std::filesystem::exists(path)) {
      throw ConfigError("source " + source_name_ + ": no cassette for query '" + query +
                        "' over " + region_key(region) + " (expected " + path.string() + ")");
    }
    return read_text_file(path);
  }

  std::string url = config_.base_url + "?q=" + url_encode(query) + "&bbox=" + region_key(region);
  std::string body;
  std::string last_error = "no attempt made";
  const int kMaxRetries = 5;
  for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
    if (attempt > 0) {
      hooks_.sleep(std::chrono::milliseconds(100LL << (attempt - 1)));
    }
    limiter_.acquire();
    try {
      body = hooks_.transport(url);
      std::filesystem::create_directories(path.parent_path());
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      if (!out || !(out << body).flush()) {
        throw DataError("cannot record cassette " + path.string());
      }
      return body;
    } catch (const DataError&) {
      throw;
    } catch (const std::exception& e) {
      last_error = e.what();
    }
  }
  throw SourceError("source " + source_name_ + ": " + std::to_string(kMaxRetries + 1) +
                    " attempts failed for '" + query + "': " + last_error);
}

std::string default_transport(const std::string& url) {
  std::string rest;
  if (url.rfind("http://", 0) == 0) {
    rest = url.substr(7);
  } else if (url.rfind("https://", 0) == 0) {
    throw SourceError("https is not built in; use an http proxy or custom transport");
  } else {
    throw SourceError("unsupported url '" + url + "'");
  }
  size_t slash = rest.find('/');
  std::string host = slash == std::string::npos ? rest : rest.substr(0, slash);
  std::string target = slash == std::string::npos ? "/" : rest.substr(slash);
  return http_get(host, target);
}

namespace {

std::optional<std::string> extract_zip(const json& j) {
  if (!j.is_string()) return std::nullopt;
  std::string s = j.get<std::string>();
  if (s.size() != 5 || !std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return c >= '0' && c <= '9';
      })) {
    return std::nullopt;  // not an extractable zip
  }
  return s;
}

std::vector<poi::PoiRecord> parse_places(const std::string& body, poi::Source source,
                                         const std::string& term, const std::string& where) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw DataError(where + ": bad response body: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("results") || !doc["results"].is_array()) {
    throw DataError(where + ": response has no 'results' array");
  }
  std::vector<poi::PoiRecord> out;
  for (const json& item : doc["results"]) {
    poi::PoiRecord r;
    r.source = source;
    r.place_id = item.value("place_id", "");
    r.name = item.value("name", "");
    r.location = {item.value("lon", 0.0), item.value("lat", 0.0)};
    if (source == poi::Source::kKeywordSearch) {
      if (item.contains("rating") && !item["rating"].is_null()) {
        r.rating = item["rating"].get<double>();
      }
      r.rating_count = item.value("rating_count", static_cast<int64_t>(0));
    }
    r.matched_terms = {term};
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::vector<poi::PoiRecord> keyword_fetch(SourceClient& client, const std::string& term,
                                          const geo::BoundingBox& region) {
  std::string body = client.fetch_raw(term, region);
  return parse_places(body, poi::Source::kKeywordSearch, term,
                      client.source_name() + " '" + term + "'");
}

std::vector<poi::PoiRecord> tag_fetch(SourceClient& client, const std::vector<std::string>& tags,
                                      const geo::BoundingBox& region) {
  if (tags.empty()) {
    throw ConfigError("source " + client.source_name() + ": tag list is empty");
  }
  std::vector<poi::PoiRecord> out;
  for (const std::string& tag : tags) {
    std::vector<poi::PoiRecord> batch =
        parse_places(client.fetch_raw(tag, region), poi::Source::kTagQuery, tag,
                     client.source_name() + " '" + tag + "'");
    out.insert(out.end(), std::make_move_iterator(batch.begin()),
               std::make_move_iterator(batch.end()));
  }
  return out;
}

std::vector<poi::JobPosting> job_fetch(SourceClient& client, const geo::BoundingBox& region) {
  std::string body = client.fetch_raw("technology", region);
  std::string where = client.source_name() + " technology jobs";
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw DataError(where + ": bad response body: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("postings") || !doc["postings"].is_array()) {
    throw DataError(where + ": response has no 'postings' array");
  }
  std::vector<poi::JobPosting> out;
  for (const json& item : doc["postings"]) {
    poi::JobPosting p;
    p.posting_id = item.value("posting_id", "");
    p.title = item.value("title", "");
    if (item.contains("zip")) p.zip_id = extract_zip(item["zip"]);
    if (item.contains("lon") && item.contains("lat") && item["lon"].is_number() &&
        item["lat"].is_number()) {
      p.location = geo::GeoPoint{item["lon"].get<double>(), item["lat"].get<double>()};
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<poi::PoiRecord> load_registry_jsonl(const std::filesystem::path& path) {
  std::vector<poi::PoiRecord> records = poi::read_poi_jsonl(path);
  for (const poi::PoiRecord& r : records) {
    if (r.source != poi::Source::kRegistry) {
      throw DataError("registry file " + path.string() + ": record " + r.place_id +
                      " has source " + poi::to_string(r.source));
    }
  }
  return records;
}

}  // namespace innodex::net
