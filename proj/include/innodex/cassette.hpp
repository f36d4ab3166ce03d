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

#include <chrono>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "innodex/geo.hpp"
#include "innodex/poi.hpp"

namespace innodex::net {

enum class Mode { kReplay, kLive };

struct SourceConfig {
  Mode mode = Mode::kReplay;
  double rate_limit_rps = 1.0;
  std::string base_url;  // live mode only
};

// Injection points so tests never touch the network or the wall clock.
using Transport = std::function<std::string(const std::string& url)>;
using SleepFn = std::function<void(std::chrono::milliseconds)>;
using ClockFn = std::function<std::chrono::steady_clock::time_point()>;

struct Hooks {
  Transport transport;  // default: real HTTP GET
  SleepFn sleep;        // default: std::this_thread::sleep_for
  ClockFn now;          // default: steady_clock::now
};

/// HTTP GET returning the response body; throws SourceError on transport
/// or non-2xx failure.
std::string default_transport(const std::string& url);

/// "min_lon,min_lat,max_lon,max_lat" at fixed 6-decimal precision, the
/// canonical region spelling used in request keys and URLs.
std::string region_key(const geo::BoundingBox& region);

/// Cassette file name stem: sha256 over "<source>|<query>|<region_key>".
std::string request_key(const std::string& source_name, const std::string& query,
                        const geo::BoundingBox& region);

// Token bucket, capacity one request. acquire() sleeps (via the hook)
// until a token is available.
class RateLimiter {
 public:
  RateLimiter(double rps, ClockFn now, SleepFn sleep);
  void acquire();

 private:
  double rps_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
  ClockFn now_;
  SleepFn sleep_;
};

// One upstream source with record/replay. Replay mode reads committed
// cassettes and never touches the network; live mode fetches with retry
// and records the body so the run is replayable afterwards.
class SourceClient {
 public:
  SourceClient(std::string source_name, SourceConfig config,
               std::filesystem::path cassette_dir, Hooks hooks = {});

  /// Raw response body for (query, region). Replay: cassette contents, or
  /// ConfigError if the cassette is absent. Live: rate-limited GET with up
  /// to 5 retries on exponential backoff, then SourceError; successful
  /// bodies are written back as cassettes.
  std::string fetch_raw(const std::string& query, const geo::BoundingBox& region);

  const std::string& source_name() const { return source_name_; }

 private:
  std::filesystem::path cassette_path(const std::string& key) const;

  std::string source_name_;
  SourceConfig config_;
  std::filesystem::path cassette_dir_;
  Hooks hooks_;
  RateLimiter limiter_;
};

/// Places matching one search term inside region; source=keyword_search,
/// matched_terms={term}. Region must be non-degenerate.
std::vector<poi::PoiRecord> keyword_fetch(SourceClient& client, const std::string& term,
                                          const geo::BoundingBox& region);

/// Places carrying any of the key=value tags; one request per tag,
/// source=tag_query, no ratings. Tags must be nonempty.
std::vector<poi::PoiRecord> tag_fetch(SourceClient& client, const std::vector<std::string>& tags,
                                      const geo::BoundingBox& region);

/// Technology job postings inside region. Postings without an extractable
/// 5-digit zip come back with zip_id null.
std::vector<poi::JobPosting> job_fetch(SourceClient& client, const geo::BoundingBox& region);

/// Pre-exported registry records (no client); every row must already carry
/// source=registry.
std::vector<poi::PoiRecord> load_registry_jsonl(const std::filesystem::path& path);

}  // namespace innodex::net
