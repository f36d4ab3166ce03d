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

#include <cmath>
#include <cstring>

#include "innodex/errors.hpp"
#include "innodex/rng.hpp"
#include "innodex/stats.hpp"
#include "testutil.hpp"

using namespace innodex;
using stats::Column;

namespace {

Column col(std::initializer_list<double> xs) {
  Column c;
  for (double x : xs) c.emplace_back(x);
  return c;
}

}  // namespace

TEST_CASE("pearson: textbook vectors") {
  CHECK(stats::pearson(col({1, 2, 3}), col({2, 4, 6})) == 1.0);
  CHECK(stats::pearson(col({1, 2, 3}), col({6, 4, 2})) == -1.0);
  // r((1,2,3),(1,3,2)) = 0.5 exactly: both vectors have variance 1 and
  // covariance 1/2 about their common mean 2.
  auto r = stats::pearson(col({1, 2, 3}), col({1, 3, 2}));
  REQUIRE(r.has_value());
  CHECK(*r == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("pearson: affine relations are exactly +/-1") {
  Column x, y_up, y_down;
  SplitMix64 g(77);
  for (int i = 0; i < 40; ++i) {
    double v = g.u01() * 100.0 - 50.0;
    x.emplace_back(v);
    y_up.emplace_back(2.0 * v + 7.0);
    y_down.emplace_back(-3.5 * v + 1.0);
  }
  CHECK(stats::pearson(x, y_up) == 1.0);     // clamp guarantees the exact endpoint
  CHECK(stats::pearson(x, y_down) == -1.0);
}

TEST_CASE("pearson: pairwise deletion and the n<3 / zero-variance nulls") {
  Column x = {1.0, std::nullopt, 3.0, 4.0, 5.0};
  Column y = {2.0, 10.0, std::nullopt, 8.0, 10.0};
  auto res = stats::pearson_with_n(x, y);
  CHECK(res.n == 3);  // rows 0, 3, 4 survive
  REQUIRE(res.r.has_value());
  auto oracle = testutil::oracle_pearson(x, y);
  CHECK(*res.r == doctest::Approx(*oracle.r).epsilon(1e-12));

  CHECK_FALSE(stats::pearson(col({1, 2}), col({3, 4})).has_value());
  CHECK_FALSE(stats::pearson(col({1, 1, 1}), col({1, 2, 3})).has_value());
  CHECK_FALSE(stats::pearson(col({1, 2, 3}), col({5, 5, 5})).has_value());
  // Nulls can push a long column under the threshold.
  Column sparse_x = {1.0, 2.0, std::nullopt, std::nullopt, std::nullopt};
  Column sparse_y = {1.0, 2.0, 3.0, 4.0, 5.0};
  CHECK(stats::pearson_with_n(sparse_x, sparse_y).n == 2);
  CHECK_FALSE(stats::pearson(sparse_x, sparse_y).has_value());

  CHECK_THROWS_AS(stats::pearson(col({1, 2, 3}), col({1, 2})), ConfigError);
}

TEST_CASE("pearson: random null-injected columns match the two-pass oracle") {
  SplitMix64 g(90210);
  for (int trial = 0; trial < 300; ++trial) {
    size_t n = 3 + g.below(40);
    // Every third trial shares a signal so strong correlations get exercised
    // too, not just near-zero ones.
    std::vector<double> signal =
        trial % 3 == 0 ? testutil::gen_doubles(g, n, -2.0, 2.0) : std::vector<double>{};
    Column x = testutil::gen_column(g, n, signal, 0.8, 0.2);
    Column y = testutil::gen_column(g, n, signal, 0.8, 0.2);
    auto got = stats::pearson_with_n(x, y);
    auto want = testutil::oracle_pearson(x, y);
    CHECK(got.n == want.n);
    REQUIRE(got.r.has_value() == want.r.has_value());
    if (got.r) {
      CHECK(*got.r == doctest::Approx(*want.r).epsilon(1e-12));
      CHECK(*got.r >= -1.0);
      CHECK(*got.r <= 1.0);
    }
    // Bitwise symmetry, not just approximate.
    auto flipped = stats::pearson_with_n(y, x);
    CHECK(flipped.n == got.n);
    REQUIRE(flipped.r.has_value() == got.r.has_value());
    if (got.r) {
      CHECK(std::memcmp(&*flipped.r, &*got.r, sizeof(double)) == 0);
    }
  }
}

TEST_CASE("correlation matrix: symmetry, diagonal, and degenerate columns") {
  SplitMix64 g(4242);
  std::vector<std::string> names = {"a", "b", "c", "d", "e"};
  std::vector<Column> cols;
  size_t rows = 60;
  std::vector<double> signal = testutil::gen_doubles(g, rows, -3.0, 3.0);
  cols.push_back(testutil::gen_column(g, rows, signal, 1.0, 0.1));
  cols.push_back(testutil::gen_column(g, rows, signal, 1.0, 0.1));
  cols.push_back(testutil::gen_column(g, rows, {}, 1.0, 0.3));
  // d: constant (zero variance). e: scaled copy of a (r must be exactly 1).
  Column constant(rows, 5.0);
  cols.push_back(constant);
  Column scaled;
  for (const auto& v : cols[0]) {
    scaled.push_back(v ? std::optional<double>(*v * 3.25) : std::nullopt);
  }
  cols.push_back(scaled);

  auto m = stats::correlation_matrix(names, cols);
  REQUIRE(m.columns == names);
  REQUIRE(m.r.size() == 5);
  for (size_t i = 0; i < 5; ++i) {
    REQUIRE(m.r[i].size() == 5);
    for (size_t j = 0; j < 5; ++j) {
      CHECK(m.n[i][j] == m.n[j][i]);
      REQUIRE(m.r[i][j].has_value() == m.r[j][i].has_value());
      if (m.r[i][j]) {
        CHECK(std::memcmp(&*m.r[i][j], &*m.r[j][i], sizeof(double)) == 0);
      }
    }
  }
  for (size_t i = 0; i < 5; ++i) {
    if (i == 3) {
      CHECK_FALSE(m.r[3][3].has_value());  // constant column: null diagonal
    } else {
      CHECK(m.r[i][i] == 1.0);  // literal unit diagonal, not approximately
    }
  }
  // Constant column correlates with nothing.
  for (size_t j = 0; j < 5; ++j) {
    if (j != 3) CHECK_FALSE(m.r[3][j].has_value());
  }
  CHECK(m.r[0][4] == 1.0);  // positive scaling preserves r = 1 exactly
  // Cross-check one off-diagonal cell against the oracle.
  auto want = testutil::oracle_pearson(cols[0], cols[1]);
  REQUIRE(m.r[0][1].has_value());
  CHECK(*m.r[0][1] == doctest::Approx(*want.r).epsilon(1e-12));
  CHECK(m.n[0][1] == want.n);
}

TEST_CASE("correlation matrix: parallel kernel equals the serial reference bitwise") {
  SplitMix64 g(31);
  std::vector<std::string> names;
  std::vector<Column> cols;
  std::vector<double> signal = testutil::gen_doubles(g, 500, -1.0, 1.0);
  for (int c = 0; c < 14; ++c) {
    names.push_back("col" + std::to_string(c));
    cols.push_back(testutil::gen_column(g, 500, c % 2 == 0 ? signal : std::vector<double>{},
                                        0.7, 0.15));
  }
  auto serial = stats::correlation_matrix_serial(names, cols);
  auto parallel = stats::correlation_matrix(names, cols);
  REQUIRE(serial.r.size() == parallel.r.size());
  for (size_t i = 0; i < serial.r.size(); ++i) {
    for (size_t j = 0; j < serial.r.size(); ++j) {
      CHECK(serial.n[i][j] == parallel.n[i][j]);
      REQUIRE(serial.r[i][j].has_value() == parallel.r[i][j].has_value());
      if (serial.r[i][j]) {
        CHECK(std::memcmp(&*serial.r[i][j], &*parallel.r[i][j], sizeof(double)) == 0);
      }
    }
  }
}

TEST_CASE("correlation matrix: shape errors are config errors") {
  CHECK_THROWS_AS(stats::correlation_matrix({}, {}), ConfigError);
  CHECK_THROWS_AS(stats::correlation_matrix({"a", "b"}, {col({1, 2, 3}), col({1, 2})}),
                  ConfigError);
  CHECK_THROWS_AS(stats::correlation_matrix({"a"}, {col({1, 2, 3}), col({4, 5, 6})}),
                  ConfigError);
}

TEST_CASE("loglog: recovers a known power-law exponent") {
  Column x, y;
  for (int i = 1; i <= 20; ++i) {
    double v = i;
    x.emplace_back(v);
    y.emplace_back(std::pow(v, 1.3));
  }
  auto res = stats::loglog_slope(x, y);
  REQUIRE(res.fit.has_value());
  CHECK(res.fit->slope == doctest::Approx(1.3).epsilon(1e-9));
  CHECK(res.fit->r2 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(res.n == 20);

  // Pure proportionality is slope 1.
  Column y_lin;
  for (int i = 1; i <= 20; ++i) y_lin.emplace_back(4.5 * i);
  auto lin = stats::loglog_slope(x, y_lin);
  REQUIRE(lin.fit.has_value());
  CHECK(lin.fit->slope == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("loglog: slope is invariant to rescaling y") {
  Column x, y, y_scaled;
  SplitMix64 g(808);
  for (int i = 0; i < 50; ++i) {
    double v = 1.0 + 99.0 * g.u01();
    double noise = std::exp(0.05 * (g.u01() - 0.5));
    x.emplace_back(v);
    double base = std::pow(v, 1.17) * noise;
    y.emplace_back(base);
    y_scaled.emplace_back(base * 1000.0);
  }
  auto a = stats::loglog_slope(x, y);
  auto b = stats::loglog_slope(x, y_scaled);
  REQUIRE(a.fit.has_value());
  REQUIRE(b.fit.has_value());
  CHECK(a.fit->slope == doctest::Approx(b.fit->slope).epsilon(1e-12));
  // Only the intercept moves, by ln(1000).
  CHECK(b.fit->intercept - a.fit->intercept ==
        doctest::Approx(std::log(1000.0)).epsilon(1e-9));
}

TEST_CASE("loglog: nonpositive and null pairs are excluded; degenerate inputs explain why") {
  // Zeros and nulls drop out; the fit runs on what remains.
  Column x = {0.0, std::nullopt, 1.0, 2.0, 4.0, -3.0, 8.0};
  Column y = {5.0, 5.0, 1.0, 2.0, 4.0, 5.0, 8.0};
  auto res = stats::loglog_slope(x, y);
  CHECK(res.n == 4);
  REQUIRE(res.fit.has_value());
  CHECK(res.fit->slope == doctest::Approx(1.0).epsilon(1e-9));

  auto too_few = stats::loglog_slope(col({1, 2}), col({1, 2}));
  CHECK_FALSE(too_few.fit.has_value());
  CHECK_FALSE(too_few.reason.empty());

  auto degenerate_x = stats::loglog_slope(col({5, 5, 5, 5}), col({1, 2, 3, 4}));
  CHECK_FALSE(degenerate_x.fit.has_value());
  CHECK_FALSE(degenerate_x.reason.empty());
  CHECK(degenerate_x.reason != too_few.reason);  // distinct causes, distinct text
}

TEST_CASE("matrix csv and json: structure and round-trip") {
  stats::CorrelationMatrix m;
  m.columns = {"alpha", "beta", "gamma"};
  m.r = {{1.0, 0.25, std::nullopt}, {0.25, 1.0, -0.5}, {std::nullopt, -0.5, 1.0}};
  m.n = {{10, 9, 2}, {9, 10, 8}, {2, 8, 10}};

  testutil::TempDir tmp("matrix");
  auto csv_path = tmp.path() / "m.csv";
  stats::write_matrix_csv(csv_path, m);
  std::string text = testutil::read_text(csv_path);
  // Header carries the leading name column; the null cell is empty, with
  // no sentinel value.
  CHECK(text.find(",alpha,beta,gamma") != std::string::npos);
  CHECK(text.find("alpha,1,0.25,\n") != std::string::npos);
  CHECK(text.find("nan") == std::string::npos);

  auto json_path = tmp.path() / "m.json";
  stats::write_matrix_json(json_path, m);
  auto back = stats::read_matrix_json(json_path);
  CHECK(back.columns == m.columns);
  REQUIRE(back.r.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    for (size_t j = 0; j < 3; ++j) {
      CHECK(back.n[i][j] == m.n[i][j]);
      REQUIRE(back.r[i][j].has_value() == m.r[i][j].has_value());
      if (m.r[i][j]) CHECK(*back.r[i][j] == *m.r[i][j]);
    }
  }
  // Writing the read-back matrix reproduces the bytes: stable serialization.
  auto json_path2 = tmp.path() / "m2.json";
  stats::write_matrix_json(json_path2, back);
  CHECK(testutil::read_text(json_path) == testutil::read_text(json_path2));
}
