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

#include "innodex/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "innodex/csv.hpp"
#include "innodex/errors.hpp"

namespace innodex::stats {

PearsonResult pearson_with_n(const Column& x, const Column& y) {
  if (x.size() != y.size()) {
    throw ConfigError("pearson: column lengths differ (" + std::to_string(x.size()) + " vs " +
                      std::to_string(y.size()) + ")");
  }
  // Pairwise deletion: only rows observed on both sides count.
  std::vector<double> xs, ys;
  xs.reserve(x.size());
  ys.reserve(y.size());
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i] && y[i]) {
      xs.push_back(*x[i]);
      ys.push_back(*y[i]);
    }
  }
  PearsonResult result;
  result.n = static_cast<int64_t>(xs.size());
  if (result.n < 3) return result;

  // Constancy is an exact test, not an arithmetic one: a column of equal
  // values has zero variance even when its mean would not round back.
  auto constant = [](const std::vector<double>& v) {
    for (double d : v) {
      if (d != v.front()) return false;
    }
    return true;
  };
  if (constant(xs) || constant(ys)) return result;

  // Two-pass in long double: affine data lands within ~1e-18 of +/-1 and
  // rounds to the exact endpoint; the clamp handles overshoot.
  long double n = static_cast<long double>(result.n);
  long double mx = 0.0L, my = 0.0L;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  long double sxx = 0.0L, syy = 0.0L, sxy = 0.0L;
  for (size_t i = 0; i < xs.size(); ++i) {
    long double dx = xs[i] - mx;
    long double dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0L || syy == 0.0L) return result;
  long double r = sxy / std::sqrt(sxx * syy);
  result.r = std::clamp(static_cast<double>(r), -1.0, 1.0);
  return result;
}

std::optional<double> pearson(const Column& x, const Column& y) {
  return pearson_with_n(x, y).r;
}

namespace {

void validate_matrix_input(const std::vector<std::string>& names,
                           const std::vector<Column>& columns) {
  if (names.empty() || columns.empty()) {
    throw ConfigError("correlation matrix: empty column set");
  }
  if (names.size() != columns.size()) {
    throw ConfigError("correlation matrix: " + std::to_string(names.size()) + " names for " +
                      std::to_string(columns.size()) + " columns");
  }
  for (size_t i = 1; i < columns.size(); ++i) {
    if (columns[i].size() != columns[0].size()) {
      throw ConfigError("correlation matrix: column '" + names[i] + "' has " +
                        std::to_string(columns[i].size()) + " rows, expected " +
                        std::to_string(columns[0].size()));
    }
  }
}

CorrelationMatrix empty_matrix(const std::vector<std::string>& names) {
  CorrelationMatrix m;
  m.columns = names;
  size_t k = names.size();
  m.r.assign(k, std::vector<std::optional<double>>(k));
  m.n.assign(k, std::vector<int64_t>(k, 0));
  return m;
}

// Diagonal rule: exactly 1.0 when the column is observed at least 3 times
// with positive variance, null otherwise. Computed directly rather than as
// pearson(x, x), whose division could land at 0.99999... instead of 1.
void fill_diagonal(CorrelationMatrix& m, const std::vector<Column>& columns) {
  for (size_t i = 0; i < columns.size(); ++i) {
    std::vector<double> vals;
    for (const std::optional<double>& v : columns[i]) {
      if (v) vals.push_back(*v);
    }
    m.n[i][i] = static_cast<int64_t>(vals.size());
    if (vals.size() < 3) continue;
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    if (var > 0.0) m.r[i][i] = 1.0;
  }
}

struct CellJob {
  size_t i;
  size_t j;
};

std::vector<CellJob> upper_triangle(size_t k) {
  std::vector<CellJob> jobs;
  jobs.reserve(k * (k - 1) / 2);
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = i + 1; j < k; ++j) jobs.push_back({i, j});
  }
  return jobs;
}

void store_cell(CorrelationMatrix& m, const CellJob& job, const PearsonResult& res) {
  m.r[job.i][job.j] = res.r;
  m.r[job.j][job.i] = res.r;
  m.n[job.i][job.j] = res.n;
  m.n[job.j][job.i] = res.n;
}

}  // namespace

CorrelationMatrix correlation_matrix_serial(const std::vector<std::string>& names,
                                            const std::vector<Column>& columns) {
  validate_matrix_input(names, columns);
  CorrelationMatrix m = empty_matrix(names);
  fill_diagonal(m, columns);
  for (const CellJob& job : upper_triangle(names.size())) {
    store_cell(m, job, pearson_with_n(columns[job.i], columns[job.j]));
  }
  return m;
}

CorrelationMatrix correlation_matrix(const std::vector<std::string>& names,
                                     const std::vector<Column>& columns) {
  validate_matrix_input(names, columns);
  CorrelationMatrix m = empty_matrix(names);
  fill_diagonal(m, columns);
  std::vector<CellJob> jobs = upper_triangle(names.size());
  std::vector<PearsonResult> results(jobs.size());
  int64_t njobs = static_cast<int64_t>(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (int64_t t = 0; t < njobs; ++t) {
    results[t] = pearson_with_n(columns[jobs[t].i], columns[jobs[t].j]);
  }
  for (size_t t = 0; t < jobs.size(); ++t) {
    store_cell(m, jobs[t], results[t]);
  }
  return m;
}

LogLogResult loglog_slope(const Column& x, const Column& y) {
  if (x.size() != y.size()) {
    throw ConfigError("loglog_slope: column lengths differ");
  }
  LogLogResult result;
  std::vector<double> lx, ly;
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i] && y[i] && *x[i] > 0.0 && *y[i] > 0.0) {
      lx.push_back(std::log(*x[i]));
      ly.push_back(std::log(*y[i]));
    }
  }
  result.n = static_cast<int64_t>(lx.size());
  if (result.n < 3) {
    result.reason = "fewer than 3 pairs with both values positive";
    return result;
  }
  double n = static_cast<double>(result.n);
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    double dx = lx[i] - mx;
    double dy = ly[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0) {
    result.reason = "x values are all equal; slope undefined";
    return result;
  }
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  // A constant y is fit exactly by the horizontal line.
  fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  result.fit = fit;
  return result;
}

void write_matrix_csv(const std::filesystem::path& path, const CorrelationMatrix& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  std::vector<std::string> header;
  header.push_back("");
  header.insert(header.end(), m.columns.begin(), m.columns.end());
  csv::write_row(out, header);
  for (size_t i = 0; i < m.columns.size(); ++i) {
    std::vector<std::string> row;
    row.push_back(m.columns[i]);
    for (size_t j = 0; j < m.columns.size(); ++j) {
      row.push_back(m.r[i][j] ? csv::format_double(*m.r[i][j]) : "");
    }
    csv::write_row(out, row);
  }
  if (!out.flush()) throw DataError("short write to " + path.string());
}

void write_matrix_json(const std::filesystem::path& path, const CorrelationMatrix& m) {
  nlohmann::ordered_json doc;
  doc["columns"] = m.columns;
  nlohmann::ordered_json r_rows = nlohmann::ordered_json::array();
  for (const auto& row : m.r) {
    nlohmann::ordered_json jrow = nlohmann::ordered_json::array();
    for (const std::optional<double>& v : row) {
      if (v) {
        jrow.push_back(*v);
      } else {
        jrow.push_back(nullptr);
      }
    }
    r_rows.push_back(std::move(jrow));
  }
  doc["r"] = std::move(r_rows);
  doc["n"] = m.n;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out.flush()) throw DataError("short write to " + path.string());
}

CorrelationMatrix read_matrix_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::ordered_json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  try {
    CorrelationMatrix m;
    m.columns = doc.at("columns").get<std::vector<std::string>>();
    for (const auto& jrow : doc.at("r")) {
      std::vector<std::optional<double>> row;
      for (const auto& v : jrow) {
        if (v.is_null()) {
          row.push_back(std::nullopt);
        } else {
          row.push_back(v.get<double>());
        }
      }
      m.r.push_back(std::move(row));
    }
    m.n = doc.at("n").get<std::vector<std::vector<int64_t>>>();
    return m;
  } catch (const nlohmann::ordered_json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace innodex::stats
