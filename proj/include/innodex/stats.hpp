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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace innodex::stats {

// A feature column; null marks a zip where the feature is unobserved
// (distinct from an observed zero).
using Column = std::vector<std::optional<double>>;

struct PearsonResult {
  std::optional<double> r;  // clamped to [-1, 1]
  int64_t n = 0;            // complete pairs
};

/// Pearson correlation with pairwise deletion: rows where either value is
/// null are skipped. Null when fewer than 3 complete pairs remain or either
/// side has zero variance on them. Symmetric bit-for-bit. Throws ConfigError
/// on length mismatch.
PearsonResult pearson_with_n(const Column& x, const Column& y);
std::optional<double> pearson(const Column& x, const Column& y);

struct CorrelationMatrix {
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> r;  // symmetric
  std::vector<std::vector<int64_t>> n;                // complete-pair counts
};

/// All pairwise correlations in the given column order. The diagonal is
/// exactly 1.0 where the column has variance (null otherwise). The OpenMP
/// version parallelizes over the strict upper triangle and must agree with
/// the serial reference bit-for-bit. Throws ConfigError on an empty column
/// set or mismatched column lengths.
CorrelationMatrix correlation_matrix_serial(const std::vector<std::string>& names,
                                            const std::vector<Column>& columns);
CorrelationMatrix correlation_matrix(const std::vector<std::string>& names,
                                     const std::vector<Column>& columns);

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;  // in ln units
  double r2 = 0.0;
};

struct LogLogResult {
  std::optional<LogLogFit> fit;
  std::string reason;  // set when fit is null
  int64_t n = 0;       // pairs with both sides positive
};

/// OLS of ln(y) on ln(x) over the pairs where both are positive and
/// non-null; a slope above 1 means y grows super-linearly in x. Null with a
/// reason when fewer than 3 such pairs exist or x is degenerate.
LogLogResult loglog_slope(const Column& x, const Column& y);

/// Square CSV with a header row and a leading name column; null cells stay
/// empty.
void write_matrix_csv(const std::filesystem::path& path, const CorrelationMatrix& m);

/// JSON object with "columns", "r", and "n"; null r cells serialize as
/// JSON null.
void write_matrix_json(const std::filesystem::path& path, const CorrelationMatrix& m);
CorrelationMatrix read_matrix_json(const std::filesystem::path& path);

}  // namespace innodex::stats
