// Copyright 2026 The sdct Authors. All Rights Reserved.
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

// Matrix files: CSV of reals, row-major, no header. Values are written
// with 17 significant digits so they read back bit-identically. Complex
// matrices interleave (re, im) pairs, giving 2N columns per row.

#include <complex>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sdct/matrix.hpp"

namespace sdct {

inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::vector<std::vector<double>> read_csv_rows(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw Error("csv line " + std::to_string(line_no) + ": not a number: '" + cell + "'");
      }
      if (cell.find_first_not_of(" \t", used) != std::string::npos) {
        throw Error("csv line " + std::to_string(line_no) + ": trailing characters in '" +
                    cell + "'");
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error("csv line " + std::to_string(line_no) + ": expected " +
                  std::to_string(rows.front().size()) + " columns, got " +
                  std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error("csv: no data rows");
  return rows;
}

inline RealMatrix read_matrix_csv(std::istream& in) {
  const auto rows = read_csv_rows(in);
  std::vector<double> data;
  for (const auto& r : rows) data.insert(data.end(), r.begin(), r.end());
  RealMatrix m(rows.size(), rows.front().size(), std::move(data));
  require_valid(m, "csv");
  return m;
}

inline ComplexMatrix read_complex_csv(std::istream& in) {
  const auto rows = read_csv_rows(in);
  if (rows.front().size() % 2 != 0) throw Error("complex csv: odd column count");
  std::vector<std::complex<double>> data;
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < r.size(); k += 2) data.emplace_back(r[k], r[k + 1]);
  }
  ComplexMatrix m(rows.size(), rows.front().size() / 2, std::move(data));
  require_valid(m, "complex csv");
  return m;
}

inline void write_matrix_csv(std::ostream& os, const RealMatrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << format_real(m(i, j));
    }
    os << '\n';
  }
}

inline void write_complex_csv(std::ostream& os, const ComplexMatrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << format_real(m(i, j).real()) << ',' << format_real(m(i, j).imag());
    }
    os << '\n';
  }
}

}  // namespace sdct
