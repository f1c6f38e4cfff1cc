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

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sdct {

/// Thrown for contract violations (bad shapes, out-of-range budgets,
/// non-finite data). Carries a human-readable diagnostic.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major matrix. Used for spatial weights and, wrapped in
/// SpectralMatrix, for transform coefficients.
template <typename T>
class Matrix {
 public:
  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (rows == 0 || cols == 0) {
      throw Error("matrix must have at least one row and one column");
    }
  }

  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows == 0 || cols == 0) {
      throw Error("matrix must have at least one row and one column");
    }
    if (data_.size() != rows * cols) {
      throw Error("matrix data length " + std::to_string(data_.size()) +
                  " does not match shape " + std::to_string(rows) + "x" +
                  std::to_string(cols));
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  const std::vector<T>& values() const { return data_; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using RealMatrix = Matrix<double>;
using ComplexMatrix = Matrix<std::complex<double>>;

enum class Basis { kDct, kDftRealPart };

inline const char* to_string(Basis b) {
  return b == Basis::kDct ? "dct" : "dft";
}

/// Transform coefficients tagged with the basis that produced them.
struct SpectralMatrix {
  RealMatrix coeffs;
  Basis basis = Basis::kDct;

  std::size_t rows() const { return coeffs.rows(); }
  std::size_t cols() const { return coeffs.cols(); }
  double operator()(std::size_t u, std::size_t v) const { return coeffs(u, v); }
};

inline bool all_finite(std::span<const double> values) {
  for (double x : values) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

inline bool all_finite(std::span<const std::complex<double>> values) {
  for (const auto& z : values) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

template <typename T>
void require_valid(const Matrix<T>& m, const char* what) {
  if (m.empty()) throw Error(std::string(what) + ": empty matrix");
  if (!all_finite(m.data())) {
    throw Error(std::string(what) + ": matrix contains non-finite values");
  }
}

inline double max_abs_diff(const RealMatrix& a, const RealMatrix& b) {
  if (!a.same_shape(b)) throw Error("max_abs_diff: shape mismatch");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    worst = std::max(worst, std::abs(a.data()[k] - b.data()[k]));
  }
  return worst;
}

inline double frobenius_sq(const RealMatrix& m) {
  double s = 0.0;
  for (double x : m.data()) s += x * x;
  return s;
}

inline double inner(const RealMatrix& a, const RealMatrix& b) {
  if (!a.same_shape(b)) throw Error("inner: shape mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a.data()[k] * b.data()[k];
  return s;
}

}  // namespace sdct
