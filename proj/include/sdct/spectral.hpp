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

// Orthonormal 2D DCT-II / DCT-III pair and a 2D DFT for the FourierFT
// baseline. All transforms are direct separable passes, O(MN(M+N)).

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "sdct/matrix.hpp"

namespace sdct {

/// One nonzero of a sparse spectrum.
struct SparseEntry {
  std::size_t u = 0;
  std::size_t v = 0;
  double value = 0.0;
};

namespace detail {

// table[k * n + i] = a(k) * cos(pi / n * (i + 1/2) * k), a(0) = sqrt(1/n),
// a(k>0) = sqrt(2/n). Row k is the k-th orthonormal DCT-II basis vector.
inline std::vector<double> dct_table(std::size_t n) {
  std::vector<double> table(n * n);
  const double dn = static_cast<double>(n);
  const double a0 = std::sqrt(1.0 / dn);
  const double ak = std::sqrt(2.0 / dn);
  for (std::size_t k = 0; k < n; ++k) {
    const double scale = k == 0 ? a0 : ak;
    for (std::size_t i = 0; i < n; ++i) {
      table[k * n + i] =
          scale * std::cos(std::numbers::pi / dn * (static_cast<double>(i) + 0.5) *
                           static_cast<double>(k));
    }
  }
  return table;
}

// table[k * n + i] = exp(sign * 2 pi i * (k i mod n) / n); reducing the
// phase modulo n keeps the argument small and the twiddles exact at k i = 0.
inline std::vector<std::complex<double>> dft_table(std::size_t n, double sign) {
  std::vector<std::complex<double>> table(n * n);
  const double dn = static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const double phase = 2.0 * std::numbers::pi *
                           static_cast<double>((k * i) % n) / dn;
      table[k * n + i] = std::polar(1.0, sign * phase);
    }
  }
  return table;
}

inline void check_entries(std::span<const SparseEntry> entries, std::size_t rows,
                          std::size_t cols) {
  if (rows == 0 || cols == 0) throw Error("sparse spectrum: empty shape");
  std::vector<bool> seen(rows * cols, false);
  for (const auto& e : entries) {
    if (e.u >= rows || e.v >= cols) {
      throw Error("sparse spectrum: index (" + std::to_string(e.u) + "," +
                  std::to_string(e.v) + ") out of bounds for " +
                  std::to_string(rows) + "x" + std::to_string(cols));
    }
    if (seen[e.u * cols + e.v]) {
      throw Error("sparse spectrum: duplicate index (" + std::to_string(e.u) +
                  "," + std::to_string(e.v) + ")");
    }
    seen[e.u * cols + e.v] = true;
    if (!std::isfinite(e.value)) throw Error("sparse spectrum: non-finite value");
  }
}

}  // namespace detail

/// Orthonormal 2D DCT-II:
///   F[u,v] = a(u) a(v) sum_ij W[i,j] cos(pi/M (i+1/2) u) cos(pi/N (j+1/2) v)
/// with a() taken per dimension (M for u, N for v).
inline SpectralMatrix dct2(const RealMatrix& w) {
  require_valid(w, "dct2");
  const std::size_t m = w.rows();
  const std::size_t n = w.cols();
  const auto cm = detail::dct_table(m);
  const auto cn = detail::dct_table(n);

  RealMatrix tmp(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t v = 0; v < n; ++v) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += w(i, j) * cn[v * n + j];
      tmp(i, v) = s;
    }
  }
  RealMatrix out(m, n);
  for (std::size_t u = 0; u < m; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += cm[u * m + i] * tmp(i, v);
      out(u, v) = s;
    }
  }
  return {std::move(out), Basis::kDct};
}

/// Inverse of dct2 (orthonormal DCT-III); also its adjoint.
inline RealMatrix idct2(const SpectralMatrix& f) {
  if (f.basis != Basis::kDct) throw Error("idct2: input basis must be dct");
  require_valid(f.coeffs, "idct2");
  const std::size_t m = f.rows();
  const std::size_t n = f.cols();
  const auto cm = detail::dct_table(m);
  const auto cn = detail::dct_table(n);

  RealMatrix tmp(m, n);
  for (std::size_t u = 0; u < m; ++u) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t v = 0; v < n; ++v) s += f(u, v) * cn[v * n + j];
      tmp(u, j) = s;
    }
  }
  RealMatrix out(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t u = 0; u < m; ++u) s += cm[u * m + i] * tmp(u, j);
      out(i, j) = s;
    }
  }
  return out;
}

/// idct2 of a spectrum that is zero outside `entries`, evaluating only the
/// selected basis images (cost n*M*N). Bit-identical to the dense path for a
/// single entry.
inline RealMatrix idct2_sparse(std::span<const SparseEntry> entries,
                               std::size_t rows, std::size_t cols) {
  detail::check_entries(entries, rows, cols);
  const auto cm = detail::dct_table(rows);
  const auto cn = detail::dct_table(cols);
  RealMatrix out(rows, cols, 0.0);
  for (const auto& e : entries) {
    for (std::size_t i = 0; i < rows; ++i) {
      const double ci = cm[e.u * rows + i];
      for (std::size_t j = 0; j < cols; ++j) {
        out(i, j) += ci * (e.value * cn[e.v * cols + j]);
      }
    }
  }
  return out;
}

/// Unnormalized forward DFT of a real matrix:
///   F[u,v] = sum_ij W[i,j] exp(-2 pi i (u i / M + v j / N)).
inline ComplexMatrix dft2_real(const RealMatrix& w) {
  require_valid(w, "dft2_real");
  const std::size_t m = w.rows();
  const std::size_t n = w.cols();
  const auto tm = detail::dft_table(m, -1.0);
  const auto tn = detail::dft_table(n, -1.0);

  ComplexMatrix tmp(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t v = 0; v < n; ++v) {
      std::complex<double> s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += w(i, j) * tn[v * n + j];
      tmp(i, v) = s;
    }
  }
  ComplexMatrix out(m, n);
  for (std::size_t u = 0; u < m; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      std::complex<double> s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += tm[u * m + i] * tmp(i, v);
      out(u, v) = s;
    }
  }
  return out;
}

/// Real part of the 1/(MN)-normalized inverse DFT.
inline RealMatrix idft2_real_part(const ComplexMatrix& f) {
  require_valid(f, "idft2_real_part");
  const std::size_t m = f.rows();
  const std::size_t n = f.cols();
  const auto tm = detail::dft_table(m, 1.0);
  const auto tn = detail::dft_table(n, 1.0);

  ComplexMatrix tmp(m, n);
  for (std::size_t u = 0; u < m; ++u) {
    for (std::size_t j = 0; j < n; ++j) {
      std::complex<double> s = 0.0;
      for (std::size_t v = 0; v < n; ++v) s += f(u, v) * tn[v * n + j];
      tmp(u, j) = s;
    }
  }
  const double norm = 1.0 / static_cast<double>(m * n);
  RealMatrix out(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::complex<double> s = 0.0;
      for (std::size_t u = 0; u < m; ++u) s += tm[u * m + i] * tmp(u, j);
      out(i, j) = s.real() * norm;
    }
  }
  return out;
}

/// idft2_real_part of a spectrum holding real values at `entries` only:
///   W[i,j] = 1/(MN) sum_k c_k cos(2 pi (u_k i / M + v_k j / N)).
inline RealMatrix idft2_real_part_sparse(std::span<const SparseEntry> entries,
                                         std::size_t rows, std::size_t cols) {
  detail::check_entries(entries, rows, cols);
  const std::size_t period = rows * cols;
  const double norm = 1.0 / static_cast<double>(period);
  // cos(2 pi k / (MN)) for every phase k; the exact phase of (u i, v j) is
  // ((u i mod M) N + (v j mod N) M) mod MN.
  std::vector<double> cosines(period);
  for (std::size_t k = 0; k < period; ++k) {
    cosines[k] = std::cos(2.0 * std::numbers::pi * static_cast<double>(k) /
                          static_cast<double>(period));
  }
  RealMatrix out(rows, cols, 0.0);
  for (const auto& e : entries) {
    const double c = e.value * norm;
    for (std::size_t i = 0; i < rows; ++i) {
      const std::size_t pi = ((e.u * i) % rows) * cols;
      for (std::size_t j = 0; j < cols; ++j) {
        const std::size_t pj = ((e.v * j) % cols) * rows;
        out(i, j) += c * cosines[(pi + pj) % period];
      }
    }
  }
  return out;
}

}  // namespace sdct
