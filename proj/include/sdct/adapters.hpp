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

// Trainable weight-update adapters behind one interface: sDCTFT (energy-
// informed DCT coefficients), rDCTFT (random DCT coefficients), FourierFT
// (random real DFT coefficients) and LoRA (rank-r product A B).
//
// Convention: a frozen weight W is d1 x d2 and acts on row vectors,
// y = x (W + dW). The adapter never sees or mutates W after init.

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "sdct/matrix.hpp"
#include "sdct/partition.hpp"
#include "sdct/random.hpp"
#include "sdct/spectral.hpp"

namespace sdct {

enum class AdapterKind { kSdctft, kRdctft, kFourierft, kLora };

inline std::string_view to_string(AdapterKind k) {
  switch (k) {
    case AdapterKind::kSdctft: return "sdctft";
    case AdapterKind::kRdctft: return "rdctft";
    case AdapterKind::kFourierft: return "fourierft";
    case AdapterKind::kLora: return "lora";
  }
  return "?";
}

inline AdapterKind parse_adapter_kind(std::string_view s) {
  if (s == "sdctft") return AdapterKind::kSdctft;
  if (s == "rdctft") return AdapterKind::kRdctft;
  if (s == "fourierft") return AdapterKind::kFourierft;
  if (s == "lora") return AdapterKind::kLora;
  throw Error("unknown adapter kind '" + std::string(s) + "'");
}

inline bool is_spectral(AdapterKind k) { return k != AdapterKind::kLora; }

/// Only the fields relevant to `kind` may be set: n for spectral kinds,
/// r for lora, delta for sdctft alone.
struct AdapterConfig {
  AdapterKind kind = AdapterKind::kSdctft;
  std::optional<std::size_t> n;
  std::optional<std::size_t> r;
  double alpha = 1.0;
  std::optional<double> delta;
  std::uint64_t seed = 0;

  static AdapterConfig sdctft(std::size_t n, double alpha = 1.0, double delta = 0.7,
                              std::uint64_t seed = 0) {
    return {AdapterKind::kSdctft, n, std::nullopt, alpha, delta, seed};
  }
  static AdapterConfig rdctft(std::size_t n, double alpha = 1.0, std::uint64_t seed = 0) {
    return {AdapterKind::kRdctft, n, std::nullopt, alpha, std::nullopt, seed};
  }
  static AdapterConfig fourierft(std::size_t n, double alpha = 1.0, std::uint64_t seed = 0) {
    return {AdapterKind::kFourierft, n, std::nullopt, alpha, std::nullopt, seed};
  }
  static AdapterConfig lora(std::size_t r, double alpha = 1.0, std::uint64_t seed = 0) {
    return {AdapterKind::kLora, std::nullopt, r, alpha, std::nullopt, seed};
  }

  std::size_t budget() const { return is_spectral(kind) ? n.value_or(0) : r.value_or(0); }

  void validate() const {
    const std::string name(to_string(kind));
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(name + ": alpha must be > 0");
    if (is_spectral(kind)) {
      if (!n || *n == 0) throw Error(name + ": n must be >= 1");
      if (r) throw Error(name + ": rank r is a lora-only field");
    } else {
      if (!r || *r == 0) throw Error("lora: r must be >= 1");
      if (n) throw Error("lora: n is a spectral-only field");
    }
    if (kind == AdapterKind::kSdctft) {
      if (!delta || !(*delta >= 0.0 && *delta <= 1.0)) {
        throw Error("sdctft: delta must lie in [0,1]");
      }
    } else if (delta) {
      throw Error(name + ": delta is an sdctft-only field");
    }
  }
};

namespace detail {

// Distinct stream for value initialization so it never aliases the draws
// that picked the plan.
inline Rng init_rng(std::uint64_t seed) { return Rng(seed ^ 0x9E3779B97F4A7C15ULL); }

}  // namespace detail

namespace detail {

using DenseMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Per-dimension basis tables, row k holding the k-th basis vector. For the
// DCT only `cos_*` is used (orthonormal DCT-II rows); for the DFT, `cos_*`
// and `sin_*` hold cos/sin(2 pi k i / n).
struct BasisTables {
  DenseMat cos_rows, sin_rows, cos_cols, sin_cols;

  static DenseMat from(const std::vector<double>& table, std::size_t n) {
    DenseMat m(n, n);
    std::copy(table.begin(), table.end(), m.data());
    return m;
  }

  static DenseMat trig(std::size_t n, bool sine) {
    DenseMat m(n, n);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        const double phase = 2.0 * std::numbers::pi * static_cast<double>((k * i) % n) /
                             static_cast<double>(n);
        m(k, i) = sine ? std::sin(phase) : std::cos(phase);
      }
    }
    return m;
  }

  BasisTables(Basis basis, std::size_t rows, std::size_t cols) {
    if (basis == Basis::kDct) {
      cos_rows = from(dct_table(rows), rows);
      cos_cols = from(dct_table(cols), cols);
    } else {
      cos_rows = trig(rows, false);
      sin_rows = trig(rows, true);
      cos_cols = trig(cols, false);
      sin_cols = trig(cols, true);
    }
  }
};

}  // namespace detail

/// n trainable coefficients at the plan's spectral positions.
///
/// Reconstruction and gradient run as small dense matmuls against cached
/// basis tables; they agree with idct2 / dft2_real to rounding.
class SpectralAdapter {
 public:
  SpectralAdapter(AdapterConfig cfg, SelectionPlan plan, Basis basis,
                  std::vector<double> coeffs)
      : cfg_(std::move(cfg)),
        plan_(std::move(plan)),
        indices_(plan_.indices()),
        basis_(basis),
        coeffs_(std::move(coeffs)),
        tables_(basis_, plan_.rows, plan_.cols) {
    if (coeffs_.size() != plan_.n_total || indices_.size() != plan_.n_total) {
      throw Error("spectral adapter: coefficient count does not match plan");
    }
    if (!all_finite(coeffs_)) throw Error("spectral adapter: non-finite coefficient");
  }

  const AdapterConfig& config() const { return cfg_; }
  const SelectionPlan& plan() const { return plan_; }
  const std::vector<Index>& indices() const { return indices_; }
  Basis basis() const { return basis_; }
  double alpha() const { return cfg_.alpha; }
  std::size_t rows() const { return plan_.rows; }
  std::size_t cols() const { return plan_.cols; }

  std::span<double> params() { return coeffs_; }
  std::span<const double> params() const { return coeffs_; }
  std::size_t param_count() const { return coeffs_.size(); }

  std::vector<SparseEntry> entries() const {
    std::vector<SparseEntry> out(indices_.size());
    for (std::size_t k = 0; k < indices_.size(); ++k) {
      out[k] = {indices_[k].u, indices_[k].v, coeffs_[k]};
    }
    return out;
  }

  /// alpha * idct2(S) for DCT kinds, alpha * Re(idft2(S)) for FourierFT,
  /// where S holds the coefficients at the plan indices and zeros elsewhere.
  RealMatrix delta_weight() const {
    detail::DenseMat spectrum = detail::DenseMat::Zero(rows(), cols());
    for (std::size_t k = 0; k < indices_.size(); ++k) {
      spectrum(indices_[k].u, indices_[k].v) = coeffs_[k];
    }
    detail::DenseMat dw;
    if (basis_ == Basis::kDct) {
      dw = cfg_.alpha * (tables_.cos_rows.transpose() * spectrum * tables_.cos_cols);
    } else {
      // Re(e^{i(a+b)}) = cos a cos b - sin a sin b
      const double scale = cfg_.alpha / static_cast<double>(rows() * cols());
      dw = scale * (tables_.cos_rows.transpose() * spectrum * tables_.cos_cols -
                    tables_.sin_rows.transpose() * spectrum * tables_.sin_cols);
    }
    return RealMatrix(rows(), cols(), std::vector<double>(dw.data(), dw.data() + dw.size()));
  }

  /// d loss / d coeffs given d loss / d (W + dW). Uses the adjoint of the
  /// reconstruction: dct2 for the DCT (orthonormal pair), the real part of
  /// the forward DFT scaled by 1/(MN) for FourierFT.
  std::vector<double> grad(const RealMatrix& upstream) const {
    if (upstream.rows() != rows() || upstream.cols() != cols()) {
      throw Error("spectral adapter grad: upstream shape mismatch");
    }
    const Eigen::Map<const detail::DenseMat> g_mat(upstream.data().data(), rows(), cols());
    detail::DenseMat f;
    double scale = cfg_.alpha;
    if (basis_ == Basis::kDct) {
      f = tables_.cos_rows * g_mat * tables_.cos_cols.transpose();
    } else {
      f = tables_.cos_rows * g_mat * tables_.cos_cols.transpose() -
          tables_.sin_rows * g_mat * tables_.sin_cols.transpose();
      scale /= static_cast<double>(rows() * cols());
    }
    std::vector<double> g(indices_.size());
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = scale * f(indices_[k].u, indices_[k].v);
    return g;
  }

 private:
  AdapterConfig cfg_;
  SelectionPlan plan_;
  std::vector<Index> indices_;
  Basis basis_;
  std::vector<double> coeffs_;
  detail::BasisTables tables_;
};

/// dW = alpha * A B with A: d1 x r, B: r x d2, stored as one flat vector
/// [A row-major | B row-major].
class LoraAdapter {
 public:
  LoraAdapter(AdapterConfig cfg, std::size_t d1, std::size_t d2, std::vector<double> values)
      : cfg_(std::move(cfg)), d1_(d1), d2_(d2), values_(std::move(values)) {
    if (values_.size() != rank() * (d1_ + d2_)) {
      throw Error("lora adapter: parameter count does not equal r*(d1+d2)");
    }
    if (!all_finite(values_)) throw Error("lora adapter: non-finite parameter");
  }

  const AdapterConfig& config() const { return cfg_; }
  std::size_t rank() const { return *cfg_.r; }
  double alpha() const { return cfg_.alpha; }
  std::size_t rows() const { return d1_; }
  std::size_t cols() const { return d2_; }

  std::span<double> params() { return values_; }
  std::span<const double> params() const { return values_; }
  std::size_t param_count() const { return values_.size(); }

  double a(std::size_t i, std::size_t k) const { return values_[i * rank() + k]; }
  double b(std::size_t k, std::size_t j) const { return values_[d1_ * rank() + k * d2_ + j]; }

  RealMatrix delta_weight() const {
    RealMatrix dw(d1_, d2_, 0.0);
    for (std::size_t i = 0; i < d1_; ++i) {
      for (std::size_t k = 0; k < rank(); ++k) {
        const double aik = cfg_.alpha * a(i, k);
        for (std::size_t j = 0; j < d2_; ++j) dw(i, j) += aik * b(k, j);
      }
    }
    return dw;
  }

  /// [dA | dB] with dA = alpha G B^T and dB = alpha A^T G.
  std::vector<double> grad(const RealMatrix& upstream) const {
    if (upstream.rows() != d1_ || upstream.cols() != d2_) {
      throw Error("lora grad: upstream shape mismatch");
    }
    const std::size_t r = rank();
    std::vector<double> g(values_.size(), 0.0);
    for (std::size_t i = 0; i < d1_; ++i) {
      for (std::size_t k = 0; k < r; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < d2_; ++j) s += upstream(i, j) * b(k, j);
        g[i * r + k] = cfg_.alpha * s;
      }
    }
    for (std::size_t k = 0; k < r; ++k) {
      for (std::size_t j = 0; j < d2_; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < d1_; ++i) s += a(i, k) * upstream(i, j);
        g[d1_ * r + k * d2_ + j] = cfg_.alpha * s;
      }
    }
    return g;
  }

 private:
  AdapterConfig cfg_;
  std::size_t d1_;
  std::size_t d2_;
  std::vector<double> values_;
};

/// Any adapter kind behind a common surface.
class Adapter {
 public:
  Adapter(SpectralAdapter a) : impl_(std::move(a)) {}
  Adapter(LoraAdapter a) : impl_(std::move(a)) {}

  const AdapterConfig& config() const {
    return std::visit([](const auto& a) -> const AdapterConfig& { return a.config(); }, impl_);
  }
  AdapterKind kind() const { return config().kind; }
  std::size_t rows() const {
    return std::visit([](const auto& a) { return a.rows(); }, impl_);
  }
  std::size_t cols() const {
    return std::visit([](const auto& a) { return a.cols(); }, impl_);
  }
  std::span<double> params() {
    return std::visit([](auto& a) { return a.params(); }, impl_);
  }
  std::span<const double> params() const {
    return std::visit([](const auto& a) { return a.params(); }, impl_);
  }
  std::size_t param_count() const {
    return std::visit([](const auto& a) { return a.param_count(); }, impl_);
  }
  RealMatrix delta_weight() const {
    return std::visit([](const auto& a) { return a.delta_weight(); }, impl_);
  }
  std::vector<double> grad(const RealMatrix& upstream) const {
    return std::visit([&](const auto& a) { return a.grad(upstream); }, impl_);
  }

  const SpectralAdapter* spectral() const { return std::get_if<SpectralAdapter>(&impl_); }
  const LoraAdapter* lora() const { return std::get_if<LoraAdapter>(&impl_); }

 private:
  std::variant<SpectralAdapter, LoraAdapter> impl_;
};

namespace detail {

inline std::vector<double> kaiming_coeffs(std::size_t n, std::uint64_t seed) {
  Rng rng = init_rng(seed);
  const double stddev = std::sqrt(2.0 / static_cast<double>(n));
  std::vector<double> c(n);
  for (double& x : c) x = rng.normal(0.0, stddev);
  return c;
}

inline void check_budget(const RealMatrix& w, const AdapterConfig& cfg, AdapterKind expect) {
  if (cfg.kind != expect) {
    throw Error("adapter init: config kind is " + std::string(to_string(cfg.kind)) +
                ", expected " + std::string(to_string(expect)));
  }
  cfg.validate();
  require_valid(w, "adapter init");
  if (is_spectral(expect) && *cfg.n > w.rows() * w.cols()) {
    throw Error(std::string(to_string(expect)) + ": n=" + std::to_string(*cfg.n) +
                " exceeds " + std::to_string(w.rows()) + "x" + std::to_string(w.cols()));
  }
}

}  // namespace detail

/// Energy-informed DCT adapter: the plan comes from W's own spectrum,
/// coefficients start at N(0, 2/n) independently of W.
inline SpectralAdapter init_sdctft(const RealMatrix& w, const AdapterConfig& cfg) {
  detail::check_budget(w, cfg, AdapterKind::kSdctft);
  SelectionPlan plan = build_selection_plan(dct2(w), *cfg.n, *cfg.delta, cfg.seed);
  return {cfg, std::move(plan), Basis::kDct, detail::kaiming_coeffs(*cfg.n, cfg.seed)};
}

inline SpectralAdapter init_rdctft(const RealMatrix& w, const AdapterConfig& cfg) {
  detail::check_budget(w, cfg, AdapterKind::kRdctft);
  SelectionPlan plan = build_random_plan(w.rows(), w.cols(), *cfg.n, cfg.seed);
  return {cfg, std::move(plan), Basis::kDct, detail::kaiming_coeffs(*cfg.n, cfg.seed)};
}

inline SpectralAdapter init_fourierft(const RealMatrix& w, const AdapterConfig& cfg) {
  detail::check_budget(w, cfg, AdapterKind::kFourierft);
  SelectionPlan plan = build_random_plan(w.rows(), w.cols(), *cfg.n, cfg.seed);
  return {cfg, std::move(plan), Basis::kDftRealPart,
          detail::kaiming_coeffs(*cfg.n, cfg.seed)};
}

/// A ~ N(0, 2/d1), B = 0, so the initial update is exactly zero.
inline LoraAdapter init_lora(const RealMatrix& w, const AdapterConfig& cfg) {
  detail::check_budget(w, cfg, AdapterKind::kLora);
  const std::size_t d1 = w.rows();
  const std::size_t d2 = w.cols();
  const std::size_t r = *cfg.r;
  std::vector<double> values(r * (d1 + d2), 0.0);
  Rng rng = detail::init_rng(cfg.seed);
  const double stddev = std::sqrt(2.0 / static_cast<double>(d1));
  for (std::size_t k = 0; k < d1 * r; ++k) values[k] = rng.normal(0.0, stddev);
  return {cfg, d1, d2, std::move(values)};
}

inline Adapter init_adapter(const RealMatrix& w, const AdapterConfig& cfg) {
  switch (cfg.kind) {
    case AdapterKind::kSdctft: return init_sdctft(w, cfg);
    case AdapterKind::kRdctft: return init_rdctft(w, cfg);
    case AdapterKind::kFourierft: return init_fourierft(w, cfg);
    case AdapterKind::kLora: return init_lora(w, cfg);
  }
  throw Error("init_adapter: unknown kind");
}

/// y = x (W + dW) for a row vector x of length d1.
inline std::vector<double> forward(const Adapter& adapter, const RealMatrix& w,
                                   std::span<const double> x) {
  if (adapter.rows() != w.rows() || adapter.cols() != w.cols()) {
    throw Error("forward: adapter shape does not match weight");
  }
  if (x.size() != w.rows()) {
    throw Error("forward: input length " + std::to_string(x.size()) + " != " +
                std::to_string(w.rows()));
  }
  const RealMatrix dw = adapter.delta_weight();
  std::vector<double> y(w.cols(), 0.0);
  for (std::size_t i = 0; i < w.rows(); ++i) {
    for (std::size_t j = 0; j < w.cols(); ++j) y[j] += x[i] * (w(i, j) + dw(i, j));
  }
  return y;
}

/// Row-wise forward over a batch (batch x d1) -> (batch x d2).
inline RealMatrix forward_batch(const Adapter& adapter, const RealMatrix& w,
                                const RealMatrix& x) {
  if (x.cols() != w.rows()) throw Error("forward_batch: input width does not match weight rows");
  if (adapter.rows() != w.rows() || adapter.cols() != w.cols()) {
    throw Error("forward_batch: adapter shape does not match weight");
  }
  const RealMatrix dw = adapter.delta_weight();
  RealMatrix y(x.rows(), w.cols(), 0.0);
  for (std::size_t b = 0; b < x.rows(); ++b) {
    for (std::size_t i = 0; i < w.rows(); ++i) {
      const double xi = x(b, i);
      for (std::size_t j = 0; j < w.cols(); ++j) y(b, j) += xi * (w(i, j) + dw(i, j));
    }
  }
  return y;
}

/// Sets the coefficients to the least-squares fit of `target` (in the
/// span of the adapter's basis images) and returns the residual max-abs
/// error. The design matrix is built from unit-coefficient reconstructions
/// and solved with column-pivoted QR.
inline double fit_least_squares(SpectralAdapter& adapter, const RealMatrix& target) {
  if (target.rows() != adapter.rows() || target.cols() != adapter.cols()) {
    throw Error("fit_least_squares: target shape mismatch");
  }
  const std::size_t n = adapter.param_count();
  const std::size_t cells = target.size();
  Eigen::MatrixXd design(cells, n);
  const auto idx = adapter.indices();
  for (std::size_t k = 0; k < n; ++k) {
    const SparseEntry unit{idx[k].u, idx[k].v, adapter.alpha()};
    const RealMatrix image =
        adapter.basis() == Basis::kDct
            ? idct2_sparse(std::span(&unit, 1), adapter.rows(), adapter.cols())
            : idft2_real_part_sparse(std::span(&unit, 1), adapter.rows(), adapter.cols());
    for (std::size_t c = 0; c < cells; ++c) design(c, k) = image.data()[c];
  }
  const Eigen::Map<const Eigen::VectorXd> rhs(target.data().data(),
                                              static_cast<Eigen::Index>(cells));
  const Eigen::VectorXd sol = design.colPivHouseholderQr().solve(rhs);
  std::copy(sol.data(), sol.data() + n, adapter.params().begin());
  return max_abs_diff(adapter.delta_weight(), target);
}

// Checkpoints ---------------------------------------------------------------

inline nlohmann::ordered_json config_to_json(const AdapterConfig& cfg) {
  nlohmann::ordered_json j;
  if (cfg.n) j["n"] = *cfg.n;
  if (cfg.r) j["r"] = *cfg.r;
  j["alpha"] = cfg.alpha;
  if (cfg.delta) j["delta"] = *cfg.delta;
  j["seed"] = cfg.seed;
  return j;
}

inline nlohmann::ordered_json checkpoint_to_json(const Adapter& adapter) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(adapter.kind());
  j["config"] = config_to_json(adapter.config());
  if (const auto* s = adapter.spectral()) {
    j["plan"] = plan_to_json(s->plan());
    j["coeffs"] = std::vector<double>(s->params().begin(), s->params().end());
  } else {
    const auto* l = adapter.lora();
    auto a = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < l->rows(); ++i) {
      std::vector<double> row(l->rank());
      for (std::size_t k = 0; k < l->rank(); ++k) row[k] = l->a(i, k);
      a.push_back(row);
    }
    auto b = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < l->rank(); ++k) {
      std::vector<double> row(l->cols());
      for (std::size_t jj = 0; jj < l->cols(); ++jj) row[jj] = l->b(k, jj);
      b.push_back(row);
    }
    j["A"] = std::move(a);
    j["B"] = std::move(b);
  }
  return j;
}

inline Adapter checkpoint_from_json(const nlohmann::ordered_json& j) {
  try {
    AdapterConfig cfg;
    cfg.kind = parse_adapter_kind(j.at("kind").get<std::string>());
    const auto& jc = j.at("config");
    if (jc.contains("n")) cfg.n = jc["n"].get<std::size_t>();
    if (jc.contains("r")) cfg.r = jc["r"].get<std::size_t>();
    cfg.alpha = jc.at("alpha").get<double>();
    if (jc.contains("delta")) cfg.delta = jc["delta"].get<double>();
    cfg.seed = jc.at("seed").get<std::uint64_t>();
    cfg.validate();
    if (is_spectral(cfg.kind)) {
      SelectionPlan plan = plan_from_json(j.at("plan"));
      const Basis basis =
          cfg.kind == AdapterKind::kFourierft ? Basis::kDftRealPart : Basis::kDct;
      return SpectralAdapter(cfg, std::move(plan), basis,
                             j.at("coeffs").get<std::vector<double>>());
    }
    const auto a = j.at("A").get<std::vector<std::vector<double>>>();
    const auto b = j.at("B").get<std::vector<std::vector<double>>>();
    if (a.empty() || b.size() != *cfg.r) throw Error("lora checkpoint: bad A/B shape");
    const std::size_t d1 = a.size();
    const std::size_t d2 = b.front().size();
    std::vector<double> values;
    values.reserve(*cfg.r * (d1 + d2));
    for (const auto& row : a) {
      if (row.size() != *cfg.r) throw Error("lora checkpoint: A row width != r");
      values.insert(values.end(), row.begin(), row.end());
    }
    for (const auto& row : b) {
      if (row.size() != d2) throw Error("lora checkpoint: ragged B");
      values.insert(values.end(), row.begin(), row.end());
    }
    return LoraAdapter(cfg, d1, d2, std::move(values));
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("adapter checkpoint: ") + e.what());
  }
}

}  // namespace sdct
