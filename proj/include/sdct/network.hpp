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

// Frozen 2 -> H -> H -> C ReLU network with an adapter on the H x H hidden
// weight, softmax cross-entropy, and hand-written backprop.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sdct/adapters.hpp"
#include "sdct/matrix.hpp"
#include "sdct/random.hpp"

namespace sdct {

struct LabeledData {
  RealMatrix x;                      // batch x input_dim
  std::vector<std::size_t> labels;  // batch
};

struct NetworkConfig {
  std::size_t input_dim = 2;
  std::size_t hidden = 64;
  std::size_t classes = 8;
  // Scale of the frozen hidden weight relative to Kaiming (N(0, 2/H)).
  double base_gain = 0.3;
  std::uint64_t seed = 0;
};

struct ToyNetwork {
  RealMatrix w_in;       // input_dim x H, frozen
  std::vector<double> b_in;
  RealMatrix w_hidden;   // H x H, frozen; the adapted matrix
  std::vector<double> b_hidden;
  RealMatrix w_out;      // H x C
  std::vector<double> b_out;
  std::optional<Adapter> adapter;

  std::size_t hidden() const { return w_hidden.rows(); }
  std::size_t classes() const { return w_out.cols(); }
  std::size_t head_param_count() const { return w_out.size() + b_out.size(); }
};

inline ToyNetwork make_toy_network(const NetworkConfig& cfg) {
  if (cfg.input_dim == 0 || cfg.hidden == 0 || cfg.classes == 0) {
    throw Error("network: dimensions must be positive");
  }
  if (!(cfg.base_gain > 0.0)) throw Error("network: base_gain must be > 0");
  Rng rng(cfg.seed);
  const double h = static_cast<double>(cfg.hidden);
  auto fill = [&](std::size_t r, std::size_t c, double stddev) {
    RealMatrix m(r, c);
    for (double& x : m.data()) x = rng.normal(0.0, stddev);
    return m;
  };
  ToyNetwork net;
  net.w_in = fill(cfg.input_dim, cfg.hidden, std::sqrt(2.0 / static_cast<double>(cfg.input_dim)));
  net.b_in.resize(cfg.hidden);
  for (double& b : net.b_in) b = rng.normal(0.0, 0.1);
  net.w_hidden = fill(cfg.hidden, cfg.hidden, cfg.base_gain * std::sqrt(2.0 / h));
  net.b_hidden.assign(cfg.hidden, 0.0);
  net.w_out = fill(cfg.hidden, cfg.classes, std::sqrt(1.0 / h));
  net.b_out.assign(cfg.classes, 0.0);
  return net;
}

namespace detail {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;

inline ConstMap view(const RealMatrix& m) {
  return ConstMap(m.data().data(), static_cast<Eigen::Index>(m.rows()),
                  static_cast<Eigen::Index>(m.cols()));
}

inline Eigen::Map<const Eigen::RowVectorXd> view(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::RowVectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline RealMatrix to_real(const RowMat& m) {
  return RealMatrix(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()),
                    std::vector<double>(m.data(), m.data() + m.size()));
}

struct Activations {
  RowMat h1;      // relu(x W_in + b_in)
  RowMat z2;      // h1 (W_hidden + dW) + b_hidden
  RowMat h2;      // relu(z2)
  RowMat logits;  // h2 W_out + b_out
};

inline void check_shapes(const ToyNetwork& net, const RealMatrix& x) {
  if (x.cols() != net.w_in.rows()) {
    throw Error("network: input width " + std::to_string(x.cols()) + " != " +
                std::to_string(net.w_in.rows()));
  }
  if (net.adapter && (net.adapter->rows() != net.hidden() || net.adapter->cols() != net.hidden())) {
    throw Error("network: adapter shape does not match the hidden weight");
  }
}

inline Activations run_forward(const ToyNetwork& net, const RealMatrix& x) {
  check_shapes(net, x);
  Activations a;
  a.h1 = (view(x).lazyProduct(view(net.w_in)).rowwise() + view(net.b_in)).cwiseMax(0.0);
  RowMat merged = view(net.w_hidden);
  if (net.adapter) merged += view(net.adapter->delta_weight());
  a.z2 = (a.h1 * merged).rowwise() + view(net.b_hidden);
  a.h2 = a.z2.cwiseMax(0.0);
  a.logits = a.h2.lazyProduct(view(net.w_out)).rowwise() + view(net.b_out);
  return a;
}

}  // namespace detail

/// logits = relu(relu(x W_in + b_in)(W_hidden + dW) + b_hidden) W_out + b_out
inline RealMatrix forward_network(const ToyNetwork& net, const RealMatrix& x) {
  require_valid(x, "forward_network");
  return detail::to_real(detail::run_forward(net, x).logits);
}

/// Throws Error on shape mismatches, label errors or non-finite inputs.
inline void validate_data(const ToyNetwork& net, const LabeledData& data) {
  require_valid(data.x, "data");
  detail::check_shapes(net, data.x);
  if (data.labels.size() != data.x.rows()) throw Error("data: label count != batch size");
  for (std::size_t y : data.labels) {
    if (y >= net.classes()) throw Error("data: label out of range");
  }
}

struct LossGrads {
  double loss = 0.0;
  double accuracy = 0.0;
  std::vector<double> adapter;  // same layout as adapter.params()
  RealMatrix w_out;
  std::vector<double> b_out;
  RealMatrix hidden_weight;     // d loss / d (W_hidden + dW)
};

/// Mean softmax cross-entropy (log-sum-exp stabilized) with exact
/// gradients for the adapter parameters and the head.
inline LossGrads loss_and_grads(const ToyNetwork& net, const LabeledData& data) {
  validate_data(net, data);
  const std::size_t batch = data.x.rows();
  const detail::Activations act = detail::run_forward(net, data.x);
  if (!act.logits.allFinite()) {
    throw Error("loss_and_grads: non-finite logits (max |z2| = " +
                std::to_string(act.z2.cwiseAbs().maxCoeff()) + ")");
  }

  LossGrads out;
  const Eigen::VectorXd peak = act.logits.rowwise().maxCoeff();
  detail::RowMat dlogits = (act.logits.colwise() - peak).array().exp().matrix();
  const Eigen::VectorXd sum = dlogits.rowwise().sum();
  std::size_t correct = 0;
  double total = 0.0;
  const double inv_batch = 1.0 / static_cast<double>(batch);
  for (Eigen::Index b = 0; b < dlogits.rows(); ++b) {
    const auto label = static_cast<Eigen::Index>(data.labels[static_cast<std::size_t>(b)]);
    Eigen::Index argmax = 0;
    act.logits.row(b).maxCoeff(&argmax);
    if (argmax == label) ++correct;
    total += std::log(sum(b)) - (act.logits(b, label) - peak(b));
    dlogits.row(b) /= sum(b);
    dlogits(b, label) -= 1.0;
  }
  dlogits *= inv_batch;
  out.loss = total * inv_batch;
  out.accuracy = static_cast<double>(correct) * inv_batch;

  out.w_out = detail::to_real(act.h2.transpose() * dlogits);
  const Eigen::RowVectorXd db = dlogits.colwise().sum();
  out.b_out.assign(db.data(), db.data() + db.size());

  const detail::RowMat dh2 = dlogits * detail::view(net.w_out).transpose();
  const detail::RowMat dz2 = dh2.cwiseProduct((act.z2.array() > 0.0).cast<double>().matrix());
  out.hidden_weight = detail::to_real(act.h1.transpose() * dz2);
  if (net.adapter) out.adapter = net.adapter->grad(out.hidden_weight);
  return out;
}

}  // namespace sdct
