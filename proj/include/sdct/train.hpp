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
#include <cstddef>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sdct/network.hpp"

namespace sdct {

enum class OptimizerKind { kSgd, kAdam };

inline std::string_view to_string(OptimizerKind k) {
  return k == OptimizerKind::kSgd ? "sgd" : "adam";
}

inline OptimizerKind parse_optimizer(std::string_view s) {
  if (s == "sgd") return OptimizerKind::kSgd;
  if (s == "adam") return OptimizerKind::kAdam;
  throw Error("unknown optimizer '" + std::string(s) + "'");
}

struct TrainConfig {
  std::size_t epochs = 2000;
  double learning_rate = 1e-2;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  // The head is frozen unless asked otherwise; see README.
  bool train_head = false;

  void validate() const {
    if (epochs == 0) throw Error("train: epochs must be >= 1");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
      throw Error("train: learning_rate must be finite and >= 0");
    }
  }
};

/// Full-batch first-order update for one parameter group.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double lr, std::size_t size)
      : kind_(kind), lr_(lr), m_(size, 0.0), v_(size, 0.0) {}

  void step(std::span<double> params, std::span<const double> grads) {
    if (params.size() != grads.size() || params.size() != m_.size()) {
      throw Error("optimizer: parameter/gradient size mismatch");
    }
    if (kind_ == OptimizerKind::kSgd) {
      for (std::size_t k = 0; k < params.size(); ++k) params[k] -= lr_ * grads[k];
      return;
    }
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    for (std::size_t k = 0; k < params.size(); ++k) {
      m_[k] = kBeta1 * m_[k] + (1.0 - kBeta1) * grads[k];
      v_[k] = kBeta2 * v_[k] + (1.0 - kBeta2) * grads[k] * grads[k];
      params[k] -= lr_ * (m_[k] / c1) / (std::sqrt(v_[k] / c2) + kEps);
    }
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  OptimizerKind kind_;
  double lr_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::size_t t_ = 0;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;
  double accuracy = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

/// Raised when the loss stops being finite.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t epoch, const std::string& what)
      : Error("diverged at epoch " + std::to_string(epoch) + ": " + what), epoch_(epoch) {}
  std::size_t epoch() const { return epoch_; }

 private:
  std::size_t epoch_;
};

inline std::size_t trainable_param_count(const ToyNetwork& net, const TrainConfig& cfg) {
  return (net.adapter ? net.adapter->param_count() : 0) +
         (cfg.train_head ? net.head_param_count() : 0);
}

/// Full-batch training of the adapter (and optionally the head). Each
/// record holds loss and accuracy of the parameters before that epoch's
/// update. W_in and W_hidden are never written.
inline std::vector<EpochRecord> train(ToyNetwork& net, const LabeledData& data,
                                      const TrainConfig& cfg) {
  cfg.validate();
  validate_data(net, data);
  std::vector<EpochRecord> records;
  records.reserve(cfg.epochs);

  const std::size_t adapter_size = net.adapter ? net.adapter->param_count() : 0;
  Optimizer adapter_opt(cfg.optimizer, cfg.learning_rate, adapter_size);
  Optimizer w_out_opt(cfg.optimizer, cfg.learning_rate, net.w_out.size());
  Optimizer b_out_opt(cfg.optimizer, cfg.learning_rate, net.b_out.size());

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    LossGrads g;
    try {
      g = loss_and_grads(net, data);
    } catch (const Error& e) {
      throw DivergenceError(epoch, e.what());
    }
    if (!std::isfinite(g.loss)) throw DivergenceError(epoch, "loss is not finite");
    records.push_back({epoch, g.loss, g.accuracy});

    if (net.adapter) adapter_opt.step(net.adapter->params(), g.adapter);
    if (cfg.train_head) {
      w_out_opt.step(net.w_out.data(), g.w_out.data());
      b_out_opt.step(net.b_out, g.b_out);
    }
  }
  return records;
}

inline void write_records_csv(std::ostream& os, std::span<const EpochRecord> records) {
  os << "epoch,loss,accuracy\n";
  char line[96];
  for (const auto& r : records) {
    std::snprintf(line, sizeof(line), "%zu,%.17g,%.17g\n", r.epoch, r.loss, r.accuracy);
    os << line;
  }
}

}  // namespace sdct
