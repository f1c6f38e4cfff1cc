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

#include "sdct/train.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gtest/gtest.h"
#include "oracles.hpp"
#include "sdct/dataset.hpp"

namespace sdct {
namespace {

using testing::numeric_gradient;
using testing::random_matrix;
using testing::relative_error;

ToyNetwork small_network(std::uint64_t seed, std::size_t hidden = 16) {
  NetworkConfig cfg;
  cfg.hidden = hidden;
  cfg.seed = seed;
  cfg.base_gain = 1.0;
  ToyNetwork net = make_toy_network(cfg);
  Rng rng(seed + 50);
  for (double& b : net.b_hidden) b = 0.1 * rng.normal();
  for (double& b : net.b_out) b = 0.1 * rng.normal();
  return net;
}

LabeledData small_batch(std::size_t n, std::uint64_t seed) {
  LabeledData d{random_matrix(n, 2, seed, 2.0), {}};
  for (std::size_t i = 0; i < n; ++i) d.labels.push_back(i % 8);
  return d;
}

double relu(double x) { return x > 0.0 ? x : 0.0; }

RealMatrix naive_logits(const ToyNetwork& net, const RealMatrix& x) {
  const std::size_t h = net.hidden(), c = net.classes();
  const RealMatrix dw = net.adapter ? net.adapter->delta_weight() : RealMatrix(h, h, 0.0);
  RealMatrix out(x.rows(), c, 0.0);
  for (std::size_t b = 0; b < x.rows(); ++b) {
    std::vector<double> h1(h), h2(h);
    for (std::size_t j = 0; j < h; ++j) {
      double s = net.b_in[j];
      for (std::size_t i = 0; i < x.cols(); ++i) s += x(b, i) * net.w_in(i, j);
      h1[j] = relu(s);
    }
    for (std::size_t j = 0; j < h; ++j) {
      double s = net.b_hidden[j];
      for (std::size_t i = 0; i < h; ++i) s += h1[i] * (net.w_hidden(i, j) + dw(i, j));
      h2[j] = relu(s);
    }
    for (std::size_t k = 0; k < c; ++k) {
      double s = net.b_out[k];
      for (std::size_t j = 0; j < h; ++j) s += h2[j] * net.w_out(j, k);
      out(b, k) = s;
    }
  }
  return out;
}

TEST(NetworkTest, ZeroInputAndZeroBiasesGiveZeroLogits) {
  NetworkConfig cfg;
  ToyNetwork net = make_toy_network(cfg);
  std::fill(net.b_in.begin(), net.b_in.end(), 0.0);
  net.adapter = init_adapter(net.w_hidden, AdapterConfig::lora(1));
  const RealMatrix logits = forward_network(net, RealMatrix(3, 2, 0.0));
  for (double z : logits.data()) EXPECT_EQ(z, 0.0);
}

TEST(NetworkTest, ZeroedAdapterMatchesAbsentAdapter) {
  ToyNetwork net = small_network(2);
  const RealMatrix x = random_matrix(7, 2, 3);
  const RealMatrix bare = forward_network(net, x);
  net.adapter = init_adapter(net.w_hidden, AdapterConfig::sdctft(10));
  for (double& p : net.adapter->params()) p = 0.0;
  EXPECT_EQ(forward_network(net, x), bare);
}

TEST(NetworkTest, MatchesNaiveComposition) {
  for (const auto& cfg : {AdapterConfig::sdctft(30, 4.0, 0.7, 1), AdapterConfig::fourierft(30, 4.0, 1),
                          AdapterConfig::lora(2, 1.0, 1)}) {
    ToyNetwork net = small_network(4);
    net.adapter = init_adapter(net.w_hidden, cfg);
    Rng rng(9);
    for (double& p : net.adapter->params()) p = rng.normal();
    const RealMatrix x = random_matrix(11, 2, 5);
    EXPECT_LT(max_abs_diff(forward_network(net, x), naive_logits(net, x)), 1e-12);
  }
}

TEST(NetworkTest, ShapeErrors) {
  ToyNetwork net = small_network(1);
  EXPECT_THROW(forward_network(net, RealMatrix(4, 3, 0.0)), Error);
  net.adapter = init_adapter(RealMatrix(8, 8, 1.0), AdapterConfig::lora(1));
  EXPECT_THROW(forward_network(net, RealMatrix(4, 2, 0.0)), Error);
}

TEST(LossTest, UniformLogitsGiveLogC) {
  NetworkConfig cfg;
  ToyNetwork net = make_toy_network(cfg);
  for (double& w : net.w_out.data()) w = 0.0;
  const auto g = loss_and_grads(net, small_batch(16, 1));
  EXPECT_NEAR(g.loss, std::log(8.0), 1e-12);
}

TEST(LossTest, FiniteDifferencesInsideNetwork) {
  const LabeledData batch = small_batch(16, 7);
  for (const auto& cfg :
       {AdapterConfig::sdctft(40, 2.0, 0.7, 3), AdapterConfig::rdctft(40, 2.0, 3),
        AdapterConfig::fourierft(40, 2.0, 3), AdapterConfig::lora(2, 1.0, 3)}) {
    ToyNetwork net = small_network(8);
    net.adapter = init_adapter(net.w_hidden, cfg);
    Rng rng(10);
    for (double& p : net.adapter->params()) p = 0.3 * rng.normal();
    const LossGrads g = loss_and_grads(net, batch);
    auto loss = [&] { return loss_and_grads(net, batch).loss; };

    const auto fd_adapter = numeric_gradient(net.adapter->params(), loss);
    EXPECT_LT(relative_error(g.adapter, fd_adapter), 1e-4) << to_string(cfg.kind);
    const auto fd_w_out = numeric_gradient(net.w_out.data(), loss);
    EXPECT_LT(relative_error(g.w_out.values(), fd_w_out), 1e-4);
    const auto fd_b_out = numeric_gradient(net.b_out, loss);
    EXPECT_LT(relative_error(g.b_out, fd_b_out), 1e-4);
  }
}

TEST(LossTest, DuplicatedBatchLeavesLossAndGradsUnchanged) {
  ToyNetwork net = small_network(3);
  net.adapter = init_adapter(net.w_hidden, AdapterConfig::sdctft(20, 1.0, 0.7, 2));
  const LabeledData once = small_batch(12, 4);
  LabeledData twice{RealMatrix(24, 2), once.labels};
  twice.labels.insert(twice.labels.end(), once.labels.begin(), once.labels.end());
  for (std::size_t r = 0; r < 24; ++r) {
    for (std::size_t c = 0; c < 2; ++c) twice.x(r, c) = once.x(r % 12, c);
  }
  const auto a = loss_and_grads(net, once);
  const auto b = loss_and_grads(net, twice);
  EXPECT_NEAR(a.loss, b.loss, 1e-14);
  EXPECT_LT(relative_error(b.adapter, a.adapter), 1e-12);
  EXPECT_LT(max_abs_diff(a.w_out, b.w_out), 1e-14);
}

TEST(LossTest, RejectsBadLabelsAndReportsNonFiniteLogits) {
  ToyNetwork net = small_network(1);
  LabeledData d = small_batch(4, 1);
  d.labels[2] = 8;
  EXPECT_THROW(loss_and_grads(net, d), Error);
  d.labels.pop_back();
  EXPECT_THROW(loss_and_grads(net, d), Error);

  for (double& w : net.w_hidden.data()) w = std::numeric_limits<double>::infinity();
  try {
    loss_and_grads(net, small_batch(4, 1));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("non-finite"), std::string::npos);
  }
}

TEST(TrainTest, EpochCounts) {
  ToyNetwork net = small_network(1);
  net.adapter = init_adapter(net.w_hidden, AdapterConfig::lora(1));
  TrainConfig cfg;
  cfg.epochs = 0;
  EXPECT_THROW(train(net, small_batch(8, 1), cfg), Error);
  cfg.epochs = 1;
  const auto rec = train(net, small_batch(8, 1), cfg);
  ASSERT_EQ(rec.size(), 1u);
  EXPECT_EQ(rec[0].epoch, 1u);
}

TEST(TrainTest, ZeroLearningRateIsConstant) {
  ToyNetwork net = small_network(2);
  net.adapter = init_adapter(net.w_hidden, AdapterConfig::sdctft(12));
  TrainConfig cfg;
  cfg.epochs = 6;
  cfg.learning_rate = 0.0;
  cfg.train_head = true;
  const auto rec = train(net, small_batch(16, 2), cfg);
  for (const auto& r : rec) {
    EXPECT_EQ(r.loss, rec[0].loss);
    EXPECT_EQ(r.accuracy, rec[0].accuracy);
  }
}

TEST(TrainTest, DeterministicAndFrozenBase) {
  const auto data = generate_dataset(10, 0.3, 5).data;
  auto run = [&](ToyNetwork& net) {
    TrainConfig cfg;
    cfg.epochs = 25;
    return train(net, data, cfg);
  };
  NetworkConfig nc;
  nc.seed = 6;
  ToyNetwork a = make_toy_network(nc);
  a.adapter = init_adapter(a.w_hidden, AdapterConfig::fourierft(64, 16.0, 6));
  ToyNetwork b = make_toy_network(nc);
  b.adapter = init_adapter(b.w_hidden, AdapterConfig::fourierft(64, 16.0, 6));
  const ToyNetwork before = make_toy_network(nc);

  const auto ra = run(a), rb = run(b);
  ASSERT_EQ(ra.size(), rb.size());
  for (std::size_t k = 0; k < ra.size(); ++k) {
    EXPECT_EQ(ra[k].loss, rb[k].loss);
    EXPECT_EQ(ra[k].accuracy, rb[k].accuracy);
  }
  EXPECT_LT(ra.back().loss, ra.front().loss);
  EXPECT_EQ(a.w_in, before.w_in);
  EXPECT_EQ(a.w_hidden, before.w_hidden);
  EXPECT_EQ(a.b_in, before.b_in);
  EXPECT_EQ(a.w_out, before.w_out);  // head frozen by default
}

TEST(TrainTest, HeadTrainsWhenEnabled) {
  NetworkConfig nc;
  ToyNetwork net = make_toy_network(nc);
  net.adapter = init_adapter(net.w_hidden, AdapterConfig::lora(1));
  const RealMatrix head = net.w_out;
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.train_head = true;
  train(net, generate_dataset(5, 0.3, 1).data, cfg);
  EXPECT_NE(net.w_out, head);
  EXPECT_EQ(trainable_param_count(net, cfg), 128u + 64u * 8u + 8u);
  cfg.train_head = false;
  EXPECT_EQ(trainable_param_count(net, cfg), 128u);
}

TEST(TrainTest, DivergenceCarriesEpoch) {
  ToyNetwork net = small_network(1);
  net.adapter = init_adapter(net.w_hidden, AdapterConfig::lora(1));
  for (double& w : net.w_hidden.data()) w = std::numeric_limits<double>::infinity();
  TrainConfig cfg;
  cfg.epochs = 5;
  try {
    train(net, small_batch(8, 1), cfg);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.epoch(), 1u);
  }
  LabeledData bad = small_batch(8, 1);
  bad.labels[0] = 99;
  ToyNetwork ok = small_network(1);
  EXPECT_THROW(
      {
        try {
          train(ok, bad, cfg);
        } catch (const DivergenceError&) {
          FAIL() << "label error reported as divergence";
        }
      },
      Error);
}

TEST(TrainTest, RecordsCsv) {
  std::ostringstream os;
  const std::vector<EpochRecord> rec = {{1, 2.5, 0.125}, {2, 1.0, 0.5}};
  write_records_csv(os, rec);
  EXPECT_EQ(os.str(), "epoch,loss,accuracy\n1,2.5,0.125\n2,1,0.5\n");
}

TEST(OptimizerTest, AdamFirstStepIsSignedLearningRate) {
  Optimizer opt(OptimizerKind::kAdam, 0.1, 2);
  std::vector<double> p = {1.0, 1.0};
  opt.step(p, std::vector<double>{3.0, -0.5});
  EXPECT_NEAR(p[0], 0.9, 1e-7);
  EXPECT_NEAR(p[1], 1.1, 1e-7);
  Optimizer sgd(OptimizerKind::kSgd, 0.1, 1);
  std::vector<double> q = {1.0};
  sgd.step(q, std::vector<double>{2.0});
  EXPECT_DOUBLE_EQ(q[0], 0.8);
}

}  // namespace
}  // namespace sdct
