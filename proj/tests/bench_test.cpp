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

#include "sdct/bench.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "gtest/gtest.h"
#include "oracles.hpp"
#include "sdct/accounting.hpp"
#include "sdct/config.hpp"

namespace sdct {
namespace {

namespace fs = std::filesystem;

TEST(DatasetTest, TinyNoiseCollapsesOntoCenters) {
  const SyntheticDataset ds = generate_dataset(20, 1e-8, 3);
  ASSERT_EQ(ds.data.x.rows(), 160u);
  for (std::size_t r = 0; r < ds.data.x.rows(); ++r) {
    const auto& c = ds.centers[ds.data.labels[r]];
    EXPECT_LT(std::hypot(ds.data.x(r, 0) - c[0], ds.data.x(r, 1) - c[1]), 1e-6);
  }
}

TEST(DatasetTest, ClassMeansNearCenters) {
  const double sigma = 0.3;
  const SyntheticDataset ds = generate_dataset(100, sigma, 17);
  std::array<std::size_t, 8> counts{};
  std::array<std::array<double, 2>, 8> sums{};
  for (std::size_t r = 0; r < ds.data.x.rows(); ++r) {
    const std::size_t y = ds.data.labels[r];
    ++counts[y];
    sums[y][0] += ds.data.x(r, 0);
    sums[y][1] += ds.data.x(r, 1);
  }
  int close = 0;
  for (std::size_t k = 0; k < 8; ++k) {
    EXPECT_EQ(counts[k], 100u);
    const double dx = sums[k][0] / 100.0 - ds.centers[k][0];
    const double dy = sums[k][1] / 100.0 - ds.centers[k][1];
    if (std::abs(dx) < 5.0 * sigma / 10.0 && std::abs(dy) < 5.0 * sigma / 10.0) ++close;
  }
  EXPECT_GE(close, 7);
  std::set<std::pair<double, double>> distinct;
  for (const auto& c : ds.centers) {
    distinct.insert({c[0], c[1]});
    EXPECT_NEAR(std::hypot(c[0], c[1]), 3.0, 1e-12);
  }
  EXPECT_EQ(distinct.size(), 8u);
}

TEST(DatasetTest, DeterministicAndValidated) {
  const auto a = generate_dataset(10, 0.3, 4), b = generate_dataset(10, 0.3, 4);
  EXPECT_EQ(a.data.x, b.data.x);
  EXPECT_EQ(a.data.labels, b.data.labels);
  EXPECT_NE(a.data.x, generate_dataset(10, 0.3, 5).data.x);
  EXPECT_THROW(generate_dataset(0, 0.3, 1), Error);
  EXPECT_THROW(generate_dataset(5, 0.0, 1), Error);
}

AccountingSpec roberta_base(const std::string& method, std::uint64_t budget) {
  return {"RoBERTa Base", method, budget, 768, 768, 24, std::nullopt, std::nullopt};
}

TEST(AccountingTest, TableRows) {
  auto s = roberta_base("sdctft", 200);
  AccountingRow r = account(s);
  EXPECT_EQ(r.trainable_params, 4800u);
  EXPECT_EQ(r.required_bytes, 19200u);
  EXPECT_EQ(r.params_text, "4.8K");
  EXPECT_EQ(r.bytes_text, "18.8KB");

  r = account(roberta_base("lora", 8));
  EXPECT_EQ(r.trainable_params, 294912u);
  EXPECT_EQ(r.params_text, "295K");
  EXPECT_EQ(r.bytes_text, "1.13MB");

  r = account(roberta_base("lora", 4));
  EXPECT_EQ(r.params_text, "147K");
  EXPECT_EQ(r.bytes_text, "576KB");

  s.layers = 0;
  r = account(s);
  EXPECT_EQ(r.trainable_params, 0u);
  EXPECT_EQ(r.required_bytes, 0u);
  EXPECT_THROW(trainable_params("vera", 1, 1, 1, 1), Error);
}

TEST(AccountingTest, ConsistencyFlags) {
  auto s = roberta_base("lora", 4);
  s.reported_params = "147K";
  s.reported_bytes = "574KB";
  EXPECT_EQ(account(s).consistent, true);

  s = roberta_base("sdctft", 200);
  s.reported_params = "24K";
  s.reported_bytes = "93.8KB";
  const AccountingRow bad = account(s);
  EXPECT_EQ(bad.consistent, false);
  EXPECT_FALSE(bad.note.empty());
  EXPECT_FALSE(account(roberta_base("lora", 1)).consistent.has_value());
}

TEST(AccountingTest, Rendering) {
  EXPECT_EQ(render_count(999), "999");
  EXPECT_EQ(render_count(999500), "1M");
  EXPECT_EQ(render_count(6400000), "6.4M");
  EXPECT_EQ(render_bytes(1023), "1023B");
  EXPECT_EQ(render_bytes(1024), "1KB");
  EXPECT_NEAR(parse_reported_bytes("1.13MB"), 1.13 * 1024 * 1024, 1e-6);
  EXPECT_NEAR(parse_reported_count("4.8K"), 4800.0, 1e-9);
}

TEST(AccountingTest, ParsesModelSpecsAndWritesCsv) {
  const auto j = nlohmann::json::parse(R"({"models": [{"name": "M", "d1": 4, "d2": 6, "layers": 2,
      "rows": [{"method": "lora", "budget": 1, "params": "20", "bytes": "80B"},
               {"method": "sdctft", "budget": 3}]}]})");
  const auto rows = accounting(parse_model_specs(j));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].trainable_params, 20u);
  EXPECT_EQ(rows[0].consistent, true);
  EXPECT_EQ(rows[1].trainable_params, 6u);
  std::ostringstream os;
  write_accounting_csv(os, rows);
  std::string header;
  std::istringstream in(os.str());
  std::getline(in, header);
  EXPECT_EQ(header.rfind("model,method,budget,layers,d1,d2,trainable_params,required_bytes", 0), 0u);
  EXPECT_THROW(parse_model_specs(nlohmann::json::parse(R"({"models": [{"name": "M"}]})")), Error);
}

TrainConfig short_train(std::size_t epochs) {
  TrainConfig t;
  t.epochs = epochs;
  return t;
}

TEST(BenchTest, ComparisonCardinalityAndSharedBase) {
  const SyntheticDataset ds = generate_dataset(10, 0.3, 17);
  const std::vector<MethodSpec> methods = {{AdapterKind::kLora, 1, 16.0, std::nullopt},
                                           {AdapterKind::kFourierft, 128, 16.0, std::nullopt},
                                           {AdapterKind::kSdctft, 90, 16.0, 0.7}};
  const std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  const auto reports = run_comparison(ds, methods, NetworkConfig{}, short_train(3), seeds);
  ASSERT_EQ(reports.size(), 15u);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    EXPECT_TRUE(reports[i].ok());
    EXPECT_EQ(reports[i].method.kind, methods[i / 5].kind);
    EXPECT_EQ(reports[i].seed, seeds[i % 5]);
    EXPECT_EQ(reports[i].records.size(), 3u);
    // Every method starts from the same frozen base with a zero or
    // near-zero update, so the first-epoch loss only differs by dW.
    EXPECT_TRUE(std::isfinite(reports[i].records[0].loss));
  }
  EXPECT_EQ(reports[0].trainable_params, 128u);
  EXPECT_EQ(reports[5].trainable_params, 128u);
  EXPECT_EQ(reports[10].trainable_params, 90u);
  // LoRA starts at dW = 0, so its first record is the frozen base itself.
  NetworkConfig nc;
  nc.seed = 2;
  const ToyNetwork base = make_toy_network(nc);
  EXPECT_EQ(reports[2].records[0].loss, loss_and_grads(base, ds.data).loss);
}

TEST(BenchTest, DeterministicAndParallelAgree) {
  const SyntheticDataset ds = generate_dataset(8, 0.3, 1);
  const std::vector<MethodSpec> methods = {{AdapterKind::kRdctft, 20, 4.0, std::nullopt},
                                           {AdapterKind::kSdctft, 20, 4.0, 0.5}};
  const auto a = run_comparison(ds, methods, NetworkConfig{}, short_train(5), {0, 1, 2});
  SweepOptions par;
  par.jobs = 3;
  const auto b = run_comparison(ds, methods, NetworkConfig{}, short_train(5), {0, 1, 2}, par);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].records, b[i].records);
}

TEST(BenchTest, FailedRunIsRecordedNotFatal) {
  const SyntheticDataset ds = generate_dataset(4, 0.3, 1);
  const std::vector<MethodSpec> methods = {{AdapterKind::kSdctft, 5000, 1.0, 0.7},
                                           {AdapterKind::kLora, 1, 1.0, std::nullopt}};
  const auto reports = run_comparison(ds, methods, NetworkConfig{}, short_train(2), {0});
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_FALSE(reports[0].ok());
  EXPECT_TRUE(reports[1].ok());
  std::ostringstream os;
  write_summary_csv(os, reports);
  EXPECT_NE(os.str().find(",failed\n"), std::string::npos);
}

TEST(BenchTest, WritesCurveFiles) {
  const fs::path out = fs::temp_directory_path() / "sdct_bench_test_curves";
  fs::remove_all(out);
  const SyntheticDataset ds = generate_dataset(4, 0.3, 1);
  SweepOptions opts;
  opts.out_dir = out;
  const auto reports = run_comparison(ds, {{AdapterKind::kSdctft, 90, 1.0, 0.7}},
                                      NetworkConfig{}, short_train(7), {3}, opts);
  ASSERT_EQ(reports[0].curve_path, "runs/sdctft_b90_d0.7_s3.csv");
  std::ifstream f(out / reports[0].curve_path);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(f, line)) ++lines;
  EXPECT_EQ(lines, 8u);
  fs::remove_all(out);
}

TEST(DeltaSweepTest, ReferenceOnlyNormalizesToOne) {
  const SyntheticDataset ds = generate_dataset(6, 0.3, 2);
  const auto res = delta_sweep(ds, 30, 4.0, {0.7}, NetworkConfig{}, short_train(4), {0, 1});
  ASSERT_EQ(res.rows.size(), 2u);
  for (const auto& r : res.rows) EXPECT_EQ(r.normalized, 1.0);
  EXPECT_THROW(delta_sweep(ds, 30, 4.0, {0.5}, NetworkConfig{}, short_train(1), {0}), Error);
}

TEST(DeltaSweepTest, CardinalityAndCsvShape) {
  const SyntheticDataset ds = generate_dataset(6, 0.3, 2);
  const auto res = delta_sweep(ds, 30, 4.0, {0.0, 0.7, 1.0}, NetworkConfig{}, short_train(4), {0, 1});
  EXPECT_EQ(res.reports.size(), 6u);
  EXPECT_EQ(res.rows.size(), 6u);
  std::ostringstream os;
  write_delta_csv(os, res);
  std::istringstream in(os.str());
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 3);
  }
  EXPECT_EQ(lines, 7u);
}

TEST(DeltaSweepTest, DeltaZeroDiffersFromRandomOnlyByStratification) {
  const RealMatrix w = testing::random_matrix(64, 64, 5);
  const auto p = partition(64, 64);
  const auto alloc = allocate_budget({p.low().size(), p.mid().size(), p.high().size()}, 90);
  const SpectralAdapter zero = init_sdctft(w, AdapterConfig::sdctft(90, 1.0, 0.0, 5));
  for (std::size_t b = 0; b < 3; ++b) {
    EXPECT_TRUE(zero.plan().bands[b].energy.empty());
    EXPECT_EQ(zero.plan().bands[b].random.size(), alloc[b]);
  }
  // Energy ranking plays no part: the plan is invariant to rescaling and
  // reshuffling the spectrum.
  const RealMatrix other = testing::random_matrix(64, 64, 77, 3.0);
  EXPECT_EQ(init_sdctft(other, AdapterConfig::sdctft(90, 1.0, 0.0, 5)).plan(), zero.plan());
  const SpectralAdapter rnd = init_rdctft(w, AdapterConfig::rdctft(90, 1.0, 5));
  EXPECT_EQ(rnd.plan().bands.size(), 1u);
  EXPECT_EQ(rnd.indices().size(), zero.indices().size());
}

TEST(SweepConfigTest, ParsesAndRejects) {
  const auto good = nlohmann::json::parse(R"({
    "dataset": {"per_class": 50, "noise_sigma": 0.2, "seed": 3},
    "network": {"hidden": 64, "base_gain": 0.3},
    "train": {"epochs": 10, "learning_rate": 0.01, "optimizer": "adam"},
    "seeds": [0, 1],
    "comparison": [{"method": "lora", "budget": 1, "alpha": 16},
                   {"method": "sdctft", "budget": 90, "delta": 0.7}],
    "delta_sweep": {"n": 90, "deltas": [0.5, 0.7]}})");
  const SweepConfig cfg = parse_sweep_config(good);
  EXPECT_EQ(cfg.dataset.per_class, 50u);
  EXPECT_EQ(cfg.comparison.size(), 2u);
  EXPECT_EQ(cfg.comparison[0].alpha, 16.0);
  ASSERT_TRUE(cfg.delta_sweep);
  EXPECT_EQ(cfg.delta_sweep->deltas.size(), 2u);

  auto bad = good;
  bad["comparison"][0]["delta"] = 0.5;
  EXPECT_THROW(parse_sweep_config(bad), Error);
  bad = good;
  bad["train"]["momentum"] = 0.9;
  EXPECT_THROW(parse_sweep_config(bad), Error);
  bad = good;
  bad.erase("seeds");
  EXPECT_THROW(parse_sweep_config(bad), Error);
  bad = good;
  bad["train"]["epochs"] = 0;
  EXPECT_THROW(parse_sweep_config(bad), Error);
}

}  // namespace
}  // namespace sdct
