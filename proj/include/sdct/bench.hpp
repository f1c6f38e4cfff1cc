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

// Matched-budget experiment orchestration on the synthetic dataset:
// method x budget x seed comparisons and the energy-ratio sweep, with CSV
// curves, a summary table and a JSON manifest.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdct/adapters.hpp"
#include "sdct/dataset.hpp"
#include "sdct/network.hpp"
#include "sdct/train.hpp"

namespace sdct {

inline constexpr double kAccuracyThreshold = 0.99;
inline constexpr double kReferenceDelta = 0.7;

struct MethodSpec {
  AdapterKind kind = AdapterKind::kSdctft;
  std::size_t budget = 0;  // n, or r for lora
  double alpha = 1.0;
  std::optional<double> delta;  // sdctft only; defaults to 0.7

  AdapterConfig adapter_config(std::uint64_t seed) const {
    AdapterConfig cfg;
    cfg.kind = kind;
    if (kind == AdapterKind::kLora) {
      cfg.r = budget;
    } else {
      cfg.n = budget;
    }
    cfg.alpha = alpha;
    if (kind == AdapterKind::kSdctft) cfg.delta = delta.value_or(kReferenceDelta);
    cfg.seed = seed;
    return cfg;
  }

  std::string label() const {
    std::string s = std::string(to_string(kind)) + "_b" + std::to_string(budget);
    if (kind == AdapterKind::kSdctft) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "_d%.3g", delta.value_or(kReferenceDelta));
      s += buf;
    }
    return s;
  }
};

struct DatasetConfig {
  std::size_t per_class = 100;
  double noise_sigma = 0.3;
  std::uint64_t seed = 17;
};

struct RunReport {
  MethodSpec method;
  TrainConfig train;
  double base_gain = 0.0;
  std::uint64_t seed = 0;
  std::vector<EpochRecord> records;
  double final_accuracy = 0.0;
  std::optional<std::size_t> epochs_to_threshold;  // first epoch with acc >= 0.99
  std::size_t trainable_params = 0;
  double seconds = 0.0;
  std::optional<std::string> error;
  std::string curve_path;  // relative to the output directory, if written

  bool ok() const { return !error.has_value(); }
};

struct SweepOptions {
  std::optional<std::filesystem::path> out_dir;
  std::size_t jobs = 1;
};

/// One training run on a freshly built frozen base. The base depends on
/// `seed` alone, so every method sharing a seed sees the same network.
inline RunReport run_single(const SyntheticDataset& ds, const MethodSpec& method,
                            const NetworkConfig& net_cfg, const TrainConfig& train_cfg,
                            std::uint64_t seed) {
  RunReport rep;
  rep.method = method;
  rep.train = train_cfg;
  rep.base_gain = net_cfg.base_gain;
  rep.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    NetworkConfig cfg = net_cfg;
    cfg.seed = seed;
    ToyNetwork net = make_toy_network(cfg);
    net.adapter = init_adapter(net.w_hidden, method.adapter_config(seed));
    rep.trainable_params = trainable_param_count(net, train_cfg);
    rep.records = train(net, ds.data, train_cfg);
    rep.final_accuracy = rep.records.back().accuracy;
    for (const auto& r : rep.records) {
      if (r.accuracy >= kAccuracyThreshold) {
        rep.epochs_to_threshold = r.epoch;
        break;
      }
    }
  } catch (const std::exception& e) {
    rep.error = e.what();
  }
  rep.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

namespace detail {

template <typename Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& t : workers) t.join();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
}

inline void write_curves(std::vector<RunReport>& reports, const std::filesystem::path& out) {
  for (auto& rep : reports) {
    if (rep.records.empty()) continue;
    rep.curve_path = "runs/" + rep.method.label() + "_s" + std::to_string(rep.seed) + ".csv";
    std::ostringstream os;
    write_records_csv(os, rep.records);
    write_text(out / rep.curve_path, os.str());
  }
}

}  // namespace detail

/// One report per (method, seed), ordered method-major. A failed run is
/// recorded in its report and does not stop the sweep.
inline std::vector<RunReport> run_comparison(const SyntheticDataset& ds,
                                             const std::vector<MethodSpec>& methods,
                                             const NetworkConfig& net_cfg,
                                             const TrainConfig& train_cfg,
                                             const std::vector<std::uint64_t>& seeds,
                                             const SweepOptions& opts = {}) {
  train_cfg.validate();
  std::vector<RunReport> reports(methods.size() * seeds.size());
  detail::parallel_for(reports.size(), opts.jobs, [&](std::size_t i) {
    reports[i] = run_single(ds, methods[i / seeds.size()], net_cfg, train_cfg,
                            seeds[i % seeds.size()]);
  });
  if (opts.out_dir) detail::write_curves(reports, *opts.out_dir);
  return reports;
}

inline std::string epochs_text(const RunReport& r) {
  return r.epochs_to_threshold ? std::to_string(*r.epochs_to_threshold) : "not_reached";
}

inline void write_summary_csv(std::ostream& os, const std::vector<RunReport>& reports) {
  os << "method,budget,delta,alpha,lr,seed,final_acc,epochs_to_99,params,seconds,status\n";
  char buf[256];
  for (const auto& r : reports) {
    char delta[32] = "";
    if (r.method.kind == AdapterKind::kSdctft) {
      std::snprintf(delta, sizeof(delta), "%.3g", r.method.delta.value_or(kReferenceDelta));
    }
    std::snprintf(buf, sizeof(buf), "%s,%zu,%s,%.6g,%.6g,%llu,%.6f,%s,%zu,%.3f,%s\n",
                  std::string(to_string(r.method.kind)).c_str(), r.method.budget,
                  delta, r.method.alpha, r.train.learning_rate,
                  static_cast<unsigned long long>(r.seed), r.final_accuracy,
                  epochs_text(r).c_str(), r.trainable_params, r.seconds,
                  r.ok() ? "ok" : "failed");
    os << buf;
  }
}

inline nlohmann::ordered_json report_to_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["method"] = to_string(r.method.kind);
  j["budget"] = r.method.budget;
  if (r.method.kind == AdapterKind::kSdctft) j["delta"] = r.method.delta.value_or(kReferenceDelta);
  j["alpha"] = r.method.alpha;
  j["learning_rate"] = r.train.learning_rate;
  j["optimizer"] = to_string(r.train.optimizer);
  j["epochs"] = r.train.epochs;
  j["train_head"] = r.train.train_head;
  j["base_gain"] = r.base_gain;
  j["seed"] = r.seed;
  j["final_accuracy"] = r.final_accuracy;
  if (r.epochs_to_threshold) {
    j["epochs_to_99"] = *r.epochs_to_threshold;
  } else {
    j["epochs_to_99"] = "not_reached";
  }
  j["trainable_params"] = r.trainable_params;
  j["seconds"] = r.seconds;
  if (r.error) j["error"] = *r.error;
  if (!r.curve_path.empty()) j["curve"] = r.curve_path;
  return j;
}

struct DeltaSweepRow {
  double delta = 0.0;
  std::uint64_t seed = 0;
  double final_accuracy = 0.0;
  double normalized = 0.0;  // final_accuracy / final_accuracy at delta = 0.7 (0/0 -> 1)
};

struct DeltaSweepResult {
  std::vector<RunReport> reports;
  std::vector<DeltaSweepRow> rows;  // delta-major, then seed

  /// Mean of `normalized` over seeds for one delta.
  double mean_normalized(double delta) const {
    double s = 0.0;
    std::size_t c = 0;
    for (const auto& r : rows) {
      if (std::abs(r.delta - delta) < 1e-12) {
        s += r.normalized;
        ++c;
      }
    }
    return c ? s / static_cast<double>(c) : 0.0;
  }
};

/// sDCTFT at each delta (same n and alpha), normalized per seed to the
/// delta = 0.7 run. 0.7 must be among `deltas`.
inline DeltaSweepResult delta_sweep(const SyntheticDataset& ds, std::size_t n, double alpha,
                                    const std::vector<double>& deltas,
                                    const NetworkConfig& net_cfg, const TrainConfig& train_cfg,
                                    const std::vector<std::uint64_t>& seeds,
                                    const SweepOptions& opts = {}) {
  const auto ref = std::find_if(deltas.begin(), deltas.end(), [](double d) {
    return std::abs(d - kReferenceDelta) < 1e-12;
  });
  if (ref == deltas.end()) throw Error("delta_sweep: deltas must include 0.7");
  std::vector<MethodSpec> methods;
  for (double d : deltas) methods.push_back({AdapterKind::kSdctft, n, alpha, d});

  DeltaSweepResult out;
  out.reports = run_comparison(ds, methods, net_cfg, train_cfg, seeds, opts);
  const std::size_t ref_pos = static_cast<std::size_t>(ref - deltas.begin());
  for (std::size_t d = 0; d < deltas.size(); ++d) {
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const double acc = out.reports[d * seeds.size() + s].final_accuracy;
      const double base = out.reports[ref_pos * seeds.size() + s].final_accuracy;
      double normalized = 1.0;
      if (d != ref_pos) {
        normalized = base > 0.0 ? acc / base
                     : acc > 0.0 ? std::numeric_limits<double>::infinity()
                                 : 1.0;
      }
      out.rows.push_back({deltas[d], seeds[s], acc, normalized});
    }
  }
  return out;
}

inline void write_delta_csv(std::ostream& os, const DeltaSweepResult& res) {
  os << "delta,seed,final_acc,normalized_to_0.7\n";
  char buf[128];
  for (const auto& r : res.rows) {
    std::snprintf(buf, sizeof(buf), "%.3g,%llu,%.6f,%.6f\n", r.delta,
                  static_cast<unsigned long long>(r.seed), r.final_accuracy, r.normalized);
    os << buf;
  }
}

}  // namespace sdct
