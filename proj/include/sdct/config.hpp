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

// Declarative sweep configuration (JSON). The accepted layout is published
// in configs/sweep.schema.json; unknown keys are rejected.

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdct/bench.hpp"

namespace sdct {

struct DeltaSweepConfig {
  std::size_t n = 90;
  double alpha = 1.0;
  std::vector<double> deltas;
};

struct SweepConfig {
  DatasetConfig dataset;
  NetworkConfig network;
  TrainConfig train;
  std::vector<std::uint64_t> seeds;
  std::size_t jobs = 1;
  std::vector<MethodSpec> comparison;
  std::optional<DeltaSweepConfig> delta_sweep;
};

namespace detail {

inline void only_keys(const nlohmann::json& j, const std::string& where,
                      std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw Error("config: " + where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.count(key)) throw Error("config: unknown key '" + key + "' in " + where);
  }
}

/// Parses a comparison entry; rejects budget/field combinations that do
/// not belong to the method (e.g. delta on lora).
inline MethodSpec parse_method(const nlohmann::json& j) {
  only_keys(j, "comparison entry", {"method", "budget", "alpha", "delta"});
  MethodSpec m;
  m.kind = parse_adapter_kind(j.at("method").get<std::string>());
  m.budget = j.at("budget").get<std::size_t>();
  m.alpha = j.value("alpha", 1.0);
  if (j.contains("delta")) {
    if (m.kind != AdapterKind::kSdctft) {
      throw Error("config: delta is only valid for sdctft, not " +
                  std::string(to_string(m.kind)));
    }
    m.delta = j["delta"].get<double>();
  }
  m.adapter_config(0).validate();
  return m;
}

}  // namespace detail

inline SweepConfig parse_sweep_config(const nlohmann::json& j) {
  SweepConfig cfg;
  try {
    detail::only_keys(j, "root",
                      {"dataset", "network", "train", "seeds", "jobs", "comparison",
                       "delta_sweep"});
    if (j.contains("dataset")) {
      const auto& d = j["dataset"];
      detail::only_keys(d, "dataset", {"per_class", "noise_sigma", "seed"});
      cfg.dataset.per_class = d.value("per_class", cfg.dataset.per_class);
      cfg.dataset.noise_sigma = d.value("noise_sigma", cfg.dataset.noise_sigma);
      cfg.dataset.seed = d.value("seed", cfg.dataset.seed);
    }
    if (j.contains("network")) {
      const auto& n = j["network"];
      detail::only_keys(n, "network", {"hidden", "base_gain"});
      cfg.network.hidden = n.value("hidden", cfg.network.hidden);
      cfg.network.base_gain = n.value("base_gain", cfg.network.base_gain);
    }
    if (j.contains("train")) {
      const auto& t = j["train"];
      detail::only_keys(t, "train", {"epochs", "learning_rate", "optimizer", "train_head"});
      cfg.train.epochs = t.value("epochs", cfg.train.epochs);
      cfg.train.learning_rate = t.value("learning_rate", cfg.train.learning_rate);
      if (t.contains("optimizer")) cfg.train.optimizer = parse_optimizer(t["optimizer"].get<std::string>());
      cfg.train.train_head = t.value("train_head", cfg.train.train_head);
    }
    cfg.train.validate();
    cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (cfg.seeds.empty()) throw Error("config: seeds must not be empty");
    cfg.jobs = j.value("jobs", std::size_t{1});
    if (j.contains("comparison")) {
      for (const auto& m : j["comparison"]) cfg.comparison.push_back(detail::parse_method(m));
    }
    if (j.contains("delta_sweep")) {
      const auto& d = j["delta_sweep"];
      detail::only_keys(d, "delta_sweep", {"n", "alpha", "deltas"});
      DeltaSweepConfig ds;
      ds.n = d.at("n").get<std::size_t>();
      ds.alpha = d.value("alpha", 1.0);
      ds.deltas = d.at("deltas").get<std::vector<double>>();
      for (double x : ds.deltas) {
        if (!(x >= 0.0 && x <= 1.0)) throw Error("config: deltas must lie in [0,1]");
      }
      cfg.delta_sweep = std::move(ds);
    }
    if (cfg.comparison.empty() && !cfg.delta_sweep) {
      throw Error("config: nothing to run (need comparison and/or delta_sweep)");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
  return cfg;
}

}  // namespace sdct
