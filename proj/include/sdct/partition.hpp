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

// Distance-based low/mid/high partition of a DCT spectrum and the hybrid
// energy-ranked plus random coefficient selection built on top of it.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdct/matrix.hpp"
#include "sdct/random.hpp"

namespace sdct {

struct Index {
  std::size_t u = 0;
  std::size_t v = 0;

  friend bool operator==(const Index&, const Index&) = default;
  friend auto operator<=>(const Index&, const Index&) = default;
};

enum class Band { kLow = 0, kMid = 1, kHigh = 2 };

inline constexpr std::array<Band, 3> kBands = {Band::kLow, Band::kMid, Band::kHigh};

inline const char* to_string(Band b) {
  switch (b) {
    case Band::kLow: return "low";
    case Band::kMid: return "mid";
    case Band::kHigh: return "high";
  }
  return "?";
}

/// Euclidean distance of (u, v) from the DC corner.
inline double distance(std::size_t u, std::size_t v) {
  const double du = static_cast<double>(u);
  const double dv = static_cast<double>(v);
  return std::sqrt(du * du + dv * dv);
}

/// The three disjoint bands of an M x N grid, each in row-major order.
struct FrequencyPartition {
  std::size_t rows = 0;
  std::size_t cols = 0;
  double d_max = 0.0;
  std::array<std::vector<Index>, 3> bands;

  const std::vector<Index>& band(Band b) const {
    return bands[static_cast<std::size_t>(b)];
  }
  const std::vector<Index>& low() const { return band(Band::kLow); }
  const std::vector<Index>& mid() const { return band(Band::kMid); }
  const std::vector<Index>& high() const { return band(Band::kHigh); }
};

/// Band of index (u, v) on an M x N grid. Squaring both sides of
/// d <= d_max/3 and d <= 2 d_max/3 gives 36 d^2 <= M^2 + N^2 and
/// 9 d^2 <= M^2 + N^2, compared in integers so boundary ties are exact.
inline Band classify(std::size_t u, std::size_t v, std::size_t rows, std::size_t cols) {
  const std::uint64_t d2 = static_cast<std::uint64_t>(u) * u + static_cast<std::uint64_t>(v) * v;
  const std::uint64_t r2 = static_cast<std::uint64_t>(rows) * rows +
                           static_cast<std::uint64_t>(cols) * cols;
  if (36 * d2 <= r2) return Band::kLow;
  if (9 * d2 <= r2) return Band::kMid;
  return Band::kHigh;
}

/// d_max = sqrt((M/2)^2 + (N/2)^2); low: d <= d_max/3,
/// mid: d_max/3 < d <= 2 d_max/3, high: the rest.
inline FrequencyPartition partition(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) throw Error("partition: empty grid");
  FrequencyPartition p;
  p.rows = rows;
  p.cols = cols;
  const double half_m = static_cast<double>(rows) / 2.0;
  const double half_n = static_cast<double>(cols) / 2.0;
  p.d_max = std::sqrt(half_m * half_m + half_n * half_n);
  for (std::size_t u = 0; u < rows; ++u) {
    for (std::size_t v = 0; v < cols; ++v) {
      const Band b = classify(u, v, rows, cols);
      p.bands[static_cast<std::size_t>(b)].push_back({u, v});
    }
  }
  return p;
}

/// Top-k indices of `band` by energy F[u,v]^2, highest first; equal
/// energies keep row-major order.
inline std::vector<Index> rank_by_energy(const SpectralMatrix& f,
                                         std::span<const Index> band,
                                         std::size_t k) {
  if (k > band.size()) {
    throw Error("rank_by_energy: k=" + std::to_string(k) + " exceeds band size " +
                std::to_string(band.size()));
  }
  std::vector<Index> sorted(band.begin(), band.end());
  std::sort(sorted.begin(), sorted.end());
  std::stable_sort(sorted.begin(), sorted.end(), [&](const Index& a, const Index& b) {
    const double ea = f(a.u, a.v) * f(a.u, a.v);
    const double eb = f(b.u, b.v) * f(b.u, b.v);
    return ea > eb;
  });
  sorted.resize(k);
  return sorted;
}

/// Splits n_total across bands proportionally to their sizes. Remainders
/// go by largest fractional part, ties favoring low, then mid, then high.
/// Integer arithmetic throughout, so the split is exact.
inline std::array<std::size_t, 3> allocate_budget(const std::array<std::size_t, 3>& sizes,
                                                  std::size_t n_total) {
  const std::size_t total = sizes[0] + sizes[1] + sizes[2];
  if (n_total > total) {
    throw Error("allocate_budget: n_total=" + std::to_string(n_total) +
                " exceeds grid size " + std::to_string(total));
  }
  std::array<std::size_t, 3> alloc{};
  std::array<std::size_t, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    alloc[k] = n_total * sizes[k] / total;
    remainder[k] = n_total * sizes[k] % total;
    assigned += alloc[k];
  }
  std::array<std::size_t, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b];
  });
  // A band already at capacity passes its extra pick to the next band in
  // remainder order; n_total <= total guarantees termination.
  for (std::size_t k = 0; assigned < n_total; k = (k + 1) % 3) {
    if (alloc[order[k]] < sizes[order[k]]) {
      ++alloc[order[k]];
      ++assigned;
    }
  }
  return alloc;
}

/// floor(n_band * delta); the epsilon keeps e.g. 0.7 * 10 from landing
/// on 6.999... in binary.
inline std::size_t energy_pick_count(std::size_t n_band, double delta) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(n_band) * delta + 1e-9));
}

struct BandSelection {
  std::string name;
  std::vector<Index> energy;
  std::vector<Index> random;

  std::size_t count() const { return energy.size() + random.size(); }
  friend bool operator==(const BandSelection&, const BandSelection&) = default;
};

/// The frozen set of trainable spectral positions. Coefficient k of an
/// adapter maps to indices()[k]: bands in order, energy picks before random.
struct SelectionPlan {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t n_total = 0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::vector<BandSelection> bands;

  std::vector<Index> indices() const {
    std::vector<Index> out;
    out.reserve(n_total);
    for (const auto& b : bands) {
      out.insert(out.end(), b.energy.begin(), b.energy.end());
      out.insert(out.end(), b.random.begin(), b.random.end());
    }
    return out;
  }

  friend bool operator==(const SelectionPlan&, const SelectionPlan&) = default;
};

/// Hybrid stratified selection: per band, the top floor(n_band * delta)
/// coefficients by energy, the rest sampled uniformly from what remains.
inline SelectionPlan build_selection_plan(const SpectralMatrix& f, std::size_t n_total,
                                          double delta, std::uint64_t seed) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw Error("build_selection_plan: delta must lie in [0,1]");
  if (n_total == 0) throw Error("build_selection_plan: n_total must be >= 1");
  if (n_total > f.rows() * f.cols()) {
    throw Error("build_selection_plan: n_total=" + std::to_string(n_total) +
                " exceeds " + std::to_string(f.rows()) + "x" + std::to_string(f.cols()));
  }
  const FrequencyPartition part = partition(f.rows(), f.cols());
  const auto alloc = allocate_budget(
      {part.low().size(), part.mid().size(), part.high().size()}, n_total);

  SelectionPlan plan{f.rows(), f.cols(), n_total, delta, seed, {}};
  Rng rng(seed);
  for (Band b : kBands) {
    const auto& members = part.band(b);
    const std::size_t n_band = alloc[static_cast<std::size_t>(b)];
    BandSelection sel;
    sel.name = to_string(b);
    sel.energy = rank_by_energy(f, members, energy_pick_count(n_band, delta));

    std::vector<Index> remaining;
    remaining.reserve(members.size());
    for (const Index& idx : members) {
      if (std::find(sel.energy.begin(), sel.energy.end(), idx) == sel.energy.end()) {
        remaining.push_back(idx);
      }
    }
    sel.random = rng.sample(std::move(remaining), n_band - sel.energy.size());
    plan.bands.push_back(std::move(sel));
  }
  return plan;
}

/// Uniform selection over the whole grid, ignoring bands and energy.
/// Serialized as a single band named "all".
inline SelectionPlan build_random_plan(std::size_t rows, std::size_t cols,
                                       std::size_t n_total, std::uint64_t seed) {
  if (rows == 0 || cols == 0) throw Error("build_random_plan: empty grid");
  if (n_total == 0 || n_total > rows * cols) {
    throw Error("build_random_plan: n_total=" + std::to_string(n_total) +
                " outside [1, " + std::to_string(rows * cols) + "]");
  }
  std::vector<Index> grid;
  grid.reserve(rows * cols);
  for (std::size_t u = 0; u < rows; ++u) {
    for (std::size_t v = 0; v < cols; ++v) grid.push_back({u, v});
  }
  Rng rng(seed);
  SelectionPlan plan{rows, cols, n_total, 0.0, seed, {}};
  plan.bands.push_back({"all", {}, rng.sample(std::move(grid), n_total)});
  return plan;
}

/// Throws with a diagnostic if the plan breaks any structural invariant:
/// counts, bounds, band membership, duplicates, and the energy/random split.
inline void validate_plan(const SelectionPlan& plan) {
  if (plan.rows == 0 || plan.cols == 0) throw Error("plan: empty grid");
  if (!(plan.delta >= 0.0 && plan.delta <= 1.0)) throw Error("plan: delta outside [0,1]");
  std::vector<bool> seen(plan.rows * plan.cols, false);
  std::size_t total = 0;
  const bool stratified = !(plan.bands.size() == 1 && plan.bands[0].name == "all");
  const FrequencyPartition part =
      stratified ? partition(plan.rows, plan.cols) : FrequencyPartition{};
  if (stratified && plan.bands.size() != 3) throw Error("plan: expected low/mid/high bands");

  for (std::size_t k = 0; k < plan.bands.size(); ++k) {
    const auto& sel = plan.bands[k];
    total += sel.count();
    if (stratified) {
      if (sel.name != to_string(kBands[k])) throw Error("plan: band order must be low, mid, high");
      if (sel.energy.size() != energy_pick_count(sel.count(), plan.delta)) {
        throw Error("plan: band " + sel.name + " energy picks do not equal floor(n_band * delta)");
      }
    } else if (!sel.energy.empty()) {
      throw Error("plan: random plan carries energy picks");
    }
    for (const auto* list : {&sel.energy, &sel.random}) {
      for (const Index& idx : *list) {
        if (idx.u >= plan.rows || idx.v >= plan.cols) throw Error("plan: index out of bounds");
        if (seen[idx.u * plan.cols + idx.v]) throw Error("plan: duplicate index");
        seen[idx.u * plan.cols + idx.v] = true;
        if (stratified && classify(idx.u, idx.v, plan.rows, plan.cols) != kBands[k]) {
          throw Error("plan: index outside its band " + sel.name);
        }
      }
    }
  }
  if (total != plan.n_total) throw Error("plan: band counts do not sum to n_total");
}

inline void to_json(nlohmann::ordered_json& j, const Index& idx) {
  j = nlohmann::ordered_json::array({idx.u, idx.v});
}

inline void from_json(const nlohmann::ordered_json& j, Index& idx) {
  if (!j.is_array() || j.size() != 2) throw Error("plan json: index must be [u, v]");
  idx.u = j.at(0).get<std::size_t>();
  idx.v = j.at(1).get<std::size_t>();
}

inline nlohmann::ordered_json plan_to_json(const SelectionPlan& plan) {
  nlohmann::ordered_json j;
  j["rows"] = plan.rows;
  j["cols"] = plan.cols;
  j["n_total"] = plan.n_total;
  j["delta"] = plan.delta;
  j["seed"] = plan.seed;
  j["bands"] = nlohmann::ordered_json::array();
  for (const auto& b : plan.bands) {
    nlohmann::ordered_json jb;
    jb["name"] = b.name;
    jb["indices_energy"] = b.energy;
    jb["indices_random"] = b.random;
    j["bands"].push_back(std::move(jb));
  }
  return j;
}

inline SelectionPlan plan_from_json(const nlohmann::ordered_json& j) {
  SelectionPlan plan;
  try {
    plan.rows = j.at("rows").get<std::size_t>();
    plan.cols = j.at("cols").get<std::size_t>();
    plan.n_total = j.at("n_total").get<std::size_t>();
    plan.delta = j.at("delta").get<double>();
    plan.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& jb : j.at("bands")) {
      BandSelection b;
      b.name = jb.at("name").get<std::string>();
      b.energy = jb.at("indices_energy").get<std::vector<Index>>();
      b.random = jb.at("indices_random").get<std::vector<Index>>();
      plan.bands.push_back(std::move(b));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("plan json: ") + e.what());
  }
  validate_plan(plan);
  return plan;
}

}  // namespace sdct
