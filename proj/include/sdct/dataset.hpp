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

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "sdct/network.hpp"
#include "sdct/random.hpp"

namespace sdct {

inline constexpr std::size_t kDatasetClasses = 8;
inline constexpr double kCenterRadius = 3.0;

/// Eight isotropic Gaussian blobs whose centers sit evenly on a circle of
/// radius 3. Points are stored class by class.
struct SyntheticDataset {
  LabeledData data;
  std::array<std::array<double, 2>, kDatasetClasses> centers{};
  double noise_sigma = 0.0;
  std::size_t per_class = 0;
  std::uint64_t seed = 0;
};

inline std::array<std::array<double, 2>, kDatasetClasses> class_centers() {
  std::array<std::array<double, 2>, kDatasetClasses> c{};
  for (std::size_t k = 0; k < kDatasetClasses; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) /
                         static_cast<double>(kDatasetClasses);
    c[k] = {kCenterRadius * std::cos(angle), kCenterRadius * std::sin(angle)};
  }
  return c;
}

inline SyntheticDataset generate_dataset(std::size_t per_class, double noise_sigma,
                                         std::uint64_t seed) {
  if (per_class == 0) throw Error("dataset: per_class must be >= 1");
  if (!(noise_sigma > 0.0) || !std::isfinite(noise_sigma)) {
    throw Error("dataset: noise_sigma must be > 0");
  }
  SyntheticDataset ds;
  ds.centers = class_centers();
  ds.noise_sigma = noise_sigma;
  ds.per_class = per_class;
  ds.seed = seed;
  ds.data.x = RealMatrix(kDatasetClasses * per_class, 2);
  ds.data.labels.reserve(kDatasetClasses * per_class);

  Rng rng(seed);
  std::size_t row = 0;
  for (std::size_t k = 0; k < kDatasetClasses; ++k) {
    for (std::size_t p = 0; p < per_class; ++p, ++row) {
      ds.data.x(row, 0) = ds.centers[k][0] + rng.normal(0.0, noise_sigma);
      ds.data.x(row, 1) = ds.centers[k][1] + rng.normal(0.0, noise_sigma);
      ds.data.labels.push_back(k);
    }
  }
  return ds;
}

}  // namespace sdct
