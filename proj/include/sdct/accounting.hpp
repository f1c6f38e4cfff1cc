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

// Trainable-parameter and storage accounting for LoRA vs sDCTFT across
// L adapted d1 x d2 matrices, rendered the way the comparison table is.
//
//   sDCTFT: params = n * L
//   LoRA:   params = r * (d1 + d2) * L
//   bytes  = 4 * params (fp32 trainable values only, no index metadata)

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdct/matrix.hpp"

namespace sdct {

struct AccountingSpec {
  std::string model;
  std::string method;  // "lora" or "sdctft"
  std::uint64_t budget = 0;  // r for lora, n for sdctft
  std::uint64_t d1 = 0;
  std::uint64_t d2 = 0;
  std::uint64_t layers = 0;
  // Figures as printed in the reference table, e.g. "4.8K" and "18.8KB".
  std::optional<std::string> reported_params;
  std::optional<std::string> reported_bytes;
};

struct AccountingRow {
  AccountingSpec spec;
  std::uint64_t trainable_params = 0;
  std::uint64_t required_bytes = 0;
  std::string params_text;
  std::string bytes_text;
  // Set when reported figures exist: true if both agree with the formula
  // (params within one displayed unit, bytes within 1%).
  std::optional<bool> consistent;
  std::string note;
};

inline std::uint64_t trainable_params(const std::string& method, std::uint64_t budget,
                                      std::uint64_t d1, std::uint64_t d2,
                                      std::uint64_t layers) {
  if (method == "sdctft") return budget * layers;
  if (method == "lora") return budget * (d1 + d2) * layers;
  throw Error("accounting: unknown method '" + method + "' (expected lora or sdctft)");
}

namespace detail {

// Three significant digits, half away from zero, trailing zeros dropped.
inline std::string three_significant(double x) {
  const int decimals = x >= 100.0 ? 0 : x >= 10.0 ? 1 : 2;
  const double scale = std::pow(10.0, decimals);
  const double rounded = std::round(x * scale) / scale;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, rounded);
  std::string s(buf);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  return s;
}

inline std::string render_scaled(double value, double base, const char* const* units,
                                 int unit_count) {
  int unit = 0;
  double x = value;
  while (unit + 1 < unit_count && x >= base) {
    x /= base;
    ++unit;
  }
  // Rounding can carry into the next unit (999.7K -> 1000K -> 1M).
  if (unit + 1 < unit_count && std::round(x) >= base) {
    x /= base;
    ++unit;
  }
  return three_significant(x) + units[unit];
}

struct ParsedFigure {
  double value = 0.0;
  double display_unit = 0.0;  // value of one step in the last printed digit
};

inline ParsedFigure parse_figure(const std::string& text, double base,
                                 const char* const* units, int unit_count) {
  std::size_t end = 0;
  double number = 0.0;
  try {
    number = std::stod(text, &end);
  } catch (const std::exception&) {
    throw Error("accounting: cannot parse reported figure '" + text + "'");
  }
  const std::string suffix = text.substr(end);
  double mult = -1.0;
  double m = 1.0;
  for (int k = 0; k < unit_count; ++k, m *= base) {
    if (suffix == units[k]) mult = m;
  }
  if (mult < 0.0) throw Error("accounting: unknown unit in '" + text + "'");
  const auto dot = text.find('.');
  const std::size_t decimals = dot == std::string::npos || dot > end ? 0 : end - dot - 1;
  return {number * mult, std::pow(10.0, -static_cast<double>(decimals)) * mult};
}

inline constexpr const char* kCountUnits[] = {"", "K", "M", "B"};
inline constexpr const char* kByteUnits[] = {"B", "KB", "MB", "GB"};

}  // namespace detail

/// 147456 -> "147K", 4800 -> "4.8K", 8388608 -> "8.39M" (1000 divisors).
inline std::string render_count(std::uint64_t n) {
  if (n < 1000) return std::to_string(n);
  return detail::render_scaled(static_cast<double>(n), 1000.0, detail::kCountUnits, 4);
}

/// 19200 -> "18.8KB", 1179648 -> "1.13MB" (1024 divisors).
inline std::string render_bytes(std::uint64_t bytes) {
  if (bytes < 1024) return std::to_string(bytes) + "B";
  return detail::render_scaled(static_cast<double>(bytes), 1024.0, detail::kByteUnits, 4);
}

inline double parse_reported_bytes(const std::string& text) {
  return detail::parse_figure(text, 1024.0, detail::kByteUnits, 4).value;
}

inline double parse_reported_count(const std::string& text) {
  return detail::parse_figure(text, 1000.0, detail::kCountUnits, 4).value;
}

inline AccountingRow account(const AccountingSpec& spec) {
  AccountingRow row;
  row.spec = spec;
  row.trainable_params = trainable_params(spec.method, spec.budget, spec.d1, spec.d2, spec.layers);
  row.required_bytes = 4 * row.trainable_params;
  row.params_text = render_count(row.trainable_params);
  row.bytes_text = render_bytes(row.required_bytes);

  if (spec.reported_params || spec.reported_bytes) {
    bool ok = true;
    if (spec.reported_params) {
      const auto fig = detail::parse_figure(*spec.reported_params, 1000.0, detail::kCountUnits, 4);
      const double diff = std::abs(static_cast<double>(row.trainable_params) - fig.value);
      if (diff > fig.display_unit * (1.0 + 1e-9)) {
        ok = false;
        row.note += "params " + row.params_text + " vs reported " + *spec.reported_params + "; ";
      }
    }
    if (spec.reported_bytes) {
      const double reported = parse_reported_bytes(*spec.reported_bytes);
      const double rel = std::abs(static_cast<double>(row.required_bytes) - reported) / reported;
      if (rel > 0.01) {
        ok = false;
        row.note += "bytes " + row.bytes_text + " vs reported " + *spec.reported_bytes + "; ";
      }
    }
    if (!row.note.empty()) row.note.resize(row.note.size() - 2);
    row.consistent = ok;
  }
  return row;
}

inline std::vector<AccountingRow> accounting(const std::vector<AccountingSpec>& specs) {
  std::vector<AccountingRow> rows;
  rows.reserve(specs.size());
  for (const auto& s : specs) rows.push_back(account(s));
  return rows;
}

/// Reads {"models": [{"name", "d1", "d2", "layers", "rows": [{"method",
/// "budget", "params"?, "bytes"?}]}]}.
inline std::vector<AccountingSpec> parse_model_specs(const nlohmann::json& j) {
  std::vector<AccountingSpec> specs;
  try {
    for (const auto& m : j.at("models")) {
      for (const auto& r : m.at("rows")) {
        AccountingSpec s;
        s.model = m.at("name").get<std::string>();
        s.d1 = m.at("d1").get<std::uint64_t>();
        s.d2 = m.at("d2").get<std::uint64_t>();
        s.layers = m.at("layers").get<std::uint64_t>();
        s.method = r.at("method").get<std::string>();
        s.budget = r.at("budget").get<std::uint64_t>();
        if (r.contains("params")) s.reported_params = r["params"].get<std::string>();
        if (r.contains("bytes")) s.reported_bytes = r["bytes"].get<std::string>();
        trainable_params(s.method, 0, 0, 0, 0);  // validates the method name
        specs.push_back(std::move(s));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("model specs: ") + e.what());
  }
  return specs;
}

inline void write_accounting_csv(std::ostream& os, const std::vector<AccountingRow>& rows) {
  os << "model,method,budget,layers,d1,d2,trainable_params,required_bytes,"
        "params_rendered,bytes_rendered,reported_params,reported_bytes,consistent,note\n";
  for (const auto& r : rows) {
    os << '"' << r.spec.model << "\"," << r.spec.method << ',' << r.spec.budget << ','
       << r.spec.layers << ',' << r.spec.d1 << ',' << r.spec.d2 << ',' << r.trainable_params
       << ',' << r.required_bytes << ',' << r.params_text << ',' << r.bytes_text << ','
       << r.spec.reported_params.value_or("") << ',' << r.spec.reported_bytes.value_or("")
       << ',' << (r.consistent ? (*r.consistent ? "yes" : "FLAGGED") : "") << ",\"" << r.note
       << "\"\n";
  }
}

}  // namespace sdct
