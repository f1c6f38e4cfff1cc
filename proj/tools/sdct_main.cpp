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

// sdct: transforms, selection plans, benchmark runs, sweeps and parameter
// accounting from the command line.
//
// Exit codes: 0 success, 1 usage error, 2 runtime failure.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sdct/sdct.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class LogLevel { kQuiet, kInfo, kDebug };
LogLevel g_log = LogLevel::kInfo;

void log_info(const std::string& msg) {
  if (g_log != LogLevel::kQuiet) std::cerr << msg << '\n';
}

fs::path default_out_dir() {
  if (const char* env = std::getenv("SDCT_OUTPUT_DIR"); env && *env) return env;
  return "sdct-out";
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw sdct::Error("cannot open " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw sdct::Error("cannot write " + p.string());
  f << text;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
}

nlohmann::json parse_json_file(const fs::path& p) {
  try {
    return nlohmann::json::parse(read_file(p));
  } catch (const nlohmann::json::parse_error& e) {
    throw sdct::Error(p.string() + ": " + e.what());
  }
}

// transform ------------------------------------------------------------------

struct TransformArgs {
  std::string input;
  std::string output;
  bool inverse = false;
  std::string basis = "dct";
};

int run_transform(const TransformArgs& a) {
  std::ifstream in(a.input);
  if (!in) throw sdct::Error("cannot open " + a.input);
  std::ostringstream out;
  if (a.basis == "dct") {
    const sdct::RealMatrix m = sdct::read_matrix_csv(in);
    if (a.inverse) {
      sdct::write_matrix_csv(out, sdct::idct2({m, sdct::Basis::kDct}));
    } else {
      sdct::write_matrix_csv(out, sdct::dct2(m).coeffs);
    }
  } else if (a.inverse) {
    sdct::write_matrix_csv(out, sdct::idft2_real_part(sdct::read_complex_csv(in)));
  } else {
    sdct::write_complex_csv(out, sdct::dft2_real(sdct::read_matrix_csv(in)));
  }
  emit(a.output, out.str());
  return 0;
}

// plan -----------------------------------------------------------------------

struct PlanArgs {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t n = 0;
  double delta = sdct::kReferenceDelta;
  std::uint64_t seed = 0;
  std::string weights;
  bool random = false;
  std::string output;
};

int run_plan(const PlanArgs& a) {
  if (a.n == 0 || a.n > a.rows * a.cols) {
    throw UsageError("--n must lie in [1, rows*cols] = [1, " + std::to_string(a.rows * a.cols) + "]");
  }
  sdct::SelectionPlan plan;
  if (a.random) {
    plan = sdct::build_random_plan(a.rows, a.cols, a.n, a.seed);
  } else {
    sdct::RealMatrix w;
    if (!a.weights.empty()) {
      std::ifstream in(a.weights);
      if (!in) throw sdct::Error("cannot open " + a.weights);
      w = sdct::read_matrix_csv(in);
      if (w.rows() != a.rows || w.cols() != a.cols) {
        throw UsageError("weights file is " + std::to_string(w.rows()) + "x" +
                         std::to_string(w.cols()) + ", flags say " + std::to_string(a.rows) +
                         "x" + std::to_string(a.cols));
      }
    } else {
      // Stand-in weights: i.i.d. N(0,1) drawn from the plan seed.
      w = sdct::RealMatrix(a.rows, a.cols);
      sdct::Rng rng(a.seed);
      for (double& x : w.data()) x = rng.normal();
    }
    plan = sdct::build_selection_plan(sdct::dct2(w), a.n, a.delta, a.seed);
  }
  sdct::validate_plan(plan);
  emit(a.output, sdct::plan_to_json(plan).dump(2) + "\n");
  return 0;
}

// bench / sweep ----------------------------------------------------------------

struct BenchArgs {
  std::string method;
  std::size_t budget = 0;
  double delta = sdct::kReferenceDelta;
  double alpha = 1.0;
  double lr = 1e-2;
  std::size_t epochs = 2000;
  std::size_t seeds = 1;
  std::string optimizer = "adam";
  bool train_head = false;
  double base_gain = 0.3;
  std::size_t per_class = 100;
  double sigma = 0.3;
  std::uint64_t data_seed = 17;
  std::size_t jobs = 1;
  std::string out;
};

nlohmann::ordered_json dataset_json(const sdct::DatasetConfig& d) {
  return {{"per_class", d.per_class}, {"noise_sigma", d.noise_sigma}, {"seed", d.seed}};
}

void print_table(const std::vector<sdct::RunReport>& reports) {
  std::map<std::string, std::vector<const sdct::RunReport*>> groups;
  std::vector<std::string> order;
  for (const auto& r : reports) {
    const auto key = r.method.label();
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  std::printf("%-22s %6s %10s %14s %8s\n", "method", "runs", "mean_acc", "mean_ep_to_99", "params");
  for (const auto& key : order) {
    double acc = 0.0;
    double ep = 0.0;
    std::size_t reached = 0;
    for (const auto* r : groups[key]) {
      acc += r->final_accuracy;
      if (r->epochs_to_threshold) {
        ep += static_cast<double>(*r->epochs_to_threshold);
        ++reached;
      }
    }
    const auto n = static_cast<double>(groups[key].size());
    char ep_text[32] = "not_reached";
    if (reached) std::snprintf(ep_text, sizeof(ep_text), "%.1f (%zu)", ep / static_cast<double>(reached), reached);
    std::printf("%-22s %6zu %10.4f %14s %8zu\n", key.c_str(), groups[key].size(), acc / n,
                ep_text, groups[key].front()->trainable_params);
  }
}

bool write_comparison(const fs::path& out, const std::vector<sdct::RunReport>& reports,
                      nlohmann::ordered_json& manifest) {
  std::ostringstream summary;
  sdct::write_summary_csv(summary, reports);
  write_file(out / "summary.csv", summary.str());
  bool all_ok = true;
  auto runs = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    runs.push_back(sdct::report_to_json(r));
    if (!r.ok()) {
      all_ok = false;
      std::cerr << "run " << r.method.label() << " seed " << r.seed << " failed: " << *r.error << '\n';
    }
  }
  manifest["summary"] = "summary.csv";
  manifest["runs"] = std::move(runs);
  return all_ok;
}

int run_bench(const BenchArgs& a, bool delta_given) {
  const sdct::AdapterKind kind = [&] {
    try {
      return sdct::parse_adapter_kind(a.method);
    } catch (const sdct::Error& e) {
      throw UsageError(e.what());
    }
  }();
  if (delta_given && kind != sdct::AdapterKind::kSdctft) {
    throw UsageError("--delta is only valid with --method sdctft");
  }
  sdct::MethodSpec method{kind, a.budget, a.alpha, std::nullopt};
  if (kind == sdct::AdapterKind::kSdctft) method.delta = a.delta;
  try {
    method.adapter_config(0).validate();
  } catch (const sdct::Error& e) {
    throw UsageError(e.what());
  }
  sdct::TrainConfig train;
  train.epochs = a.epochs;
  train.learning_rate = a.lr;
  train.optimizer = sdct::parse_optimizer(a.optimizer);
  train.train_head = a.train_head;
  sdct::NetworkConfig net;
  net.base_gain = a.base_gain;
  const sdct::DatasetConfig dcfg{a.per_class, a.sigma, a.data_seed};

  const fs::path out = a.out.empty() ? default_out_dir() : fs::path(a.out);
  const auto ds = sdct::generate_dataset(dcfg.per_class, dcfg.noise_sigma, dcfg.seed);
  std::vector<std::uint64_t> seeds(a.seeds);
  for (std::size_t s = 0; s < a.seeds; ++s) seeds[s] = s;

  log_info("bench: " + method.label() + " x " + std::to_string(a.seeds) + " seed(s) -> " + out.string());
  const auto reports = sdct::run_comparison(ds, {method}, net, train, seeds, {out, a.jobs});

  nlohmann::ordered_json manifest;
  manifest["command"] = "bench";
  manifest["dataset"] = dataset_json(dcfg);
  const bool ok = write_comparison(out, reports, manifest);
  write_file(out / "manifest.json", manifest.dump(2) + "\n");
  if (g_log != LogLevel::kQuiet) print_table(reports);
  return ok ? 0 : kExitRuntime;
}

int run_sweep(const std::string& config_path, const std::string& out_arg, std::size_t jobs_override) {
  const nlohmann::json raw = parse_json_file(config_path);
  sdct::SweepConfig cfg;
  try {
    cfg = sdct::parse_sweep_config(raw);
  } catch (const sdct::Error& e) {
    throw UsageError(e.what());
  }
  if (jobs_override) cfg.jobs = jobs_override;
  const fs::path out = out_arg.empty() ? default_out_dir() : fs::path(out_arg);
  const auto ds = sdct::generate_dataset(cfg.dataset.per_class, cfg.dataset.noise_sigma, cfg.dataset.seed);

  nlohmann::ordered_json manifest;
  manifest["command"] = "sweep";
  manifest["config"] = raw;
  manifest["dataset"] = dataset_json(cfg.dataset);
  bool ok = true;
  if (!cfg.comparison.empty()) {
    log_info("sweep: comparison of " + std::to_string(cfg.comparison.size()) + " method(s) x " +
             std::to_string(cfg.seeds.size()) + " seed(s)");
    const auto reports =
        sdct::run_comparison(ds, cfg.comparison, cfg.network, cfg.train, cfg.seeds,
                             {out / "comparison", cfg.jobs});
    nlohmann::ordered_json section;
    ok = write_comparison(out / "comparison", reports, section) && ok;
    manifest["comparison"] = std::move(section);
    if (g_log != LogLevel::kQuiet) print_table(reports);
  }
  if (cfg.delta_sweep) {
    const auto& d = *cfg.delta_sweep;
    log_info("sweep: delta ablation over " + std::to_string(d.deltas.size()) + " value(s)");
    sdct::DeltaSweepResult res;
    try {
      res = sdct::delta_sweep(ds, d.n, d.alpha, d.deltas, cfg.network, cfg.train, cfg.seeds,
                              {out / "delta", cfg.jobs});
    } catch (const sdct::Error& e) {
      throw UsageError(e.what());
    }
    nlohmann::ordered_json section;
    ok = write_comparison(out / "delta", res.reports, section) && ok;
    std::ostringstream table;
    sdct::write_delta_csv(table, res);
    write_file(out / "delta" / "delta_table.csv", table.str());
    section["table"] = "delta_table.csv";
    manifest["delta_sweep"] = std::move(section);
    if (g_log != LogLevel::kQuiet) {
      std::printf("%-8s %18s\n", "delta", "mean_normalized");
      for (double x : d.deltas) std::printf("%-8.3g %18.4f\n", x, res.mean_normalized(x));
    }
  }
  write_file(out / "manifest.json", manifest.dump(2) + "\n");
  return ok ? 0 : kExitRuntime;
}

// accounting -------------------------------------------------------------------

int run_accounting(const std::string& models, const std::string& output) {
  const auto rows = sdct::accounting(sdct::parse_model_specs(parse_json_file(models)));
  std::ostringstream csv;
  sdct::write_accounting_csv(csv, rows);
  if (!output.empty()) write_file(output, csv.str());
  std::printf("%-14s %-7s %6s %10s %10s  %-10s %-10s %s\n", "model", "method", "budget",
              "params", "bytes", "reported", "reported", "status");
  for (const auto& r : rows) {
    const std::string status = !r.consistent ? "" : *r.consistent ? "ok" : "FLAGGED: " + r.note;
    std::printf("%-14s %-7s %6llu %10s %10s  %-10s %-10s %s\n", r.spec.model.c_str(),
                r.spec.method.c_str(), static_cast<unsigned long long>(r.spec.budget),
                r.params_text.c_str(), r.bytes_text.c_str(),
                r.spec.reported_params.value_or("-").c_str(),
                r.spec.reported_bytes.value_or("-").c_str(),
                status.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sdct: sparse DCT-domain adapters, baselines and benchmarks"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "quiet | info | debug")
      ->check(CLI::IsMember({"quiet", "info", "debug"}));

  TransformArgs ta;
  auto* transform = app.add_subcommand("transform", "2D DCT/DFT of a CSV matrix (or its inverse)");
  transform->add_option("input", ta.input, "input CSV matrix (row-major, no header)")->required()->check(CLI::ExistingFile);
  transform->add_option("-o,--output", ta.output, "output CSV (default: stdout)");
  transform->add_flag("--inverse", ta.inverse, "apply the inverse transform");
  transform->add_option("--basis", ta.basis, "dct | dft (dft files hold re,im pairs)")
      ->check(CLI::IsMember({"dct", "dft"}));

  PlanArgs pa;
  auto* plan = app.add_subcommand("plan", "build a coefficient selection plan as JSON");
  plan->add_option("--rows", pa.rows, "spectrum rows M")->required()->check(CLI::PositiveNumber);
  plan->add_option("--cols", pa.cols, "spectrum cols N")->required()->check(CLI::PositiveNumber);
  plan->add_option("--n", pa.n, "number of selected coefficients")->required()->check(CLI::PositiveNumber);
  plan->add_option("--delta", pa.delta, "energy ratio in [0,1] (default 0.7)")->check(CLI::Range(0.0, 1.0));
  plan->add_option("--seed", pa.seed, "selection seed (default 0)");
  plan->add_option("--weights", pa.weights, "CSV weight matrix (default: N(0,1) from --seed)")->check(CLI::ExistingFile);
  plan->add_flag("--random", pa.random, "uniform selection over the grid (rDCTFT / FourierFT)");
  plan->add_option("-o,--output", pa.output, "output JSON (default: stdout)");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "train one method on the synthetic benchmark");
  bench->add_option("--method", ba.method, "sdctft | rdctft | fourierft | lora")->required()
      ->check(CLI::IsMember({"sdctft", "rdctft", "fourierft", "lora"}));
  bench->add_option("--budget", ba.budget, "n coefficients, or rank r for lora")->required()->check(CLI::PositiveNumber);
  auto* delta_opt = bench->add_option("--delta", ba.delta, "energy ratio (sdctft only, default 0.7)")->check(CLI::Range(0.0, 1.0));
  bench->add_option("--alpha", ba.alpha, "update scaling (default 1)")->check(CLI::PositiveNumber);
  bench->add_option("--lr", ba.lr, "learning rate (default 0.01)")->check(CLI::NonNegativeNumber);
  bench->add_option("--epochs", ba.epochs, "full-batch epochs (default 2000)")->check(CLI::PositiveNumber);
  bench->add_option("--seeds", ba.seeds, "number of seeds, run as 0..k-1 (default 1)")->check(CLI::PositiveNumber);
  bench->add_option("--optimizer", ba.optimizer, "adam | sgd")->check(CLI::IsMember({"adam", "sgd"}));
  bench->add_flag("--train-head", ba.train_head, "also train the classifier head");
  bench->add_option("--base-gain", ba.base_gain, "frozen hidden weight gain (default 0.3)")->check(CLI::PositiveNumber);
  bench->add_option("--per-class", ba.per_class, "points per class (default 100)")->check(CLI::PositiveNumber);
  bench->add_option("--sigma", ba.sigma, "Gaussian noise sigma (default 0.3)")->check(CLI::PositiveNumber);
  bench->add_option("--data-seed", ba.data_seed, "dataset seed (default 17)");
  bench->add_option("--jobs", ba.jobs, "parallel runs (default 1)")->check(CLI::PositiveNumber);
  bench->add_option("--out", ba.out, "output directory (default $SDCT_OUTPUT_DIR or ./sdct-out)");

  std::string sweep_config;
  std::string sweep_out;
  std::size_t sweep_jobs = 0;
  auto* sweep = app.add_subcommand("sweep", "run a comparison / delta sweep from a JSON config");
  sweep->add_option("config", sweep_config, "sweep config (see configs/sweep.schema.json)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", sweep_out, "output directory (default $SDCT_OUTPUT_DIR or ./sdct-out)");
  sweep->add_option("--jobs", sweep_jobs, "parallel runs (overrides the config)")->check(CLI::PositiveNumber);

  std::string models_file;
  std::string accounting_out;
  auto* acct = app.add_subcommand("accounting", "trainable-parameter and storage table");
  acct->add_option("--models", models_file, "model spec JSON (e.g. configs/model_accounting.json)")->required()->check(CLI::ExistingFile);
  acct->add_option("-o,--output", accounting_out, "also write the table as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  g_log = log_level == "quiet" ? LogLevel::kQuiet : log_level == "debug" ? LogLevel::kDebug : LogLevel::kInfo;

  try {
    if (*transform) return run_transform(ta);
    if (*plan) return run_plan(pa);
    if (*bench) return run_bench(ba, delta_opt->count() > 0);
    if (*sweep) return run_sweep(sweep_config, sweep_out, sweep_jobs);
    if (*acct) return run_accounting(models_file, accounting_out);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
