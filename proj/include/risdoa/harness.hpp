// SPDX-License-Identifier: Apache-2.0
//
// risdoa: gridless 2D direction finding with an impaired 1-bit RIS
// Copyright (C) 2026 The risdoa authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "risdoa/anm.hpp"
#include "risdoa/neural.hpp"
#include "risdoa/scenario.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace risdoa {

enum class Method {
  kFft,
  kOmp,
  kFftDenoise,
  kOmpDenoise,
  kAnmDenoise,  // bordered SDP on the reconstructed signal
  kDnnDanm,     // decoupled SDP on the reconstructed signal
  kDanm,        // decoupled SDP on the raw snapshot
  kCrb,
};

std::string_view method_name(Method m);
Method parse_method(std::string_view name);
// The seven methods of the standard comparison (kDanm excluded).
std::vector<Method> standard_methods();
bool uses_model(Method m);

enum class Preset { kDesk, kPaper };
Preset parse_preset(std::string_view name);

struct ExperimentPlan {
  Scenario scenario;
  TrainConfig training;
  SolverConfig solver;
  std::vector<double> snr_db{20.0};
  std::vector<Method> methods = standard_methods();
  int trials = 100;
  double grid_step_deg = 1.0;
  double peak_floor = 0.2;  // fft: secondary peaks below this fraction of the maximum are ignored
  // Multiplies the noise-ball radius sqrt(P (P_n + r^2)) and the default alpha,
  // r being the model's held-out reconstruction RMS.
  double noise_scale = 1.0;
  // Effective-order threshold handed to estimate_doa when the snapshot is noisy or
  // reconstructed; noiseless raw snapshots always use order K.
  double order_threshold = 0.1;
  // Noisy inputs: try every per-axis prediction order and keep the best steering
  // fit instead of thresholding eigenvalues.
  bool select_order_by_fit = true;
  std::filesystem::path model_path;
  int workers = 1;
  bool record_seconds = true;  // false writes 0 so that reruns are byte-identical
  bool record_trace = false;   // per-iteration solver trace of trial 0

  void validate() const;
};

ExperimentPlan preset_plan(Preset preset);

// Sections [geometry] [signal] [sources] [impairments] [train] [solver] [bench];
// INI unless the extension is .json. Unset keys keep the preset values.
ExperimentPlan load_plan(const std::filesystem::path& path, Preset preset = Preset::kDesk);
ExperimentPlan parse_plan(std::string_view text, bool json, Preset preset = Preset::kDesk);

struct SimulateOutput {
  Snapshot snapshot;
  SourceSet sources;
  std::string scenario_hash;
};

// Impaired snapshot from scenario.seed; writes snapshot.csv and snapshot.json
// when out_dir is nonempty.
SimulateOutput run_simulate(const Scenario& scenario, const std::filesystem::path& out_dir);

// Trains on generate_dataset(scenario, ...); writes model.bin (+ .json) and loss.csv
// when out_dir is nonempty. `resume` continues from an existing model.
TrainResult run_train(const ExperimentPlan& plan, const std::filesystem::path& out_dir,
                      const ReconstructionModel* resume = nullptr,
                      const EpochCallback& on_epoch = {});

struct TrialRecord {
  Method method = Method::kFft;
  double snr_db = 0.0;
  int trial = 0;
  bool failed = false;
  std::string error;
  double rmse_deg = 0.0;  // sqrt(sum (dtheta^2 + dphi^2) / 2K) for this trial
  double seconds = 0.0;
  std::vector<Direction> truth;
  std::vector<Direction> estimate;  // matched to truth order
  double residual = 0.0;            // ||z - G A(estimate) s_ls|| on the estimator input
  std::optional<SolverDiagnostics> solver;
};

struct MethodSummary {
  Method method = Method::kFft;
  double snr_db = 0.0;
  double rmse_deg = 0.0;  // over successful trials
  double mean_seconds = 0.0;
  int trials = 0;
  int failures = 0;
};

struct BenchResult {
  std::string scenario_hash;
  std::string model_hash;
  std::vector<TrialRecord> records;  // sorted by (snr, method, trial)
  std::vector<MethodSummary> summary;

  const MethodSummary& find(Method m, double snr_db) const;
};

// Monte-Carlo comparison. `model` overrides plan.model_path. Writes results.csv,
// summary.csv, summary.json, solver.csv and estimates/ when out_dir is nonempty.
BenchResult run_bench(const ExperimentPlan& plan, const std::filesystem::path& out_dir,
                      const ReconstructionModel* model = nullptr);

struct RankedEntry {
  double snr_db = 0.0;
  int rank = 0;
  std::string method;
  double rmse_deg = 0.0;
  double crb_deg = 0.0;  // NaN without a crb row at this SNR
  int trials = 0;
  int failures = 0;
};

// Ranks methods per SNR by aggregate RMSE from a results CSV; crb rows become the
// overlay column. Writes compare.csv and compare.json when out_dir is nonempty.
std::vector<RankedEntry> run_compare(const std::filesystem::path& results_csv,
                                     const std::filesystem::path& out_dir);

}  // namespace risdoa
