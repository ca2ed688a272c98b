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

// risdoa command-line front end: simulate, train, bench, compare.

#include "risdoa/harness.hpp"
#include "risdoa/io.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace risdoa;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string preset = "desk";
  std::string out = "out";
  std::optional<int> workers;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("-c,--config", f.config, "INI or JSON experiment file")->check(CLI::ExistingFile);
  cmd->add_option("-s,--seed", f.seed, "master seed (signal.seed and train.seed)");
  cmd->add_option("-p,--preset", f.preset, "scale preset")
      ->check(CLI::IsMember({"desk", "paper"}));
  cmd->add_option("-o,--out", f.out, "output directory");
  cmd->add_option("-w,--workers", f.workers, "worker threads")->check(CLI::PositiveNumber);
}

ExperimentPlan resolve(const CommonFlags& f) {
  const Preset preset = parse_preset(f.preset);
  ExperimentPlan plan = f.config.empty() ? preset_plan(preset) : load_plan(f.config, preset);
  if (f.seed) {
    plan.scenario.seed = *f.seed;
    plan.training.seed = *f.seed;
  }
  if (f.workers) plan.workers = *f.workers;
  plan.validate();
  return plan;
}

void print_summary(const BenchResult& r) {
  std::printf("%-12s %8s %10s %12s %8s\n", "method", "snr_db", "rmse_deg", "mean_seconds",
              "failed");
  for (const auto& s : r.summary)
    std::printf("%-12s %8s %10.4f %12.6f %5d/%d\n", std::string(method_name(s.method)).c_str(),
                format_number(s.snr_db).c_str(), s.rmse_deg, s.mean_seconds, s.failures,
                s.trials);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gridless 2D direction finding with an impaired 1-bit RIS"};
  app.require_subcommand(1);

  CommonFlags sim_f, train_f, bench_f, cmp_f;
  CLI::App* sim = app.add_subcommand("simulate", "write one impaired snapshot");
  add_common(sim, sim_f);

  CLI::App* trn = app.add_subcommand("train", "train the reconstruction network");
  add_common(trn, train_f);
  std::string resume;
  trn->add_option("--resume", resume, "continue from a saved model")->check(CLI::ExistingFile);
  bool quiet = false;
  trn->add_flag("-q,--quiet", quiet, "no per-epoch progress");

  CLI::App* bch = app.add_subcommand("bench", "Monte-Carlo method comparison");
  add_common(bch, bench_f);
  std::string model_path;
  bch->add_option("-m,--model", model_path, "trained model (overrides bench.model)")
      ->check(CLI::ExistingFile);
  int trials = 0;
  bch->add_option("-n,--trials", trials, "override the trial count")->check(CLI::PositiveNumber);

  CLI::App* cmp = app.add_subcommand("compare", "rank methods from a results CSV");
  add_common(cmp, cmp_f);
  std::string results;
  cmp->add_option("results", results, "results.csv written by bench")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      const ExperimentPlan plan = resolve(sim_f);
      const SimulateOutput out = run_simulate(plan.scenario, sim_f.out);
      std::printf("wrote %s (P=%d, P_n=%s, scenario %s)\n",
                  (fs::path(sim_f.out) / "snapshot.csv").string().c_str(),
                  static_cast<int>(out.snapshot.samples.size()),
                  format_number(out.snapshot.noise_power).c_str(), out.scenario_hash.c_str());
    } else if (*trn) {
      const ExperimentPlan plan = resolve(train_f);
      std::optional<ReconstructionModel> start;
      if (!resume.empty()) start = load_model(resume);
      const int total = plan.training.epochs;
      const TrainResult r = run_train(
          plan, train_f.out, start ? &*start : nullptr, [&](int epoch, double loss) {
            if (!quiet && (epoch % 50 == 0 || epoch == 1))
              std::fprintf(stderr, "epoch %d/%d loss %.6g\n", epoch, total, loss);
          });
      std::printf("trained %ld epochs, loss %s -> %s, held-out residual rms %s\n",
                  r.model.epochs_trained, format_number(r.loss_history.front()).c_str(),
                  format_number(r.loss_history.back()).c_str(),
                  format_number(r.model.residual_rms).c_str());
    } else if (*bch) {
      ExperimentPlan plan = resolve(bench_f);
      if (!model_path.empty()) plan.model_path = model_path;
      if (trials > 0) plan.trials = trials;
      print_summary(run_bench(plan, bench_f.out));
    } else if (*cmp) {
      const auto ranked = run_compare(results, cmp_f.out);
      std::printf("%8s %4s %-12s %10s %10s\n", "snr_db", "rank", "method", "rmse_deg", "crb_deg");
      for (const auto& e : ranked)
        std::printf("%8s %4d %-12s %10.4f %10s\n", format_number(e.snr_db).c_str(), e.rank,
                    e.method.c_str(), e.rmse_deg, format_number(e.crb_deg).c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "risdoa: %s\n", e.what());
    return 1;
  }
  return 0;
}
