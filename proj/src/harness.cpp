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

#include "risdoa/harness.hpp"

#include "risdoa/baselines.hpp"
#include "risdoa/doa.hpp"
#include "risdoa/io.hpp"
#include "risdoa/rng.hpp"

#include <json.hpp>

#include <Eigen/QR>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

namespace risdoa {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

json sources_json(const SourceSet& s) {
  json arr = json::array();
  for (int k = 0; k < s.count(); ++k)
    arr.push_back({{"elevation_deg", s.directions[k].elevation_deg},
                   {"azimuth_deg", s.directions[k].azimuth_deg},
                   {"amplitude_re", s.amplitudes[k].real()},
                   {"amplitude_im", s.amplitudes[k].imag()}});
  return arr;
}

// Finite values as numbers, the rest as strings, so the JSON stays valid.
json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

std::string snr_tag(double snr) { return "snr" + format_number(snr); }

}  // namespace

SimulateOutput run_simulate(const Scenario& scenario, const fs::path& out_dir) {
  scenario.validate();
  const auto& geom = scenario.geometry;
  SimulateOutput out;
  out.sources = scenario_sources(scenario, scenario.seed);
  const ImpairmentModel imp = sample_impairments(geom, scenario.impairments, scenario.seed);
  out.snapshot = synthesize_impaired(geom, scenario.schedule(), imp, out.sources,
                                     scenario.snr_db, scenario.seed);
  out.scenario_hash = scenario_hash(scenario);
  if (!out_dir.empty()) {
    write_snapshot_csv(out_dir / "snapshot.csv", out.snapshot.samples);
    json meta;
    meta["P_n"] = out.snapshot.noise_power;
    meta["seed"] = out.snapshot.seed;
    meta["scenario_hash"] = out.scenario_hash;
    meta["snr_db"] = number_json(scenario.snr_db);
    meta["samples"] = scenario.samples;
    meta["sources"] = sources_json(out.sources);
    write_json(out_dir / "snapshot.json", meta);
  }
  return out;
}

TrainResult run_train(const ExperimentPlan& plan, const fs::path& out_dir,
                      const ReconstructionModel* resume, const EpochCallback& on_epoch) {
  plan.validate();
  const TrainConfig& tc = plan.training;
  const Dataset data = generate_dataset(plan.scenario, tc.dataset_size, tc.snr_db, tc.seed);
  const long first_epoch = resume ? resume->epochs_trained + 1 : 1;
  TrainResult result = train(tc, data, resume, on_epoch);

  const int held = std::max(200, tc.dataset_size / 10);
  const Dataset check =
      generate_dataset(plan.scenario, held, tc.snr_db, split_seed(tc.seed, 0x5EEDull << 32));
  const RMatrix rec =
      forward_batch(result.model.params, check.inputs / result.model.scale) * result.model.scale;
  const double per_sample =
      (rec - check.targets).squaredNorm() / (static_cast<double>(held) * plan.scenario.samples);
  result.model.residual_rms = std::sqrt(per_sample);
  result.model.scenario_hash = scenario_hash(plan.scenario);

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    save_model(result.model, out_dir / "model.bin");
    write_loss_csv(out_dir / "loss.csv", result.loss_history, first_epoch);
  }
  return result;
}

const MethodSummary& BenchResult::find(Method m, double snr_db) const {
  for (const auto& s : summary)
    if (s.method == m && s.snr_db == snr_db) return s;
  throw std::out_of_range("no summary row for " + std::string(method_name(m)) + " at " +
                          format_number(snr_db) + " dB");
}

namespace {

struct BenchContext {
  const ExperimentPlan* plan = nullptr;
  const ReconstructionModel* model = nullptr;
  CodeSchedule schedule;
  CMatrix g;
  std::optional<GridDictionary> dict;
};

double fit_residual(const CVector& z, const CMatrix& g, const RisGeometry& geom,
                    const std::vector<Direction>& dirs) {
  const CMatrix m = g * steering_matrix(geom, dirs);
  const CVector s = m.colPivHouseholderQr().solve(z);
  return (z - m * s).norm();
}

SolverConfig solver_for(const BenchContext& ctx, double noise_power, double model_rms) {
  const auto& plan = *ctx.plan;
  SolverConfig cfg = plan.solver;
  const int p = plan.scenario.samples;
  const double effective = noise_power + model_rms * model_rms;
  if (cfg.mode == SolveMode::kNoiseBall) {
    cfg.noise_radius = plan.noise_scale * std::sqrt(p * effective);
  } else if (cfg.alpha == 0.0) {
    cfg.alpha = plan.noise_scale *
                default_alpha(p, plan.scenario.geometry.elements(), std::sqrt(effective));
  }
  return cfg;
}

void run_trial(const BenchContext& ctx, double snr, int trial, std::vector<TrialRecord*>& slots) {
  using clock = std::chrono::steady_clock;
  const ExperimentPlan& plan = *ctx.plan;
  const Scenario& sc = plan.scenario;
  const auto& geom = sc.geometry;
  const std::uint64_t seed = split_seed(sc.seed, static_cast<std::uint64_t>(trial));
  const SourceSet sources = scenario_sources(sc, seed);
  const ImpairmentModel imp = sample_impairments(geom, sc.impairments, seed);
  const Snapshot snap = synthesize_impaired(geom, ctx.schedule, imp, sources, snr, seed);
  const int k = sources.count();

  std::optional<CVector> denoised;
  double denoise_seconds = 0.0;
  const double model_rms = ctx.model ? ctx.model->residual_rms : 0.0;

  for (std::size_t mi = 0; mi < plan.methods.size(); ++mi) {
    TrialRecord& rec = *slots[mi];
    rec.method = plan.methods[mi];
    rec.snr_db = snr;
    rec.trial = trial;
    rec.truth = sources.directions;
    const auto t0 = clock::now();
    double extra = 0.0;
    try {
      if (uses_model(rec.method) && !denoised) {
        const auto d0 = clock::now();
        denoised = reconstruct(*ctx.model, snap.samples);
        denoise_seconds = std::chrono::duration<double>(clock::now() - d0).count();
        extra = denoise_seconds;
      } else if (uses_model(rec.method)) {
        extra = denoise_seconds;
      }
      const CVector& input = uses_model(rec.method) ? *denoised : snap.samples;
      std::vector<Direction> est;
      const double rms = uses_model(rec.method) ? model_rms : 0.0;
      SolverConfig cfg = solver_for(ctx, snap.noise_power, rms);
      cfg.record_trace = plan.record_trace && trial == 0;
      DoaOptions doa;
      if (snap.noise_power + rms * rms > 0.0) {
        doa.order_threshold = plan.order_threshold;
        if (plan.select_order_by_fit) {
          doa.observation = &input;
          doa.measurement = &ctx.g;
        }
      }
      switch (rec.method) {
        case Method::kFft:
        case Method::kFftDenoise:
          est = fft_estimate(input, *ctx.dict, k, plan.peak_floor);
          break;
        case Method::kOmp:
        case Method::kOmpDenoise:
          est = omp_estimate(input, *ctx.dict, k);
          break;
        case Method::kDanm:
        case Method::kDnnDanm: {
          try {
            const DecoupledSdpVars v = solve_danm(input, ctx.g, geom, cfg);
            rec.solver = v.diagnostics;
            est = estimate_doa(v, geom, k, doa).directions;
          } catch (const NonConvergenceError& e) {
            rec.solver = e.diagnostics();
            throw;
          }
          break;
        }
        case Method::kAnmDenoise: {
          try {
            const FullSdpVars v = solve_full_anm(input, ctx.g, geom, cfg);
            rec.solver = v.diagnostics;
            est = estimate_doa(v, geom, k, doa).directions;
          } catch (const NonConvergenceError& e) {
            rec.solver = e.diagnostics();
            throw;
          }
          break;
        }
        case Method::kCrb:
          rec.rmse_deg = crb_numeric(geom, ctx.g, sources, snap.noise_power);
          break;
      }
      if (rec.method != Method::kCrb) {
        const auto perm = match_estimates(sources.directions, est);
        for (int q = 0; q < k; ++q) rec.estimate.push_back(est[perm[q]]);
        rec.rmse_deg = std::sqrt(matched_squared_error(sources.directions, est) / (2.0 * k));
        rec.residual = fit_residual(input, ctx.g, geom, rec.estimate);
      }
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.error = e.what();
      rec.rmse_deg = std::numeric_limits<double>::quiet_NaN();
      rec.estimate.clear();
    }
    rec.seconds = plan.record_seconds
                      ? std::chrono::duration<double>(clock::now() - t0).count() + extra
                      : 0.0;
  }
}

void write_bench(const BenchResult& res, const ExperimentPlan& plan, const fs::path& dir) {
  fs::create_directories(dir);
  CsvTable results{{"method", "snr_db", "trial", "rmse_deg", "seconds"}, {}};
  CsvTable solver{{"method", "snr_db", "trial", "iterations", "converged", "primal_residual",
                   "dual_residual", "min_eigenvalue", "structure_residual", "data_residual"},
                  {}};
  std::map<std::pair<std::string, std::string>, std::vector<EstimateRow>> estimates;
  json failures = json::array();
  for (const auto& r : res.records) {
    const std::string m(method_name(r.method));
    results.rows.push_back({m, format_number(r.snr_db), std::to_string(r.trial),
                            format_number(r.rmse_deg), format_number(r.seconds)});
    if (r.solver) {
      const auto& d = *r.solver;
      solver.rows.push_back({m, format_number(r.snr_db), std::to_string(r.trial),
                             std::to_string(d.iterations), d.converged ? "1" : "0",
                             format_number(d.primal_residual), format_number(d.dual_residual),
                             format_number(d.min_eigenvalue), format_number(d.structure_residual),
                             format_number(d.data_residual)});
      if (!d.trace.empty())
        write_trace_csv(dir / "trace" / (m + "_" + snr_tag(r.snr_db) + ".csv"), d.trace);
    }
    if (r.method != Method::kCrb) {
      auto& rows = estimates[{m, snr_tag(r.snr_db)}];
      for (std::size_t q = 0; q < r.estimate.size(); ++q)
        rows.push_back({r.trial, static_cast<int>(q), r.estimate[q], r.residual});
    }
    if (r.failed)
      failures.push_back({{"method", m}, {"snr_db", number_json(r.snr_db)}, {"trial", r.trial},
                          {"error", r.error}});
  }
  write_csv(dir / "results.csv", results);
  if (!solver.rows.empty()) write_csv(dir / "solver.csv", solver);
  for (const auto& [key, rows] : estimates)
    write_estimates_csv(dir / "estimates" / (key.first + "_" + key.second + ".csv"), rows);

  CsvTable summary{{"method", "snr_db", "rmse_deg", "mean_seconds", "trials", "failures"}, {}};
  json rows = json::array();
  for (const auto& s : res.summary) {
    const std::string m(method_name(s.method));
    summary.rows.push_back({m, format_number(s.snr_db), format_number(s.rmse_deg),
                            format_number(s.mean_seconds), std::to_string(s.trials),
                            std::to_string(s.failures)});
    rows.push_back({{"method", m}, {"snr_db", number_json(s.snr_db)},
                    {"rmse_deg", number_json(s.rmse_deg)}, {"mean_seconds", s.mean_seconds},
                    {"trials", s.trials}, {"failures", s.failures}});
  }
  write_csv(dir / "summary.csv", summary);

  json meta;
  meta["scenario_hash"] = res.scenario_hash;
  meta["model_hash"] = res.model_hash;
  meta["scenario"] = canonical_string(plan.scenario);
  meta["trials"] = plan.trials;
  meta["noise_scale"] = plan.noise_scale;
  meta["grid_step_deg"] = plan.grid_step_deg;
  meta["crb"] = "numerical Fisher-information bound of the unimpaired model";
  meta["summary"] = rows;
  meta["failures"] = failures;
  write_json(dir / "summary.json", meta);
}

}  // namespace

BenchResult run_bench(const ExperimentPlan& plan, const fs::path& out_dir,
                      const ReconstructionModel* model) {
  plan.validate();
  const Scenario& sc = plan.scenario;
  const auto& geom = sc.geometry;

  ReconstructionModel loaded;
  const bool need_model = std::any_of(plan.methods.begin(), plan.methods.end(), uses_model);
  if (need_model && !model) {
    if (plan.model_path.empty())
      throw std::runtime_error("bench: denoise methods need a trained model (bench.model)");
    loaded = load_model(plan.model_path);
    model = &loaded;
  }
  if (model && model->params.input_width() != 2 * sc.samples)
    throw ContractError("bench: model width " + std::to_string(model->params.input_width()) +
                        " does not match 2P = " + std::to_string(2 * sc.samples));

  BenchContext ctx;
  ctx.plan = &plan;
  ctx.model = need_model ? model : nullptr;
  ctx.schedule = sc.schedule();
  ctx.g = ctx.schedule.codes.cast<cd>();
  const bool need_grid = std::any_of(plan.methods.begin(), plan.methods.end(), [](Method m) {
    return m == Method::kFft || m == Method::kOmp || m == Method::kFftDenoise ||
           m == Method::kOmpDenoise;
  });
  if (need_grid) {
    const auto& pol = sc.source_policy;
    ctx.dict = build_dictionary(
        ctx.g, geom, AngleGrid::uniform(pol.elevation_deg, pol.azimuth_deg, plan.grid_step_deg));
  }

  const int ns = static_cast<int>(plan.snr_db.size());
  const int nm = static_cast<int>(plan.methods.size());
  const int nt = plan.trials;
  BenchResult res;
  res.scenario_hash = scenario_hash(sc);
  res.model_hash = ctx.model ? ctx.model->scenario_hash : std::string{};
  res.records.resize(static_cast<std::size_t>(ns) * nm * nt);

  std::atomic<int> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;
  auto worker = [&] {
    std::vector<TrialRecord*> slots(nm);
    for (int job = next++; job < ns * nt; job = next++) {
      const int s = job / nt;
      const int t = job % nt;
      for (int m = 0; m < nm; ++m)
        slots[m] = &res.records[(static_cast<std::size_t>(s) * nm + m) * nt + t];
      try {
        run_trial(ctx, plan.snr_db[s], t, slots);
      } catch (...) {
        std::lock_guard lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
      }
    }
  };
  const int nworkers = std::min(plan.workers, ns * nt);
  std::vector<std::thread> pool;
  for (int w = 1; w < nworkers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (fatal) std::rethrow_exception(fatal);

  for (int s = 0; s < ns; ++s)
    for (int m = 0; m < nm; ++m) {
      MethodSummary sum;
      sum.method = plan.methods[m];
      sum.snr_db = plan.snr_db[s];
      double sq = 0.0;
      double secs = 0.0;
      for (int t = 0; t < nt; ++t) {
        const auto& r = res.records[(static_cast<std::size_t>(s) * nm + m) * nt + t];
        secs += r.seconds;
        if (r.failed) {
          ++sum.failures;
          continue;
        }
        ++sum.trials;
        sq += r.rmse_deg * r.rmse_deg;
      }
      sum.rmse_deg = sum.trials > 0 ? std::sqrt(sq / sum.trials)
                                    : std::numeric_limits<double>::quiet_NaN();
      sum.mean_seconds = secs / nt;
      res.summary.push_back(sum);
    }

  if (!out_dir.empty()) write_bench(res, plan, out_dir);
  return res;
}

std::vector<RankedEntry> run_compare(const fs::path& results_csv, const fs::path& out_dir) {
  const CsvTable t = read_csv(results_csv);
  const int cm = t.column("method");
  const int cs = t.column("snr_db");
  const int cr = t.column("rmse_deg");
  t.column("trial");
  if (t.rows.empty()) throw DomainError("compare: results contain no methods");

  struct Acc {
    double sq = 0.0;
    int trials = 0;
    int failures = 0;
  };
  std::map<double, std::map<std::string, Acc>> groups;
  for (const auto& row : t.rows) {
    const double snr = parse_number(row[cs]);
    const double r = parse_number(row[cr]);
    Acc& a = groups[snr][row[cm]];
    if (std::isfinite(r)) {
      a.sq += r * r;
      ++a.trials;
    } else {
      ++a.failures;
    }
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<RankedEntry> out;
  for (const auto& [snr, methods] : groups) {
    double crb = nan;
    std::vector<RankedEntry> level;
    for (const auto& [name, a] : methods) {
      const double rmse = a.trials > 0 ? std::sqrt(a.sq / a.trials) : nan;
      if (name == "crb") {
        crb = rmse;
        continue;
      }
      level.push_back({snr, 0, name, rmse, nan, a.trials, a.failures});
    }
    if (level.empty()) throw DomainError("compare: no estimator rows at " + format_number(snr) + " dB");
    std::stable_sort(level.begin(), level.end(), [](const RankedEntry& x, const RankedEntry& y) {
      if (std::isnan(x.rmse_deg) != std::isnan(y.rmse_deg)) return std::isnan(y.rmse_deg);
      return x.rmse_deg < y.rmse_deg;
    });
    for (std::size_t i = 0; i < level.size(); ++i) {
      level[i].rank = static_cast<int>(i) + 1;
      level[i].crb_deg = crb;
      out.push_back(level[i]);
    }
  }

  if (!out_dir.empty()) {
    CsvTable table{{"snr_db", "rank", "method", "rmse_deg", "crb_deg", "trials", "failures"}, {}};
    json arr = json::array();
    for (const auto& e : out) {
      table.rows.push_back({format_number(e.snr_db), std::to_string(e.rank), e.method,
                            format_number(e.rmse_deg), format_number(e.crb_deg),
                            std::to_string(e.trials), std::to_string(e.failures)});
      arr.push_back({{"snr_db", number_json(e.snr_db)}, {"rank", e.rank}, {"method", e.method},
                     {"rmse_deg", number_json(e.rmse_deg)}, {"crb_deg", number_json(e.crb_deg)},
                     {"trials", e.trials}, {"failures", e.failures}});
    }
    write_csv(out_dir / "compare.csv", table);
    write_json(out_dir / "compare.json", json{{"source", results_csv.filename().string()},
                                               {"ranking", arr}});
  }
  return out;
}

}  // namespace risdoa
