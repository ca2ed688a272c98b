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

// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   risdoa_acceptance --out DIR [--only 1,2,...] [--reuse-models]

#include "risdoa/anm.hpp"
#include "risdoa/baselines.hpp"
#include "risdoa/doa.hpp"
#include "risdoa/harness.hpp"
#include "risdoa/io.hpp"
#include "risdoa/neural.hpp"
#include "risdoa/rng.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace risdoa;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;
const double kInf = std::numeric_limits<double>::infinity();

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

CMatrix outer_atom(int m, int n, double d, double fr, double fc) {
  return axis_atom(m, d, fr) * axis_atom(n, d, fc).transpose();
}

CVector vec_rows(const CMatrix& x) {
  CVector v(x.size());
  for (Eigen::Index a = 0; a < x.rows(); ++a)
    for (Eigen::Index b = 0; b < x.cols(); ++b) v(a * x.cols() + b) = x(a, b);
  return v;
}

// Circular distance of two frequencies in cycles per element.
double cycle_gap(double f1, double f2, double d) {
  const double c = std::abs(f1 - f2) * d;
  return std::min(c - std::floor(c), 1.0 - (c - std::floor(c)));
}

struct Context {
  fs::path out;
  bool reuse_models = false;
};

// 1. Noiseless exact recovery on ideal hardware.
ExperimentPlan exact_recovery_plan() {
  ExperimentPlan plan = preset_plan(Preset::kDesk);
  plan.scenario.impairments = ImpairmentRanges::ideal();
  plan.scenario.source_policy.count = 2;
  plan.scenario.source_policy.min_separation_deg = 15.0;
  plan.snr_db = {kInf};
  plan.methods = {Method::kDanm};
  plan.trials = 50;
  plan.solver.mode = SolveMode::kNoiseBall;
  plan.solver.primal_tol = 1e-8;
  plan.solver.dual_tol = 1e-8;
  plan.record_seconds = false;
  return plan;
}

Verdict criterion_exact(const Context& ctx) {
  const ExperimentPlan plan = exact_recovery_plan();
  const auto t0 = Clock::now();
  const BenchResult r = run_bench(plan, ctx.out / "c1");
  const double secs = seconds_since(t0);
  int ok = 0;
  double worst = 0.0;
  for (const auto& rec : r.records) {
    if (rec.failed) continue;
    double e = 0.0;
    for (std::size_t k = 0; k < rec.truth.size(); ++k)
      e = std::max({e, std::abs(rec.truth[k].elevation_deg - rec.estimate[k].elevation_deg),
                    std::abs(rec.truth[k].azimuth_deg - rec.estimate[k].azimuth_deg)});
    worst = std::max(worst, e);
    ok += e <= 0.1;
  }
  return {ok == 50 && secs <= 120.0,
          std::to_string(ok) + "/50 within 0.1 deg, worst " + fmt("%.4f", worst) + " deg, " +
              fmt("%.1f", secs) + " s (limit 120 s)"};
}

// 2. Bordered and decoupled atomic norms agree on noiseless sparse targets.
Verdict criterion_equivalence(const Context&) {
  const auto t0 = Clock::now();
  Rng rng(20240611);
  std::uniform_real_distribution<double> freq(-1.0, 1.0);
  std::uniform_real_distribution<double> amp(0.5, 2.0);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  SolverConfig cfg;
  cfg.primal_tol = 1e-8;
  cfg.dual_tol = 1e-8;
  const double d = 0.4;
  double worst_full = 0.0, worst_dec = 0.0, worst_pair = 0.0;
  for (int t = 0; t < 20; ++t) {
    const int m = 3 + (t % 2);
    const int n = 3 + ((t / 2) % 2);
    const int k = 1 + ((t / 4) % 2);
    std::vector<double> fr, fc;
    while (static_cast<int>(fr.size()) < k) {
      const double a = freq(rng), b = freq(rng);
      bool ok = true;
      for (std::size_t q = 0; q < fr.size(); ++q)
        ok = ok && cycle_gap(a, fr[q], d) >= 1.0 / m && cycle_gap(b, fc[q], d) >= 1.0 / n;
      if (ok) {
        fr.push_back(a);
        fc.push_back(b);
      }
    }
    CMatrix x = CMatrix::Zero(m, n);
    double csum = 0.0;
    for (int q = 0; q < k; ++q) {
      const double c = amp(rng);
      csum += c;
      x += std::polar(c, phase(rng)) * outer_atom(m, n, d, fr[q], fc[q]);
    }
    const double full =
        solve_full_anm_target(vec_rows(x), RisGeometry(m, n, d, d), cfg).normalized_objective();
    const double dec = solve_danm_target(x, cfg).normalized_objective();
    worst_full = std::max(worst_full, std::abs(full - csum) / csum);
    worst_dec = std::max(worst_dec, std::abs(dec - csum) / csum);
    worst_pair = std::max(worst_pair, std::abs(full - dec) / full);
  }
  const double secs = seconds_since(t0);
  return {worst_full <= 0.02 && worst_dec <= 0.02 && worst_pair <= 0.02 && secs <= 300.0,
          "max rel err bordered " + fmt("%.2e", worst_full) + ", decoupled " +
              fmt("%.2e", worst_dec) + ", between " + fmt("%.2e", worst_pair) + " (limit 2e-2), " +
              fmt("%.1f", secs) + " s"};
}

// 3. Vandermonde decomposition round trip.
Verdict criterion_vandermonde(const Context&) {
  Rng rng(33);
  std::uniform_real_distribution<double> freq(-1.0, 1.0);
  std::uniform_real_distribution<double> amp(0.2, 3.0);
  double worst_res = 0.0, worst_f = 0.0;
  int cases = 0;
  for (int dim : {6, 8, 12, 16})
    for (int k = 1; k <= 3; ++k)
      for (int rep = 0; rep < 5; ++rep) {
        const double d = 0.4;
        std::vector<double> f;
        while (static_cast<int>(f.size()) < k) {
          const double c = freq(rng);
          bool ok = true;
          for (double g : f) ok = ok && cycle_gap(c, g, d) >= 1.0 / dim;
          if (ok) f.push_back(c);
        }
        CMatrix t = CMatrix::Zero(dim, dim);
        for (double fq : f) {
          const CVector a = axis_atom(dim, d, fq);
          t += amp(rng) * a * a.adjoint();
        }
        const AtomicDecomposition dec = vandermonde_decompose(t, k, d);
        std::sort(f.begin(), f.end());
        for (int q = 0; q < k; ++q) worst_f = std::max(worst_f, std::abs(dec.frequencies[q] - f[q]));
        worst_res = std::max(worst_res, (t - dec.rebuild(dim)).norm() / t.norm());
        ++cases;
      }
  return {worst_res < 1e-6 && worst_f < 1e-6,
          std::to_string(cases) + " cases, max residual " + fmt("%.2e", worst_res) +
              ", max freq err " + fmt("%.2e", worst_f) + " (limit 1e-6)"};
}

// Smallest |pre-activation| over the hidden ReLU units.
double kink_margin(const MlpParams& p, const RVector& x) {
  RVector a = x;
  double margin = kInf;
  for (std::size_t l = 0; l + 1 < p.layers.size(); ++l) {
    const RVector z = p.layers[l].weight * a + p.layers[l].bias;
    margin = std::min(margin, z.cwiseAbs().minCoeff());
    a = z.cwiseMax(0.0);
  }
  return margin;
}

// 4. Analytic MLP gradients against central differences. Points whose stencil
// could straddle a ReLU kink are redrawn; the loss is not differentiable there.
Verdict criterion_gradients(const Context&) {
  const double h = 1e-5;
  double worst = 0.0;
  int points = 0, redrawn = 0;
  for (std::uint64_t seed = 0; points < 100; ++seed) {
    MlpParams p = MlpParams::reconstructor(16, 16, 5000 + seed);
    Rng rng(9000 + seed);
    std::normal_distribution<double> g;
    RVector x(16), y(16);
    for (int i = 0; i < 16; ++i) {
      x(i) = g(rng);
      y(i) = g(rng);
    }
    if (kink_margin(p, x) < 1e-3) {
      ++redrawn;
      continue;
    }
    ++points;
    const MlpGradients grad = backward(p, x, y);
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
      auto check = [&](double& slot, double analytic) {
        const double keep = slot;
        slot = keep + h;
        const double up = loss(forward(p, x), y);
        slot = keep - h;
        const double dn = loss(forward(p, x), y);
        slot = keep;
        const double fd = (up - dn) / (2.0 * h);
        worst = std::max(worst, std::abs(fd - analytic) /
                                    std::max(1e-6, std::abs(fd) + std::abs(analytic)));
      };
      for (Eigen::Index i = 0; i < p.layers[l].weight.size(); ++i)
        check(p.layers[l].weight.data()[i], grad.layers[l].weight.data()[i]);
      for (Eigen::Index i = 0; i < p.layers[l].bias.size(); ++i)
        check(p.layers[l].bias.data()[i], grad.layers[l].bias.data()[i]);
    }
  }
  return {worst < 1e-4, "100 points (" + std::to_string(redrawn) +
                            " redrawn near a ReLU kink), max rel err " + fmt("%.2e", worst) +
                            " (limit 1e-4)"};
}

// 5. Desk-scale training curve.
Verdict criterion_training(const Context& ctx) {
  ExperimentPlan plan = preset_plan(Preset::kDesk);
  plan.training.dataset_size = 2000;
  plan.training.learning_rate = 1e-4;
  plan.training.batch_size = 64;
  plan.training.epochs = 1000;
  plan.training.hidden_width = 4 * plan.scenario.samples;
  const auto t0 = Clock::now();
  const TrainResult r = run_train(plan, ctx.out / "c5");
  const double secs = seconds_since(t0);
  const double ratio = r.loss_history.back() / r.loss_history.front();
  return {ratio <= 0.01 && secs <= 900.0,
          "final/epoch-1 loss " + fmt("%.4f", 100.0 * ratio) + "% (limit 1%), " +
              fmt("%.0f", secs) + " s (limit 900 s)"};
}

// Scenarios of the ordering and degradation studies.
struct Study {
  std::string name;
  ExperimentPlan plan;
};

ExperimentPlan study_plan() {
  ExperimentPlan plan = preset_plan(Preset::kDesk);
  plan.snr_db = {20.0};
  plan.trials = 100;
  plan.methods = {Method::kFft, Method::kOmp, Method::kFftDenoise, Method::kOmpDenoise,
                  Method::kDnnDanm};
  plan.training.dataset_size = 10000;
  plan.training.epochs = 200;
  plan.training.hidden_width = 4 * plan.scenario.samples;
  plan.record_seconds = false;
  return plan;
}

std::vector<Study> studies() {
  std::vector<Study> s;
  s.push_back({"default", study_plan()});
  s.push_back({"mismatch_amplitude", study_plan()});
  s.back().plan.scenario.impairments.mismatch_amplitude = {0.5, 3.0};
  s.push_back({"mismatch_phase", study_plan()});
  s.back().plan.scenario.impairments.mismatch_phase = {-kPi / 3.0, kPi / 3.0};
  s.push_back({"coupling", study_plan()});
  s.back().plan.scenario.impairments.coupling_amplitude = {0.1, 0.8};
  return s;
}

ReconstructionModel model_for(const Context& ctx, const Study& st) {
  const fs::path dir = ctx.out / "models" / st.name;
  if (ctx.reuse_models && fs::exists(dir / "model.bin")) {
    ReconstructionModel m = load_model(dir / "model.bin");
    if (m.scenario_hash == scenario_hash(st.plan.scenario)) return m;
  }
  const auto t0 = Clock::now();
  ReconstructionModel m = run_train(st.plan, dir).model;
  std::printf("  trained %s model in %.0f s, held-out residual rms %.3f\n", st.name.c_str(),
              seconds_since(t0), m.residual_rms);
  std::fflush(stdout);
  return m;
}

std::map<std::string, BenchResult> g_study_results;

const BenchResult& study_result(const Context& ctx, const Study& st) {
  auto it = g_study_results.find(st.name);
  if (it != g_study_results.end()) return it->second;
  const ReconstructionModel m = model_for(ctx, st);
  BenchResult r = run_bench(st.plan, ctx.out / "studies" / st.name, &m);
  return g_study_results.emplace(st.name, std::move(r)).first->second;
}

std::string rmse_line(const BenchResult& r, const std::vector<Method>& methods) {
  std::string s;
  for (Method m : methods)
    s += std::string(method_name(m)) + "=" + fmt("%.3f", r.find(m, 20.0).rmse_deg) + " ";
  if (!s.empty()) s.pop_back();
  return s;
}

// 6. Method ordering under default impairments.
Verdict criterion_ordering(const Context& ctx) {
  const Study st = studies()[0];
  const BenchResult& r = study_result(ctx, st);
  auto rm = [&](Method m) { return r.find(m, 20.0).rmse_deg; };
  const bool chain = rm(Method::kDnnDanm) < rm(Method::kOmpDenoise) &&
                     rm(Method::kOmpDenoise) < rm(Method::kOmp);
  const bool fft = rm(Method::kFftDenoise) < rm(Method::kFft);
  std::string detail = rmse_line(r, st.plan.methods);
  detail += std::string("; dnn-danm<omp-denoise<omp ") + (chain ? "holds" : "violated") +
            ", fft-denoise<fft " + (fft ? "holds" : "violated");
  return {chain && fft, detail};
}

// 7. Decoupled versus bordered solve time at 16 x 16.
Verdict criterion_complexity(const Context&) {
  Scenario sc = preset_plan(Preset::kPaper).scenario;
  sc.impairments = ImpairmentRanges::ideal();
  const CMatrix g = sc.schedule().codes.cast<cd>();
  SolverConfig cfg;
  cfg.mode = SolveMode::kNoiseBall;
  cfg.full_size_cap = 256;
  const int runs = 3;
  double dec = 0.0, full = 0.0;
  int dec_ok = 0, full_ok = 0;
  for (int t = 0; t < runs; ++t) {
    const std::uint64_t seed = split_seed(sc.seed, static_cast<std::uint64_t>(t));
    const SourceSet src = scenario_sources(sc, seed);
    const Snapshot snap = synthesize_ideal(sc.geometry, sc.schedule(), src, 20.0, seed);
    SolverConfig c = cfg;
    c.noise_radius = std::sqrt(sc.samples * snap.noise_power);
    auto t0 = Clock::now();
    try {
      dec_ok += solve_danm(snap.samples, g, sc.geometry, c).diagnostics.converged;
    } catch (const NonConvergenceError&) {
    }
    dec += seconds_since(t0);
    t0 = Clock::now();
    try {
      full_ok += solve_full_anm(snap.samples, g, sc.geometry, c).diagnostics.converged;
    } catch (const NonConvergenceError&) {
    }
    full += seconds_since(t0);
  }
  dec /= runs;
  full /= runs;
  const double ratio = full / dec;
  return {ratio >= 10.0,
          "mean seconds decoupled " + fmt("%.3f", dec) + " (" + std::to_string(dec_ok) + "/" +
              std::to_string(runs) + " converged), bordered " + fmt("%.3f", full) + " (" +
              std::to_string(full_ok) + "/" + std::to_string(runs) + " converged), ratio " +
              fmt("%.1f", ratio) + " (limit 10)"};
}

// 8. Bound monotone in SNR and Jacobian exact.
Verdict criterion_crb(const Context&) {
  const Scenario sc = preset_plan(Preset::kDesk).scenario;
  const CMatrix g = sc.schedule().codes.cast<cd>();
  bool decreasing = true;
  double worst_jac = 0.0;
  for (int t = 0; t < 10; ++t) {
    SourceSet src = scenario_sources(sc, split_seed(sc.seed, static_cast<std::uint64_t>(t)));
    const CVector mu = noiseless_ideal(sc.geometry, sc.schedule(), src);
    double prev = kInf;
    for (double snr = 0.0; snr <= 30.0; snr += 5.0) {
      const double b = crb_numeric(sc.geometry, g, src, noise_power_for_snr(mu, snr));
      decreasing = decreasing && b < prev;
      prev = b;
    }
    const CMatrix jac = mean_jacobian(sc.geometry, g, src);
    const double h = 1e-6;
    for (int k = 0; k < src.count(); ++k)
      for (int p = 0; p < 4; ++p) {
        SourceSet up = src, dn = src;
        auto bump = [&](SourceSet& s, double step) {
          if (p == 0) s.directions[k].elevation_deg += rad2deg(step);
          if (p == 1) s.directions[k].azimuth_deg += rad2deg(step);
          if (p == 2) s.amplitudes[k] += step;
          if (p == 3) s.amplitudes[k] += cd(0.0, step);
        };
        bump(up, h);
        bump(dn, -h);
        const CVector fd = (noiseless_ideal(sc.geometry, sc.schedule(), up) -
                            noiseless_ideal(sc.geometry, sc.schedule(), dn)) /
                           (2.0 * h);
        const CVector an = jac.col(4 * k + p);
        worst_jac = std::max(worst_jac, (fd - an).norm() / an.norm());
      }
  }
  return {decreasing && worst_jac < 1e-6,
          std::string("strictly decreasing over 0..30 dB: ") + (decreasing ? "yes" : "no") +
              ", max Jacobian rel err " + fmt("%.2e", worst_jac) + " (limit 1e-6)"};
}

// 9. Wider impairments degrade every estimator; dnn-danm stays best.
Verdict criterion_degradation(const Context& ctx) {
  const std::vector<Study> all = studies();
  const BenchResult& base = study_result(ctx, all[0]);
  bool ok = true;
  std::string detail;
  for (std::size_t i = 1; i < all.size(); ++i) {
    const BenchResult& r = study_result(ctx, all[i]);
    std::string bad;
    double best = kInf;
    Method best_m = Method::kFft;
    for (Method m : all[i].plan.methods) {
      const double v = r.find(m, 20.0).rmse_deg;
      if (!(v > base.find(m, 20.0).rmse_deg)) bad += " " + std::string(method_name(m));
      if (v < best) {
        best = v;
        best_m = m;
      }
    }
    const bool min_ok = best_m == Method::kDnnDanm;
    ok = ok && bad.empty() && min_ok;
    detail += all[i].name + ": " + rmse_line(r, all[i].plan.methods);
    detail += bad.empty() ? " [all increase" : " [not increased:" + bad;
    detail += min_ok ? ", dnn-danm minimum]" : ", minimum is " + std::string(method_name(best_m)) + "]";
    detail += "; ";
  }
  detail += "default: " + rmse_line(base, all[0].plan.methods);
  return {ok, detail};
}

// 10. Reruns with identical seeds give byte-identical result files.
Verdict criterion_determinism(const Context& ctx) {
  std::vector<std::pair<fs::path, fs::path>> pairs;
  run_bench(exact_recovery_plan(), ctx.out / "rerun" / "c1");
  pairs.emplace_back(ctx.out / "c1", ctx.out / "rerun" / "c1");

  const std::vector<Study> all = studies();
  study_result(ctx, all[0]);
  // Full rerun of the default study, training included.
  const ReconstructionModel fresh = run_train(all[0].plan, ctx.out / "rerun" / "models" / "default").model;
  run_bench(all[0].plan, ctx.out / "rerun" / "studies" / "default", &fresh);
  pairs.emplace_back(ctx.out / "studies" / "default", ctx.out / "rerun" / "studies" / "default");
  for (std::size_t i = 1; i < all.size(); ++i) {
    study_result(ctx, all[i]);
    const ReconstructionModel m = load_model(ctx.out / "models" / all[i].name / "model.bin");
    run_bench(all[i].plan, ctx.out / "rerun" / "studies" / all[i].name, &m);
    pairs.emplace_back(ctx.out / "studies" / all[i].name,
                       ctx.out / "rerun" / "studies" / all[i].name);
  }

  int files = 0;
  std::string diff;
  for (const auto& [a, b] : pairs)
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
      if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
      const fs::path rel = fs::relative(entry.path(), a);
      ++files;
      if (slurp(entry.path()) != slurp(b / rel)) diff += " " + (a.filename() / rel).string();
    }
  const bool model_same = slurp(ctx.out / "models" / "default" / "model.bin") ==
                          slurp(ctx.out / "rerun" / "models" / "default" / "model.bin");
  return {diff.empty() && model_same && files > 0,
          std::to_string(files) + " CSV files compared, " +
              (diff.empty() ? std::string("all identical") : "differ:" + diff) +
              (model_same ? ", retrained model identical" : ", retrained model differs")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"risdoa acceptance criteria"};
  Context ctx;
  std::string out = "acceptance_out";
  std::vector<int> only;
  app.add_option("--out", out, "work directory");
  app.add_option("--only", only, "criteria to run")->delimiter(',')->check(CLI::Range(1, 10));
  app.add_flag("--reuse-models", ctx.reuse_models, "load trained study models when present");
  CLI11_PARSE(app, argc, argv);
  ctx.out = out;
  fs::create_directories(ctx.out);

  using Fn = Verdict (*)(const Context&);
  const std::vector<std::pair<int, Fn>> criteria = {
      {1, criterion_exact},      {2, criterion_equivalence}, {3, criterion_vandermonde},
      {4, criterion_gradients},  {5, criterion_training},    {6, criterion_ordering},
      {7, criterion_complexity}, {8, criterion_crb},         {9, criterion_degradation},
      {10, criterion_determinism}};
  const std::set<int> wanted(only.begin(), only.end());

  int failed = 0;
  for (const auto& [id, fn] : criteria) {
    if (!wanted.empty() && !wanted.count(id)) continue;
    Verdict v;
    const auto t0 = Clock::now();
    try {
      v = fn(ctx);
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("criterion %d: %s  %s  [%.1f s]\n", id, v.pass ? "PASS" : "FAIL", v.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
