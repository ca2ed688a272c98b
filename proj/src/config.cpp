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
#include "risdoa/io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#define BOOST_BIND_GLOBAL_PLACEHOLDERS
#include <boost/property_tree/json_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace risdoa {

namespace pt = boost::property_tree;

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kFft: return "fft";
    case Method::kOmp: return "omp";
    case Method::kFftDenoise: return "fft-denoise";
    case Method::kOmpDenoise: return "omp-denoise";
    case Method::kAnmDenoise: return "anm-denoise";
    case Method::kDnnDanm: return "dnn-danm";
    case Method::kDanm: return "danm";
    case Method::kCrb: return "crb";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::kFft, Method::kOmp, Method::kFftDenoise, Method::kOmpDenoise,
                   Method::kAnmDenoise, Method::kDnnDanm, Method::kDanm, Method::kCrb})
    if (method_name(m) == name) return m;
  throw DomainError("unknown method '" + std::string(name) + "'");
}

std::vector<Method> standard_methods() {
  return {Method::kFft,        Method::kOmp,     Method::kFftDenoise, Method::kOmpDenoise,
          Method::kAnmDenoise, Method::kDnnDanm, Method::kCrb};
}

bool uses_model(Method m) {
  return m == Method::kFftDenoise || m == Method::kOmpDenoise || m == Method::kAnmDenoise ||
         m == Method::kDnnDanm;
}

Preset parse_preset(std::string_view name) {
  if (name == "desk") return Preset::kDesk;
  if (name == "paper") return Preset::kPaper;
  throw DomainError("unknown preset '" + std::string(name) + "' (expected desk or paper)");
}

void ExperimentPlan::validate() const {
  scenario.validate();
  training.validate();
  solver.validate();
  if (snr_db.empty()) throw DomainError("plan: SNR sweep is empty");
  if (methods.empty()) throw DomainError("plan: method list is empty");
  if (trials < 1) throw DomainError("plan: trials must be at least 1");
  if (!(grid_step_deg > 0.0)) throw DomainError("plan: grid step must be positive");
  if (!(noise_scale > 0.0)) throw DomainError("plan: noise_scale must be positive");
  if (!(peak_floor >= 0.0 && peak_floor < 1.0))
    throw DomainError("plan: peak_floor must lie in [0, 1)");
  if (!(order_threshold >= 0.0 && order_threshold < 1.0))
    throw DomainError("plan: order_threshold must lie in [0, 1)");
  if (workers < 1) throw DomainError("plan: workers must be at least 1");
}

ExperimentPlan preset_plan(Preset preset) {
  ExperimentPlan plan;
  plan.solver.mode = SolveMode::kNoiseBall;
  if (preset == Preset::kDesk) {
    plan.scenario.geometry = RisGeometry(8, 8, 0.4, 0.4);
    plan.scenario.samples = 64;
    plan.trials = 100;
    plan.snr_db = {0.0, 10.0, 20.0, 30.0};
  } else {
    plan.scenario.geometry = RisGeometry(16, 16, 0.4, 0.4);
    plan.scenario.samples = 128;
    plan.trials = 1000;
    plan.snr_db = {0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
    plan.solver.full_size_cap = 256;
  }
  return plan;
}

namespace {

std::string trim(std::string s) {
  const auto ws = " \t\r\n\"";
  s.erase(0, s.find_first_not_of(ws));
  s.erase(s.find_last_not_of(ws) + 1);
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(s);
  while (std::getline(is, cell, sep)) {
    cell = trim(cell);
    if (!cell.empty()) out.push_back(cell);
  }
  return out;
}

// Scalar value, or a JSON array flattened to "a,b,c".
std::optional<std::string> get(const pt::ptree& tree, const std::string& key) {
  const auto node = tree.get_child_optional(pt::ptree::path_type(key, '.'));
  if (!node) return std::nullopt;
  if (node->empty()) return trim(node->data());
  std::string joined;
  for (const auto& [k, child] : *node) {
    if (!k.empty()) throw DomainError("config key '" + key + "' must be a value or a list");
    joined += (joined.empty() ? "" : ",") + trim(child.data());
  }
  return joined;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    return parse_number(v);
  } catch (const std::exception&) {
    throw DomainError("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != std::floor(d) || std::abs(d) > 9.0e15)
    throw DomainError("config key '" + key + "': expected an integer, got '" + v + "'");
  return static_cast<long long>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw DomainError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& cell : split(v, ',')) out.push_back(to_double(key, cell));
  return out;
}

Range to_range(const std::string& key, const std::string& v, double unit = 1.0) {
  const auto vals = to_list(key, v);
  if (vals.size() != 2) throw DomainError("config key '" + key + "': expected 'lo,hi'");
  if (vals[0] > vals[1]) throw DomainError("config key '" + key + "': lo exceeds hi");
  return {vals[0] * unit, vals[1] * unit};
}

std::vector<std::pair<double, double>> to_pairs(const std::string& key, const std::string& v) {
  std::vector<std::pair<double, double>> out;
  for (const auto& cell : split(v, ',')) {
    const auto parts = split(cell, ':');
    if (parts.size() != 2) throw DomainError("config key '" + key + "': expected 'a:b' entries");
    out.emplace_back(to_double(key, parts[0]), to_double(key, parts[1]));
  }
  return out;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "geometry.rows", "geometry.cols", "geometry.spacing", "geometry.row_spacing",
      "geometry.col_spacing", "signal.samples", "signal.code_seed", "signal.snr_db",
      "signal.seed", "sources.count", "sources.elevation_deg", "sources.azimuth_deg",
      "sources.min_separation_deg", "sources.fixed", "sources.fixed_phase_deg",
      "sources.fixed_amplitude", "impairments.ideal", "impairments.coupling_amplitude",
      "impairments.mismatch_amplitude", "impairments.mismatch_phase_deg",
      "impairments.neighbors", "train.learning_rate", "train.batch_size", "train.epochs",
      "train.snr_db", "train.dataset_size", "train.hidden_width", "train.seed", "solver.mode",
      "solver.rho", "solver.alpha", "solver.relaxation", "solver.max_iterations",
      "solver.primal_tol", "solver.dual_tol", "solver.adapt_rho", "solver.full_size_cap",
      "bench.snr_db", "bench.methods", "bench.trials", "bench.grid_step_deg",
      "bench.noise_scale", "bench.peak_floor", "bench.order_threshold", "bench.select_order_by_fit", "bench.model", "bench.workers", "bench.record_seconds",
      "bench.record_trace"};
  return keys;
}

void reject_unknown(const pt::ptree& tree) {
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw DomainError("config key '" + section + "' outside a section");
    for (const auto& [key, value] : body) {
      (void)value;
      const std::string full = section + "." + key;
      const auto& known = known_keys();
      if (std::find(known.begin(), known.end(), full) == known.end())
        throw DomainError("unknown config key '" + full + "'");
    }
  }
}

ExperimentPlan from_tree(const pt::ptree& tree, Preset preset) {
  reject_unknown(tree);
  ExperimentPlan plan = preset_plan(preset);
  Scenario& sc = plan.scenario;

  {
    const auto& g = sc.geometry;
    int rows = g.rows();
    int cols = g.cols();
    double dr = g.row_spacing();
    double dc = g.col_spacing();
    if (auto v = get(tree, "geometry.rows")) rows = static_cast<int>(to_int("geometry.rows", *v));
    if (auto v = get(tree, "geometry.cols")) cols = static_cast<int>(to_int("geometry.cols", *v));
    if (auto v = get(tree, "geometry.spacing")) dr = dc = to_double("geometry.spacing", *v);
    if (auto v = get(tree, "geometry.row_spacing")) dr = to_double("geometry.row_spacing", *v);
    if (auto v = get(tree, "geometry.col_spacing")) dc = to_double("geometry.col_spacing", *v);
    sc.geometry = RisGeometry(rows, cols, dr, dc);
  }
  if (auto v = get(tree, "signal.samples"))
    sc.samples = static_cast<int>(to_int("signal.samples", *v));
  if (auto v = get(tree, "signal.code_seed"))
    sc.code_seed = static_cast<std::uint64_t>(to_int("signal.code_seed", *v));
  if (auto v = get(tree, "signal.snr_db")) sc.snr_db = to_double("signal.snr_db", *v);
  if (auto v = get(tree, "signal.seed"))
    sc.seed = static_cast<std::uint64_t>(to_int("signal.seed", *v));

  auto& pol = sc.source_policy;
  if (auto v = get(tree, "sources.count")) pol.count = static_cast<int>(to_int("sources.count", *v));
  if (auto v = get(tree, "sources.elevation_deg")) pol.elevation_deg = to_range("sources.elevation_deg", *v);
  if (auto v = get(tree, "sources.azimuth_deg")) pol.azimuth_deg = to_range("sources.azimuth_deg", *v);
  if (auto v = get(tree, "sources.min_separation_deg"))
    pol.min_separation_deg = to_double("sources.min_separation_deg", *v);
  if (auto v = get(tree, "sources.fixed")) {
    SourceSet set;
    for (const auto& [el, az] : to_pairs("sources.fixed", *v)) set.directions.push_back({el, az});
    std::vector<double> phases(set.directions.size(), 0.0);
    std::vector<double> amps(set.directions.size(), 1.0);
    if (auto p = get(tree, "sources.fixed_phase_deg")) phases = to_list("sources.fixed_phase_deg", *p);
    if (auto a = get(tree, "sources.fixed_amplitude")) amps = to_list("sources.fixed_amplitude", *a);
    if (phases.size() != set.directions.size() || amps.size() != set.directions.size())
      throw DomainError("sources.fixed_phase_deg / fixed_amplitude must match sources.fixed");
    for (std::size_t k = 0; k < phases.size(); ++k)
      set.amplitudes.push_back(std::polar(amps[k], deg2rad(phases[k])));
    pol.count = set.count();
    sc.fixed_sources = set;
  }

  auto& im = sc.impairments;
  if (auto v = get(tree, "impairments.ideal"); v && to_bool("impairments.ideal", *v))
    im = ImpairmentRanges::ideal();
  if (auto v = get(tree, "impairments.coupling_amplitude"))
    im.coupling_amplitude = to_range("impairments.coupling_amplitude", *v);
  if (auto v = get(tree, "impairments.mismatch_amplitude"))
    im.mismatch_amplitude = to_range("impairments.mismatch_amplitude", *v);
  if (auto v = get(tree, "impairments.mismatch_phase_deg"))
    im.mismatch_phase = to_range("impairments.mismatch_phase_deg", *v, kPi / 180.0);
  if (auto v = get(tree, "impairments.neighbors")) {
    im.coupling_neighbors.clear();
    for (const auto& [dm, dn] : to_pairs("impairments.neighbors", *v))
      im.coupling_neighbors.emplace_back(static_cast<int>(dm), static_cast<int>(dn));
  }

  auto& tr = plan.training;
  if (auto v = get(tree, "train.learning_rate")) tr.learning_rate = to_double("train.learning_rate", *v);
  if (auto v = get(tree, "train.batch_size")) tr.batch_size = static_cast<int>(to_int("train.batch_size", *v));
  if (auto v = get(tree, "train.epochs")) tr.epochs = static_cast<int>(to_int("train.epochs", *v));
  if (auto v = get(tree, "train.snr_db")) tr.snr_db = to_range("train.snr_db", *v);
  if (auto v = get(tree, "train.dataset_size"))
    tr.dataset_size = static_cast<int>(to_int("train.dataset_size", *v));
  if (auto v = get(tree, "train.hidden_width"))
    tr.hidden_width = static_cast<int>(to_int("train.hidden_width", *v));
  if (auto v = get(tree, "train.seed")) tr.seed = static_cast<std::uint64_t>(to_int("train.seed", *v));

  auto& so = plan.solver;
  if (auto v = get(tree, "solver.mode")) {
    if (*v == "regularized") so.mode = SolveMode::kRegularized;
    else if (*v == "noise-ball") so.mode = SolveMode::kNoiseBall;
    else throw DomainError("solver.mode must be 'regularized' or 'noise-ball'");
  }
  if (auto v = get(tree, "solver.rho")) so.rho = to_double("solver.rho", *v);
  if (auto v = get(tree, "solver.alpha")) so.alpha = to_double("solver.alpha", *v);
  if (auto v = get(tree, "solver.relaxation")) so.relaxation = to_double("solver.relaxation", *v);
  if (auto v = get(tree, "solver.max_iterations"))
    so.max_iterations = static_cast<int>(to_int("solver.max_iterations", *v));
  if (auto v = get(tree, "solver.primal_tol")) so.primal_tol = to_double("solver.primal_tol", *v);
  if (auto v = get(tree, "solver.dual_tol")) so.dual_tol = to_double("solver.dual_tol", *v);
  if (auto v = get(tree, "solver.adapt_rho")) so.adapt_rho = to_bool("solver.adapt_rho", *v);
  if (auto v = get(tree, "solver.full_size_cap"))
    so.full_size_cap = static_cast<int>(to_int("solver.full_size_cap", *v));

  if (auto v = get(tree, "bench.snr_db")) plan.snr_db = to_list("bench.snr_db", *v);
  if (auto v = get(tree, "bench.methods")) {
    plan.methods.clear();
    for (const auto& name : split(*v, ',')) plan.methods.push_back(parse_method(name));
  }
  if (auto v = get(tree, "bench.trials")) plan.trials = static_cast<int>(to_int("bench.trials", *v));
  if (auto v = get(tree, "bench.grid_step_deg")) plan.grid_step_deg = to_double("bench.grid_step_deg", *v);
  if (auto v = get(tree, "bench.noise_scale")) plan.noise_scale = to_double("bench.noise_scale", *v);
  if (auto v = get(tree, "bench.peak_floor")) plan.peak_floor = to_double("bench.peak_floor", *v);
  if (auto v = get(tree, "bench.order_threshold"))
    plan.order_threshold = to_double("bench.order_threshold", *v);
  if (auto v = get(tree, "bench.select_order_by_fit"))
    plan.select_order_by_fit = to_bool("bench.select_order_by_fit", *v);
  if (auto v = get(tree, "bench.model")) plan.model_path = *v;
  if (auto v = get(tree, "bench.workers")) plan.workers = static_cast<int>(to_int("bench.workers", *v));
  if (auto v = get(tree, "bench.record_seconds")) plan.record_seconds = to_bool("bench.record_seconds", *v);
  if (auto v = get(tree, "bench.record_trace")) plan.record_trace = to_bool("bench.record_trace", *v);

  plan.validate();
  return plan;
}

}  // namespace

ExperimentPlan parse_plan(std::string_view text, bool json, Preset preset) {
  pt::ptree tree;
  std::istringstream is{std::string(text)};
  try {
    if (json) pt::read_json(is, tree);
    else pt::read_ini(is, tree);
  } catch (const pt::ptree_error& e) {
    throw DomainError(std::string("config parse error: ") + e.what());
  }
  return from_tree(tree, preset);
}

ExperimentPlan load_plan(const std::filesystem::path& path, Preset preset) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  ExperimentPlan plan = parse_plan(ss.str(), path.extension() == ".json", preset);
  if (!plan.model_path.empty() && plan.model_path.is_relative())
    plan.model_path = path.parent_path() / plan.model_path;
  return plan;
}

}  // namespace risdoa
