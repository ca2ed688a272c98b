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

// Python bindings. Matrices and vectors cross as NumPy arrays.

#include "risdoa/anm.hpp"
#include "risdoa/baselines.hpp"
#include "risdoa/doa.hpp"
#include "risdoa/harness.hpp"
#include "risdoa/neural.hpp"
#include "risdoa/ris_model.hpp"
#include "risdoa/scenario.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace risdoa;

namespace {

std::vector<Direction> to_directions(const std::vector<std::pair<double, double>>& pairs) {
  std::vector<Direction> d;
  for (const auto& [el, az] : pairs) d.push_back({el, az});
  return d;
}

SourceSet make_sources(const std::vector<std::pair<double, double>>& directions,
                       std::vector<cd> amplitudes) {
  SourceSet s;
  s.directions = to_directions(directions);
  if (amplitudes.empty()) amplitudes.assign(s.directions.size(), cd(1.0, 0.0));
  s.amplitudes = std::move(amplitudes);
  s.validate();
  return s;
}

py::list directions_list(const std::vector<Direction>& dirs) {
  py::list out;
  for (const auto& d : dirs) out.append(py::make_tuple(d.elevation_deg, d.azimuth_deg));
  return out;
}

py::dict summary_dict(const BenchResult& r) {
  py::dict d;
  d["scenario_hash"] = r.scenario_hash;
  d["model_hash"] = r.model_hash;
  py::list rows;
  for (const auto& s : r.summary) {
    py::dict row;
    row["method"] = std::string(method_name(s.method));
    row["snr_db"] = s.snr_db;
    row["rmse_deg"] = s.rmse_deg;
    row["mean_seconds"] = s.mean_seconds;
    row["trials"] = s.trials;
    row["failures"] = s.failures;
    rows.append(row);
  }
  d["summary"] = rows;
  return d;
}

}  // namespace

PYBIND11_MODULE(_risdoa, m) {
  m.doc() = "Gridless 2D direction finding with an impaired 1-bit RIS";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  py::class_<RisGeometry>(m, "RisGeometry")
      .def(py::init<int, int, double, double>(), py::arg("rows"), py::arg("cols"),
           py::arg("row_spacing") = 0.4, py::arg("col_spacing") = 0.4)
      .def_property_readonly("rows", &RisGeometry::rows)
      .def_property_readonly("cols", &RisGeometry::cols)
      .def_property_readonly("elements", &RisGeometry::elements)
      .def_property_readonly("row_spacing", &RisGeometry::row_spacing)
      .def_property_readonly("col_spacing", &RisGeometry::col_spacing);

  py::class_<CodeSchedule>(m, "CodeSchedule")
      .def_property_readonly("bits", [](const CodeSchedule& s) {
        return Eigen::MatrixXi(s.bits.cast<int>());
      })
      .def_readonly("codes", &CodeSchedule::codes)
      .def_property_readonly("samples", &CodeSchedule::samples);

  py::class_<ImpairmentRanges>(m, "ImpairmentRanges")
      .def(py::init<>())
      .def_static("ideal", &ImpairmentRanges::ideal)
      .def_property(
          "coupling_amplitude",
          [](const ImpairmentRanges& r) { return std::pair{r.coupling_amplitude.lo, r.coupling_amplitude.hi}; },
          [](ImpairmentRanges& r, std::pair<double, double> v) { r.coupling_amplitude = {v.first, v.second}; })
      .def_property(
          "mismatch_amplitude",
          [](const ImpairmentRanges& r) { return std::pair{r.mismatch_amplitude.lo, r.mismatch_amplitude.hi}; },
          [](ImpairmentRanges& r, std::pair<double, double> v) { r.mismatch_amplitude = {v.first, v.second}; })
      .def_property(
          "mismatch_phase",
          [](const ImpairmentRanges& r) { return std::pair{r.mismatch_phase.lo, r.mismatch_phase.hi}; },
          [](ImpairmentRanges& r, std::pair<double, double> v) { r.mismatch_phase = {v.first, v.second}; })
      .def_readwrite("coupling_neighbors", &ImpairmentRanges::coupling_neighbors);

  py::class_<ImpairmentModel>(m, "ImpairmentModel")
      .def_readonly("mismatch", &ImpairmentModel::mismatch)
      .def_property_readonly("coupling", [](const ImpairmentModel& i) { return CMatrix(i.coupling); })
      .def("effective_codes", &ImpairmentModel::effective_codes);

  py::class_<Snapshot>(m, "Snapshot")
      .def_readonly("samples", &Snapshot::samples)
      .def_readonly("noise_power", &Snapshot::noise_power)
      .def_readonly("seed", &Snapshot::seed);

  m.def("steering_vector",
        [](const RisGeometry& g, double el, double az) { return steering_vector(g, {el, az}); },
        py::arg("geometry"), py::arg("elevation_deg"), py::arg("azimuth_deg"));
  m.def("spatial_frequencies",
        [](double el, double az) { return spatial_frequencies({el, az}); },
        py::arg("elevation_deg"), py::arg("azimuth_deg"));
  m.def("build_code_schedule", &build_code_schedule, py::arg("samples"), py::arg("elements"),
        py::arg("seed"));
  m.def("sample_impairments", &sample_impairments, py::arg("geometry"), py::arg("ranges"),
        py::arg("seed"));
  m.def(
      "synthesize_ideal",
      [](const RisGeometry& g, const CodeSchedule& s, const std::vector<std::pair<double, double>>& d,
         std::vector<cd> a, double snr_db, std::uint64_t seed) {
        return synthesize_ideal(g, s, make_sources(d, std::move(a)), snr_db, seed);
      },
      py::arg("geometry"), py::arg("schedule"), py::arg("directions"),
      py::arg("amplitudes") = std::vector<cd>{}, py::arg("snr_db") = 20.0, py::arg("seed") = 0);
  m.def(
      "synthesize_impaired",
      [](const RisGeometry& g, const CodeSchedule& s, const ImpairmentModel& imp,
         const std::vector<std::pair<double, double>>& d, std::vector<cd> a, double snr_db,
         std::uint64_t seed) {
        return synthesize_impaired(g, s, imp, make_sources(d, std::move(a)), snr_db, seed);
      },
      py::arg("geometry"), py::arg("schedule"), py::arg("impairments"), py::arg("directions"),
      py::arg("amplitudes") = std::vector<cd>{}, py::arg("snr_db") = 20.0, py::arg("seed") = 0);

  py::enum_<SolveMode>(m, "SolveMode")
      .value("REGULARIZED", SolveMode::kRegularized)
      .value("NOISE_BALL", SolveMode::kNoiseBall)
      .value("FIXED_TARGET", SolveMode::kFixedTarget);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("rho", &SolverConfig::rho)
      .def_readwrite("relaxation", &SolverConfig::relaxation)
      .def_readwrite("alpha", &SolverConfig::alpha)
      .def_readwrite("noise_radius", &SolverConfig::noise_radius)
      .def_readwrite("max_iterations", &SolverConfig::max_iterations)
      .def_readwrite("primal_tol", &SolverConfig::primal_tol)
      .def_readwrite("dual_tol", &SolverConfig::dual_tol)
      .def_readwrite("mode", &SolverConfig::mode)
      .def_readwrite("adapt_rho", &SolverConfig::adapt_rho)
      .def_readwrite("full_size_cap", &SolverConfig::full_size_cap);

  py::class_<SolverDiagnostics>(m, "SolverDiagnostics")
      .def_readonly("iterations", &SolverDiagnostics::iterations)
      .def_readonly("converged", &SolverDiagnostics::converged)
      .def_readonly("primal_residual", &SolverDiagnostics::primal_residual)
      .def_readonly("dual_residual", &SolverDiagnostics::dual_residual)
      .def_readonly("min_eigenvalue", &SolverDiagnostics::min_eigenvalue)
      .def_readonly("data_residual", &SolverDiagnostics::data_residual)
      .def_readonly("seconds", &SolverDiagnostics::seconds);

  py::class_<DecoupledSdpVars>(m, "DecoupledSdpVars")
      .def_readonly("tx", &DecoupledSdpVars::tx)
      .def_readonly("ty", &DecoupledSdpVars::ty)
      .def_readonly("x", &DecoupledSdpVars::x)
      .def_readonly("diagnostics", &DecoupledSdpVars::diagnostics)
      .def("objective", &DecoupledSdpVars::objective)
      .def("normalized_objective", &DecoupledSdpVars::normalized_objective);

  py::class_<FullSdpVars>(m, "FullSdpVars")
      .def_readonly("t_matrix", &FullSdpVars::t_matrix)
      .def_readonly("t", &FullSdpVars::t)
      .def_readonly("x", &FullSdpVars::x)
      .def_readonly("diagnostics", &FullSdpVars::diagnostics)
      .def("objective", &FullSdpVars::objective)
      .def("normalized_objective", &FullSdpVars::normalized_objective);

  m.def("solve_danm", &solve_danm, py::arg("z"), py::arg("g"), py::arg("geometry"),
        py::arg("config") = SolverConfig{}, py::call_guard<py::gil_scoped_release>());
  m.def("solve_full_anm", &solve_full_anm, py::arg("z"), py::arg("g"), py::arg("geometry"),
        py::arg("config") = SolverConfig{}, py::call_guard<py::gil_scoped_release>());
  m.def("atomic_norm", &atomic_norm, py::arg("x"), py::arg("geometry"),
        py::arg("config") = SolverConfig{});

  py::class_<DoaEstimate>(m, "DoaEstimate")
      .def_property_readonly("directions",
                             [](const DoaEstimate& e) { return directions_list(e.directions); })
      .def_readonly("row_freqs", &DoaEstimate::row_freqs)
      .def_readonly("col_freqs", &DoaEstimate::col_freqs)
      .def_readonly("residuals", &DoaEstimate::residuals)
      .def_readonly("fit_residual", &DoaEstimate::fit_residual);

  m.def(
      "estimate_doa",
      [](const DecoupledSdpVars& v, const RisGeometry& g, int count) {
        return estimate_doa(v, g, count);
      },
      py::arg("vars"), py::arg("geometry"), py::arg("count"));
  m.def("toeplitz_to_freqs", &toeplitz_to_freqs, py::arg("t"), py::arg("count"),
        py::arg("spacing"));
  m.def(
      "freqs_to_angles",
      [](double fr, double fc) {
        const Direction d = freqs_to_angles(fr, fc);
        return std::pair{d.elevation_deg, d.azimuth_deg};
      },
      py::arg("row_freq"), py::arg("col_freq"));

  auto grid_for = [](double step) {
    const ExperimentPlan p = preset_plan(Preset::kDesk);
    return AngleGrid::uniform(p.scenario.source_policy.elevation_deg,
                              p.scenario.source_policy.azimuth_deg, step);
  };
  m.def(
      "fft_estimate",
      [grid_for](const CVector& z, const CMatrix& g, const RisGeometry& geom, int count,
                 double step, double floor) {
        return directions_list(fft_estimate(z, build_dictionary(g, geom, grid_for(step)), count, floor));
      },
      py::arg("z"), py::arg("g"), py::arg("geometry"), py::arg("count"),
      py::arg("grid_step_deg") = 1.0, py::arg("peak_floor") = 0.2);
  m.def(
      "omp_estimate",
      [grid_for](const CVector& z, const CMatrix& g, const RisGeometry& geom, int count,
                 double step) {
        return directions_list(omp_estimate(z, g, geom, grid_for(step), count));
      },
      py::arg("z"), py::arg("g"), py::arg("geometry"), py::arg("count"),
      py::arg("grid_step_deg") = 1.0);
  m.def(
      "crb_numeric",
      [](const RisGeometry& geom, const CMatrix& g, const std::vector<std::pair<double, double>>& d,
         std::vector<cd> a, double noise_power) {
        return crb_numeric(geom, g, make_sources(d, std::move(a)), noise_power);
      },
      py::arg("geometry"), py::arg("g"), py::arg("directions"),
      py::arg("amplitudes") = std::vector<cd>{}, py::arg("noise_power") = 1.0);
  m.def(
      "rmse",
      [](const std::vector<std::vector<std::pair<double, double>>>& truth,
         const std::vector<std::vector<std::pair<double, double>>>& est) {
        std::vector<std::vector<Direction>> t, e;
        for (const auto& x : truth) t.push_back(to_directions(x));
        for (const auto& x : est) e.push_back(to_directions(x));
        return rmse(t, e);
      },
      py::arg("truth"), py::arg("estimates"));

  py::class_<ReconstructionModel>(m, "ReconstructionModel")
      .def_readonly("scale", &ReconstructionModel::scale)
      .def_readonly("epochs_trained", &ReconstructionModel::epochs_trained)
      .def_readonly("residual_rms", &ReconstructionModel::residual_rms)
      .def_readonly("scenario_hash", &ReconstructionModel::scenario_hash)
      .def("reconstruct",
           [](const ReconstructionModel& m, const CVector& z) { return reconstruct(m, z); });
  m.def("load_model", &load_model, py::arg("path"));
  m.def("save_model", &save_model, py::arg("model"), py::arg("path"));

  py::class_<ExperimentPlan>(m, "ExperimentPlan")
      .def_readwrite("snr_db", &ExperimentPlan::snr_db)
      .def_readwrite("trials", &ExperimentPlan::trials)
      .def_readwrite("workers", &ExperimentPlan::workers)
      .def_readwrite("record_seconds", &ExperimentPlan::record_seconds)
      .def_readwrite("model_path", &ExperimentPlan::model_path)
      .def_property(
          "methods",
          [](const ExperimentPlan& p) {
            std::vector<std::string> out;
            for (Method x : p.methods) out.emplace_back(method_name(x));
            return out;
          },
          [](ExperimentPlan& p, const std::vector<std::string>& names) {
            p.methods.clear();
            for (const auto& n : names) p.methods.push_back(parse_method(n));
          })
      .def_property(
          "seed", [](const ExperimentPlan& p) { return p.scenario.seed; },
          [](ExperimentPlan& p, std::uint64_t s) { p.scenario.seed = s; })
      .def_property(
          "epochs", [](const ExperimentPlan& p) { return p.training.epochs; },
          [](ExperimentPlan& p, int e) { p.training.epochs = e; })
      .def_property(
          "dataset_size", [](const ExperimentPlan& p) { return p.training.dataset_size; },
          [](ExperimentPlan& p, int n) { p.training.dataset_size = n; })
      .def_property_readonly("geometry", [](const ExperimentPlan& p) { return p.scenario.geometry; })
      .def_property_readonly("samples", [](const ExperimentPlan& p) { return p.scenario.samples; })
      .def_property_readonly("scenario_hash",
                             [](const ExperimentPlan& p) { return scenario_hash(p.scenario); })
      .def("validate", &ExperimentPlan::validate);

  m.def("preset_plan", [](const std::string& name) { return preset_plan(parse_preset(name)); },
        py::arg("preset") = "desk");
  m.def(
      "load_plan",
      [](const std::filesystem::path& p, const std::string& preset) {
        return load_plan(p, parse_preset(preset));
      },
      py::arg("path"), py::arg("preset") = "desk");
  m.def(
      "parse_plan",
      [](const std::string& text, bool json, const std::string& preset) {
        return parse_plan(text, json, parse_preset(preset));
      },
      py::arg("text"), py::arg("json") = false, py::arg("preset") = "desk");

  m.def(
      "run_simulate",
      [](const ExperimentPlan& p, const std::filesystem::path& out) {
        const SimulateOutput s = run_simulate(p.scenario, out);
        py::dict d;
        d["samples"] = s.snapshot.samples;
        d["noise_power"] = s.snapshot.noise_power;
        d["seed"] = s.snapshot.seed;
        d["scenario_hash"] = s.scenario_hash;
        d["directions"] = directions_list(s.sources.directions);
        return d;
      },
      py::arg("plan"), py::arg("out_dir") = std::filesystem::path{});
  m.def(
      "run_train",
      [](const ExperimentPlan& p, const std::filesystem::path& out) {
        TrainResult r;
        {
          py::gil_scoped_release release;
          r = run_train(p, out);
        }
        return py::make_tuple(r.model, r.loss_history);
      },
      py::arg("plan"), py::arg("out_dir") = std::filesystem::path{});
  m.def(
      "run_bench",
      [](const ExperimentPlan& p, const std::filesystem::path& out,
         const ReconstructionModel* model) {
        BenchResult r;
        {
          py::gil_scoped_release release;
          r = run_bench(p, out, model);
        }
        return summary_dict(r);
      },
      py::arg("plan"), py::arg("out_dir") = std::filesystem::path{},
      py::arg("model") = nullptr);
  m.def(
      "run_compare",
      [](const std::filesystem::path& csv, const std::filesystem::path& out) {
        py::list rows;
        for (const auto& e : run_compare(csv, out)) {
          py::dict d;
          d["snr_db"] = e.snr_db;
          d["rank"] = e.rank;
          d["method"] = e.method;
          d["rmse_deg"] = e.rmse_deg;
          d["crb_deg"] = e.crb_deg;
          d["trials"] = e.trials;
          d["failures"] = e.failures;
          rows.append(d);
        }
        return rows;
      },
      py::arg("results_csv"), py::arg("out_dir") = std::filesystem::path{});
}
