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

#include "risdoa/common.hpp"
#include "risdoa/ris_model.hpp"

#include <string>
#include <vector>

namespace risdoa {

struct AngleGrid {
  std::vector<double> elevations;  // degrees
  std::vector<double> azimuths;    // degrees
  double elevation_step = 1.0;
  double azimuth_step = 1.0;

  static AngleGrid uniform(Range elevation, Range azimuth, double step);
  int size() const { return static_cast<int>(elevations.size() * azimuths.size()); }
  // Flat index e * azimuths + a.
  Direction at(int flat) const;
};

// Columns G a(theta, phi) for every grid point, with their norms.
struct GridDictionary {
  AngleGrid grid;
  CMatrix atoms;
  RVector norms;
};

GridDictionary build_dictionary(const CMatrix& g, const RisGeometry& geom, const AngleGrid& grid);

// score(theta, phi) = |(G a)^H z|^2 / ||G a||^2, rows = elevations, cols = azimuths.
RMatrix grid_spectrum(const CVector& z, const GridDictionary& dict);
RMatrix grid_spectrum(const CVector& z, const CMatrix& g, const RisGeometry& geom,
                      const AngleGrid& grid);

// The K largest local maxima at least min_separation_deg apart, refined by a
// three-point parabola along each axis when `refine` is set. Maxima below
// min_relative_height times the global maximum are ignored; missing peaks repeat
// the strongest one.
std::vector<Direction> spectrum_peaks(const RMatrix& spectrum, const AngleGrid& grid, int count,
                                      double min_separation_deg = 3.0, bool refine = true,
                                      double min_relative_height = 0.0);

std::vector<Direction> fft_estimate(const CVector& z, const GridDictionary& dict, int count,
                                    double min_relative_height = 0.0);

// Greedy OMP over the grid dictionary with least-squares refit; returns grid points
// in selection order.
std::vector<Direction> omp_estimate(const CVector& z, const GridDictionary& dict, int count);
std::vector<Direction> omp_estimate(const CVector& z, const CMatrix& g, const RisGeometry& geom,
                                    const AngleGrid& grid, int count);

// d mu / d p for p = (theta_k, phi_k, Re s_k, Im s_k) per source, angles in radians;
// mu = G A s.
CMatrix mean_jacobian(const RisGeometry& geom, const CMatrix& g, const SourceSet& sources);

// Gaussian-model Fisher bound, aggregated like the RMSE: sqrt(mean of the
// elevation and azimuth variance bounds), in degrees. noise_power is the
// per-sample complex noise variance.
double crb_numeric(const RisGeometry& geom, const CMatrix& g, const SourceSet& sources,
                   double noise_power);

// Permutation of `estimate` minimizing summed squared angle error against `truth`.
std::vector<int> match_estimates(const std::vector<Direction>& truth,
                                 const std::vector<Direction>& estimate);

// Sum over sources of squared elevation + azimuth error after matching.
double matched_squared_error(const std::vector<Direction>& truth,
                             const std::vector<Direction>& estimate);

// sqrt( sum_trials sum_k (dtheta^2 + dphi^2) / (2 N_mc K) ), degrees.
double rmse(const std::vector<std::vector<Direction>>& truth,
            const std::vector<std::vector<Direction>>& estimates);

}  // namespace risdoa
