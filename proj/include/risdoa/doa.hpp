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
#include "risdoa/common.hpp"
#include "risdoa/ris_model.hpp"

#include <utility>
#include <vector>

namespace risdoa {

// Linear-prediction rooting of a Hermitian Toeplitz matrix whose first column is
// u_l = sum_q c_q exp(-j 2 pi l spacing f_q). Returns `count` frequencies, ascending,
// clamped to [-1, 1].
std::vector<double> toeplitz_to_freqs(const CMatrix& t, int count, double spacing);

// Roots of the monic polynomial v^K + b_1 v^(K-1) + ... + b_K (companion eigenvalues).
std::vector<cd> polynomial_roots(const CVector& monic_tail);

// Closest point on the unit circle.
cd project_to_unit_circle(cd v);

struct FrequencyPairing {
  std::vector<std::pair<int, int>> pairs;  // (row index, column index)
  RMatrix scores;                          // |a_r(f_r[i])^H X conj(a_c(f_c[j]))|
};

// Maximum-weight assignment of row to column frequencies using the data block X,
// X ~ sum_q c_q a_r(f_r,q) a_c(f_c,q)^T. Ties resolve to the lexicographically
// smallest permutation.
FrequencyPairing pair_frequencies(const std::vector<double>& row_freqs,
                                  const std::vector<double>& col_freqs, const CMatrix& x,
                                  double row_spacing, double col_spacing);

// elevation = acos(f_r), azimuth = asin(f_c / sin(elevation)).
Direction freqs_to_angles(double row_freq, double col_freq);

struct DoaEstimate {
  std::vector<Direction> directions;  // sorted by elevation
  std::vector<double> residuals;      // per pair: ||X - rank-K rebuild||_F
  RMatrix pairing_scores;
  std::vector<double> row_freqs;
  std::vector<double> col_freqs;
  int row_order = 0;  // prediction orders used on each axis
  int col_order = 0;
  double fit_residual = 0.0;  // steering fit when an observation was supplied
};

struct DoaOptions {
  // When positive, each axis is rooted with order min(K, number of eigenvalues above
  // order_threshold * largest) and shared frequencies are repeated. 0 keeps order K.
  double order_threshold = 0.0;
  // When both are set, every per-axis order pair in [1, K]^2 is tried and the
  // estimate with the smallest ||z - G A(estimate) s_ls|| wins.
  const CVector* observation = nullptr;
  const CMatrix* measurement = nullptr;
};

// ||z - G A(dirs) s|| with s the least-squares amplitudes.
double steering_fit_residual(const CVector& z, const CMatrix& g, const RisGeometry& geom,
                             const std::vector<Direction>& dirs);

DoaEstimate estimate_doa(const DecoupledSdpVars& vars, const RisGeometry& geom, int count,
                         const DoaOptions& options = {});
// Same extraction from the bordered (two-level Toeplitz) solution.
DoaEstimate estimate_doa(const FullSdpVars& vars, const RisGeometry& geom, int count,
                         const DoaOptions& options = {});

// Number of eigenvalues of T above `threshold` times the largest one.
int estimate_model_order(const CMatrix& t, double threshold = 0.05);

}  // namespace risdoa
