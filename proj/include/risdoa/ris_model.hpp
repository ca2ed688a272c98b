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

#include <Eigen/SparseCore>

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace risdoa {

// Planar M x N surface. Spacings are expressed in wavelengths.
class RisGeometry {
 public:
  RisGeometry(int rows, int cols, double row_spacing, double col_spacing);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int elements() const { return rows_ * cols_; }
  double row_spacing() const { return row_spacing_; }
  double col_spacing() const { return col_spacing_; }

  // Row-major flat index used by every matrix and vector in the library.
  int flat_index(int m, int n) const { return m * cols_ + n; }

 private:
  int rows_;
  int cols_;
  double row_spacing_;
  double col_spacing_;
};

struct SourceSet {
  std::vector<Direction> directions;
  std::vector<cd> amplitudes;

  int count() const { return static_cast<int>(directions.size()); }
  // Smallest pairwise distance in the (elevation, azimuth) plane, degrees.
  double min_separation_deg() const;
  void validate() const;
};

// 1-bit reflection schedule: bit 0 -> +1, bit 1 -> -1.
struct CodeSchedule {
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> bits;
  RMatrix codes;

  int samples() const { return static_cast<int>(codes.rows()); }
  int elements() const { return static_cast<int>(codes.cols()); }
};

// Neighbor offset (row delta, column delta) that leaks into an element.
using NeighborOffset = std::pair<int, int>;

// Right, down and down-right neighbours.
std::vector<NeighborOffset> default_neighbors();

struct ImpairmentRanges {
  Range coupling_amplitude{0.1, 0.4};
  std::vector<NeighborOffset> coupling_neighbors = default_neighbors();
  Range mismatch_amplitude{0.5, 1.5};
  Range mismatch_phase{-kPi / 6.0, kPi / 6.0};  // radians

  static ImpairmentRanges ideal();
  void validate() const;
};

struct ImpairmentModel {
  // Reflection factor applied where the code is -1: -B * exp(j beta).
  CVector mismatch;
  Eigen::SparseMatrix<cd, Eigen::RowMajor> coupling;

  static ImpairmentModel identity(const RisGeometry& geom);
  // (B o G): +1 where the code is +1, mismatch factor where it is -1.
  CMatrix effective_codes(const CodeSchedule& schedule) const;
};

struct Snapshot {
  CVector samples;
  double noise_power = 0.0;  // per-sample variance of the complex noise
  std::uint64_t seed = 0;
};

// exp(-j 2 pi (n d_c sin(theta) sin(phi) + m d_r cos(theta))) at index m*N + n.
CVector steering_vector(const RisGeometry& geom, const Direction& dir);
CMatrix steering_matrix(const RisGeometry& geom, std::span<const Direction> dirs);

// Spatial frequencies of a direction: row axis cos(theta), column axis sin(theta) sin(phi).
std::pair<double, double> spatial_frequencies(const Direction& dir);

// Single-axis atom exp(-j 2 pi l d f), l = 0..length-1.
CVector axis_atom(int length, double spacing, double frequency);

void validate_direction(const Direction& dir);

CodeSchedule build_code_schedule(int samples, int elements, std::uint64_t seed);

ImpairmentModel sample_impairments(const RisGeometry& geom, const ImpairmentRanges& ranges,
                                   std::uint64_t seed);

CVector noiseless_ideal(const RisGeometry& geom, const CodeSchedule& schedule,
                        const SourceSet& sources);
CVector noiseless_impaired(const RisGeometry& geom, const CodeSchedule& schedule,
                           const ImpairmentModel& impairments, const SourceSet& sources);

// Per-sample noise variance giving the requested SNR for this noiseless signal.
// snr_db = +inf yields zero.
double noise_power_for_snr(const CVector& noiseless, double snr_db);

// Circularly-symmetric complex Gaussian noise with per-sample variance noise_power.
CVector draw_noise(int samples, double noise_power, std::uint64_t seed);

Snapshot synthesize_ideal(const RisGeometry& geom, const CodeSchedule& schedule,
                          const SourceSet& sources, double snr_db, std::uint64_t seed);
Snapshot synthesize_impaired(const RisGeometry& geom, const CodeSchedule& schedule,
                             const ImpairmentModel& impairments, const SourceSet& sources,
                             double snr_db, std::uint64_t seed);

}  // namespace risdoa
