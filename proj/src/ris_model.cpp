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

#include "risdoa/ris_model.hpp"

#include "risdoa/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace risdoa {

RisGeometry::RisGeometry(int rows, int cols, double row_spacing, double col_spacing)
    : rows_(rows), cols_(cols), row_spacing_(row_spacing), col_spacing_(col_spacing) {
  if (rows < 2 || cols < 2)
    throw DomainError("RisGeometry: need at least 2 rows and 2 columns");
  if (!(row_spacing > 0.0 && row_spacing <= 0.5) || !(col_spacing > 0.0 && col_spacing <= 0.5))
    throw DomainError("RisGeometry: element spacing must lie in (0, 0.5] wavelengths");
}

double SourceSet::min_separation_deg() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < directions.size(); ++i)
    for (std::size_t j = i + 1; j < directions.size(); ++j)
      best = std::min(best, std::hypot(directions[i].elevation_deg - directions[j].elevation_deg,
                                       directions[i].azimuth_deg - directions[j].azimuth_deg));
  return best;
}

void SourceSet::validate() const {
  if (directions.empty())
    throw DomainError("SourceSet: at least one source is required");
  if (amplitudes.size() != directions.size())
    throw ContractError("SourceSet: amplitude count does not match direction count");
  for (const auto& d : directions) validate_direction(d);
}

std::vector<NeighborOffset> default_neighbors() { return {{0, 1}, {1, 0}, {1, 1}}; }

ImpairmentRanges ImpairmentRanges::ideal() {
  ImpairmentRanges r;
  r.coupling_amplitude = {0.0, 0.0};
  r.mismatch_amplitude = {1.0, 1.0};
  r.mismatch_phase = {0.0, 0.0};
  return r;
}

void ImpairmentRanges::validate() const {
  auto check = [](const Range& r, const char* what) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi)
      throw DomainError(std::string("ImpairmentRanges: invalid ") + what + " range");
  };
  check(coupling_amplitude, "coupling amplitude");
  check(mismatch_amplitude, "mismatch amplitude");
  check(mismatch_phase, "mismatch phase");
  if (coupling_amplitude.lo < 0.0 || mismatch_amplitude.lo < 0.0)
    throw DomainError("ImpairmentRanges: amplitudes must be nonnegative");
  for (const auto& [dm, dn] : coupling_neighbors)
    if (dm == 0 && dn == 0) throw DomainError("ImpairmentRanges: (0,0) is not a neighbour");
}

ImpairmentModel ImpairmentModel::identity(const RisGeometry& geom) {
  ImpairmentModel model;
  model.mismatch = CVector::Constant(geom.elements(), cd(-1.0, 0.0));
  model.coupling.resize(geom.elements(), geom.elements());
  model.coupling.setIdentity();
  return model;
}

CMatrix ImpairmentModel::effective_codes(const CodeSchedule& schedule) const {
  if (schedule.elements() != mismatch.size())
    throw ContractError("effective_codes: schedule width does not match element count");
  CMatrix out(schedule.samples(), schedule.elements());
  for (int p = 0; p < schedule.samples(); ++p)
    for (int e = 0; e < schedule.elements(); ++e)
      out(p, e) = schedule.codes(p, e) > 0.0 ? cd(1.0, 0.0) : mismatch(e);
  return out;
}

void validate_direction(const Direction& dir) {
  if (!(dir.elevation_deg >= 0.0 && dir.elevation_deg <= 180.0))
    throw DomainError("elevation must lie in [0, 180] degrees");
  if (!(dir.azimuth_deg >= -90.0 && dir.azimuth_deg <= 90.0))
    throw DomainError("azimuth must lie in [-90, 90] degrees");
}

std::pair<double, double> spatial_frequencies(const Direction& dir) {
  const double theta = deg2rad(dir.elevation_deg);
  const double phi = deg2rad(dir.azimuth_deg);
  return {std::cos(theta), std::sin(theta) * std::sin(phi)};
}

CVector axis_atom(int length, double spacing, double frequency) {
  CVector a(length);
  for (int l = 0; l < length; ++l) a(l) = std::polar(1.0, -kTwoPi * l * spacing * frequency);
  return a;
}

CVector steering_vector(const RisGeometry& geom, const Direction& dir) {
  validate_direction(dir);
  const auto [f_row, f_col] = spatial_frequencies(dir);
  CVector a(geom.elements());
  for (int m = 0; m < geom.rows(); ++m)
    for (int n = 0; n < geom.cols(); ++n)
      a(geom.flat_index(m, n)) = std::polar(
          1.0, -kTwoPi * (n * geom.col_spacing() * f_col + m * geom.row_spacing() * f_row));
  return a;
}

CMatrix steering_matrix(const RisGeometry& geom, std::span<const Direction> dirs) {
  CMatrix A(geom.elements(), static_cast<Eigen::Index>(dirs.size()));
  for (std::size_t k = 0; k < dirs.size(); ++k) A.col(k) = steering_vector(geom, dirs[k]);
  return A;
}

CodeSchedule build_code_schedule(int samples, int elements, std::uint64_t seed) {
  if (samples < 1 || elements < 1)
    throw DomainError("build_code_schedule: need at least one sample and one element");
  Rng rng(stream_seed(seed, Stream::kCodes));
  std::bernoulli_distribution coin(0.5);
  CodeSchedule s;
  s.bits.resize(samples, elements);
  s.codes.resize(samples, elements);
  for (int p = 0; p < samples; ++p)
    for (int e = 0; e < elements; ++e) {
      const bool bit = coin(rng);
      s.bits(p, e) = bit ? 1 : 0;
      s.codes(p, e) = bit ? -1.0 : 1.0;
    }
  return s;
}

ImpairmentModel sample_impairments(const RisGeometry& geom, const ImpairmentRanges& ranges,
                                   std::uint64_t seed) {
  ranges.validate();
  Rng rng(stream_seed(seed, Stream::kImpairments));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Every draw below consumes the same number of variates regardless of the
  // ranges, so widening a range maps each element monotonically.
  auto draw = [&](const Range& r) { return r.lo + unit(rng) * r.width(); };

  ImpairmentModel model;
  const int mn = geom.elements();
  model.mismatch.resize(mn);
  for (int e = 0; e < mn; ++e) {
    const double amp = draw(ranges.mismatch_amplitude);
    const double phase = draw(ranges.mismatch_phase);
    model.mismatch(e) = -std::polar(amp, phase);
  }

  std::vector<Eigen::Triplet<cd>> entries;
  entries.reserve(static_cast<std::size_t>(mn) * (ranges.coupling_neighbors.size() + 1));
  for (int m = 0; m < geom.rows(); ++m) {
    for (int n = 0; n < geom.cols(); ++n) {
      const int row = geom.flat_index(m, n);
      entries.emplace_back(row, row, cd(1.0, 0.0));
      for (const auto& [dm, dn] : ranges.coupling_neighbors) {
        const double amp = draw(ranges.coupling_amplitude);
        const double phase = unit(rng) * kTwoPi;
        const int mm = m + dm;
        const int nn = n + dn;
        if (mm < 0 || mm >= geom.rows() || nn < 0 || nn >= geom.cols()) continue;
        if (amp == 0.0) continue;
        entries.emplace_back(row, geom.flat_index(mm, nn), std::polar(amp, phase));
      }
    }
  }
  model.coupling.resize(mn, mn);
  model.coupling.setFromTriplets(entries.begin(), entries.end());
  return model;
}

namespace {

void check_dims(const RisGeometry& geom, const CodeSchedule& schedule, const SourceSet& sources) {
  sources.validate();
  if (schedule.elements() != geom.elements())
    throw ContractError("code schedule width " + std::to_string(schedule.elements()) +
                        " does not match element count " + std::to_string(geom.elements()));
}

CVector source_field(const RisGeometry& geom, const SourceSet& sources) {
  const CMatrix A = steering_matrix(geom, sources.directions);
  const Eigen::Map<const CVector> s(sources.amplitudes.data(), sources.count());
  return A * s;
}

Snapshot finish(CVector noiseless, double snr_db, std::uint64_t seed) {
  Snapshot snap;
  snap.seed = seed;
  snap.noise_power = noise_power_for_snr(noiseless, snr_db);
  snap.samples = std::move(noiseless);
  if (snap.noise_power > 0.0)
    snap.samples += draw_noise(static_cast<int>(snap.samples.size()), snap.noise_power, seed);
  return snap;
}

}  // namespace

CVector noiseless_ideal(const RisGeometry& geom, const CodeSchedule& schedule,
                        const SourceSet& sources) {
  check_dims(geom, schedule, sources);
  return schedule.codes.cast<cd>() * source_field(geom, sources);
}

CVector noiseless_impaired(const RisGeometry& geom, const CodeSchedule& schedule,
                           const ImpairmentModel& impairments, const SourceSet& sources) {
  check_dims(geom, schedule, sources);
  if (impairments.coupling.rows() != geom.elements() ||
      impairments.coupling.cols() != geom.elements())
    throw ContractError("coupling matrix does not match element count");
  const CVector coupled = impairments.coupling * source_field(geom, sources);
  return impairments.effective_codes(schedule) * coupled;
}

double noise_power_for_snr(const CVector& noiseless, double snr_db) {
  if (std::isinf(snr_db) && snr_db > 0.0) return 0.0;
  if (!std::isfinite(snr_db)) throw DomainError("snr_db must be finite or +inf");
  if (noiseless.size() == 0) throw ContractError("empty signal");
  const double signal_power = noiseless.squaredNorm() / static_cast<double>(noiseless.size());
  return signal_power / std::pow(10.0, snr_db / 10.0);
}

CVector draw_noise(int samples, double noise_power, std::uint64_t seed) {
  if (noise_power < 0.0) throw DomainError("noise power must be nonnegative");
  Rng rng(stream_seed(seed, Stream::kNoise));
  std::normal_distribution<double> normal(0.0, std::sqrt(noise_power / 2.0));
  CVector w(samples);
  for (int p = 0; p < samples; ++p) {
    const double re = normal(rng);
    const double im = normal(rng);
    w(p) = cd(re, im);
  }
  return w;
}

Snapshot synthesize_ideal(const RisGeometry& geom, const CodeSchedule& schedule,
                          const SourceSet& sources, double snr_db, std::uint64_t seed) {
  return finish(noiseless_ideal(geom, schedule, sources), snr_db, seed);
}

Snapshot synthesize_impaired(const RisGeometry& geom, const CodeSchedule& schedule,
                             const ImpairmentModel& impairments, const SourceSet& sources,
                             double snr_db, std::uint64_t seed) {
  return finish(noiseless_impaired(geom, schedule, impairments, sources), snr_db, seed);
}

}  // namespace risdoa
