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

#include "risdoa/baselines.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace risdoa {

AngleGrid AngleGrid::uniform(Range elevation, Range azimuth, double step) {
  if (!(step > 0.0)) throw DomainError("AngleGrid: resolution must be positive");
  if (elevation.lo > elevation.hi || azimuth.lo > azimuth.hi)
    throw DomainError("AngleGrid: empty range");
  AngleGrid g;
  g.elevation_step = step;
  g.azimuth_step = step;
  const int ne = static_cast<int>(std::floor(elevation.width() / step + 1e-9)) + 1;
  const int na = static_cast<int>(std::floor(azimuth.width() / step + 1e-9)) + 1;
  for (int i = 0; i < ne; ++i) g.elevations.push_back(elevation.lo + i * step);
  for (int i = 0; i < na; ++i) g.azimuths.push_back(azimuth.lo + i * step);
  return g;
}

Direction AngleGrid::at(int flat) const {
  const int na = static_cast<int>(azimuths.size());
  return {elevations[flat / na], azimuths[flat % na]};
}

GridDictionary build_dictionary(const CMatrix& g, const RisGeometry& geom, const AngleGrid& grid) {
  if (grid.size() == 0) throw DomainError("build_dictionary: empty grid");
  if (g.cols() != geom.elements()) throw ContractError("build_dictionary: G width mismatch");
  GridDictionary dict;
  dict.grid = grid;
  CMatrix steering(geom.elements(), grid.size());
  for (int i = 0; i < grid.size(); ++i) steering.col(i) = steering_vector(geom, grid.at(i));
  dict.atoms = g * steering;
  dict.norms = dict.atoms.colwise().norm().transpose();
  return dict;
}

RMatrix grid_spectrum(const CVector& z, const GridDictionary& dict) {
  if (z.size() != dict.atoms.rows()) throw ContractError("grid_spectrum: length mismatch");
  const CVector corr = dict.atoms.adjoint() * z;
  const int ne = static_cast<int>(dict.grid.elevations.size());
  const int na = static_cast<int>(dict.grid.azimuths.size());
  RMatrix spec(ne, na);
  for (int e = 0; e < ne; ++e)
    for (int a = 0; a < na; ++a) {
      const int i = e * na + a;
      const double nrm = dict.norms(i);
      spec(e, a) = nrm > 0.0 ? std::norm(corr(i)) / (nrm * nrm) : 0.0;
    }
  return spec;
}

RMatrix grid_spectrum(const CVector& z, const CMatrix& g, const RisGeometry& geom,
                      const AngleGrid& grid) {
  return grid_spectrum(z, build_dictionary(g, geom, grid));
}

namespace {

double parabolic_offset(double left, double mid, double right) {
  const double denom = left - 2.0 * mid + right;
  if (denom >= 0.0) return 0.0;
  return std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
}

}  // namespace

std::vector<Direction> spectrum_peaks(const RMatrix& spec, const AngleGrid& grid, int count,
                                      double min_separation_deg, bool refine,
                                      double min_relative_height) {
  if (count < 1) throw DomainError("spectrum_peaks: count must be positive");
  const int ne = static_cast<int>(spec.rows());
  const int na = static_cast<int>(spec.cols());
  if (ne == 0 || na == 0) throw DomainError("spectrum_peaks: empty grid");

  struct Cell {
    int e, a;
    double score;
  };
  std::vector<Cell> maxima;
  for (int e = 0; e < ne; ++e)
    for (int a = 0; a < na; ++a) {
      const double s = spec(e, a);
      bool is_max = true;
      for (int de = -1; de <= 1 && is_max; ++de)
        for (int da = -1; da <= 1; ++da) {
          if (de == 0 && da == 0) continue;
          const int ee = e + de, aa = a + da;
          if (ee < 0 || ee >= ne || aa < 0 || aa >= na) continue;
          if (spec(ee, aa) > s) {
            is_max = false;
            break;
          }
        }
      if (is_max) maxima.push_back({e, a, s});
    }
  std::stable_sort(maxima.begin(), maxima.end(),
                   [](const Cell& x, const Cell& y) { return x.score > y.score; });

  std::vector<Cell> chosen;
  auto far_enough = [&](const Cell& c) {
    for (const auto& o : chosen)
      if (std::hypot(grid.elevations[c.e] - grid.elevations[o.e],
                     grid.azimuths[c.a] - grid.azimuths[o.a]) < min_separation_deg)
        return false;
    return true;
  };
  const double floor = min_relative_height * maxima.front().score;
  for (const auto& c : maxima) {
    if (static_cast<int>(chosen.size()) == count) break;
    if (!chosen.empty() && c.score < floor) break;
    if (far_enough(c)) chosen.push_back(c);
  }
  // Too few isolated maxima: repeat the strongest so the estimate keeps K entries.
  while (static_cast<int>(chosen.size()) < count) chosen.push_back(chosen.front());

  std::vector<Direction> out;
  for (const auto& c : chosen) {
    double el = grid.elevations[c.e];
    double az = grid.azimuths[c.a];
    if (refine) {
      if (c.e > 0 && c.e + 1 < ne)
        el += grid.elevation_step * parabolic_offset(spec(c.e - 1, c.a), spec(c.e, c.a),
                                                     spec(c.e + 1, c.a));
      if (c.a > 0 && c.a + 1 < na)
        az += grid.azimuth_step * parabolic_offset(spec(c.e, c.a - 1), spec(c.e, c.a),
                                                   spec(c.e, c.a + 1));
    }
    out.push_back({el, az});
  }
  return out;
}

std::vector<Direction> fft_estimate(const CVector& z, const GridDictionary& dict, int count,
                                    double min_relative_height) {
  return spectrum_peaks(grid_spectrum(z, dict), dict.grid, count, 3.0, true,
                        min_relative_height);
}

std::vector<Direction> omp_estimate(const CVector& z, const GridDictionary& dict, int count) {
  if (count < 1) throw DomainError("omp_estimate: count must be positive");
  if (z.size() != dict.atoms.rows()) throw ContractError("omp_estimate: length mismatch");
  std::vector<int> support;
  CVector residual = z;
  for (int k = 0; k < count; ++k) {
    const CVector corr = dict.atoms.adjoint() * residual;
    int best = -1;
    double best_score = -1.0;
    for (Eigen::Index i = 0; i < corr.size(); ++i) {
      if (std::find(support.begin(), support.end(), static_cast<int>(i)) != support.end())
        continue;
      const double nrm = dict.norms(i);
      const double s = nrm > 0.0 ? std::abs(corr(i)) / nrm : 0.0;
      if (s > best_score) {
        best_score = s;
        best = static_cast<int>(i);
      }
    }
    support.push_back(best);
    CMatrix sub(dict.atoms.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t j = 0; j < support.size(); ++j) sub.col(j) = dict.atoms.col(support[j]);
    Eigen::ColPivHouseholderQR<CMatrix> qr(sub);
    if (qr.rank() < static_cast<Eigen::Index>(support.size()))
      throw NumericalError("omp_estimate: selected atoms are linearly dependent");
    residual = z - sub * qr.solve(z);
  }
  std::vector<Direction> out;
  for (int i : support) out.push_back(dict.grid.at(i));
  return out;
}

std::vector<Direction> omp_estimate(const CVector& z, const CMatrix& g, const RisGeometry& geom,
                                    const AngleGrid& grid, int count) {
  return omp_estimate(z, build_dictionary(g, geom, grid), count);
}

CMatrix mean_jacobian(const RisGeometry& geom, const CMatrix& g, const SourceSet& sources) {
  sources.validate();
  if (g.cols() != geom.elements()) throw ContractError("mean_jacobian: G width mismatch");
  const int k = sources.count();
  CMatrix jac(g.rows(), 4 * k);
  for (int q = 0; q < k; ++q) {
    const Direction& d = sources.directions[q];
    const double th = deg2rad(d.elevation_deg);
    const double ph = deg2rad(d.azimuth_deg);
    const CVector a = steering_vector(geom, d);
    CVector da_dth(geom.elements());
    CVector da_dph(geom.elements());
    for (int m = 0; m < geom.rows(); ++m)
      for (int n = 0; n < geom.cols(); ++n) {
        const int i = geom.flat_index(m, n);
        const double dpsi_dth = -kTwoPi * (n * geom.col_spacing() * std::cos(th) * std::sin(ph) -
                                           m * geom.row_spacing() * std::sin(th));
        const double dpsi_dph = -kTwoPi * n * geom.col_spacing() * std::sin(th) * std::cos(ph);
        da_dth(i) = cd(0.0, dpsi_dth) * a(i);
        da_dph(i) = cd(0.0, dpsi_dph) * a(i);
      }
    const cd s = sources.amplitudes[q];
    jac.col(4 * q + 0) = g * da_dth * s;
    jac.col(4 * q + 1) = g * da_dph * s;
    jac.col(4 * q + 2) = g * a;
    jac.col(4 * q + 3) = g * a * cd(0.0, 1.0);
  }
  return jac;
}

double crb_numeric(const RisGeometry& geom, const CMatrix& g, const SourceSet& sources,
                   double noise_power) {
  if (!(noise_power > 0.0)) throw DomainError("crb_numeric: noise power must be positive");
  const CMatrix jac = mean_jacobian(geom, g, sources);
  const RMatrix fim = (2.0 / noise_power) * (jac.adjoint() * jac).real();
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(fim, Eigen::EigenvaluesOnly);
  const RVector ev = eig.eigenvalues();
  if (!(ev.minCoeff() > 1e-12 * ev.maxCoeff()))
    throw NumericalError("crb_numeric: Fisher information is singular");
  const RMatrix cov = fim.ldlt().solve(RMatrix::Identity(fim.rows(), fim.cols()));
  double sum = 0.0;
  const int k = sources.count();
  for (int q = 0; q < k; ++q) sum += cov(4 * q, 4 * q) + cov(4 * q + 1, 4 * q + 1);
  return rad2deg(std::sqrt(sum / (2.0 * k)));
}

std::vector<int> match_estimates(const std::vector<Direction>& truth,
                                 const std::vector<Direction>& estimate) {
  if (truth.size() != estimate.size())
    throw ContractError("match_estimates: estimate count does not match source count");
  std::vector<int> perm(truth.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
      const double de = estimate[perm[k]].elevation_deg - truth[k].elevation_deg;
      const double da = estimate[perm[k]].azimuth_deg - truth[k].azimuth_deg;
      cost += de * de + da * da;
    }
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double matched_squared_error(const std::vector<Direction>& truth,
                             const std::vector<Direction>& estimate) {
  const auto perm = match_estimates(truth, estimate);
  double sum = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const double de = estimate[perm[k]].elevation_deg - truth[k].elevation_deg;
    const double da = estimate[perm[k]].azimuth_deg - truth[k].azimuth_deg;
    sum += de * de + da * da;
  }
  return sum;
}

double rmse(const std::vector<std::vector<Direction>>& truth,
            const std::vector<std::vector<Direction>>& estimates) {
  if (truth.size() != estimates.size() || truth.empty())
    throw ContractError("rmse: trial counts differ or are zero");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    sum += matched_squared_error(truth[t], estimates[t]);
    count += truth[t].size();
  }
  return std::sqrt(sum / (2.0 * static_cast<double>(count)));
}

}  // namespace risdoa
