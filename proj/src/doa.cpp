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

#include "risdoa/doa.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

namespace risdoa {

std::vector<cd> polynomial_roots(const CVector& monic_tail) {
  const Eigen::Index k = monic_tail.size();
  if (k == 0) return {};
  if (k == 1) return {-monic_tail(0)};
  CMatrix companion = CMatrix::Zero(k, k);
  companion.row(0) = -monic_tail.transpose();
  for (Eigen::Index i = 1; i < k; ++i) companion(i, i - 1) = 1.0;
  Eigen::ComplexEigenSolver<CMatrix> eig(companion, false);
  if (eig.info() != Eigen::Success) throw NumericalError("polynomial_roots: eigensolver failed");
  std::vector<cd> roots(eig.eigenvalues().data(), eig.eigenvalues().data() + k);
  return roots;
}

cd project_to_unit_circle(cd v) {
  const double mag = std::abs(v);
  if (mag == 0.0) return {1.0, 0.0};
  return v / mag;
}

std::vector<double> toeplitz_to_freqs(const CMatrix& t, int count, double spacing) {
  const Eigen::Index len = t.rows();
  if (t.cols() != len) throw ContractError("toeplitz_to_freqs: T must be square");
  if (count < 1 || count >= len)
    throw DomainError("toeplitz_to_freqs: need 1 <= K < dimension");
  if (!(spacing > 0.0)) throw DomainError("toeplitz_to_freqs: spacing must be positive");

  const CVector u = t.col(0);
  // Row r holds u_{K-1+r}, u_{K-2+r}, ..., u_r.
  CMatrix h(len - count, count);
  for (Eigen::Index r = 0; r < len - count; ++r)
    for (Eigen::Index c = 0; c < count; ++c) h(r, c) = u(count - 1 + r - c);
  const CVector rhs = u.segment(count, len - count);

  Eigen::JacobiSVD<CMatrix> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(sv.size() - 1) < 1e-12 * sv(0))
    throw NumericalError("toeplitz_to_freqs: prediction matrix is rank deficient");
  const CVector b = -svd.solve(rhs);

  std::vector<double> freqs;
  for (const cd& root : polynomial_roots(b)) {
    const cd v = project_to_unit_circle(root);
    double f = -std::arg(v) / (kTwoPi * spacing);
    freqs.push_back(std::clamp(f, -1.0, 1.0));
  }
  std::sort(freqs.begin(), freqs.end());
  return freqs;
}

FrequencyPairing pair_frequencies(const std::vector<double>& row_freqs,
                                  const std::vector<double>& col_freqs, const CMatrix& x,
                                  double row_spacing, double col_spacing) {
  if (row_freqs.size() != col_freqs.size())
    throw ContractError("pair_frequencies: frequency lists differ in length");
  const int k = static_cast<int>(row_freqs.size());
  FrequencyPairing out;
  out.scores.resize(k, k);
  for (int i = 0; i < k; ++i) {
    const CVector ar = axis_atom(static_cast<int>(x.rows()), row_spacing, row_freqs[i]);
    for (int j = 0; j < k; ++j) {
      const CVector ac = axis_atom(static_cast<int>(x.cols()), col_spacing, col_freqs[j]);
      out.scores(i, j) = std::abs((ar.adjoint() * x * ac.conjugate())(0, 0));
    }
  }
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_score = -1.0;
  do {
    double s = 0.0;
    for (int i = 0; i < k; ++i) s += out.scores(i, perm[i]);
    if (s > best_score) {
      best_score = s;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (int i = 0; i < k; ++i) out.pairs.emplace_back(i, best[i]);
  return out;
}

Direction freqs_to_angles(double row_freq, double col_freq) {
  const double theta = std::acos(std::clamp(row_freq, -1.0, 1.0));
  const double s = std::sin(theta);
  if (s < 1e-6) throw DomainError("freqs_to_angles: azimuth undefined at endfire");
  const double phi = std::asin(std::clamp(col_freq / s, -1.0, 1.0));
  return {rad2deg(theta), rad2deg(phi)};
}

namespace {

DoaEstimate assemble(const std::vector<double>& row_freqs, const std::vector<double>& col_freqs,
                     const CMatrix& x, const RisGeometry& geom) {
  const FrequencyPairing pairing =
      pair_frequencies(row_freqs, col_freqs, x, geom.row_spacing(), geom.col_spacing());
  const int k = static_cast<int>(row_freqs.size());

  struct Item {
    Direction dir;
    double fr, fc;
  };
  std::vector<Item> items;
  CMatrix atoms(x.size(), k);
  for (int q = 0; q < k; ++q) {
    const auto [i, j] = pairing.pairs[q];
    items.push_back({freqs_to_angles(row_freqs[i], col_freqs[j]), row_freqs[i], col_freqs[j]});
    const CVector ar = axis_atom(static_cast<int>(x.rows()), geom.row_spacing(), row_freqs[i]);
    const CVector ac = axis_atom(static_cast<int>(x.cols()), geom.col_spacing(), col_freqs[j]);
    const CMatrix outer = ar * ac.transpose();
    atoms.col(q) = Eigen::Map<const CVector>(outer.data(), outer.size());
  }
  const CVector xv = Eigen::Map<const CVector>(x.data(), x.size());
  const CVector coef = atoms.completeOrthogonalDecomposition().solve(xv);
  const double residual = (xv - atoms * coef).norm();

  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    return a.dir.elevation_deg < b.dir.elevation_deg;
  });
  DoaEstimate est;
  for (const auto& it : items) {
    est.directions.push_back(it.dir);
    est.row_freqs.push_back(it.fr);
    est.col_freqs.push_back(it.fc);
    est.residuals.push_back(residual);
  }
  est.pairing_scores = pairing.scores;
  return est;
}

}  // namespace

namespace {

std::vector<double> axis_freqs_order(const CMatrix& t, int count, double spacing, int order) {
  std::vector<double> f = toeplitz_to_freqs(t, order, spacing);
  for (int i = order; i < count; ++i) f.push_back(f[static_cast<std::size_t>(i % order)]);
  std::sort(f.begin(), f.end());
  return f;
}

int axis_order(const CMatrix& t, int count, double threshold) {
  if (threshold <= 0.0) return count;
  return std::clamp(estimate_model_order(t, threshold), 1, count);
}

DoaEstimate extract(const CMatrix& t_row, const CMatrix& t_col, const CMatrix& x,
                    const RisGeometry& geom, int count, const DoaOptions& options) {
  auto build = [&](int ro, int co) {
    DoaEstimate est =
        assemble(axis_freqs_order(t_row, count, geom.row_spacing(), ro),
                 axis_freqs_order(t_col, count, geom.col_spacing(), co), x, geom);
    est.row_order = ro;
    est.col_order = co;
    return est;
  };
  if (!options.observation || !options.measurement)
    return build(axis_order(t_row, count, options.order_threshold),
                 axis_order(t_col, count, options.order_threshold));

  std::optional<DoaEstimate> best;
  std::string last_error;
  for (int ro = 1; ro <= count; ++ro)
    for (int co = 1; co <= count; ++co) {
      if (count > 1 && ro == 1 && co == 1) continue;
      try {
        DoaEstimate est = build(ro, co);
        est.fit_residual = steering_fit_residual(*options.observation, *options.measurement,
                                                 geom, est.directions);
        if (!best || est.fit_residual < best->fit_residual) best = std::move(est);
      } catch (const std::exception& e) {
        last_error = e.what();
      }
    }
  if (!best) throw NumericalError("estimate_doa: no admissible extraction (" + last_error + ")");
  return *best;
}

}  // namespace

double steering_fit_residual(const CVector& z, const CMatrix& g, const RisGeometry& geom,
                             const std::vector<Direction>& dirs) {
  if (g.rows() != z.size() || g.cols() != geom.elements())
    throw ContractError("steering_fit_residual: dimension mismatch");
  const CMatrix m = g * steering_matrix(geom, dirs);
  const CVector s = m.colPivHouseholderQr().solve(z);
  return (z - m * s).norm();
}

DoaEstimate estimate_doa(const DecoupledSdpVars& vars, const RisGeometry& geom, int count,
                         const DoaOptions& options) {
  if (vars.tx.rows() != geom.rows() || vars.ty.rows() != geom.cols())
    throw ContractError("estimate_doa: solution does not match geometry");
  // Ty carries conjugated column atoms.
  return extract(vars.tx, vars.ty.conjugate(), vars.x, geom, count, options);
}

DoaEstimate estimate_doa(const FullSdpVars& vars, const RisGeometry& geom, int count,
                         const DoaOptions& options) {
  const int m = geom.rows();
  const int n = geom.cols();
  if (vars.t_matrix.rows() != m * n) throw ContractError("estimate_doa: solution size mismatch");
  CMatrix t_row(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) t_row(a, b) = vars.t_matrix(a * n, b * n);
  const CMatrix t_col = vars.t_matrix.topLeftCorner(n, n);
  CMatrix x(m, n);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < n; ++b) x(a, b) = vars.x(a * n + b);
  return extract(t_row, t_col, x, geom, count, options);
}

int estimate_model_order(const CMatrix& t, double threshold) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (t + t.adjoint()), Eigen::EigenvaluesOnly);
  const RVector ev = eig.eigenvalues();
  const double top = ev.maxCoeff();
  if (!(top > 0.0)) return 0;
  return static_cast<int>((ev.array() > threshold * top).count());
}

}  // namespace risdoa
