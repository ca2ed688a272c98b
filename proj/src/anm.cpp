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

#include "risdoa/anm.hpp"

#include "risdoa/doa.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>

namespace risdoa {

void SolverConfig::validate() const {
  if (!(rho > 0.0)) throw DomainError("SolverConfig: rho must be positive");
  if (!(alpha >= 0.0)) throw DomainError("SolverConfig: alpha must be nonnegative");
  if (!(noise_radius >= 0.0)) throw DomainError("SolverConfig: noise radius must be nonnegative");
  if (!(primal_tol > 0.0) || !(dual_tol > 0.0))
    throw DomainError("SolverConfig: tolerances must be positive");
  if (max_iterations < 1) throw DomainError("SolverConfig: max_iterations must be positive");
  if (!(relaxation > 0.0 && relaxation < 2.0))
    throw DomainError("SolverConfig: relaxation must lie in (0, 2)");
}

double DecoupledSdpVars::objective() const {
  return 0.5 * (tx.trace().real() + ty.trace().real());
}

double DecoupledSdpVars::normalized_objective() const {
  return objective() / std::sqrt(static_cast<double>(x.rows() * x.cols()));
}

double FullSdpVars::objective() const { return 0.5 * (t_matrix.trace().real() + t); }

double FullSdpVars::normalized_objective() const {
  return objective() / std::sqrt(static_cast<double>(rows) * cols);
}

double default_alpha(int samples, int elements, double noise_std) {
  const double n = static_cast<double>(elements);
  return noise_std * std::sqrt(static_cast<double>(samples) * n * std::log(n));
}

namespace {

using Projector = std::function<CMatrix(const CMatrix&)>;

// Splitting solver for
//   min  w/2 (Tr T1 + Tr T2) [+ 1/2 ||z - G vec(X)||^2]
//   s.t. W = [[T1, X], [X^H, T2]] >= 0, T1 and T2 structured,
// with W = Z (Z >= 0) as the split and, in noise-ball mode, G vec(X) + r = z with
// ||r|| <= eps as a second split. Duals are kept scaled by rho.
struct BorderedProblem {
  int top = 0;
  int bottom = 0;
  Projector project_top;
  Projector project_bottom;
  SolveMode mode = SolveMode::kRegularized;
  const CVector* z = nullptr;
  const CMatrix* g = nullptr;
  std::optional<CMatrix> fixed_block;
};

CVector vec_rows(const CMatrix& x) {
  CVector v(x.size());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) v(i * x.cols() + j) = x(i, j);
  return v;
}

CMatrix unvec_rows(const CVector& v, Eigen::Index rows, Eigen::Index cols) {
  CMatrix x(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) x(i, j) = v(i * cols + j);
  return x;
}

CVector project_ball(const CVector& v, double radius) {
  const double n = v.norm();
  if (n <= radius) return v;
  return v * (radius / n);
}

struct SolveOutput {
  CMatrix w;
  SolverDiagnostics diag;
};

SolveOutput run_admm(const BorderedProblem& pb, const SolverConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const int n = pb.top + pb.bottom;
  const Eigen::Index data_len = static_cast<Eigen::Index>(pb.top) * pb.bottom;
  const bool ball = pb.mode == SolveMode::kNoiseBall;
  const bool fixed = pb.mode == SolveMode::kFixedTarget;
  const double weight = pb.mode == SolveMode::kRegularized ? cfg.alpha : 1.0;

  // Eigendecomposition of the Gram matrix turns every data-block update into
  // two dense products, independent of rho.
  CMatrix gram_vectors;
  RVector gram_values;
  CVector gh_z;
  if (!fixed) {
    if (pb.g->cols() != data_len || pb.g->rows() != pb.z->size())
      throw ContractError("solver: measurement matrix shape does not match data block");
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(pb.g->adjoint() * (*pb.g));
    if (eig.info() != Eigen::Success) throw NumericalError("solver: Gram eigensolver failed");
    gram_vectors = eig.eigenvectors();
    gram_values = eig.eigenvalues().cwiseMax(0.0);
    gh_z = pb.g->adjoint() * (*pb.z);
  }
  auto solve_shifted = [&](const CVector& rhs, double shift) -> CVector {
    CVector t = gram_vectors.adjoint() * rhs;
    t.array() /= (gram_values.array() + shift);
    return gram_vectors * t;
  };

  double rho = cfg.rho;
  const double relax = cfg.relaxation;
  CMatrix z_var = CMatrix::Zero(n, n);
  CMatrix u_var = CMatrix::Zero(n, n);
  CMatrix w_var = CMatrix::Zero(n, n);
  const Eigen::Index meas = fixed ? 0 : pb.z->size();
  CVector r_var = CVector::Zero(meas);
  CVector u_ball = CVector::Zero(meas);
  CVector x_vec = CVector::Zero(data_len);
  CVector gx = CVector::Zero(meas);
  const double z_norm = fixed ? 0.0 : pb.z->norm();

  SolverDiagnostics diag;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    const CMatrix v = z_var - u_var;
    const CMatrix t_top = pb.project_top(v.topLeftCorner(pb.top, pb.top)) -
                          CMatrix::Identity(pb.top, pb.top) * (weight / (2.0 * rho));
    const CMatrix t_bot = pb.project_bottom(v.bottomRightCorner(pb.bottom, pb.bottom)) -
                          CMatrix::Identity(pb.bottom, pb.bottom) * (weight / (2.0 * rho));
    CMatrix data_block;
    if (fixed) {
      data_block = *pb.fixed_block;
    } else {
      const CVector d12 = vec_rows(v.topRightCorner(pb.top, pb.bottom));
      if (ball)
        x_vec = solve_shifted(2.0 * d12 + pb.g->adjoint() * (*pb.z - r_var - u_ball), 2.0);
      else
        x_vec = solve_shifted(gh_z + 2.0 * rho * d12, 2.0 * rho);
      data_block = unvec_rows(x_vec, pb.top, pb.bottom);
    }
    w_var.topLeftCorner(pb.top, pb.top) = t_top;
    w_var.bottomRightCorner(pb.bottom, pb.bottom) = t_bot;
    w_var.topRightCorner(pb.top, pb.bottom) = data_block;
    w_var.bottomLeftCorner(pb.bottom, pb.top) = data_block.adjoint();

    const CMatrix z_prev = z_var;
    const CMatrix w_hat = relax * w_var + (1.0 - relax) * z_prev;
    z_var = project_psd(w_hat + u_var);
    double ball_primal2 = 0.0;
    double ball_dual2 = 0.0;
    if (ball) {
      const CVector r_prev = r_var;
      gx = (*pb.g) * x_vec;
      const CVector gx_hat = relax * gx + (1.0 - relax) * (*pb.z - r_prev);
      r_var = project_ball(*pb.z - gx_hat - u_ball, cfg.noise_radius);
      u_ball += gx_hat + r_var - *pb.z;
      ball_primal2 = (gx + r_var - *pb.z).squaredNorm();
      ball_dual2 = (pb.g->adjoint() * (r_var - r_prev)).squaredNorm();
    }
    u_var += w_hat - z_var;

    const double primal = std::sqrt((w_var - z_var).squaredNorm() + ball_primal2);
    const double dual = rho * std::sqrt((z_var - z_prev).squaredNorm() + ball_dual2);
    const double primal_scale = std::max({w_var.norm(), z_var.norm(), ball ? z_norm : 0.0});
    const double dual_scale = rho * std::sqrt(u_var.squaredNorm() + u_ball.squaredNorm());
    diag.iterations = it;
    diag.primal_residual = primal;
    diag.dual_residual = dual;

    if (cfg.record_trace) {
      double obj = 0.5 * weight * (t_top.trace().real() + t_bot.trace().real());
      if (pb.mode == SolveMode::kRegularized)
        obj += 0.5 * (*pb.z - (*pb.g) * x_vec).squaredNorm();
      diag.trace.push_back({it, primal, dual, rho, obj});
    }
    if (primal <= cfg.primal_tol * primal_scale && dual <= cfg.dual_tol * dual_scale) {
      diag.converged = true;
      break;
    }
    if (cfg.adapt_rho && it % 10 == 0) {
      double factor = 1.0;
      if (primal > 10.0 * dual) factor = 2.0;
      else if (dual > 10.0 * primal) factor = 0.5;
      if (factor != 1.0) {
        rho *= factor;
        u_var /= factor;
        u_ball /= factor;
      }
    }
  }

  diag.min_eigenvalue = min_eigenvalue(w_var);
  diag.structure_residual =
      (w_var.topLeftCorner(pb.top, pb.top) -
       pb.project_top(w_var.topLeftCorner(pb.top, pb.top))).norm() +
      (w_var.bottomRightCorner(pb.bottom, pb.bottom) -
       pb.project_bottom(w_var.bottomRightCorner(pb.bottom, pb.bottom))).norm();
  if (!fixed) diag.data_residual = (*pb.z - (*pb.g) * x_vec).norm();
  diag.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!diag.converged)
    throw NonConvergenceError("solver did not converge in " + std::to_string(cfg.max_iterations) +
                                  " iterations (primal " + std::to_string(diag.primal_residual) +
                                  ", dual " + std::to_string(diag.dual_residual) + ")",
                              diag);
  return {std::move(w_var), std::move(diag)};
}

CMatrix project_real_scalar(const CMatrix& a) {
  CMatrix out(1, 1);
  out(0, 0) = cd(a(0, 0).real(), 0.0);
  return out;
}

void check_measurement(const CVector& z, const CMatrix& g, int elements) {
  if (g.cols() != elements)
    throw ContractError("measurement matrix has " + std::to_string(g.cols()) +
                        " columns, expected " + std::to_string(elements));
  if (g.rows() != z.size()) throw ContractError("observation length does not match G rows");
}

DecoupledSdpVars decoupled_from(const SolveOutput& out, int m, int n) {
  DecoupledSdpVars vars;
  vars.tx = out.w.topLeftCorner(m, m);
  vars.ty = out.w.bottomRightCorner(n, n);
  vars.x = out.w.topRightCorner(m, n);
  vars.diagnostics = out.diag;
  return vars;
}

FullSdpVars full_from(const SolveOutput& out, int m, int n) {
  const int mn = m * n;
  FullSdpVars vars;
  vars.t_matrix = out.w.topLeftCorner(mn, mn);
  vars.t = out.w(mn, mn).real();
  vars.x = out.w.topRightCorner(mn, 1);
  vars.rows = m;
  vars.cols = n;
  vars.diagnostics = out.diag;
  return vars;
}

BorderedProblem decoupled_problem(int m, int n) {
  BorderedProblem pb;
  pb.top = m;
  pb.bottom = n;
  pb.project_top = project_toeplitz_hermitian;
  pb.project_bottom = project_toeplitz_hermitian;
  return pb;
}

BorderedProblem full_problem(int m, int n, const SolverConfig& config) {
  if (m * n > config.full_size_cap)
    throw DomainError("full ANM size " + std::to_string(m * n) + " exceeds the cap " +
                      std::to_string(config.full_size_cap));
  BorderedProblem pb;
  pb.top = m * n;
  pb.bottom = 1;
  pb.project_top = [m, n](const CMatrix& a) { return project_block_toeplitz(a, m, n); };
  pb.project_bottom = project_real_scalar;
  return pb;
}

}  // namespace

DecoupledSdpVars solve_danm(const CVector& z, const CMatrix& g, const RisGeometry& geom,
                            const SolverConfig& config) {
  if (config.mode == SolveMode::kFixedTarget)
    throw DomainError("solve_danm: use solve_danm_target for a pinned data block");
  check_measurement(z, g, geom.elements());
  BorderedProblem pb = decoupled_problem(geom.rows(), geom.cols());
  pb.mode = config.mode;
  pb.z = &z;
  pb.g = &g;
  return decoupled_from(run_admm(pb, config), geom.rows(), geom.cols());
}

DecoupledSdpVars solve_danm_target(const CMatrix& x, const SolverConfig& config) {
  BorderedProblem pb = decoupled_problem(static_cast<int>(x.rows()), static_cast<int>(x.cols()));
  pb.mode = SolveMode::kFixedTarget;
  pb.fixed_block = x;
  return decoupled_from(run_admm(pb, config), static_cast<int>(x.rows()),
                        static_cast<int>(x.cols()));
}

FullSdpVars solve_full_anm(const CVector& z, const CMatrix& g, const RisGeometry& geom,
                           const SolverConfig& config) {
  if (config.mode == SolveMode::kFixedTarget)
    throw DomainError("solve_full_anm: use solve_full_anm_target for a pinned vector");
  check_measurement(z, g, geom.elements());
  BorderedProblem pb = full_problem(geom.rows(), geom.cols(), config);
  pb.mode = config.mode;
  pb.z = &z;
  pb.g = &g;
  return full_from(run_admm(pb, config), geom.rows(), geom.cols());
}

FullSdpVars solve_full_anm_target(const CVector& x, const RisGeometry& geom,
                                  const SolverConfig& config) {
  if (x.size() != geom.elements()) throw ContractError("target length does not match MN");
  BorderedProblem pb = full_problem(geom.rows(), geom.cols(), config);
  pb.mode = SolveMode::kFixedTarget;
  pb.fixed_block = CMatrix(x);
  return full_from(run_admm(pb, config), geom.rows(), geom.cols());
}

double atomic_norm(const CVector& x, const RisGeometry& geom, const SolverConfig& config) {
  return solve_full_anm_target(x, geom, config).normalized_objective();
}

CMatrix AtomicDecomposition::rebuild(int dim) const {
  CMatrix t = CMatrix::Zero(dim, dim);
  for (std::size_t q = 0; q < frequencies.size(); ++q) {
    const CVector a = axis_atom(dim, spacing, frequencies[q]);
    t += weights[q] * a * a.adjoint();
  }
  return t;
}

AtomicDecomposition vandermonde_decompose(const CMatrix& t, int rank, double spacing) {
  if (t.rows() != t.cols()) throw ContractError("vandermonde_decompose: T must be square");
  const int dim = static_cast<int>(t.rows());
  if (rank < 1 || rank > dim - 1)
    throw DomainError("vandermonde_decompose: rank must lie in [1, dim - 1]");

  Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (t + t.adjoint()), Eigen::EigenvaluesOnly);
  const RVector ev = eig.eigenvalues();
  const double top = ev.maxCoeff();
  if (!(top > 0.0)) throw NumericalError("vandermonde_decompose: T has no positive spectrum");
  const int numeric_rank = static_cast<int>((ev.array() > 1e-9 * top).count());
  if (numeric_rank < rank)
    throw NumericalError("vandermonde_decompose: numerical rank " + std::to_string(numeric_rank) +
                         " is below the requested " + std::to_string(rank));

  AtomicDecomposition dec;
  dec.spacing = spacing;
  dec.frequencies = toeplitz_to_freqs(t, rank, spacing);

  CMatrix v(dim, rank);
  for (int q = 0; q < rank; ++q) v.col(q) = axis_atom(dim, spacing, dec.frequencies[q]);
  const CVector c = v.completeOrthogonalDecomposition().solve(CVector(t.col(0)));
  for (int q = 0; q < rank; ++q) {
    if (!(c(q).real() > 0.0))
      throw NumericalError("vandermonde_decompose: non-positive atom weight");
    dec.weights.push_back(c(q).real());
  }
  dec.residual = (t - dec.rebuild(dim)).norm() / t.norm();
  return dec;
}

}  // namespace risdoa
