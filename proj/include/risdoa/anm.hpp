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

// Orthogonal projections (Frobenius inner product) used by the splitting solver.

// Hermitian part, then each diagonal replaced by its mean.
CMatrix project_toeplitz_hermitian(const CMatrix& a);
// Plain (non-Hermitian) Toeplitz: each diagonal replaced by its mean.
CMatrix project_toeplitz(const CMatrix& a);
// Two-level structure for row-major vectorization: an outer x outer grid of
// inner x inner blocks, block (p, q) = T_{q-p}, T_{-k} = T_k^H, every T_k Toeplitz.
CMatrix project_block_toeplitz(const CMatrix& a, int outer, int inner);
// Hermitian part with negative eigenvalues clipped to zero.
CMatrix project_psd(const CMatrix& a);

double min_eigenvalue(const CMatrix& hermitian);

enum class SolveMode {
  kRegularized,  // min 1/2 ||z - G x||^2 + alpha/2 (Tr T1 + Tr T2)
  kNoiseBall,    // min 1/2 (Tr T1 + Tr T2)  s.t. ||z - G x|| <= noise_radius
  kFixedTarget,  // min 1/2 (Tr T1 + Tr T2) with the data block pinned
};

struct SolverConfig {
  double rho = 1.0;
  double relaxation = 1.6;  // over-relaxation factor in (0, 2)
  double alpha = 0.0;
  double noise_radius = 0.0;
  int max_iterations = 50000;
  double primal_tol = 1e-6;
  double dual_tol = 1e-6;
  SolveMode mode = SolveMode::kRegularized;
  bool adapt_rho = true;
  bool record_trace = false;
  int full_size_cap = 64;  // largest MN accepted by the bordered (MN+1) solver

  void validate() const;
};

struct TraceRow {
  int iteration;
  double primal_residual;
  double dual_residual;
  double rho;
  double objective;
};

struct SolverDiagnostics {
  int iterations = 0;
  bool converged = false;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double min_eigenvalue = 0.0;     // of the bordered matrix at return
  double structure_residual = 0.0; // distance of the returned blocks to their structure
  double data_residual = 0.0;      // ||z - G vec(X)||
  double seconds = 0.0;
  std::vector<TraceRow> trace;
};

class NonConvergenceError : public NumericalError {
 public:
  NonConvergenceError(const std::string& what, SolverDiagnostics diag)
      : NumericalError(what), diagnostics_(std::move(diag)) {}
  const SolverDiagnostics& diagnostics() const { return diagnostics_; }

 private:
  SolverDiagnostics diagnostics_;
};

// Decoupled program: [[Tx, X], [X^H, Ty]] >= 0 with Hermitian Toeplitz Tx (M x M)
// and Ty (N x N); X is M x N with vec(X)[m*N + n] = X(m, n).
struct DecoupledSdpVars {
  CMatrix tx;
  CMatrix ty;
  CMatrix x;
  SolverDiagnostics diagnostics;

  // 1/2 (Tr Tx + Tr Ty)
  double objective() const;
  // objective / sqrt(MN): the atomic norm with unit-modulus steering atoms.
  double normalized_objective() const;
};

// Bordered program: [[T, x], [x^H, t]] >= 0 with T two-level Toeplitz (MN x MN).
struct FullSdpVars {
  CMatrix t_matrix;
  double t = 0.0;
  CVector x;
  int rows = 0;
  int cols = 0;
  SolverDiagnostics diagnostics;

  // 1/2 (Tr T + t)
  double objective() const;
  double normalized_objective() const;
};

// alpha = sigma * sqrt(P * MN * log(MN)) for per-sample noise std sigma.
double default_alpha(int samples, int elements, double noise_std);

DecoupledSdpVars solve_danm(const CVector& z, const CMatrix& g, const RisGeometry& geom,
                            const SolverConfig& config);
// Decoupled atomic norm of a fixed M x N matrix (mode is forced to kFixedTarget).
DecoupledSdpVars solve_danm_target(const CMatrix& x, const SolverConfig& config);

FullSdpVars solve_full_anm(const CVector& z, const CMatrix& g, const RisGeometry& geom,
                           const SolverConfig& config);
FullSdpVars solve_full_anm_target(const CVector& x, const RisGeometry& geom,
                                  const SolverConfig& config);

// Atomic norm of x (length MN) with respect to unit-modulus steering atoms.
double atomic_norm(const CVector& x, const RisGeometry& geom, const SolverConfig& config = {});

struct AtomicDecomposition {
  std::vector<double> frequencies;  // ascending
  std::vector<double> weights;      // positive
  double spacing = 0.5;
  double residual = 0.0;  // ||T - sum c a a^H||_F / ||T||_F

  CMatrix rebuild(int dim) const;
};

// T = sum_q c_q a(f_q) a(f_q)^H with a(f)_l = exp(-j 2 pi l spacing f).
AtomicDecomposition vandermonde_decompose(const CMatrix& t, int rank, double spacing = 0.5);

}  // namespace risdoa
