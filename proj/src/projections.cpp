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

#include <Eigen/Eigenvalues>

namespace risdoa {

namespace {

CMatrix hermitian_part(const CMatrix& a) {
  if (a.rows() != a.cols()) throw ContractError("projection requires a square matrix");
  return 0.5 * (a + a.adjoint());
}

}  // namespace

CMatrix project_toeplitz(const CMatrix& a) {
  if (a.rows() != a.cols()) throw ContractError("projection requires a square matrix");
  const Eigen::Index n = a.rows();
  CMatrix out(n, n);
  for (Eigen::Index k = -(n - 1); k <= n - 1; ++k) {
    const Eigen::Index len = n - std::abs(k);
    cd mean = a.diagonal(k).sum() / static_cast<double>(len);
    out.diagonal(k).setConstant(mean);
  }
  return out;
}

CMatrix project_toeplitz_hermitian(const CMatrix& a) {
  const CMatrix h = hermitian_part(a);
  const Eigen::Index n = h.rows();
  CMatrix out(n, n);
  out.diagonal().setConstant(h.diagonal().real().mean());
  for (Eigen::Index k = 1; k < n; ++k) {
    const cd mean = h.diagonal(k).sum() / static_cast<double>(n - k);
    out.diagonal(k).setConstant(mean);
    out.diagonal(-k).setConstant(std::conj(mean));
  }
  return out;
}

CMatrix project_block_toeplitz(const CMatrix& a, int outer, int inner) {
  if (outer < 1 || inner < 1 || a.rows() != static_cast<Eigen::Index>(outer) * inner ||
      a.cols() != a.rows())
    throw ContractError("project_block_toeplitz: matrix is not (outer*inner) square");
  const CMatrix h = hermitian_part(a);
  CMatrix out(a.rows(), a.cols());
  for (int k = 0; k < outer; ++k) {
    CMatrix mean = CMatrix::Zero(inner, inner);
    for (int p = 0; p + k < outer; ++p) mean += h.block(p * inner, (p + k) * inner, inner, inner);
    mean /= static_cast<double>(outer - k);
    const CMatrix block = (k == 0) ? project_toeplitz_hermitian(mean) : project_toeplitz(mean);
    for (int p = 0; p + k < outer; ++p) {
      out.block(p * inner, (p + k) * inner, inner, inner) = block;
      if (k > 0) out.block((p + k) * inner, p * inner, inner, inner) = block.adjoint();
    }
  }
  return out;
}

CMatrix project_psd(const CMatrix& a) {
  const CMatrix h = hermitian_part(a);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
  if (eig.info() != Eigen::Success) throw NumericalError("project_psd: eigensolver failed");
  const RVector clipped = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().adjoint();
}

double min_eigenvalue(const CMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(hermitian), Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericalError("min_eigenvalue: eigensolver failed");
  return eig.eigenvalues().minCoeff();
}

}  // namespace risdoa
