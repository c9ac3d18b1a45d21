// Copyright 2026 The qldp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qldp/errors.hpp"
#include "qldp/rng.hpp"

namespace qldp {

using Complex = std::complex<double>;
using CMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

// Numerical tolerances shared across the toolkit.
inline constexpr double kHermitianTol = 1e-9;   // max |A - A^dag| accepted
inline constexpr double kTraceTol = 1e-9;       // |Tr(rho) - 1|
inline constexpr double kZeroProbTol = 1e-12;   // probability / eigenvalue treated as zero
inline constexpr Index kDefaultDimCap = 4096;   // total materialized dimension

/// Max-norm (largest absolute entry) of a complex matrix.
double max_abs(const CMatrix& m);

/// Largest deviation from Hermitian symmetry, max |A(i,j) - conj(A(j,i))|.
double hermitian_defect(const CMatrix& m);

/// Symmetrizes (A + A^dag)/2 when the defect is within `tol`; rejects worse
/// violations instead of masking bad data.
CMatrix hermitized(const CMatrix& m, double tol = kHermitianTol);

/// Re Tr(a * b), computed without forming the product matrix.
double trace_product_real(const CMatrix& a, const CMatrix& b);

/// Dense square complex matrix; the building block for states and effects.
class Operator {
 public:
  explicit Operator(CMatrix entries);

  static Operator identity(Index dim);
  static Operator zero(Index dim);

  Index dim() const { return mat_.rows(); }
  const CMatrix& mat() const { return mat_; }

  bool is_hermitian(double tol = kHermitianTol) const {
    return hermitian_defect(mat_) <= tol;
  }

 private:
  CMatrix mat_;
};

/// Positive semidefinite unit-trace operator (a quantum state, possibly
/// mixed). The validating constructor certifies the invariants with a full
/// Hermitian eigendecomposition; internal constructions that are PSD by
/// algebra use the trusted path and skip re-validation.
class DensityMatrix {
 public:
  /// Validates: Hermitian within tolerance (benign defects symmetrized),
  /// trace within 1e-9 of 1, smallest eigenvalue >= -1e-9 * dim.
  explicit DensityMatrix(CMatrix entries,
                         std::optional<std::vector<int>> register_qubits =
                             std::nullopt);

  Index dim() const { return mat_.rows(); }
  const CMatrix& mat() const { return mat_; }

  /// Per-register qubit counts, when this state is a materialized product of
  /// qubit registers.
  const std::optional<std::vector<int>>& register_qubits() const {
    return register_qubits_;
  }

 private:
  struct Trusted {};
  DensityMatrix(CMatrix entries, std::optional<std::vector<int>> register_qubits,
                Trusted)
      : mat_(std::move(entries)), register_qubits_(std::move(register_qubits)) {}

  friend DensityMatrix pure_state_density(const CVector&);
  friend DensityMatrix computational_basis_density(int, std::string_view, Index);
  friend DensityMatrix basis_state_density(Index, Index);
  friend DensityMatrix random_density_matrix(Index, RngStream&);
  friend class ProductState;

  CMatrix mat_;
  std::optional<std::vector<int>> register_qubits_;
};

/// Ordered list of per-register states; the joint state is their tensor
/// product, which is only materialized on demand.
class ProductState {
 public:
  explicit ProductState(std::vector<DensityMatrix> registers);

  /// n registers sharing one underlying state copy (rho^(x)n).
  static ProductState copies(DensityMatrix base, std::size_t count);

  std::size_t num_registers() const { return registers_.size(); }
  const DensityMatrix& reg(std::size_t j) const;

  /// Stable identity of register j's backing state (shared across copies).
  const DensityMatrix* reg_ptr(std::size_t j) const;

  std::vector<Index> register_dims() const;

  /// Product of register dimensions; CapacityError past `dim_cap`.
  Index total_dim(Index dim_cap = kDefaultDimCap) const;

  DensityMatrix materialize(Index dim_cap = kDefaultDimCap) const;

 private:
  std::vector<std::shared_ptr<const DensityMatrix>> registers_;
};

/// Kronecker product; CapacityError when a.dim * b.dim exceeds `dim_cap`.
Operator tensor(const Operator& a, const Operator& b,
                Index dim_cap = kDefaultDimCap);

/// Outer product |psi><psi| of a unit vector (norm within 1e-9 of 1).
DensityMatrix pure_state_density(const CVector& amplitudes);

/// Rank-1 projector onto the named computational basis state, e.g. (2, "10").
DensityMatrix computational_basis_density(int num_qubits, std::string_view bits,
                                          Index dim_cap = kDefaultDimCap);

/// Rank-1 projector onto basis vector `which` of a `dim`-dimensional space.
DensityMatrix basis_state_density(Index dim, Index which);

/// H^(x)n: unitary, symmetric, self-inverse.
Operator walsh_hadamard(int num_qubits, Index dim_cap = kDefaultDimCap);

/// Ginibre construction G G^dag / Tr(G G^dag) with standard complex Gaussian
/// entries; always a valid density matrix.
DensityMatrix random_density_matrix(Index dim, RngStream& rng);

}  // namespace qldp
