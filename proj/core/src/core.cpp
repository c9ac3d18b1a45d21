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

#include "qldp/core.hpp"

#include <bit>
#include <cmath>
#include <string>
#include <utility>

#include <unsupported/Eigen/KroneckerProduct>

namespace qldp {

namespace {

void require_finite(const CMatrix& m, const char* what) {
  if (!m.allFinite()) {
    throw ValidationError(std::string(what) + ": non-finite entries");
  }
}

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw ValidationError(std::string(what) + ": matrix must be square and nonempty");
  }
}

bool is_power_of_two(Index n) {
  return n > 0 && (n & (n - 1)) == 0;
}

}  // namespace

double max_abs(const CMatrix& m) {
  return m.cwiseAbs().maxCoeff();
}

double hermitian_defect(const CMatrix& m) {
  return max_abs(m - m.adjoint());
}

CMatrix hermitized(const CMatrix& m, double tol) {
  const double defect = hermitian_defect(m);
  if (defect > tol) {
    throw ValidationError("matrix violates Hermitian symmetry by " +
                          std::to_string(defect));
  }
  return (m + m.adjoint()) / 2.0;
}

double trace_product_real(const CMatrix& a, const CMatrix& b) {
  // Tr(a b) = sum_ij a(i,j) b(j,i)
  return a.cwiseProduct(b.transpose()).sum().real();
}

Operator::Operator(CMatrix entries) : mat_(std::move(entries)) {
  require_square(mat_, "Operator");
  require_finite(mat_, "Operator");
}

Operator Operator::identity(Index dim) {
  return Operator(CMatrix::Identity(dim, dim));
}

Operator Operator::zero(Index dim) {
  return Operator(CMatrix::Zero(dim, dim));
}

DensityMatrix::DensityMatrix(CMatrix entries,
                             std::optional<std::vector<int>> register_qubits)
    : register_qubits_(std::move(register_qubits)) {
  require_square(entries, "DensityMatrix");
  require_finite(entries, "DensityMatrix");
  mat_ = hermitized(entries, kHermitianTol);

  const double trace = mat_.trace().real();
  if (std::abs(trace - 1.0) > kTraceTol) {
    throw ValidationError("DensityMatrix: trace " + std::to_string(trace) +
                          " not within 1e-9 of 1");
  }

  Eigen::SelfAdjointEigenSolver<CMatrix> solver(mat_, Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues().minCoeff();
  const double floor = -1e-9 * static_cast<double>(mat_.rows());
  if (min_eig < floor) {
    throw ValidationError("DensityMatrix: smallest eigenvalue " +
                          std::to_string(min_eig) + " below PSD tolerance");
  }
}

ProductState::ProductState(std::vector<DensityMatrix> registers) {
  if (registers.empty()) {
    throw ValidationError("ProductState: at least one register required");
  }
  registers_.reserve(registers.size());
  for (auto& reg : registers) {
    registers_.push_back(std::make_shared<const DensityMatrix>(std::move(reg)));
  }
}

ProductState ProductState::copies(DensityMatrix base, std::size_t count) {
  if (count == 0) {
    throw ValidationError("ProductState::copies: count must be positive");
  }
  ProductState result(std::vector<DensityMatrix>{std::move(base)});
  auto shared = result.registers_.front();
  result.registers_.assign(count, shared);
  return result;
}

const DensityMatrix& ProductState::reg(std::size_t j) const {
  if (j >= registers_.size()) {
    throw ValidationError("ProductState: register index out of range");
  }
  return *registers_[j];
}

const DensityMatrix* ProductState::reg_ptr(std::size_t j) const {
  if (j >= registers_.size()) {
    throw ValidationError("ProductState: register index out of range");
  }
  return registers_[j].get();
}

std::vector<Index> ProductState::register_dims() const {
  std::vector<Index> dims;
  dims.reserve(registers_.size());
  for (const auto& reg : registers_) {
    dims.push_back(reg->dim());
  }
  return dims;
}

Index ProductState::total_dim(Index dim_cap) const {
  Index total = 1;
  for (const auto& reg : registers_) {
    total *= reg->dim();
    if (total > dim_cap) {
      throw CapacityError("ProductState: total dimension exceeds cap " +
                          std::to_string(dim_cap));
    }
  }
  return total;
}

DensityMatrix ProductState::materialize(Index dim_cap) const {
  total_dim(dim_cap);  // cap check before any allocation
  CMatrix joint = registers_.front()->mat();
  for (std::size_t j = 1; j < registers_.size(); ++j) {
    joint = Eigen::kroneckerProduct(joint, registers_[j]->mat()).eval();
  }

  std::optional<std::vector<int>> qubits;
  bool all_qubit_shaped = true;
  std::vector<int> counts;
  for (const auto& reg : registers_) {
    if (!is_power_of_two(reg->dim())) {
      all_qubit_shaped = false;
      break;
    }
    counts.push_back(std::bit_width(static_cast<std::uint64_t>(reg->dim())) - 1);
  }
  if (all_qubit_shaped) {
    qubits = std::move(counts);
  }

  return DensityMatrix(std::move(joint), std::move(qubits),
                       DensityMatrix::Trusted{});
}

Operator tensor(const Operator& a, const Operator& b, Index dim_cap) {
  const Index dim = a.dim() * b.dim();
  if (dim > dim_cap) {
    throw CapacityError("tensor: result dimension " + std::to_string(dim) +
                        " exceeds cap " + std::to_string(dim_cap));
  }
  return Operator(Eigen::kroneckerProduct(a.mat(), b.mat()).eval());
}

DensityMatrix pure_state_density(const CVector& amplitudes) {
  if (amplitudes.size() < 1) {
    throw ValidationError("pure_state_density: empty amplitude vector");
  }
  if (!amplitudes.allFinite()) {
    throw ValidationError("pure_state_density: non-finite amplitudes");
  }
  const double norm = amplitudes.norm();
  if (std::abs(norm - 1.0) > kTraceTol) {
    throw ValidationError("pure_state_density: norm " + std::to_string(norm) +
                          " not within 1e-9 of 1");
  }
  CMatrix outer = (amplitudes * amplitudes.adjoint()) / (norm * norm);
  return DensityMatrix(std::move(outer), std::nullopt, DensityMatrix::Trusted{});
}

DensityMatrix computational_basis_density(int num_qubits, std::string_view bits,
                                          Index dim_cap) {
  if (num_qubits < 1 || num_qubits >= 63) {
    throw ValidationError("computational_basis_density: bad qubit count");
  }
  if (static_cast<int>(bits.size()) != num_qubits) {
    throw ValidationError("computational_basis_density: bitstring length " +
                          std::to_string(bits.size()) + " != qubit count " +
                          std::to_string(num_qubits));
  }
  const Index dim = Index{1} << num_qubits;
  if (dim > dim_cap) {
    throw CapacityError("computational_basis_density: dimension exceeds cap");
  }
  Index index = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') {
      throw ValidationError("computational_basis_density: bitstring must be 0/1");
    }
    index = (index << 1) | (c == '1' ? 1 : 0);
  }
  return basis_state_density(dim, index);
}

DensityMatrix basis_state_density(Index dim, Index which) {
  if (dim < 1 || which < 0 || which >= dim) {
    throw ValidationError("basis_state_density: index out of range");
  }
  CMatrix m = CMatrix::Zero(dim, dim);
  m(which, which) = 1.0;
  return DensityMatrix(std::move(m), std::nullopt, DensityMatrix::Trusted{});
}

Operator walsh_hadamard(int num_qubits, Index dim_cap) {
  if (num_qubits < 1 || num_qubits >= 63) {
    throw ValidationError("walsh_hadamard: bad qubit count");
  }
  const Index dim = Index{1} << num_qubits;
  if (dim > dim_cap) {
    throw CapacityError("walsh_hadamard: dimension " + std::to_string(dim) +
                        " exceeds cap " + std::to_string(dim_cap));
  }
  const double scale = std::pow(2.0, -0.5 * num_qubits);
  CMatrix m(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    for (Index j = 0; j < dim; ++j) {
      const int parity =
          std::popcount(static_cast<std::uint64_t>(i & j)) & 1;
      m(i, j) = parity ? -scale : scale;
    }
  }
  return Operator(std::move(m));
}

DensityMatrix random_density_matrix(Index dim, RngStream& rng) {
  if (dim < 1) {
    throw ValidationError("random_density_matrix: dimension must be positive");
  }
  CMatrix g(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    for (Index j = 0; j < dim; ++j) {
      g(i, j) = Complex(rng.next_gaussian(), rng.next_gaussian());
    }
  }
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = (rho + rho.adjoint()) / 2.0;  // scrub round-off asymmetry
  return DensityMatrix(std::move(rho), std::nullopt, DensityMatrix::Trusted{});
}

}  // namespace qldp
