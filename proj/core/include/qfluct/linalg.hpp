// Copyright 2026 The qfluct Authors
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

/// \file linalg.hpp
/// Dense complex linear algebra for one- and two-qubit operators.
///
/// Everything here works on 2x2 or 4x4 matrices. The basis of the two-qubit
/// space is |00>, |01>, |10>, |11> with qubit A as the left tensor factor,
/// so the row index of |ab> is 2a + b.

#ifndef QFLUCT_LINALG_HPP
#define QFLUCT_LINALG_HPP

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace qfluct {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Hermiticity threshold used by every precondition check (max-norm).
inline constexpr double kHermitianTolerance = 1e-10;
/// Default PSD tolerance for simulated states.
inline constexpr double kDefaultTolPsd = 1e-10;
/// Eigenvalues closer than this belong to the same degenerate cluster.
inline constexpr double kDegeneracyTolerance = 1e-10;
/// Components below this modulus are skipped when fixing eigenvector phases.
inline constexpr double kPhaseTolerance = 1e-12;
/// Jacobi sweep budget.
inline constexpr int kMaxJacobiSweeps = 100;

/// Square complex matrix of dimension 2 or 4, stored row-major.
class ComplexMatrix {
 public:
  /// 2x2 zero matrix.
  ComplexMatrix() : ComplexMatrix(2) {}
  /// Zero matrix of the given dimension; throws InvalidParameter unless dim is 2 or 4.
  explicit ComplexMatrix(int dim);
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static ComplexMatrix identity(int dim);
  static ComplexMatrix diagonal(std::span<const double> entries);
  static ComplexMatrix outer(const ComplexVector& u, const ComplexVector& v);

  int dim() const noexcept { return dim_; }
  Complex& operator()(int row, int col) noexcept { return data_[row * dim_ + col]; }
  Complex operator()(int row, int col) const noexcept { return data_[row * dim_ + col]; }
  std::span<const Complex> entries() const noexcept {
    return {data_.data(), static_cast<std::size_t>(dim_ * dim_)};
  }
  bool all_finite() const noexcept;

  ComplexMatrix& operator+=(const ComplexMatrix& rhs);
  ComplexMatrix& operator-=(const ComplexMatrix& rhs);
  ComplexMatrix& operator*=(Complex scale) noexcept;

  friend bool operator==(const ComplexMatrix& a, const ComplexMatrix& b) noexcept;

 private:
  int dim_;
  std::array<Complex, 16> data_{};
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex s, ComplexMatrix m);
ComplexVector operator*(const ComplexMatrix& m, const ComplexVector& v);

ComplexMatrix adjoint(const ComplexMatrix& m);
Complex trace(const ComplexMatrix& m);
/// Kronecker product of two 2x2 matrices, left factor = qubit A.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector kron(const ComplexVector& a, const ComplexVector& b);
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
/// (M + M^dag) / 2.
ComplexMatrix hermitian_part(const ComplexMatrix& m);

double max_abs(const ComplexMatrix& m) noexcept;
double frobenius_norm(const ComplexMatrix& m) noexcept;
/// max |M - M^dag|.
double hermiticity_defect(const ComplexMatrix& m) noexcept;
/// max |U^dag U - 1|.
double unitarity_defect(const ComplexMatrix& u);

/// <u|v> (conjugate-linear in u).
Complex inner(const ComplexVector& u, const ComplexVector& v);
/// <u|M|v>.
Complex expectation(const ComplexVector& u, const ComplexMatrix& m, const ComplexVector& v);

/// Eigenvalues and eigenvectors of a Hermitian matrix.
///
/// Eigenvalues are sorted in descending order. The first component of each
/// eigenvector whose modulus exceeds kPhaseTolerance is real and positive.
/// Inside a degenerate cluster the vectors are re-orthonormalized and ordered
/// lexicographically by their phase-fixed components, so the output is fully
/// deterministic.
struct SpectralEnsemble {
  std::vector<double> eigenvalues;
  std::vector<ComplexVector> eigenvectors;
  /// True if at least one degenerate cluster was found.
  bool degenerate = false;

  std::size_t size() const noexcept { return eigenvalues.size(); }
  /// Sum_k lambda_k |v_k><v_k|.
  ComplexMatrix reconstruct() const;
};

/// Cyclic complex Jacobi eigensolver.
///
/// Throws NotHermitian if ||M - M^dag||_max > kHermitianTolerance and
/// NoConvergence if the off-diagonal norm is still above 1e-14 (relative to
/// max(1, ||M||_F)) after kMaxJacobiSweeps sweeps.
SpectralEnsemble hermitian_eig(const ComplexMatrix& m);

/// Unit convention for propagator_from_hermitian.
enum class HbarUnits {
  /// H is expressed in angular-frequency units (rad/s), i.e. hbar = 1.
  kAngularFrequency,
  /// H is expressed in peV; hbar = h / (2 pi) in peV s.
  kPeV,
};

/// exp(-i t H / hbar) through the eigendecomposition of H.
ComplexMatrix propagator_from_hermitian(const ComplexMatrix& h, double t_seconds, HbarUnits units);

enum class Subsystem { kA, kB };

/// Reduced 2x2 state of one qubit. Throws InvalidState unless rho is a 4x4
/// Hermitian matrix with unit trace (tolerance kHermitianTolerance).
ComplexMatrix partial_trace(const ComplexMatrix& rho, Subsystem keep);

enum class Violation { kNonHermitian, kTraceNotOne, kNegativeEigenvalue };

const char* to_string(Violation v) noexcept;

struct ValidityVerdict {
  std::vector<Violation> violations;
  double hermiticity_defect = 0.0;
  double trace_defect = 0.0;
  double min_eigenvalue = 0.0;

  bool valid() const noexcept { return violations.empty(); }
};

/// Never throws; an empty violation list means the matrix is a density matrix.
ValidityVerdict validate_density_matrix(const ComplexMatrix& m, double tol_psd = kDefaultTolPsd);

namespace detail {

/// Unitary factor Q of the polar decomposition M = Q P for an n x n matrix
/// (n <= 4, row-major). Returns nullopt-equivalent empty vector when M is
/// numerically singular.
std::vector<Complex> polar_unitary(std::span<const Complex> m, int n);

}  // namespace detail

}  // namespace qfluct

#endif  // QFLUCT_LINALG_HPP
