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

#include "qfluct/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "qfluct/errors.hpp"
#include "qfluct/units.hpp"

namespace qfluct {

namespace {

using Flat = std::array<Complex, 16>;

struct SmallEig {
  std::array<double, 4> values{};
  Flat vectors{};  // column k is eigenvector k
};

Flat multiply(const Flat& a, const Flat& b, int n) {
  Flat out{};
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const Complex aik = a[i * n + k];
      if (aik == Complex{}) continue;
      for (int j = 0; j < n; ++j) out[i * n + j] += aik * b[k * n + j];
    }
  return out;
}

Flat adjoint_flat(const Flat& a, int n) {
  Flat out{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[j * n + i] = std::conj(a[i * n + j]);
  return out;
}

double off_diagonal_norm(const Flat& a, int n) {
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) sum += std::norm(a[i * n + j]);
  return std::sqrt(sum);
}

// Cyclic Jacobi for an n x n Hermitian matrix. Each rotation first removes
// the phase of a_pq with a diagonal unitary, then applies the real symmetric
// Jacobi rotation that annihilates it.
SmallEig jacobi(Flat a, int n) {
  double frob = 0.0;
  for (int i = 0; i < n * n; ++i) frob += std::norm(a[i]);
  const double threshold = 1e-14 * std::max(1.0, std::sqrt(frob));

  Flat v{};
  for (int i = 0; i < n; ++i) v[i * n + i] = 1.0;

  bool converged = false;
  for (int sweep = 0; sweep <= kMaxJacobiSweeps; ++sweep) {
    if (off_diagonal_norm(a, n) < threshold) {
      converged = true;
      break;
    }
    if (sweep == kMaxJacobiSweeps) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const Complex apq = a[p * n + q];
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const Complex phase = apq / mag;
        const double app = a[p * n + p].real();
        const double aqq = a[q * n + q].real();
        const double theta = (aqq - app) / (2.0 * mag);
        const double t =
            (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        Flat r{};
        for (int i = 0; i < n; ++i) r[i * n + i] = 1.0;
        r[p * n + p] = c;
        r[p * n + q] = s;
        r[q * n + p] = -s * std::conj(phase);
        r[q * n + q] = c * std::conj(phase);

        a = multiply(adjoint_flat(r, n), multiply(a, r, n), n);
        a[p * n + q] = 0.0;
        a[q * n + p] = 0.0;
        for (int i = 0; i < n; ++i) a[i * n + i] = a[i * n + i].real();
        v = multiply(v, r, n);
      }
    }
  }
  if (!converged) {
    throw NoConvergence("Jacobi eigensolver exceeded " + std::to_string(kMaxJacobiSweeps) +
                        " sweeps");
  }
  SmallEig out;
  for (int i = 0; i < n; ++i) out.values[i] = a[i * n + i].real();
  out.vectors = v;
  return out;
}

Flat to_flat(const ComplexMatrix& m) {
  Flat f{};
  const auto e = m.entries();
  std::copy(e.begin(), e.end(), f.begin());
  return f;
}

void fix_phase(ComplexVector& v) {
  for (const Complex x : v) {
    const double mag = std::abs(x);
    if (mag > kPhaseTolerance) {
      const Complex rot = std::conj(x) / mag;
      for (Complex& y : v) y *= rot;
      return;
    }
  }
}

bool lexicographically_greater(const ComplexVector& a, const ComplexVector& b) {
  constexpr double kTieTolerance = 1e-12;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a[k].real() - b[k].real()) > kTieTolerance) return a[k].real() > b[k].real();
    if (std::abs(a[k].imag() - b[k].imag()) > kTieTolerance) return a[k].imag() > b[k].imag();
  }
  return false;
}

void normalize(ComplexVector& v) {
  double n2 = 0.0;
  for (const Complex x : v) n2 += std::norm(x);
  const double inv = 1.0 / std::sqrt(n2);
  for (Complex& x : v) x *= inv;
}

// Modified Gram-Schmidt over vectors [first, last).
void reorthonormalize(std::vector<ComplexVector>& vs, std::size_t first, std::size_t last) {
  for (std::size_t i = first; i < last; ++i) {
    for (std::size_t j = first; j < i; ++j) {
      const Complex proj = inner(vs[j], vs[i]);
      for (std::size_t k = 0; k < vs[i].size(); ++k) vs[i][k] -= proj * vs[j][k];
    }
    normalize(vs[i]);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// ComplexMatrix

ComplexMatrix::ComplexMatrix(int dim) : dim_(dim) {
  if (dim != 2 && dim != 4) {
    throw InvalidParameter("matrix dimension must be 2 or 4, got " + std::to_string(dim));
  }
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : ComplexMatrix(static_cast<int>(rows.size())) {
  int r = 0;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != dim_) throw InvalidParameter("ragged matrix literal");
    int c = 0;
    for (const Complex x : row) (*this)(r, c++) = x;
    ++r;
  }
}

ComplexMatrix ComplexMatrix::identity(int dim) {
  ComplexMatrix m(dim);
  for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> entries) {
  ComplexMatrix m(static_cast<int>(entries.size()));
  for (int i = 0; i < m.dim(); ++i) m(i, i) = entries[i];
  return m;
}

ComplexMatrix ComplexMatrix::outer(const ComplexVector& u, const ComplexVector& v) {
  ComplexMatrix m(static_cast<int>(u.size()));
  if (v.size() != u.size()) throw InvalidParameter("outer product of vectors of unequal length");
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) m(i, j) = u[i] * std::conj(v[j]);
  return m;
}

bool ComplexMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.begin() + dim_ * dim_, [](Complex x) {
    return std::isfinite(x.real()) && std::isfinite(x.imag());
  });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
  if (rhs.dim_ != dim_) throw InvalidParameter("dimension mismatch in matrix sum");
  for (int i = 0; i < dim_ * dim_; ++i) data_[i] += rhs.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& rhs) {
  if (rhs.dim_ != dim_) throw InvalidParameter("dimension mismatch in matrix difference");
  for (int i = 0; i < dim_ * dim_; ++i) data_[i] -= rhs.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) noexcept {
  for (int i = 0; i < dim_ * dim_; ++i) data_[i] *= scale;
  return *this;
}

bool operator==(const ComplexMatrix& a, const ComplexMatrix& b) noexcept {
  if (a.dim_ != b.dim_) return false;
  return std::equal(a.data_.begin(), a.data_.begin() + a.dim_ * a.dim_, b.data_.begin());
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw InvalidParameter("dimension mismatch in matrix product");
  ComplexMatrix out(a.dim());
  const int n = a.dim();
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (int j = 0; j < n; ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

ComplexMatrix operator*(Complex s, ComplexMatrix m) { return m *= s; }

ComplexVector operator*(const ComplexMatrix& m, const ComplexVector& v) {
  if (static_cast<int>(v.size()) != m.dim()) throw InvalidParameter("dimension mismatch in M*v");
  ComplexVector out(v.size());
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) out[i] += m(i, j) * v[j];
  return out;
}

ComplexMatrix adjoint(const ComplexMatrix& m) {
  ComplexMatrix out(m.dim());
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) out(j, i) = std::conj(m(i, j));
  return out;
}

Complex trace(const ComplexMatrix& m) {
  Complex t{};
  for (int i = 0; i < m.dim(); ++i) t += m(i, i);
  return t;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != 2 || b.dim() != 2) throw InvalidParameter("kron expects two 2x2 matrices");
  ComplexMatrix out(4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
  return out;
}

ComplexVector kron(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out;
  out.reserve(a.size() * b.size());
  for (const Complex x : a)
    for (const Complex y : b) out.push_back(x * y);
  return out;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b - b * a; }

ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  ComplexMatrix out(m.dim());
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) out(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
  return out;
}

double max_abs(const ComplexMatrix& m) noexcept {
  double best = 0.0;
  for (const Complex x : m.entries()) best = std::max(best, std::abs(x));
  return best;
}

double frobenius_norm(const ComplexMatrix& m) noexcept {
  double sum = 0.0;
  for (const Complex x : m.entries()) sum += std::norm(x);
  return std::sqrt(sum);
}

double hermiticity_defect(const ComplexMatrix& m) noexcept {
  double best = 0.0;
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) best = std::max(best, std::abs(m(i, j) - std::conj(m(j, i))));
  return best;
}

double unitarity_defect(const ComplexMatrix& u) {
  return max_abs(adjoint(u) * u - ComplexMatrix::identity(u.dim()));
}

Complex inner(const ComplexVector& u, const ComplexVector& v) {
  Complex s{};
  for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
  return s;
}

Complex expectation(const ComplexVector& u, const ComplexMatrix& m, const ComplexVector& v) {
  return inner(u, m * v);
}

// ---------------------------------------------------------------------------
// Spectral decomposition

ComplexMatrix SpectralEnsemble::reconstruct() const {
  ComplexMatrix out(static_cast<int>(size()));
  for (std::size_t k = 0; k < size(); ++k) {
    out += Complex(eigenvalues[k]) * ComplexMatrix::outer(eigenvectors[k], eigenvectors[k]);
  }
  return out;
}

SpectralEnsemble hermitian_eig(const ComplexMatrix& m) {
  const double defect = hermiticity_defect(m);
  if (defect > kHermitianTolerance) throw NotHermitian(defect);
  if (!m.all_finite()) throw InvalidParameter("matrix has non-finite entries");

  const int n = m.dim();
  const SmallEig raw = jacobi(to_flat(hermitian_part(m)), n);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return raw.values[i] > raw.values[j]; });

  SpectralEnsemble out;
  for (const int k : order) {
    out.eigenvalues.push_back(raw.values[k]);
    ComplexVector v(n);
    for (int i = 0; i < n; ++i) v[i] = raw.vectors[i * n + k];
    fix_phase(v);
    out.eigenvectors.push_back(std::move(v));
  }

  std::size_t first = 0;
  while (first < out.size()) {
    std::size_t last = first + 1;
    while (last < out.size() &&
           out.eigenvalues[last - 1] - out.eigenvalues[last] < kDegeneracyTolerance) {
      ++last;
    }
    if (last - first > 1) {
      out.degenerate = true;
      reorthonormalize(out.eigenvectors, first, last);
      for (std::size_t k = first; k < last; ++k) fix_phase(out.eigenvectors[k]);
      std::sort(out.eigenvectors.begin() + static_cast<std::ptrdiff_t>(first),
                out.eigenvectors.begin() + static_cast<std::ptrdiff_t>(last),
                lexicographically_greater);
    }
    first = last;
  }
  return out;
}

ComplexMatrix propagator_from_hermitian(const ComplexMatrix& h, double t_seconds,
                                        HbarUnits units) {
  const SpectralEnsemble eig = hermitian_eig(h);
  const double hbar = units == HbarUnits::kPeV ? kHbarPeVSeconds : 1.0;
  ComplexMatrix u(h.dim());
  for (std::size_t k = 0; k < eig.size(); ++k) {
    const Complex phase = std::polar(1.0, -eig.eigenvalues[k] * t_seconds / hbar);
    u += phase * ComplexMatrix::outer(eig.eigenvectors[k], eig.eigenvectors[k]);
  }
  return u;
}

ComplexMatrix partial_trace(const ComplexMatrix& rho, Subsystem keep) {
  if (rho.dim() != 4) throw InvalidState("partial trace needs a 4x4 state");
  const double defect = hermiticity_defect(rho);
  if (defect > kHermitianTolerance) {
    throw InvalidState("partial trace of a non-Hermitian matrix (defect " +
                       std::to_string(defect) + ")");
  }
  const double tr_defect = std::abs(trace(rho) - 1.0);
  if (tr_defect > kHermitianTolerance) {
    throw InvalidState("partial trace of a matrix with trace != 1 (defect " +
                       std::to_string(tr_defect) + ")");
  }
  ComplexMatrix out(2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        out(i, j) += keep == Subsystem::kA ? rho(2 * i + k, 2 * j + k) : rho(2 * k + i, 2 * k + j);
      }
  return out;
}

const char* to_string(Violation v) noexcept {
  switch (v) {
    case Violation::kNonHermitian:
      return "non-Hermitian";
    case Violation::kTraceNotOne:
      return "trace != 1";
    case Violation::kNegativeEigenvalue:
      return "negative eigenvalue";
  }
  return "unknown";
}

ValidityVerdict validate_density_matrix(const ComplexMatrix& m, double tol_psd) {
  ValidityVerdict verdict;
  verdict.hermiticity_defect = hermiticity_defect(m);
  verdict.trace_defect = std::abs(trace(m) - 1.0);
  if (!m.all_finite()) {
    verdict.violations = {Violation::kNonHermitian, Violation::kTraceNotOne,
                          Violation::kNegativeEigenvalue};
    verdict.min_eigenvalue = -std::numeric_limits<double>::infinity();
    return verdict;
  }
  if (verdict.hermiticity_defect > kHermitianTolerance) {
    verdict.violations.push_back(Violation::kNonHermitian);
  }
  if (verdict.trace_defect > kHermitianTolerance) {
    verdict.violations.push_back(Violation::kTraceNotOne);
  }
  const SmallEig eig = jacobi(to_flat(hermitian_part(m)), m.dim());
  verdict.min_eigenvalue = *std::min_element(eig.values.begin(), eig.values.begin() + m.dim());
  if (verdict.min_eigenvalue < -tol_psd) {
    verdict.violations.push_back(Violation::kNegativeEigenvalue);
  }
  return verdict;
}

namespace detail {

std::vector<Complex> polar_unitary(std::span<const Complex> m, int n) {
  Flat a{};
  std::copy(m.begin(), m.end(), a.begin());
  const Flat gram = multiply(adjoint_flat(a, n), a, n);
  const SmallEig eig = jacobi(gram, n);
  const double largest = *std::max_element(eig.values.begin(), eig.values.begin() + n);
  Flat inv_sqrt{};
  for (int k = 0; k < n; ++k) {
    const double lambda = eig.values[k];
    if (!(lambda > 1e-20 * std::max(1.0, largest))) return {};
    const double w = 1.0 / std::sqrt(lambda);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        inv_sqrt[i * n + j] += w * eig.vectors[i * n + k] * std::conj(eig.vectors[j * n + k]);
  }
  const Flat q = multiply(a, inv_sqrt, n);
  return {q.begin(), q.begin() + n * n};
}

}  // namespace detail

}  // namespace qfluct
