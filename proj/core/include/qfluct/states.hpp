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

/// \file states.hpp
/// Local qubit Hamiltonians, Gibbs states and the correlated two-qubit
/// initial state rho_A (x) rho_B + alpha |01><10| + alpha* |10><01|.

#ifndef QFLUCT_STATES_HPP
#define QFLUCT_STATES_HPP

#include <string>

#include "qfluct/linalg.hpp"

namespace qfluct {

/// Inverse temperatures, splitting, coupling and correlation amplitude.
struct ThermalParameters {
  double beta_a = 1.0 / 4.7;  ///< 1/peV
  double beta_b = 1.0 / 3.3;  ///< 1/peV
  double nu0 = 1000.0;        ///< Hz
  double coupling_j = 215.1;  ///< Hz
  Complex alpha{0.17, 0.03};

  static ThermalParameters from_inverse_temperatures(double beta_a_inv_pev,
                                                     double beta_b_inv_pev, Complex alpha,
                                                     double nu0 = 1000.0,
                                                     double coupling_j = 215.1);

  double delta_beta() const noexcept { return beta_a - beta_b; }
  /// h * nu0 in peV.
  double level_spacing() const noexcept;

  /// Throws InvalidParameter on non-positive rates and AlphaOutOfBound when
  /// |alpha| exceeds alpha_bound by more than 1e-12.
  void validate() const;

  friend bool operator==(const ThermalParameters&, const ThermalParameters&) = default;
};

/// Correlated run: beta_A^-1 = 4.7 peV, beta_B^-1 = 3.3 peV, alpha = 0.17 + 0.03i.
ThermalParameters correlated_preset();
/// Uncorrelated run: beta_A^-1 = 4.3 peV, beta_B^-1 = 3.7 peV, alpha = 0.
ThermalParameters uncorrelated_preset();
/// Looks a preset up by name ("correlated" or "uncorrelated").
ThermalParameters preset_by_name(const std::string& name);

/// H_j = h nu0 (1 - sigma_z) / 2 with sigma_z|0> = +|0>, so E(|0>) = 0 and
/// E(|1>) = h nu0.
class QubitHamiltonian {
 public:
  QubitHamiltonian(Subsystem which, double nu0);

  Subsystem which() const noexcept { return which_; }
  double nu0() const noexcept { return nu0_; }
  /// Energy of computational level 0 or 1, peV.
  double energy(int level) const noexcept { return level == 0 ? 0.0 : gap_; }
  double gap() const noexcept { return gap_; }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }

 private:
  Subsystem which_;
  double nu0_;
  double gap_;
  ComplexMatrix matrix_;
};

/// diag(1, exp(-beta h nu0)) / Z.
ComplexMatrix gibbs_state(double beta, const QubitHamiltonian& h);

/// exp[-h nu0 (beta_A + beta_B) / 2] / (Z_A Z_B): largest |alpha| keeping the
/// correlated state positive semidefinite.
double alpha_bound(double beta_a, double beta_b, double nu0);

/// Throws AlphaOutOfBound (or InvalidParameter) when p is not admissible.
ComplexMatrix correlated_initial_state(const ThermalParameters& p);

/// H_A + H_B on the two-qubit space, peV.
ComplexMatrix total_local_hamiltonian(const QubitHamiltonian& ha, const QubitHamiltonian& hb);

struct EffectiveBeta {
  enum class Status { kThermal, kNotThermal, kDegeneratePopulations };
  Status status = Status::kThermal;
  double beta = 0.0;       ///< 1/peV; 0 when populations are degenerate
  double coherence = 0.0;  ///< |<0|rho|1>|
};

/// Reads an inverse temperature off a one-qubit state that is diagonal in
/// the energy basis: beta = ln(p0 / p1) / (h nu0).
EffectiveBeta effective_local_beta(const ComplexMatrix& rho_j, const QubitHamiltonian& h,
                                   double coherence_tol = 1e-10);

}  // namespace qfluct

#endif  // QFLUCT_STATES_HPP
