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

#include "qfluct/states.hpp"

#include <cmath>

#include "qfluct/errors.hpp"
#include "qfluct/units.hpp"

namespace qfluct {

namespace {

constexpr double kAlphaSlack = 1e-12;

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InvalidParameter(std::string(name) + " must be positive and finite");
  }
}

}  // namespace

ThermalParameters ThermalParameters::from_inverse_temperatures(double beta_a_inv_pev,
                                                               double beta_b_inv_pev,
                                                               Complex alpha, double nu0,
                                                               double coupling_j) {
  require_positive(beta_a_inv_pev, "beta_A^-1");
  require_positive(beta_b_inv_pev, "beta_B^-1");
  ThermalParameters p;
  p.beta_a = 1.0 / beta_a_inv_pev;
  p.beta_b = 1.0 / beta_b_inv_pev;
  p.nu0 = nu0;
  p.coupling_j = coupling_j;
  p.alpha = alpha;
  return p;
}

double ThermalParameters::level_spacing() const noexcept { return kPlanckPeVSeconds * nu0; }

void ThermalParameters::validate() const {
  require_positive(beta_a, "beta_A");
  require_positive(beta_b, "beta_B");
  require_positive(nu0, "nu0");
  require_positive(coupling_j, "J");
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
    throw InvalidParameter("alpha must be finite");
  }
  const double bound = alpha_bound(beta_a, beta_b, nu0);
  if (std::abs(alpha) > bound + kAlphaSlack) throw AlphaOutOfBound(std::abs(alpha), bound);
}

ThermalParameters correlated_preset() {
  return ThermalParameters::from_inverse_temperatures(4.7, 3.3, {0.17, 0.03});
}

ThermalParameters uncorrelated_preset() {
  return ThermalParameters::from_inverse_temperatures(4.3, 3.7, {0.0, 0.0});
}

ThermalParameters preset_by_name(const std::string& name) {
  if (name == "correlated") return correlated_preset();
  if (name == "uncorrelated") return uncorrelated_preset();
  throw InvalidParameter("unknown preset '" + name + "' (expected correlated|uncorrelated)");
}

QubitHamiltonian::QubitHamiltonian(Subsystem which, double nu0)
    : which_(which), nu0_(nu0), gap_(kPlanckPeVSeconds * nu0) {
  require_positive(nu0, "nu0");
  const double diag[] = {0.0, gap_};
  matrix_ = ComplexMatrix::diagonal(diag);
}

ComplexMatrix gibbs_state(double beta, const QubitHamiltonian& h) {
  require_positive(beta, "beta");
  const double boltzmann = std::exp(-beta * h.gap());
  const double z = 1.0 + boltzmann;
  const double pops[] = {1.0 / z, boltzmann / z};
  return ComplexMatrix::diagonal(pops);
}

double alpha_bound(double beta_a, double beta_b, double nu0) {
  require_positive(beta_a, "beta_A");
  require_positive(beta_b, "beta_B");
  require_positive(nu0, "nu0");
  const double gap = kPlanckPeVSeconds * nu0;
  const double za = 1.0 + std::exp(-beta_a * gap);
  const double zb = 1.0 + std::exp(-beta_b * gap);
  return std::exp(-gap * (beta_a + beta_b) / 2.0) / (za * zb);
}

ComplexMatrix correlated_initial_state(const ThermalParameters& p) {
  p.validate();
  const QubitHamiltonian ha(Subsystem::kA, p.nu0);
  const QubitHamiltonian hb(Subsystem::kB, p.nu0);
  ComplexMatrix rho = kron(gibbs_state(p.beta_a, ha), gibbs_state(p.beta_b, hb));
  rho(1, 2) = p.alpha;
  rho(2, 1) = std::conj(p.alpha);
  return rho;
}

ComplexMatrix total_local_hamiltonian(const QubitHamiltonian& ha, const QubitHamiltonian& hb) {
  const ComplexMatrix id = ComplexMatrix::identity(2);
  return kron(ha.matrix(), id) + kron(id, hb.matrix());
}

EffectiveBeta effective_local_beta(const ComplexMatrix& rho_j, const QubitHamiltonian& h,
                                   double coherence_tol) {
  if (rho_j.dim() != 2) throw InvalidState("effective_local_beta needs a one-qubit state");
  const ValidityVerdict verdict = validate_density_matrix(rho_j);
  if (!verdict.valid()) throw InvalidState("effective_local_beta needs a valid density matrix");

  EffectiveBeta out;
  out.coherence = std::abs(rho_j(0, 1));
  if (out.coherence > coherence_tol) {
    out.status = EffectiveBeta::Status::kNotThermal;
    return out;
  }
  const double p0 = rho_j(0, 0).real();
  const double p1 = rho_j(1, 1).real();
  if (std::abs(p0 - p1) <= kDegeneracyTolerance) {
    out.status = EffectiveBeta::Status::kDegeneratePopulations;
    out.beta = 0.0;
    return out;
  }
  out.beta = std::log(p0 / p1) / h.gap();
  return out;
}

}  // namespace qfluct
