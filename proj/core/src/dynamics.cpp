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

#include "qfluct/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qfluct/errors.hpp"
#include "qfluct/states.hpp"

namespace qfluct {

namespace {

constexpr double kConstructionCommutatorTolerance = 1e-12;

}  // namespace

ExchangeCoupling build_exchange(double j_hz, double nu0) {
  if (!(j_hz > 0.0) || !std::isfinite(j_hz)) {
    throw InvalidParameter("coupling J must be positive and finite");
  }
  const double omega = std::numbers::pi * j_hz / 2.0;
  ExchangeCoupling c;
  c.j_hz = j_hz;
  // |01> has index 1 and |10> index 2.
  c.h_int(2, 1) = Complex(0.0, omega);   // s_A^+ s_B^- = |10><01|
  c.h_int(1, 2) = Complex(0.0, -omega);  // s_A^- s_B^+ = |01><10|

  const QubitHamiltonian ha(Subsystem::kA, nu0);
  const QubitHamiltonian hb(Subsystem::kB, nu0);
  const double norm = max_abs(commutator(c.h_int, total_local_hamiltonian(ha, hb)));
  if (norm > kConstructionCommutatorTolerance) throw EnergyConservationViolated(norm);
  return c;
}

TimeGrid TimeGrid::uniform(double t_max_seconds, std::size_t n) {
  if (n < 1) throw InvalidParameter("time grid needs at least one point");
  if (n == 1) return TimeGrid({0.0});
  if (!(t_max_seconds > 0.0) || !std::isfinite(t_max_seconds)) {
    throw InvalidParameter("t_max must be positive");
  }
  std::vector<double> times(n);
  for (std::size_t i = 0; i < n; ++i) {
    times[i] = t_max_seconds * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return TimeGrid(std::move(times));
}

TimeGrid TimeGrid::from_times(std::vector<double> times_seconds) {
  if (times_seconds.empty()) throw InvalidParameter("time grid is empty");
  if (times_seconds.front() != 0.0) throw InvalidParameter("time grid must start at 0");
  for (std::size_t i = 1; i < times_seconds.size(); ++i) {
    if (!(times_seconds[i] > times_seconds[i - 1]) || !std::isfinite(times_seconds[i])) {
      throw InvalidParameter("time grid must be strictly increasing");
    }
  }
  return TimeGrid(std::move(times_seconds));
}

ComplexMatrix propagator_at(const ExchangeCoupling& coupling, double t_seconds) {
  if (!(t_seconds >= 0.0) || !std::isfinite(t_seconds)) {
    throw InvalidParameter("propagator time must be non-negative");
  }
  return propagator_from_hermitian(coupling.h_int, t_seconds, HbarUnits::kAngularFrequency);
}

std::vector<ComplexMatrix> propagators_on(const ExchangeCoupling& coupling, const TimeGrid& grid) {
  std::vector<ComplexMatrix> out;
  out.reserve(grid.size());
  for (const double t : grid.times()) out.push_back(propagator_at(coupling, t));
  return out;
}

ComplexMatrix evolve(const ComplexMatrix& rho0, const ComplexMatrix& u) {
  const ValidityVerdict verdict = validate_density_matrix(rho0);
  if (!verdict.valid()) {
    std::string msg = "cannot evolve an invalid state:";
    for (const Violation v : verdict.violations) msg += std::string(" ") + to_string(v);
    throw InvalidState(msg);
  }
  const double defect = unitarity_defect(u);
  if (defect > kHermitianTolerance) {
    throw NotUnitary("propagator is not unitary (defect " + std::to_string(defect) + ")");
  }
  return hermitian_part(u * rho0 * adjoint(u));
}

double commutator_norm(const ComplexMatrix& u, const ComplexMatrix& h) {
  return max_abs(commutator(u, h));
}

double certify_energy_conservation(const ComplexMatrix& u, const ComplexMatrix& h_total,
                                   double threshold) {
  const double norm = commutator_norm(u, h_total);
  if (!(norm <= threshold)) throw EnergyConservationViolated(norm);
  return norm;
}

}  // namespace qfluct
