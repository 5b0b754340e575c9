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

/// \file dynamics.hpp
/// Exchange interaction, propagators on a time grid and unitary evolution.

#ifndef QFLUCT_DYNAMICS_HPP
#define QFLUCT_DYNAMICS_HPP

#include <cstddef>
#include <vector>

#include "qfluct/linalg.hpp"

namespace qfluct {

/// Maximum commutator norm tolerated by certify_energy_conservation.
inline constexpr double kEnergyConservationTolerance = 1e-10;

/// H_int = i (pi hbar / 2) J (s_A^+ s_B^- - s_A^- s_B^+), stored with hbar = 1
/// (rad/s). s^+ = |1><0| raises the qubit energy, so on span{|01>, |10>} the
/// propagator is the real rotation [[cos th, -sin th], [sin th, cos th]] with
/// th = pi J t / 2.
struct ExchangeCoupling {
  double j_hz = 0.0;
  ComplexMatrix h_int{4};
};

/// Builds the coupling and checks that it commutes with H_A + H_B to 1e-12.
ExchangeCoupling build_exchange(double j_hz, double nu0 = 1000.0);

/// Strictly increasing interaction times starting at 0, in seconds.
class TimeGrid {
 public:
  /// n points uniformly spaced on [0, t_max].
  static TimeGrid uniform(double t_max_seconds, std::size_t n);
  /// Explicit list; must be strictly increasing and start at 0.
  static TimeGrid from_times(std::vector<double> times_seconds);
  /// 22 points on [0, 2.32 ms].
  static TimeGrid default_grid() { return uniform(2.32e-3, 22); }

  const std::vector<double>& times() const noexcept { return times_; }
  std::size_t size() const noexcept { return times_.size(); }
  double operator[](std::size_t i) const noexcept { return times_[i]; }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  explicit TimeGrid(std::vector<double> times) : times_(std::move(times)) {}
  std::vector<double> times_;
};

/// exp(-i t H_int / hbar). Throws InvalidParameter for t < 0.
ComplexMatrix propagator_at(const ExchangeCoupling& coupling, double t_seconds);

/// One propagator per grid point, computed once.
std::vector<ComplexMatrix> propagators_on(const ExchangeCoupling& coupling, const TimeGrid& grid);

/// U rho U^dag, returned exactly Hermitian. Throws InvalidState for an invalid
/// rho and NotUnitary when ||U^dag U - 1||_max > 1e-10.
ComplexMatrix evolve(const ComplexMatrix& rho0, const ComplexMatrix& u);

/// max |U H - H U|.
double commutator_norm(const ComplexMatrix& u, const ComplexMatrix& h);

/// Returns commutator_norm(U, H_total); throws EnergyConservationViolated
/// when it exceeds the threshold.
double certify_energy_conservation(const ComplexMatrix& u, const ComplexMatrix& h_total,
                                   double threshold = kEnergyConservationTolerance);

}  // namespace qfluct

#endif  // QFLUCT_DYNAMICS_HPP
