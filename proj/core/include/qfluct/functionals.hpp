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

/// \file functionals.hpp
/// Stochastic thermodynamic functionals evaluated on conditional paths, heat
/// distributions, and the detailed / integral fluctuation relations.
///
/// Per path (all logarithms natural, l = 0 initial, l = 1 final):
///
///   Q_A     = E_{a1} - E_{a0}
///   I_0     = ln P_s  / (P_{a0} P_{b0})        J_0 = ln P_{a0b0} / (P_{a0} P_{b0})
///   I_1     = ln P_s* / (P(a1) P(b1))          J_1 = ln P_{a1b1} / (P(a1) P(b1))
///   C_l     = I_l - J_l
///   Sigma_A = ln P(a1) / <a1|rho_A^0|a1>       (same for B)
///   gamma   = ln forward overlaps / reverse overlaps
///   sigma   = -Q_A dbeta - I_0 + I_1 + Sigma_A + Sigma_B - gamma
///
/// with P_{a0b0} = <a0b0|rho0|a0b0>, P_{a1b1} = <a1b1|rho_t|a1b1> and
/// P(a1) = sum_b1 P_{a1b1}. Every integral average is taken over the forward
/// path measure.

#ifndef QFLUCT_FUNCTIONALS_HPP
#define QFLUCT_FUNCTIONALS_HPP

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qfluct/linalg.hpp"
#include "qfluct/states.hpp"
#include "qfluct/trajectories.hpp"

namespace qfluct {

/// Default distance (peV) within which a path heat is snapped onto the
/// support {-h nu0, 0, +h nu0}.
inline constexpr double kDefaultHeatSnapTolerance = 1e-6;
/// Paths lighter than this are excluded from the logarithmic functionals.
inline constexpr double kZeroMassThreshold = 1e-14;

/// Which state the joint probability P_{a1 b1} is read from.
enum class JointProbabilityState {
  /// l = 0 on rho0, l = 1 on rho_t (default; keeps I_1 = J_1 + C_1).
  kTimeResolved,
  /// Both on rho0, with P_s in C_1 (comparison variant).
  kLiteralInitial,
};

struct AnalysisOptions {
  JointProbabilityState joint_state = JointProbabilityState::kTimeResolved;
  double heat_snap_tolerance = kDefaultHeatSnapTolerance;
  AssignmentMode mode = AssignmentMode::kSimulation;
};

struct HeatValue {
  double raw = 0.0;      ///< E_{a1} - E_{a0}, peV
  double snapped = 0.0;  ///< nearest support point, peV
  int bin = 0;           ///< -1, 0 or +1 (units of h nu0)
};

/// Throws UnsnappableHeat if the raw heat is farther than snap_tolerance from
/// every support point.
HeatValue heat_of_path(const PathRecord& path, const BasisAssignment& ba,
                       double snap_tolerance = kDefaultHeatSnapTolerance);

struct MutualInformations {
  double i0 = 0.0;
  double i1 = 0.0;
  double j0 = 0.0;
  double j1 = 0.0;
  double c0 = 0.0;
  double c1 = 0.0;
};

/// Throws UndefinedOnPath when a probability inside a logarithm is
/// <= kAmplitudeEpsilon.
MutualInformations mutual_informations(
    const PathRecord& path, const BasisAssignment& ba, const ComplexMatrix& rho0,
    const ComplexMatrix& rho_t,
    JointProbabilityState joint_state = JointProbabilityState::kTimeResolved);

struct RelativeEntropies {
  double sigma_a = 0.0;
  double sigma_b = 0.0;
};

/// Sigma_j = ln P(j1) / P^0(j1), where P^0(j1) is the population of the final
/// local eigenvector in the initial (thermal) marginal.
RelativeEntropies relative_entropies(const PathRecord& path, const BasisAssignment& ba,
                                     const ComplexMatrix& rho_t);

struct PathFunctionals {
  double q_a = 0.0;  ///< snapped heat, peV
  double i0 = 0.0;
  double i1 = 0.0;
  double j0 = 0.0;
  double j1 = 0.0;
  double c0 = 0.0;
  double c1 = 0.0;
  double sigma_a = 0.0;
  double sigma_b = 0.0;
  double gamma = 0.0;
  double sigma_total = 0.0;
};

PathFunctionals evaluate_path(const PathRecord& path, const BasisAssignment& ba,
                              const ComplexMatrix& rho0, const ComplexMatrix& rho_t,
                              double delta_beta, const AnalysisOptions& options = {});

enum class Direction { kForward, kReverse };

const char* to_string(Direction d) noexcept;

/// Probability mass on {-h nu0, 0, +h nu0}.
struct HeatHistogram {
  double level_spacing = 0.0;
  std::array<double, 3> masses{};  ///< index bin + 1
  Direction direction = Direction::kForward;

  double mass(int bin) const { return masses.at(static_cast<std::size_t>(bin + 1)); }
  double support(int bin) const noexcept { return bin * level_spacing; }
  double total() const noexcept { return masses[0] + masses[1] + masses[2]; }
};

/// Sums p_forward of the given protocol's paths per heat bin. Pass the paths
/// of time_reversed_protocol with Direction::kReverse to get P_r(Q).
HeatHistogram assemble_heat_histogram(std::span<const PathRecord> paths,
                                      const BasisAssignment& ba, Direction direction,
                                      double snap_tolerance = kDefaultHeatSnapTolerance);

/// ln[P_f(Q) / P_r(-Q)] against Q dbeta, and Psi(Q) = e^{Q dbeta} P_r(-Q) / P_f(Q).
struct DetailedFtRecord {
  int bin = 0;
  double q = 0.0;
  double p_forward = 0.0;
  double p_reverse_mirror = 0.0;  ///< P_r(-Q)
  double lhs = 0.0;
  double rhs_jw = 0.0;
  double psi = 0.0;
  bool defined = false;
};

/// Records for Q = -h nu0, 0, +h nu0. A record is undefined when either mass
/// is <= min_mass.
std::array<DetailedFtRecord, 3> detailed_ft_ratio(const HeatHistogram& forward,
                                                  const HeatHistogram& reverse, double delta_beta,
                                                  double min_mass = kAmplitudeEpsilon);

/// Least-squares slope through the origin of lhs against Q over the defined
/// records (the effective inverse-temperature difference). NaN if none.
double effective_delta_beta(std::span<const DetailedFtRecord> records);

struct IntegralAverage {
  std::string name;
  double exp_average = 0.0;  ///< <e^{-X}>
  double mean = 0.0;         ///< <X>
};

struct IntegralFtResult {
  /// sigma, I0, I1, J0, J1, C0, C1, Sigma_A, Sigma_B, gamma in that order.
  std::vector<IntegralAverage> rows;
  double jw_average = 0.0;       ///< <e^{-Q_A dbeta}>
  double jw_plus_average = 0.0;  ///< <e^{+Q_A dbeta}>
  double mean_heat = 0.0;        ///< <Q_A>, peV
  double evaluated_mass = 0.0;   ///< forward mass of paths with defined functionals
};

/// functionals[i] belongs to paths[i]; nullopt entries are skipped.
IntegralFtResult integral_ft_averages(std::span<const PathRecord> paths,
                                      std::span<const std::optional<PathFunctionals>> functionals,
                                      double delta_beta);

/// Everything computed for one interaction time.
struct TimePointResult {
  double time = 0.0;
  BasisAssignment bases;
  std::vector<PathRecord> paths;
  std::vector<std::optional<PathFunctionals>> functionals;
  ProtocolPaths reversed;
  HeatHistogram forward;
  HeatHistogram reverse;
  std::array<DetailedFtRecord, 3> detailed{};
  IntegralFtResult integral;
  double effective_delta_beta = 0.0;
  /// Forward mass of paths below kZeroMassThreshold.
  double excluded_mass = 0.0;
  /// Forward mass of paths heavier than the threshold whose functionals are
  /// undefined (a probability inside a logarithm underflowed).
  double undefined_mass = 0.0;
  double commutator_norm = 0.0;
  double unitarity_defect = 0.0;
};

/// Runs bases, path tables, functionals, histograms and both fluctuation
/// relations for one time point. Throws EnergyConservationViolated when U
/// does not commute with H_A + H_B to 1e-10.
TimePointResult analyze_time_point(double time, const ComplexMatrix& rho0,
                                   const ComplexMatrix& rho_t, const ComplexMatrix& u,
                                   const ThermalParameters& params,
                                   const AnalysisOptions& options = {});

}  // namespace qfluct

#endif  // QFLUCT_FUNCTIONALS_HPP
