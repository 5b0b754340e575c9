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

/// \file trajectories.hpp
/// Conditional paths Gamma = (s, a0, b0, a1, b1) of the two-qubit heat
/// exchange and their forward / reverse probabilities.
///
/// A path picks an eigenvector |s> of the initial global state, initial local
/// eigenvectors |a0>, |b0> and final local eigenvectors |a1>, |b1>:
///
///   P(Gamma)  = P_s  |<a0 b0|s>|^2  |<a1 b1|U|s>|^2
///   P(Gamma*) = P_s* |<a1 b1|s*>|^2 |<a0 b0|U^dag|s*>|^2
///
/// where {P_s*, |s*>} diagonalizes the final global state and |s*> is the
/// eigenvector paired with U|s>.

#ifndef QFLUCT_TRAJECTORIES_HPP
#define QFLUCT_TRAJECTORIES_HPP

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "qfluct/linalg.hpp"
#include "qfluct/states.hpp"

namespace qfluct {

/// Squared overlaps below this are treated as exact zeros.
inline constexpr double kAmplitudeEpsilon = 1e-14;
/// Paths lighter than this are flagged prunable in reports.
inline constexpr double kPruneEpsilon = 1e-14;
/// 4 global x 2 x 2 x 2 x 2 local labels.
inline constexpr std::size_t kPathCount = 64;

enum class AssignmentMode {
  /// rho_t must equal U rho0 U^dag to 1e-8.
  kSimulation,
  /// rho_t comes from data; no consistency check.
  kIngest,
};

struct BasisAssignment {
  SpectralEnsemble global_initial;  ///< {P_s, |s>}
  SpectralEnsemble global_final;    ///< {P_s*, |s*>}
  /// partner[s] is the index in global_final of the |s*> paired with U|s>.
  std::array<int, 4> partner{0, 1, 2, 3};
  /// |<s*|U|s>|^2 for each s.
  std::array<double, 4> partner_overlap{};
  SpectralEnsemble local_a_initial;
  SpectralEnsemble local_b_initial;
  SpectralEnsemble local_a_final;
  SpectralEnsemble local_b_final;
  /// <a|H_A|a> (peV) of each local eigenvector, same order as the ensembles.
  std::array<double, 2> energy_a_initial{};
  std::array<double, 2> energy_b_initial{};
  std::array<double, 2> energy_a_final{};
  std::array<double, 2> energy_b_final{};
  /// h nu0 of qubit A, peV.
  double level_spacing = 0.0;
  /// Non-fatal diagnostics (degeneracy tie-breaks, weak pairing).
  std::vector<std::string> warnings;

  ComplexVector initial_product(int a0, int b0) const;
  ComplexVector final_product(int a1, int b1) const;
};

/// Diagonalizes the global and local states at both ends and pairs every
/// final eigenvector with an evolved initial one.
///
/// Pairing maximizes sum_s |<s*|U|s>|^2 over all permutations. Inside a
/// degenerate cluster of rho_t the cluster basis is rotated onto the span of
/// the evolved vectors (polar / Procrustes alignment), which removes the
/// arbitrary choice of basis; a DegeneracyAmbiguity warning is recorded.
BasisAssignment assign_bases(const ComplexMatrix& rho0, const ComplexMatrix& rho_t,
                             const ComplexMatrix& u, const QubitHamiltonian& ha,
                             const QubitHamiltonian& hb,
                             AssignmentMode mode = AssignmentMode::kSimulation);

struct PathLabels {
  int s = 0;
  int a0 = 0;
  int b0 = 0;
  int a1 = 0;
  int b1 = 0;

  friend bool operator==(const PathLabels&, const PathLabels&) = default;
};

/// Table position of a label tuple (s major, b1 minor).
std::size_t path_index(const PathLabels& labels) noexcept;

struct PathOverlaps {
  double initial = 0.0;          ///< |<a0 b0|s>|^2
  double evolved = 0.0;          ///< |<a1 b1|U|s>|^2
  double final_state = 0.0;      ///< |<a1 b1|s*>|^2
  double back_propagated = 0.0;  ///< |<a0 b0|U^dag|s*>|^2
};

struct PathRecord {
  PathLabels labels;
  double p_forward = 0.0;
  double p_reverse = 0.0;
  PathOverlaps overlaps;
  bool prunable = false;
};

/// All 64 paths with p_forward and the forward overlaps filled in.
std::vector<PathRecord> forward_path_probabilities(const BasisAssignment& ba,
                                                   const ComplexMatrix& u);

/// All 64 paths with p_reverse and the reverse overlaps filled in.
std::vector<PathRecord> reverse_path_probabilities(const BasisAssignment& ba,
                                                   const ComplexMatrix& u);

/// Forward and reverse data merged into one table; a path is prunable when
/// both probabilities are below kPruneEpsilon.
std::vector<PathRecord> path_table(const BasisAssignment& ba, const ComplexMatrix& u);

/// ln of the forward overlap product over the reverse overlap product.
/// Throws UndefinedOnPath if any overlap is <= kAmplitudeEpsilon.
double gamma_of_path(const PathRecord& path);

/// Paths of the time-reversed protocol: the same initial state evolved with
/// U^dag. Its forward heat distribution is the reverse distribution P_r(Q).
struct ProtocolPaths {
  ComplexMatrix final_state{4};
  BasisAssignment bases;
  std::vector<PathRecord> paths;
};

ProtocolPaths time_reversed_protocol(const ComplexMatrix& rho0, const ComplexMatrix& u,
                                     const QubitHamiltonian& ha, const QubitHamiltonian& hb);

}  // namespace qfluct

#endif  // QFLUCT_TRAJECTORIES_HPP
