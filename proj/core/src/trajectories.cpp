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

#include "qfluct/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qfluct/dynamics.hpp"
#include "qfluct/errors.hpp"

namespace qfluct {

namespace {

constexpr double kSimulationConsistencyTolerance = 1e-8;
constexpr double kPairingTolerance = 1e-8;

std::array<double, 2> local_energies(const SpectralEnsemble& local, const QubitHamiltonian& h) {
  std::array<double, 2> out{};
  for (std::size_t k = 0; k < 2; ++k) {
    out[k] = expectation(local.eigenvectors[k], h.matrix(), local.eigenvectors[k]).real();
  }
  return out;
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

std::array<int, 4> best_pairing(const std::array<std::array<double, 4>, 4>& overlap) {
  // overlap[s][k] = |<s*_k|U|s>|^2
  std::array<int, 4> perm{0, 1, 2, 3};
  std::array<int, 4> best = perm;
  double best_score = -1.0;
  do {
    double score = 0.0;
    for (int s = 0; s < 4; ++s) score += overlap[s][perm[s]];
    if (score > best_score + 1e-15) {
      best_score = score;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Rotates each degenerate cluster of ba.global_final onto the evolved vectors
// U|s> of the initial eigenvectors paired with it.
void align_degenerate_clusters(BasisAssignment& ba, const std::vector<ComplexVector>& evolved) {
  SpectralEnsemble& fin = ba.global_final;
  std::size_t first = 0;
  while (first < fin.size()) {
    std::size_t last = first + 1;
    while (last < fin.size() &&
           fin.eigenvalues[last - 1] - fin.eigenvalues[last] < kDegeneracyTolerance) {
      ++last;
    }
    const int m = static_cast<int>(last - first);
    if (m > 1) {
      // column j of the target block is U|s_j> with partner[s_j] = first + j
      std::vector<int> sources(m, -1);
      for (int s = 0; s < 4; ++s) {
        const int k = ba.partner[s];
        if (k >= static_cast<int>(first) && k < static_cast<int>(last)) {
          sources[k - static_cast<int>(first)] = s;
        }
      }
      std::vector<Complex> o(static_cast<std::size_t>(m * m));
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          o[i * m + j] = inner(fin.eigenvectors[first + i], evolved[sources[j]]);
        }
      const std::vector<Complex> q = detail::polar_unitary(o, m);
      if (q.empty()) {
        ba.warnings.push_back(
            "DegeneracyAmbiguity: singular overlap in a degenerate final cluster; basis kept");
      } else {
        std::vector<ComplexVector> rotated(m, ComplexVector(4));
        for (int j = 0; j < m; ++j)
          for (int i = 0; i < m; ++i)
            for (int c = 0; c < 4; ++c) rotated[j][c] += fin.eigenvectors[first + i][c] * q[i * m + j];
        for (int j = 0; j < m; ++j) {
          fix_phase(rotated[j]);
          fin.eigenvectors[first + j] = std::move(rotated[j]);
        }
        ba.warnings.push_back("DegeneracyAmbiguity: degenerate final cluster of size " +
                              std::to_string(m) + " aligned to evolved eigenvectors");
      }
    }
    first = last;
  }
}

}  // namespace

ComplexVector BasisAssignment::initial_product(int a0, int b0) const {
  return kron(local_a_initial.eigenvectors[a0], local_b_initial.eigenvectors[b0]);
}

ComplexVector BasisAssignment::final_product(int a1, int b1) const {
  return kron(local_a_final.eigenvectors[a1], local_b_final.eigenvectors[b1]);
}

BasisAssignment assign_bases(const ComplexMatrix& rho0, const ComplexMatrix& rho_t,
                             const ComplexMatrix& u, const QubitHamiltonian& ha,
                             const QubitHamiltonian& hb, AssignmentMode mode) {
  if (rho0.dim() != 4 || rho_t.dim() != 4 || u.dim() != 4) {
    throw InvalidParameter("assign_bases expects two-qubit operators");
  }
  if (mode == AssignmentMode::kSimulation) {
    const double mismatch = max_abs(rho_t - u * rho0 * adjoint(u));
    if (mismatch > kSimulationConsistencyTolerance) {
      throw InvalidState("final state is not U rho0 U^dag (mismatch " + std::to_string(mismatch) +
                         ")");
    }
  }

  BasisAssignment ba;
  ba.global_initial = hermitian_eig(rho0);
  ba.global_final = hermitian_eig(rho_t);
  ba.level_spacing = ha.gap();

  std::vector<ComplexVector> evolved;
  evolved.reserve(4);
  for (const auto& s : ba.global_initial.eigenvectors) evolved.push_back(u * s);

  std::array<std::array<double, 4>, 4> overlap{};
  for (int s = 0; s < 4; ++s)
    for (int k = 0; k < 4; ++k) {
      overlap[s][k] = std::norm(inner(ba.global_final.eigenvectors[k], evolved[s]));
    }
  ba.partner = best_pairing(overlap);

  if (ba.global_final.degenerate) align_degenerate_clusters(ba, evolved);

  for (int s = 0; s < 4; ++s) {
    ba.partner_overlap[s] =
        std::norm(inner(ba.global_final.eigenvectors[ba.partner[s]], evolved[s]));
  }
  if (mode == AssignmentMode::kSimulation) {
    const double worst = *std::min_element(ba.partner_overlap.begin(), ba.partner_overlap.end());
    if (worst < 1.0 - kPairingTolerance) {
      ba.warnings.push_back("weak s* pairing: min |<s*|U|s>|^2 = " + std::to_string(worst));
    }
  }

  ba.local_a_initial = hermitian_eig(partial_trace(rho0, Subsystem::kA));
  ba.local_b_initial = hermitian_eig(partial_trace(rho0, Subsystem::kB));
  ba.local_a_final = hermitian_eig(partial_trace(rho_t, Subsystem::kA));
  ba.local_b_final = hermitian_eig(partial_trace(rho_t, Subsystem::kB));
  ba.energy_a_initial = local_energies(ba.local_a_initial, ha);
  ba.energy_b_initial = local_energies(ba.local_b_initial, hb);
  ba.energy_a_final = local_energies(ba.local_a_final, ha);
  ba.energy_b_final = local_energies(ba.local_b_final, hb);
  return ba;
}

std::size_t path_index(const PathLabels& l) noexcept {
  return static_cast<std::size_t>(l.s * 16 + l.a0 * 8 + l.b0 * 4 + l.a1 * 2 + l.b1);
}

namespace {

template <typename Fill>
std::vector<PathRecord> enumerate(Fill fill) {
  std::vector<PathRecord> out;
  out.reserve(kPathCount);
  for (int s = 0; s < 4; ++s)
    for (int a0 = 0; a0 < 2; ++a0)
      for (int b0 = 0; b0 < 2; ++b0)
        for (int a1 = 0; a1 < 2; ++a1)
          for (int b1 = 0; b1 < 2; ++b1) {
            PathRecord r;
            r.labels = {s, a0, b0, a1, b1};
            fill(r);
            out.push_back(r);
          }
  return out;
}

}  // namespace

std::vector<PathRecord> forward_path_probabilities(const BasisAssignment& ba,
                                                   const ComplexMatrix& u) {
  std::array<ComplexVector, 4> evolved;
  for (int s = 0; s < 4; ++s) evolved[s] = u * ba.global_initial.eigenvectors[s];
  return enumerate([&](PathRecord& r) {
    const auto& l = r.labels;
    r.overlaps.initial =
        std::norm(inner(ba.initial_product(l.a0, l.b0), ba.global_initial.eigenvectors[l.s]));
    r.overlaps.evolved = std::norm(inner(ba.final_product(l.a1, l.b1), evolved[l.s]));
    r.p_forward = ba.global_initial.eigenvalues[l.s] * r.overlaps.initial * r.overlaps.evolved;
    r.prunable = r.p_forward < kPruneEpsilon;
  });
}

std::vector<PathRecord> reverse_path_probabilities(const BasisAssignment& ba,
                                                   const ComplexMatrix& u) {
  const ComplexMatrix u_dag = adjoint(u);
  std::array<ComplexVector, 4> back;
  for (int k = 0; k < 4; ++k) back[k] = u_dag * ba.global_final.eigenvectors[k];
  return enumerate([&](PathRecord& r) {
    const auto& l = r.labels;
    const int k = ba.partner[l.s];
    r.overlaps.final_state =
        std::norm(inner(ba.final_product(l.a1, l.b1), ba.global_final.eigenvectors[k]));
    r.overlaps.back_propagated = std::norm(inner(ba.initial_product(l.a0, l.b0), back[k]));
    r.p_reverse =
        ba.global_final.eigenvalues[k] * r.overlaps.final_state * r.overlaps.back_propagated;
    r.prunable = r.p_reverse < kPruneEpsilon;
  });
}

std::vector<PathRecord> path_table(const BasisAssignment& ba, const ComplexMatrix& u) {
  std::vector<PathRecord> table = forward_path_probabilities(ba, u);
  const std::vector<PathRecord> rev = reverse_path_probabilities(ba, u);
  for (std::size_t i = 0; i < table.size(); ++i) {
    table[i].p_reverse = rev[i].p_reverse;
    table[i].overlaps.final_state = rev[i].overlaps.final_state;
    table[i].overlaps.back_propagated = rev[i].overlaps.back_propagated;
    table[i].prunable = table[i].p_forward < kPruneEpsilon && table[i].p_reverse < kPruneEpsilon;
  }
  return table;
}

double gamma_of_path(const PathRecord& path) {
  const PathOverlaps& o = path.overlaps;
  if (o.initial <= kAmplitudeEpsilon || o.evolved <= kAmplitudeEpsilon ||
      o.final_state <= kAmplitudeEpsilon || o.back_propagated <= kAmplitudeEpsilon) {
    throw UndefinedOnPath("gamma undefined: an overlap underflows");
  }
  return std::log(o.initial * o.evolved / (o.final_state * o.back_propagated));
}

ProtocolPaths time_reversed_protocol(const ComplexMatrix& rho0, const ComplexMatrix& u,
                                     const QubitHamiltonian& ha, const QubitHamiltonian& hb) {
  ProtocolPaths out;
  const ComplexMatrix u_dag = adjoint(u);
  out.final_state = evolve(rho0, u_dag);
  out.bases = assign_bases(rho0, out.final_state, u_dag, ha, hb, AssignmentMode::kSimulation);
  out.paths = forward_path_probabilities(out.bases, u_dag);
  return out;
}

}  // namespace qfluct
