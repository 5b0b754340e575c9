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

#include "qfluct/functionals.hpp"

#include <cmath>
#include <limits>

#include "qfluct/dynamics.hpp"
#include "qfluct/errors.hpp"

namespace qfluct {

namespace {

double checked_log(double numerator, double denominator, const char* what) {
  if (!(numerator > kAmplitudeEpsilon) || !(denominator > kAmplitudeEpsilon)) {
    throw UndefinedOnPath(std::string(what) + " undefined: probability underflows");
  }
  return std::log(numerator / denominator);
}

double diagonal_probability(const ComplexVector& v, const ComplexMatrix& rho) {
  return expectation(v, rho, v).real();
}

// P(a1) = sum_b1 <a1 b1|rho_t|a1 b1>.
double final_marginal_a(const BasisAssignment& ba, const ComplexMatrix& rho_t, int a1) {
  return diagonal_probability(ba.final_product(a1, 0), rho_t) +
         diagonal_probability(ba.final_product(a1, 1), rho_t);
}

double final_marginal_b(const BasisAssignment& ba, const ComplexMatrix& rho_t, int b1) {
  return diagonal_probability(ba.final_product(0, b1), rho_t) +
         diagonal_probability(ba.final_product(1, b1), rho_t);
}

}  // namespace

HeatValue heat_of_path(const PathRecord& path, const BasisAssignment& ba, double snap_tolerance) {
  HeatValue h;
  h.raw = ba.energy_a_final[path.labels.a1] - ba.energy_a_initial[path.labels.a0];
  const double spacing = ba.level_spacing;
  int best = 0;
  double best_distance = std::numeric_limits<double>::infinity();
  for (int bin = -1; bin <= 1; ++bin) {
    const double d = std::abs(h.raw - bin * spacing);
    if (d < best_distance) {
      best_distance = d;
      best = bin;
    }
  }
  if (!(best_distance <= snap_tolerance)) throw UnsnappableHeat(h.raw);
  h.bin = best;
  h.snapped = best * spacing;
  return h;
}

MutualInformations mutual_informations(const PathRecord& path, const BasisAssignment& ba,
                                       const ComplexMatrix& rho0, const ComplexMatrix& rho_t,
                                       JointProbabilityState joint_state) {
  const PathLabels& l = path.labels;
  const double p_s = ba.global_initial.eigenvalues[l.s];
  const double p_s_star = ba.global_final.eigenvalues[ba.partner[l.s]];
  const double p_a0 = ba.local_a_initial.eigenvalues[l.a0];
  const double p_b0 = ba.local_b_initial.eigenvalues[l.b0];
  const double marg_a1 = final_marginal_a(ba, rho_t, l.a1);
  const double marg_b1 = final_marginal_b(ba, rho_t, l.b1);
  const double p_a0b0 = diagonal_probability(ba.initial_product(l.a0, l.b0), rho0);

  MutualInformations m;
  m.i0 = checked_log(p_s, p_a0 * p_b0, "I0");
  m.j0 = checked_log(p_a0b0, p_a0 * p_b0, "J0");
  m.c0 = checked_log(p_s, p_a0b0, "C0");
  m.i1 = checked_log(p_s_star, marg_a1 * marg_b1, "I1");
  if (joint_state == JointProbabilityState::kTimeResolved) {
    const double p_a1b1 = diagonal_probability(ba.final_product(l.a1, l.b1), rho_t);
    m.j1 = checked_log(p_a1b1, marg_a1 * marg_b1, "J1");
    m.c1 = checked_log(p_s_star, p_a1b1, "C1");
  } else {
    const double p_a1b1 = diagonal_probability(ba.final_product(l.a1, l.b1), rho0);
    m.j1 = checked_log(p_a1b1, marg_a1 * marg_b1, "J1");
    m.c1 = checked_log(p_s, p_a1b1, "C1");
  }
  return m;
}

RelativeEntropies relative_entropies(const PathRecord& path, const BasisAssignment& ba,
                                     const ComplexMatrix& rho_t) {
  const PathLabels& l = path.labels;
  // <a1|rho_A^0|a1> = sum_a0 P_a0 |<a1|a0>|^2
  double ref_a = 0.0;
  double ref_b = 0.0;
  for (int k = 0; k < 2; ++k) {
    ref_a += ba.local_a_initial.eigenvalues[k] *
             std::norm(inner(ba.local_a_final.eigenvectors[l.a1], ba.local_a_initial.eigenvectors[k]));
    ref_b += ba.local_b_initial.eigenvalues[k] *
             std::norm(inner(ba.local_b_final.eigenvectors[l.b1], ba.local_b_initial.eigenvectors[k]));
  }
  RelativeEntropies r;
  r.sigma_a = checked_log(final_marginal_a(ba, rho_t, l.a1), ref_a, "Sigma_A");
  r.sigma_b = checked_log(final_marginal_b(ba, rho_t, l.b1), ref_b, "Sigma_B");
  return r;
}

PathFunctionals evaluate_path(const PathRecord& path, const BasisAssignment& ba,
                              const ComplexMatrix& rho0, const ComplexMatrix& rho_t,
                              double delta_beta, const AnalysisOptions& options) {
  PathFunctionals f;
  f.q_a = heat_of_path(path, ba, options.heat_snap_tolerance).snapped;
  const MutualInformations m = mutual_informations(path, ba, rho0, rho_t, options.joint_state);
  f.i0 = m.i0;
  f.i1 = m.i1;
  f.j0 = m.j0;
  f.j1 = m.j1;
  f.c0 = m.c0;
  f.c1 = m.c1;
  const RelativeEntropies r = relative_entropies(path, ba, rho_t);
  f.sigma_a = r.sigma_a;
  f.sigma_b = r.sigma_b;
  f.gamma = gamma_of_path(path);
  f.sigma_total = -f.q_a * delta_beta - f.i0 + f.i1 + f.sigma_a + f.sigma_b - f.gamma;
  return f;
}

const char* to_string(Direction d) noexcept {
  return d == Direction::kForward ? "forward" : "reverse";
}

HeatHistogram assemble_heat_histogram(std::span<const PathRecord> paths,
                                      const BasisAssignment& ba, Direction direction,
                                      double snap_tolerance) {
  HeatHistogram h;
  h.level_spacing = ba.level_spacing;
  h.direction = direction;
  for (const PathRecord& p : paths) {
    if (p.p_forward < kZeroMassThreshold) {
      // light paths may carry an ill-defined heat when a local basis is degenerate
      try {
        h.masses[static_cast<std::size_t>(heat_of_path(p, ba, snap_tolerance).bin + 1)] +=
            p.p_forward;
      } catch (const UnsnappableHeat&) {
      }
      continue;
    }
    h.masses[static_cast<std::size_t>(heat_of_path(p, ba, snap_tolerance).bin + 1)] += p.p_forward;
  }
  return h;
}

std::array<DetailedFtRecord, 3> detailed_ft_ratio(const HeatHistogram& forward,
                                                  const HeatHistogram& reverse, double delta_beta,
                                                  double min_mass) {
  std::array<DetailedFtRecord, 3> out{};
  for (int bin = -1; bin <= 1; ++bin) {
    DetailedFtRecord& r = out[static_cast<std::size_t>(bin + 1)];
    r.bin = bin;
    r.q = forward.support(bin);
    r.p_forward = forward.mass(bin);
    r.p_reverse_mirror = reverse.mass(-bin);
    r.rhs_jw = r.q * delta_beta;
    r.defined = r.p_forward > min_mass && r.p_reverse_mirror > min_mass;
    if (r.defined) {
      r.lhs = std::log(r.p_forward / r.p_reverse_mirror);
      r.psi = std::exp(r.rhs_jw) * r.p_reverse_mirror / r.p_forward;
    } else {
      r.lhs = std::numeric_limits<double>::quiet_NaN();
      r.psi = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

double effective_delta_beta(std::span<const DetailedFtRecord> records) {
  double sxy = 0.0;
  double sxx = 0.0;
  for (const DetailedFtRecord& r : records) {
    if (!r.defined || r.q == 0.0) continue;
    sxy += r.q * r.lhs;
    sxx += r.q * r.q;
  }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

IntegralFtResult integral_ft_averages(std::span<const PathRecord> paths,
                                      std::span<const std::optional<PathFunctionals>> functionals,
                                      double delta_beta) {
  static const char* const kNames[] = {"sigma", "I0", "I1", "J0", "J1",
                                       "C0", "C1", "Sigma_A", "Sigma_B", "gamma"};
  constexpr std::size_t kRows = std::size(kNames);
  std::array<double, kRows> exp_sum{};
  std::array<double, kRows> mean_sum{};
  IntegralFtResult out;
  for (std::size_t i = 0; i < paths.size() && i < functionals.size(); ++i) {
    if (!functionals[i]) continue;
    const PathFunctionals& f = *functionals[i];
    const double w = paths[i].p_forward;
    const std::array<double, kRows> x{f.sigma_total, f.i0, f.i1, f.j0, f.j1,
                                      f.c0, f.c1, f.sigma_a, f.sigma_b, f.gamma};
    for (std::size_t k = 0; k < kRows; ++k) {
      exp_sum[k] += w * std::exp(-x[k]);
      mean_sum[k] += w * x[k];
    }
    out.jw_average += w * std::exp(-f.q_a * delta_beta);
    out.jw_plus_average += w * std::exp(f.q_a * delta_beta);
    out.mean_heat += w * f.q_a;
    out.evaluated_mass += w;
  }
  out.rows.reserve(kRows);
  for (std::size_t k = 0; k < kRows; ++k) {
    out.rows.push_back({kNames[k], exp_sum[k], mean_sum[k]});
  }
  return out;
}

TimePointResult analyze_time_point(double time, const ComplexMatrix& rho0,
                                   const ComplexMatrix& rho_t, const ComplexMatrix& u,
                                   const ThermalParameters& params,
                                   const AnalysisOptions& options) {
  const QubitHamiltonian ha(Subsystem::kA, params.nu0);
  const QubitHamiltonian hb(Subsystem::kB, params.nu0);
  const ComplexMatrix h_total = total_local_hamiltonian(ha, hb);

  TimePointResult r;
  r.time = time;
  r.unitarity_defect = unitarity_defect(u);
  if (r.unitarity_defect > kEnergyConservationTolerance) {
    throw NotUnitary("propagator unitarity defect " + std::to_string(r.unitarity_defect));
  }
  r.commutator_norm = certify_energy_conservation(u, h_total, kEnergyConservationTolerance);

  r.bases = assign_bases(rho0, rho_t, u, ha, hb, options.mode);
  r.paths = path_table(r.bases, u);
  r.functionals.resize(r.paths.size());
  const double dbeta = params.delta_beta();
  for (std::size_t i = 0; i < r.paths.size(); ++i) {
    const PathRecord& p = r.paths[i];
    if (p.p_forward < kZeroMassThreshold) {
      r.excluded_mass += p.p_forward;
      continue;
    }
    try {
      r.functionals[i] = evaluate_path(p, r.bases, rho0, rho_t, dbeta, options);
    } catch (const UndefinedOnPath&) {
      r.undefined_mass += p.p_forward;
    }
  }

  r.reversed = time_reversed_protocol(rho0, u, ha, hb);
  r.forward = assemble_heat_histogram(r.paths, r.bases, Direction::kForward,
                                      options.heat_snap_tolerance);
  r.reverse = assemble_heat_histogram(r.reversed.paths, r.reversed.bases, Direction::kReverse,
                                      options.heat_snap_tolerance);
  r.detailed = detailed_ft_ratio(r.forward, r.reverse, dbeta);
  r.integral = integral_ft_averages(r.paths, r.functionals, dbeta);
  r.effective_delta_beta = effective_delta_beta(r.detailed);
  return r;
}

}  // namespace qfluct
