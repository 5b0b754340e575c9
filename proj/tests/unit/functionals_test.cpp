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

#include <array>
#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "path_oracle.hpp"
#include "qfluct/dynamics.hpp"
#include "qfluct/errors.hpp"
#include "qfluct/functionals.hpp"
#include "qfluct/states.hpp"

namespace qfluct {
namespace {

struct Point {
  ThermalParameters params;
  ComplexMatrix rho0{4};
  ComplexMatrix rho_t{4};
  ComplexMatrix u{4};
  TimePointResult result;
};

Point analyze(const ThermalParameters& p, double t, const AnalysisOptions& options = {}) {
  Point pt;
  pt.params = p;
  pt.rho0 = correlated_initial_state(p);
  pt.u = propagator_at(build_exchange(p.coupling_j, p.nu0), t);
  pt.rho_t = evolve(pt.rho0, pt.u);
  pt.result = analyze_time_point(t, pt.rho0, pt.rho_t, pt.u, p, options);
  return pt;
}

oracle::Model model_of(const ThermalParameters& p) {
  return {p.beta_a, p.beta_b, p.nu0, p.coupling_j, p.alpha};
}

std::array<double, 3> oracle_histogram(const oracle::Model& m, double t) {
  const double gap = oracle::planck_pev_seconds() * m.nu0;
  std::array<double, 3> out{};
  for (const oracle::Path& p : oracle::enumerate_paths(m, t)) {
    out[static_cast<std::size_t>(std::lround(p.q / gap) + 1)] += p.p_forward;
  }
  return out;
}

// Psi(Q) for Q in {-1, 0, +1} h nu0; the reversed protocol runs U(-t) = U^dag.
std::array<double, 3> oracle_psi(const oracle::Model& m, double t) {
  const double gap = oracle::planck_pev_seconds() * m.nu0;
  const double dbeta = m.beta_a - m.beta_b;
  const auto fwd = oracle_histogram(m, t);
  const auto rev = oracle_histogram(m, -t);
  std::array<double, 3> psi{};
  for (int bin = -1; bin <= 1; ++bin) {
    psi[bin + 1] = std::exp(bin * gap * dbeta) * rev[1 - bin] / fwd[bin + 1];
  }
  return psi;
}

const std::vector<double>& grid() {
  static const std::vector<double> times = TimeGrid::default_grid().times();
  return times;
}

TEST(HeatTest, ExcitingQubitAAbsorbsOneQuantum) {
  const Point pt = analyze(correlated_preset(), 1.2e-3);
  const BasisAssignment& ba = pt.result.bases;
  bool seen = false;
  for (const PathRecord& r : pt.result.paths) {
    if (ba.energy_a_initial[r.labels.a0] < 1e-9 &&
        std::abs(ba.energy_a_final[r.labels.a1] - ba.level_spacing) < 1e-9) {
      const HeatValue q = heat_of_path(r, ba);
      EXPECT_NEAR(q.snapped, 4.135667696, 1e-12);
      EXPECT_EQ(q.bin, 1);
      seen = true;
    }
  }
  EXPECT_TRUE(seen);
}

TEST(HeatTest, OffSupportEnergyIsRejected) {
  Point pt = analyze(correlated_preset(), 1.2e-3);
  BasisAssignment ba = pt.result.bases;
  ba.energy_a_final = {2.0, 2.0};
  EXPECT_THROW(heat_of_path(pt.result.paths[0], ba), UnsnappableHeat);
}

TEST(PathFunctionalsTest, DecompositionsHoldOnEveryWeightedPath) {
  for (const ThermalParameters& p : {correlated_preset(), uncorrelated_preset()}) {
    const double dbeta = p.delta_beta();
    for (double t : grid()) {
      const Point pt = analyze(p, t);
      for (std::size_t i = 0; i < pt.result.paths.size(); ++i) {
        const auto& f = pt.result.functionals[i];
        if (!f) continue;
        EXPECT_NEAR(f->i0, f->j0 + f->c0, 1e-10);
        EXPECT_NEAR(f->i1, f->j1 + f->c1, 1e-10);
        const double expected =
            -f->q_a * dbeta - f->i0 + f->i1 + f->sigma_a + f->sigma_b - f->gamma;
        EXPECT_NEAR(f->sigma_total, expected, 1e-12);
      }
    }
  }
}

TEST(PathFunctionalsTest, MatchOracleOnCorrelatedPreset) {
  const ThermalParameters p = correlated_preset();
  for (double t : {0.0, 0.55e-3, 1.77e-3, 2.32e-3}) {
    const Point pt = analyze(p, t);
    const auto ref = oracle::enumerate_paths(model_of(p), t);
    for (std::size_t i = 0; i < ref.size(); ++i) {
      if (ref[i].p_forward <= 1e-12) continue;
      const auto& f = pt.result.functionals[i];
      ASSERT_TRUE(f.has_value()) << "path " << i;
      EXPECT_NEAR(f->q_a, ref[i].q, 1e-9);
      EXPECT_NEAR(f->i0, ref[i].i0, 1e-8);
      EXPECT_NEAR(f->i1, ref[i].i1, 1e-8);
      EXPECT_NEAR(f->j0, ref[i].j0, 1e-8);
      EXPECT_NEAR(f->j1, ref[i].j1, 1e-8);
      EXPECT_NEAR(f->c0, ref[i].c0, 1e-8);
      EXPECT_NEAR(f->c1, ref[i].c1, 1e-8);
      EXPECT_NEAR(f->sigma_a, ref[i].sigma_a, 1e-8);
      EXPECT_NEAR(f->sigma_b, ref[i].sigma_b, 1e-8);
      EXPECT_NEAR(f->gamma, ref[i].gamma, 1e-8);
    }
  }
}

TEST(PathFunctionalsTest, ProductInitialStateCarriesNoInitialInformation) {
  const Point at0 = analyze(uncorrelated_preset(), 0.0);
  for (const auto& f : at0.result.functionals) {
    if (!f) continue;
    EXPECT_NEAR(f->i0, 0.0, 1e-12);
    EXPECT_NEAR(f->j0, 0.0, 1e-12);
    EXPECT_NEAR(f->c0, 0.0, 1e-12);
    EXPECT_NEAR(f->sigma_a, 0.0, 1e-12);
    EXPECT_NEAR(f->sigma_b, 0.0, 1e-12);
    EXPECT_NEAR(f->sigma_total, 0.0, 1e-12);
  }
  // the exchange builds correlations
  const Point later = analyze(uncorrelated_preset(), 1.77e-3);
  double largest = 0.0;
  for (const auto& f : later.result.functionals) {
    if (f) largest = std::max(largest, std::abs(f->i1));
  }
  EXPECT_GT(largest, 1e-3);
}

TEST(PathFunctionalsTest, CorrelatedInitialStateCarriesCoherence) {
  const Point pt = analyze(correlated_preset(), 0.0);
  double largest = 0.0;
  for (const auto& f : pt.result.functionals) {
    if (!f) continue;
    largest = std::max(largest, std::abs(f->c0));
    EXPECT_NEAR(f->sigma_a, 0.0, 1e-12);
    EXPECT_NEAR(f->sigma_b, 0.0, 1e-12);
  }
  EXPECT_GT(largest, 1e-2);
}

TEST(PathFunctionalsTest, LiteralVariantAgreesAtTimeZeroOnly) {
  AnalysisOptions literal;
  literal.joint_state = JointProbabilityState::kLiteralInitial;
  const ThermalParameters p = correlated_preset();

  const Point a = analyze(p, 0.0), b = analyze(p, 0.0, literal);
  for (std::size_t i = 0; i < a.result.functionals.size(); ++i) {
    if (!a.result.functionals[i]) continue;
    EXPECT_NEAR(a.result.functionals[i]->c1, b.result.functionals[i]->c1, 1e-12);
    EXPECT_NEAR(a.result.functionals[i]->j1, b.result.functionals[i]->j1, 1e-12);
  }

  const Point c = analyze(p, 1.88e-3), d = analyze(p, 1.88e-3, literal);
  double largest = 0.0;
  for (std::size_t i = 0; i < c.result.functionals.size(); ++i) {
    if (!c.result.functionals[i] || !d.result.functionals[i]) continue;
    largest = std::max(largest, std::abs(c.result.functionals[i]->j1 - d.result.functionals[i]->j1));
    EXPECT_EQ(c.result.functionals[i]->i1, d.result.functionals[i]->i1);
  }
  EXPECT_GT(largest, 1e-3);
}

TEST(HeatHistogramTest, ProductStateStartsAtZeroHeat) {
  const Point pt = analyze(uncorrelated_preset(), 0.0);
  EXPECT_NEAR(pt.result.forward.mass(-1), 0.0, 1e-15);
  EXPECT_NEAR(pt.result.forward.mass(0), 1.0, 1e-15);
  EXPECT_NEAR(pt.result.forward.mass(1), 0.0, 1e-15);
}

TEST(HeatHistogramTest, ProductStateMatchesTwoPointMeasurement) {
  const ThermalParameters p = uncorrelated_preset();
  for (double t : grid()) {
    const Point pt = analyze(p, t);
    const auto tpm = oracle::tpm_heat_distribution(model_of(p), t);
    EXPECT_NEAR(pt.result.forward.total(), 1.0, 1e-12);
    for (int bin = -1; bin <= 1; ++bin) {
      EXPECT_NEAR(pt.result.forward.mass(bin), tpm[bin + 1], 1e-10) << "t " << t;
      EXPECT_NEAR(pt.result.reverse.mass(bin), pt.result.forward.mass(bin), 1e-10);
    }
  }
}

TEST(HeatHistogramTest, MatchesOracleForCorrelatedPreset) {
  const ThermalParameters p = correlated_preset();
  for (double t : grid()) {
    const Point pt = analyze(p, t);
    const auto fwd = oracle_histogram(model_of(p), t);
    const auto rev = oracle_histogram(model_of(p), -t);
    for (int bin = -1; bin <= 1; ++bin) {
      EXPECT_NEAR(pt.result.forward.mass(bin), fwd[bin + 1], 1e-10);
      EXPECT_NEAR(pt.result.reverse.mass(bin), rev[bin + 1], 1e-10);
    }
  }
}

TEST(DetailedFtTest, ProductStateSatisfiesJarzynskiWojcik) {
  const ThermalParameters p = uncorrelated_preset();
  const double dbeta = p.delta_beta();
  for (std::size_t k = 1; k < grid().size(); ++k) {
    const Point pt = analyze(p, grid()[k]);
    for (const DetailedFtRecord& r : pt.result.detailed) {
      ASSERT_TRUE(r.defined);
      EXPECT_NEAR(r.psi, 1.0, 1e-9);
      EXPECT_NEAR(r.lhs, r.q * dbeta, 1e-9);
      EXPECT_EQ(r.rhs_jw, r.q * dbeta);
    }
    EXPECT_NEAR(pt.result.effective_delta_beta, dbeta, 1e-9);
    EXPECT_NEAR(pt.result.integral.jw_average, 1.0, 1e-10);
  }
}

TEST(DetailedFtTest, CorrelatedPsiMatchesOracleAndVariesInTime) {
  const ThermalParameters p = correlated_preset();
  const std::array<std::size_t, 2> picks{17, 21};
  std::array<double, 2> psi_minus{};
  for (std::size_t n = 0; n < picks.size(); ++n) {
    const double t = grid()[picks[n]];
    const Point pt = analyze(p, t);
    const auto ref = oracle_psi(model_of(p), t);
    for (const DetailedFtRecord& r : pt.result.detailed) {
      ASSERT_TRUE(r.defined);
      EXPECT_NEAR(r.psi, ref[r.bin + 1], 1e-8 * std::max(1.0, ref[r.bin + 1]));
    }
    psi_minus[n] = pt.result.detailed[0].psi;
    EXPECT_GT(std::abs(psi_minus[n] - 1.0), 0.1);
  }
  EXPECT_GT(std::abs(psi_minus[0] - psi_minus[1]), 0.1);
}

TEST(DetailedFtTest, VanishingMassIsUndefined) {
  HeatHistogram fwd{4.0, {0.0, 1.0, 0.0}, Direction::kForward};
  HeatHistogram rev{4.0, {0.0, 1.0, 0.0}, Direction::kReverse};
  const auto recs = detailed_ft_ratio(fwd, rev, 0.1);
  EXPECT_FALSE(recs[0].defined);
  EXPECT_TRUE(std::isnan(recs[0].psi));
  EXPECT_TRUE(recs[1].defined);
  EXPECT_EQ(recs[1].psi, 1.0);
  EXPECT_FALSE(recs[2].defined);
}

TEST(DetailedFtTest, EffectiveDeltaBetaIsLeastSquaresSlope) {
  std::array<DetailedFtRecord, 3> recs{};
  recs[0] = {-1, -2.0, 0.1, 0.1, -1.0, 0.0, 0.0, true};
  recs[1] = {0, 0.0, 0.8, 0.8, 0.0, 0.0, 1.0, true};
  recs[2] = {1, 2.0, 0.1, 0.1, 1.2, 0.0, 0.0, true};
  EXPECT_NEAR(effective_delta_beta(recs), (2.0 + 2.4) / 8.0, 1e-15);
  for (auto& r : recs) r.defined = false;
  EXPECT_TRUE(std::isnan(effective_delta_beta(recs)));
}

TEST(IntegralFtTest, EveryRowAveragesToOneAndRespectsJensen) {
  for (const ThermalParameters& p : {correlated_preset(), uncorrelated_preset()}) {
    for (double t : grid()) {
      const Point pt = analyze(p, t);
      const IntegralFtResult& ift = pt.result.integral;
      ASSERT_EQ(ift.rows.size(), 10u);
      EXPECT_EQ(ift.rows[0].name, "sigma");
      for (const IntegralAverage& row : ift.rows) {
        EXPECT_NEAR(row.exp_average, 1.0, 1e-10) << row.name << " t " << t;
        EXPECT_GE(row.mean, -1e-12) << row.name << " t " << t;
      }
      EXPECT_NEAR(ift.evaluated_mass, 1.0, 1e-12);
      EXPECT_LT(pt.result.excluded_mass + pt.result.undefined_mass, 1e-12);
    }
  }
}

TEST(IntegralFtTest, CorrelationsBreakTheHeatOnlyIdentity) {
  const Point pt = analyze(correlated_preset(), 1.88e-3);
  EXPECT_GT(std::abs(pt.result.integral.jw_average - 1.0), 1e-3);
}

TEST(AnalyzeTimePointTest, RejectsNonUnitaryPropagator) {
  const ThermalParameters p = correlated_preset();
  const ComplexMatrix rho0 = correlated_initial_state(p);
  const ComplexMatrix u = 1.001 * ComplexMatrix::identity(4);
  EXPECT_THROW(analyze_time_point(0.0, rho0, rho0, u, p), NotUnitary);
}

}  // namespace
}  // namespace qfluct
