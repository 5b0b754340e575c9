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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "qfluct/errors.hpp"
#include "qfluct/states.hpp"
#include "qfluct/units.hpp"

namespace qfluct {
namespace {

constexpr double kH = 4.135667696e-3;  // peV s

TEST(QubitHamiltonianTest, LevelSpacingIsPlanckTimesFrequency) {
  const QubitHamiltonian h(Subsystem::kA, 1000.0);
  EXPECT_EQ(h.energy(0), 0.0);
  EXPECT_DOUBLE_EQ(h.energy(1), kH * 1000.0);
  EXPECT_NEAR(h.gap(), 4.135667696, 1e-12);
  EXPECT_EQ(h.matrix()(1, 1), Complex(h.gap()));
  EXPECT_THROW(QubitHamiltonian(Subsystem::kB, 0.0), InvalidParameter);
}

TEST(GibbsStateTest, PopulationsFollowBoltzmannWeights) {
  const QubitHamiltonian h(Subsystem::kA, 1000.0);
  const double beta = 1.0 / 4.7;
  const ComplexMatrix g = gibbs_state(beta, h);
  const double w = std::exp(-beta * kH * 1000.0);
  EXPECT_NEAR(g(0, 0).real(), 1.0 / (1.0 + w), 1e-15);
  EXPECT_NEAR(g(1, 1).real(), w / (1.0 + w), 1e-15);
  EXPECT_EQ(g(0, 1), Complex(0.0));
  EXPECT_THROW(gibbs_state(-1.0, h), InvalidParameter);
}

TEST(AlphaBoundTest, EqualsGeometricMeanOfCoupledPopulations) {
  const double ba = 1.0 / 4.7, bb = 1.0 / 3.3;
  const double wa = std::exp(-ba * kH * 1000.0), wb = std::exp(-bb * kH * 1000.0);
  const double p01 = 1.0 / (1.0 + wa) * wb / (1.0 + wb);
  const double p10 = wa / (1.0 + wa) * 1.0 / (1.0 + wb);
  EXPECT_NEAR(alpha_bound(ba, bb, 1000.0), std::sqrt(p01 * p10), 1e-15);
  EXPECT_NEAR(alpha_bound(ba, bb, 1000.0), 0.189231, 1e-6);
}

TEST(AlphaBoundTest, BoundIsSharp) {
  ThermalParameters p = correlated_preset();
  const double bound = alpha_bound(p.beta_a, p.beta_b, p.nu0);
  const Complex phase = std::polar(1.0, 0.7);

  p.alpha = bound * phase;
  const ValidityVerdict at = validate_density_matrix(correlated_initial_state(p));
  EXPECT_TRUE(at.valid());
  EXPECT_NEAR(at.min_eigenvalue, 0.0, 1e-12);

  p.alpha = (bound + 1e-6) * phase;
  EXPECT_THROW(correlated_initial_state(p), AlphaOutOfBound);
  try {
    correlated_initial_state(p);
  } catch (const AlphaOutOfBound& e) {
    EXPECT_NEAR(e.bound(), bound, 1e-15);
  }
}

TEST(CorrelatedStateTest, PresetIsValidWithCoherenceOnTheExchangePair) {
  const ThermalParameters p = correlated_preset();
  const ComplexMatrix rho = correlated_initial_state(p);
  EXPECT_TRUE(validate_density_matrix(rho).valid());
  EXPECT_EQ(rho(1, 2), Complex(0.17, 0.03));
  EXPECT_EQ(rho(2, 1), Complex(0.17, -0.03));
  // marginals stay thermal
  const QubitHamiltonian ha(Subsystem::kA, p.nu0), hb(Subsystem::kB, p.nu0);
  EXPECT_LT(max_abs(partial_trace(rho, Subsystem::kA) - gibbs_state(p.beta_a, ha)), 1e-15);
  EXPECT_LT(max_abs(partial_trace(rho, Subsystem::kB) - gibbs_state(p.beta_b, hb)), 1e-15);
}

TEST(CorrelatedStateTest, ZeroAlphaIsProductOfGibbsStates) {
  const ThermalParameters p = uncorrelated_preset();
  const QubitHamiltonian ha(Subsystem::kA, p.nu0), hb(Subsystem::kB, p.nu0);
  const ComplexMatrix expected = kron(gibbs_state(p.beta_a, ha), gibbs_state(p.beta_b, hb));
  EXPECT_LT(max_abs(correlated_initial_state(p) - expected), 1e-16);
}

TEST(ThermalParametersTest, PresetsAndValidation) {
  const ThermalParameters c = preset_by_name("correlated");
  EXPECT_DOUBLE_EQ(1.0 / c.beta_a, 4.7);
  EXPECT_DOUBLE_EQ(1.0 / c.beta_b, 3.3);
  EXPECT_EQ(c.coupling_j, 215.1);
  EXPECT_EQ(c.nu0, 1000.0);
  const ThermalParameters u = preset_by_name("uncorrelated");
  EXPECT_DOUBLE_EQ(1.0 / u.beta_a, 4.3);
  EXPECT_DOUBLE_EQ(1.0 / u.beta_b, 3.7);
  EXPECT_EQ(u.alpha, Complex(0.0));
  EXPECT_THROW(preset_by_name("warm"), InvalidParameter);

  ThermalParameters bad = c;
  bad.beta_a = 0.0;
  EXPECT_THROW(bad.validate(), InvalidParameter);
  bad = c;
  bad.coupling_j = -1.0;
  EXPECT_THROW(bad.validate(), InvalidParameter);

  const ThermalParameters f =
      ThermalParameters::from_inverse_temperatures(4.7, 3.3, Complex(0.17, 0.03));
  EXPECT_EQ(f, c);
  EXPECT_NEAR(c.delta_beta(), 1.0 / 4.7 - 1.0 / 3.3, 1e-16);
}

TEST(EffectiveBetaTest, RoundTripsThroughGibbsState) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> inv(0.5, 50.0);
  const QubitHamiltonian h(Subsystem::kA, 1000.0);
  for (int i = 0; i < 500; ++i) {
    const double beta = 1.0 / inv(rng);
    const EffectiveBeta e = effective_local_beta(gibbs_state(beta, h), h);
    ASSERT_EQ(e.status, EffectiveBeta::Status::kThermal);
    ASSERT_NEAR(e.beta, beta, 1e-12 * beta);
  }
}

TEST(EffectiveBetaTest, FlagsCoherenceAndDegeneratePopulations) {
  const QubitHamiltonian h(Subsystem::kA, 1000.0);
  const ComplexMatrix coherent{{0.6, 0.1}, {0.1, 0.4}};
  const EffectiveBeta e = effective_local_beta(coherent, h);
  EXPECT_EQ(e.status, EffectiveBeta::Status::kNotThermal);
  EXPECT_NEAR(e.coherence, 0.1, 1e-15);

  const EffectiveBeta d = effective_local_beta(0.5 * ComplexMatrix::identity(2), h);
  EXPECT_EQ(d.status, EffectiveBeta::Status::kDegeneratePopulations);
  EXPECT_EQ(d.beta, 0.0);
}

}  // namespace
}  // namespace qfluct
