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

#include <benchmark/benchmark.h>

#include "qfluct/dynamics.hpp"
#include "qfluct/functionals.hpp"
#include "qfluct/report.hpp"
#include "qfluct/states.hpp"

namespace {

using namespace qfluct;

void BM_HermitianEig(benchmark::State& state) {
  const ComplexMatrix rho = correlated_initial_state(correlated_preset());
  for (auto _ : state) benchmark::DoNotOptimize(hermitian_eig(rho));
}
BENCHMARK(BM_HermitianEig);

void BM_AnalyzeTimePoint(benchmark::State& state) {
  const ThermalParameters p = correlated_preset();
  const ComplexMatrix rho0 = correlated_initial_state(p);
  const ComplexMatrix u = propagator_at(build_exchange(p.coupling_j, p.nu0), 1.77e-3);
  const ComplexMatrix rho_t = evolve(rho0, u);
  for (auto _ : state) benchmark::DoNotOptimize(analyze_time_point(1.77e-3, rho0, rho_t, u, p));
}
BENCHMARK(BM_AnalyzeTimePoint);

void BM_FullRun(benchmark::State& state) {
  const RunConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(run(config));
}
BENCHMARK(BM_FullRun)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
