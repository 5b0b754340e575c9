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

#ifndef QFLUCT_UNITS_HPP
#define QFLUCT_UNITS_HPP

#include <numbers>

namespace qfluct {

// Energies are in peV, times in seconds, frequencies in Hz, inverse
// temperatures in 1/peV.

/// Planck constant in peV s (CODATA 2018, exact).
inline constexpr double kPlanckPeVSeconds = 4.135667696e-3;
inline constexpr double kHbarPeVSeconds = kPlanckPeVSeconds / (2.0 * std::numbers::pi);

}  // namespace qfluct

#endif  // QFLUCT_UNITS_HPP
