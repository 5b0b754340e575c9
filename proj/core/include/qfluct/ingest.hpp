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

/// \file ingest.hpp
/// Density-matrix time series from files: loading, validation, repair and
/// Monte-Carlo uncertainty propagation.
///
/// JSON layout (schema_version 1):
///
///   {
///     "schema_version": 1,
///     "source": "simulated" | "measured",
///     "times": [t0, t1, ...],                       // seconds
///     "states": [ [[[re, im] x 4] x 4], ... ],      // row-major, |00>,|01>,|10>,|11>
///     "uncertainties": [ [[s x 4] x 4], ... ]       // optional, per-entry std
///   }
///
/// CSV layout: a header line "t,row,col,re,im" followed by 16 lines per time.

#ifndef QFLUCT_INGEST_HPP
#define QFLUCT_INGEST_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qfluct/linalg.hpp"

namespace qfluct {

inline constexpr int kSnapshotSchemaVersion = 1;
/// Default PSD tolerance for ingested states.
inline constexpr double kTolPsdIngest = 1e-3;
/// Hermiticity and trace defects at or below this are left alone.
inline constexpr double kRepairThreshold = 1e-14;

enum class SnapshotSource { kSimulated, kMeasured };

const char* to_string(SnapshotSource s) noexcept;

struct StateSnapshot {
  double time = 0.0;  ///< seconds
  ComplexMatrix rho{4};
  SnapshotSource source = SnapshotSource::kMeasured;
  std::vector<std::string> repair_log;
  /// Per-entry standard deviation (applied to real and imaginary parts).
  std::optional<std::array<double, 16>> uncertainty;
};

enum class SnapshotFormat { kJson, kCsv };

/// Guesses the format from the file extension (".csv" or anything else).
SnapshotFormat format_from_extension(const std::filesystem::path& path);

struct PsdProjection {
  ComplexMatrix rho{4};
  /// Frobenius distance between input and output.
  double distance = 0.0;
  bool changed = false;
};

/// Clips negative eigenvalues to zero and renormalizes to unit trace. States
/// whose smallest eigenvalue is >= -tol are returned unchanged, which makes
/// the projection idempotent bit for bit.
PsdProjection psd_project(const ComplexMatrix& rho, double tol = kDefaultTolPsd);

/// Hermitizes, renormalizes and PSD-projects a snapshot in place, logging each
/// repair. Throws InvalidSnapshot when the smallest eigenvalue is below
/// -tol_psd or the matrix is not finite.
void repair_snapshot(StateSnapshot& snapshot, std::size_t index, double tol_psd = kTolPsdIngest);

std::vector<StateSnapshot> parse_snapshots(const std::string& text, SnapshotFormat format,
                                           double tol_psd = kTolPsdIngest);

/// Reads, validates and repairs a snapshot file. The result is sorted by time.
/// Throws ParseError or InvalidSnapshot.
std::vector<StateSnapshot> load_snapshots(const std::filesystem::path& path, SnapshotFormat format,
                                          double tol_psd = kTolPsdIngest);

std::string serialize_snapshots(std::span<const StateSnapshot> snapshots, SnapshotFormat format);

void export_snapshots(std::span<const StateSnapshot> snapshots, const std::filesystem::path& path,
                      SnapshotFormat format);

struct UncertaintyConfig {
  std::size_t n_resamples = 1000;
  /// Overrides per-entry file uncertainties when set; 0 disables the noise.
  std::optional<double> noise_sigma;
  std::uint64_t seed = 0;

  friend bool operator==(const UncertaintyConfig&, const UncertaintyConfig&) = default;
};

struct QuantityStatistics {
  std::string name;
  double mean = 0.0;
  double stddev = 0.0;
};

struct MonteCarloSummary {
  std::vector<QuantityStatistics> quantities;
  std::size_t resamples = 0;
  std::size_t failed = 0;
};

/// Maps a (perturbed) snapshot series to a flat list of quantities.
using SnapshotPipeline = std::function<std::vector<double>(const std::vector<StateSnapshot>&)>;

/// Perturbs the 16 real degrees of freedom of every state with Gaussian noise,
/// repairs, reruns the pipeline and reports mean and sample standard deviation
/// per quantity. Resample k draws from its own mt19937_64 seeded by
/// (cfg.seed, k), so the result does not depend on evaluation order.
///
/// Throws InvalidParameter if no noise source is available and Error when
/// more than 1% of the resamples fail.
MonteCarloSummary monte_carlo_uncertainty(const std::vector<StateSnapshot>& snapshots,
                                          const UncertaintyConfig& cfg,
                                          const std::vector<std::string>& names,
                                          const SnapshotPipeline& pipeline,
                                          double tol_psd = kTolPsdIngest);

}  // namespace qfluct

#endif  // QFLUCT_INGEST_HPP
