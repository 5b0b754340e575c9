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

/// \file report.hpp
/// Run configuration, orchestration of the full pipeline over a time grid,
/// fluctuation-theorem verdicts and CSV / JSON export.

#ifndef QFLUCT_REPORT_HPP
#define QFLUCT_REPORT_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qfluct/dynamics.hpp"
#include "qfluct/errors.hpp"
#include "qfluct/functionals.hpp"
#include "qfluct/ingest.hpp"
#include "qfluct/states.hpp"

namespace qfluct {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr double kDefaultFtTolerance = 1e-9;
/// Excluded or undefined path mass above this fails a run.
inline constexpr double kMaxExcludedMass = 1e-12;

enum class RunMode { kSimulate, kAnalyze };

const char* to_string(RunMode m) noexcept;

struct RunConfig {
  std::string preset = "correlated";
  ThermalParameters thermal = correlated_preset();
  TimeGrid grid = TimeGrid::default_grid();
  RunMode mode = RunMode::kSimulate;
  JointProbabilityState joint_state = JointProbabilityState::kTimeResolved;
  /// peV. Defaults to 1e-6 when simulating and 0.1 h nu0 when analyzing.
  std::optional<double> heat_snap_tolerance;
  /// Snapshot file read in analyze mode; its times replace the grid.
  std::string snapshot_file;
  double tol_psd_ingest = kTolPsdIngest;
  std::optional<UncertaintyConfig> uncertainty;
  /// Where CSV and JSON outputs go; empty disables file output.
  std::string output_dir;
  std::uint64_t seed = 0;
  double tolerance = kDefaultFtTolerance;

  double effective_snap_tolerance() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Serializes to the JSON config format (keys match the struct fields; times
/// in seconds, inverse temperatures in 1/peV, alpha as [re, im]).
std::string config_to_json(const RunConfig& config);
/// Missing keys keep their defaults. Throws ParseError.
RunConfig config_from_json(const std::string& text);

/// Order matters: the exit code of a failing run is the code of the first
/// failing category in this list.
enum class CheckCategory {
  kIntegralFt = 2,
  kSecondLaw = 3,
  kJarzynskiWojcik = 4,
  kPathMass = 5,
};

const char* to_string(CheckCategory c) noexcept;

struct IntegralCheck {
  std::string name;
  double value = 0.0;      ///< <e^{-X}>
  double mean = 0.0;       ///< <X>
  double deviation = 0.0;  ///< |value - 1|
  double stddev = 0.0;     ///< Monte-Carlo std of value, 0 without uncertainty
  bool pass = false;
};

struct TimePointReport {
  double time = 0.0;
  std::vector<IntegralCheck> integral;
  double jw_average = 0.0;       ///< <e^{-Q_A dbeta}>
  double jw_plus_average = 0.0;  ///< <e^{+Q_A dbeta}>
  std::array<DetailedFtRecord, 3> detailed{};
  std::array<double, 3> forward{};
  std::array<double, 3> reverse{};
  double mean_heat = 0.0;
  double mean_sigma = 0.0;
  double effective_delta_beta = 0.0;
  double excluded_mass = 0.0;
  double undefined_mass = 0.0;
  double commutator_norm = 0.0;
  double unitarity_defect = 0.0;
  std::vector<std::string> warnings;
  std::vector<CheckCategory> failures;

  bool pass() const noexcept { return failures.empty(); }
};

struct PathRow {
  double time = 0.0;
  PathLabels labels;
  double p_forward = 0.0;
  double p_reverse = 0.0;
  double p_s = 0.0;
  double p_s_star = 0.0;
  double q = 0.0;
  std::optional<PathFunctionals> functionals;
};

struct FtReport {
  int schema_version = kReportSchemaVersion;
  RunConfig config;
  double level_spacing = 0.0;  ///< h nu0, peV
  std::vector<TimePointReport> points;
  std::vector<PathRow> paths;
  std::optional<MonteCarloSummary> uncertainty;

  bool pass() const noexcept;
  /// Process exit status: 0 on success, else the first failing category.
  int exit_code() const noexcept;
};

/// Raised by run() with the time point and the stage that failed.
class PipelineFailure : public Error {
 public:
  PipelineFailure(std::size_t index, double time, std::string stage, const std::string& what);
  std::size_t index() const noexcept { return index_; }
  double time() const noexcept { return time_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::size_t index_;
  double time_;
  std::string stage_;
};

/// rho(t) = U_t rho0 U_t^dag on the configured grid.
std::vector<StateSnapshot> simulate_snapshots(const RunConfig& config);

/// Full pipeline over snapshots (rho0 = the t = 0 snapshot).
FtReport analyze_snapshots(const RunConfig& config, const std::vector<StateSnapshot>& snapshots);

/// Simulates or loads the states, analyzes them, attaches Monte-Carlo
/// statistics when configured and writes the outputs when output_dir is set.
FtReport run(const RunConfig& config);

/// heat_forward.csv, heat_reverse.csv, detailed_ft.csv, integral_ft.csv,
/// paths.csv and summary.json.
void write_outputs(const FtReport& report, const std::filesystem::path& dir);

std::string report_to_json(const FtReport& report);
/// Reads the summary JSON back (paths are not part of it). Throws ParseError.
FtReport report_from_json(const std::string& text);

struct QuantityDiff {
  double time = 0.0;
  std::string quantity;
  double a = 0.0;
  double b = 0.0;
  double difference = 0.0;  ///< |a - b|, 0 when both are NaN
};

struct RunComparison {
  std::vector<QuantityDiff> diffs;
  double max_difference = 0.0;
  /// Entries of diffs whose psi departs from 1 by more than 1e-3 in either run.
  std::vector<QuantityDiff> psi_departures;
};

/// Per-time, per-quantity differences. Throws GridMismatch when the time
/// grids differ.
RunComparison compare_runs(const FtReport& a, const FtReport& b);

}  // namespace qfluct

#endif  // QFLUCT_REPORT_HPP
