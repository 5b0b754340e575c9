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

// qfluct: simulate or analyze two-qubit heat exchange and check the
// fluctuation theorems.
//
// Exit status: 0 when every check passes, 2-5 for the first failing check
// category (integral FT, second law, Jarzynski-Wojcik, path mass), 10 for a
// pipeline error, 11 for unreadable input, 1 for bad usage.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qfluct/errors.hpp"
#include "qfluct/report.hpp"

namespace {

constexpr int kExitPipeline = 10;
constexpr int kExitInput = 11;
constexpr int kExitUsage = 1;

struct Options {
  std::string config_file;
  std::string preset;
  std::vector<double> alpha;
  std::optional<double> beta_a_inv;
  std::optional<double> beta_b_inv;
  std::optional<double> nu0;
  std::optional<double> coupling;
  std::optional<double> t_max_ms;
  std::optional<std::size_t> t_points;
  std::vector<double> times_ms;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool literal_rho0_j = false;
  std::optional<double> noise_sigma;
  std::optional<std::size_t> resamples;
  std::optional<double> tolerance;
  std::optional<double> snap_tolerance;
  std::string snapshots;
  std::string format = "json";
  std::vector<std::string> compare_files;
  bool quiet = false;
};

void add_model_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_file, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--preset", o.preset, "correlated | uncorrelated")
      ->check(CLI::IsMember({"correlated", "uncorrelated"}));
  cmd->add_option("--alpha", o.alpha, "correlation amplitude: RE IM")->expected(2);
  cmd->add_option("--beta-a-inv", o.beta_a_inv, "inverse temperature of A, peV");
  cmd->add_option("--beta-b-inv", o.beta_b_inv, "inverse temperature of B, peV");
  cmd->add_option("--nu0", o.nu0, "qubit frequency, Hz");
  cmd->add_option("--coupling", o.coupling, "exchange coupling J, Hz");
  cmd->add_option("--t-max", o.t_max_ms, "last interaction time, ms");
  cmd->add_option("--t-points", o.t_points, "number of grid points");
  cmd->add_option("--times", o.times_ms, "explicit interaction times, ms (first must be 0)");
  cmd->add_flag("--literal-rho0-j", o.literal_rho0_j,
                "read both joint probabilities P_{a_l b_l} from rho0");
  cmd->add_option("--snap-tolerance", o.snap_tolerance, "heat snapping tolerance, peV");
  cmd->add_option("--tolerance", o.tolerance, "fluctuation-theorem tolerance");
}

void add_uncertainty_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--noise-sigma", o.noise_sigma, "per-entry Gaussian std for Monte-Carlo");
  cmd->add_option("--resamples", o.resamples, "Monte-Carlo resamples");
  cmd->add_option("--seed", o.seed, "random seed");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qfluct::ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

qfluct::RunConfig build_config(const Options& o, qfluct::RunMode mode) {
  qfluct::RunConfig c;
  if (!o.config_file.empty()) c = qfluct::config_from_json(read_text(o.config_file));
  if (!o.preset.empty()) {
    c.preset = o.preset;
    c.thermal = qfluct::preset_by_name(o.preset);
  }
  if (o.alpha.size() == 2) c.thermal.alpha = qfluct::Complex(o.alpha[0], o.alpha[1]);
  if (o.beta_a_inv) c.thermal.beta_a = 1.0 / *o.beta_a_inv;
  if (o.beta_b_inv) c.thermal.beta_b = 1.0 / *o.beta_b_inv;
  if (o.nu0) c.thermal.nu0 = *o.nu0;
  if (o.coupling) c.thermal.coupling_j = *o.coupling;
  if (!o.times_ms.empty()) {
    std::vector<double> t;
    for (double ms : o.times_ms) t.push_back(ms * 1e-3);
    c.grid = qfluct::TimeGrid::from_times(std::move(t));
  } else if (o.t_max_ms || o.t_points) {
    const double t_max = o.t_max_ms ? *o.t_max_ms * 1e-3 : c.grid.times().back();
    const std::size_t n = o.t_points ? *o.t_points : c.grid.size();
    c.grid = qfluct::TimeGrid::uniform(t_max, n);
  }
  if (o.literal_rho0_j) c.joint_state = qfluct::JointProbabilityState::kLiteralInitial;
  if (o.snap_tolerance) c.heat_snap_tolerance = *o.snap_tolerance;
  if (o.tolerance) c.tolerance = *o.tolerance;
  if (o.seed) c.seed = *o.seed;
  if (o.noise_sigma || o.resamples) {
    qfluct::UncertaintyConfig u = c.uncertainty.value_or(qfluct::UncertaintyConfig{});
    if (o.noise_sigma) u.noise_sigma = *o.noise_sigma;
    if (o.resamples) u.n_resamples = *o.resamples;
    u.seed = c.seed;
    c.uncertainty = u;
  }
  c.mode = mode;
  if (!o.snapshots.empty()) c.snapshot_file = o.snapshots;
  return c;
}

std::string g(double x, int digits = 6) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

void print_summary(const qfluct::FtReport& r, std::ostream& os) {
  os << "time_ms  max|<e^-X>-1|  <sigma>  <e^-QdB>  psi(-1)  psi(0)  psi(+1)  verdict\n";
  for (const qfluct::TimePointReport& p : r.points) {
    double worst = 0.0;
    for (const auto& row : p.integral) worst = std::max(worst, row.deviation);
    os << g(p.time * 1e3, 5) << "  " << g(worst, 3) << "  " << g(p.mean_sigma, 3) << "  "
       << g(p.jw_average, 12) << "  " << g(p.detailed[0].psi, 6) << "  "
       << g(p.detailed[1].psi, 6) << "  " << g(p.detailed[2].psi, 6) << "  ";
    if (p.pass()) {
      os << "PASS";
    } else {
      os << "FAIL";
      for (auto c : p.failures) os << ' ' << qfluct::to_string(c);
    }
    os << '\n';
  }
  os << (r.pass() ? "all checks passed" : "checks failed") << " (" << r.points.size()
     << " time points, tolerance " << g(r.config.tolerance, 3) << ")\n";
}

int run_report(const qfluct::RunConfig& config, bool quiet) {
  const qfluct::FtReport report = qfluct::run(config);
  if (!quiet) print_summary(report, std::cout);
  if (!config.output_dir.empty()) std::cout << "outputs written to " << config.output_dir << '\n';
  return report.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qfluct: quantum fluctuation theorems for two correlated thermal qubits"};
  app.require_subcommand(1);
  Options o;

  CLI::App* simulate = app.add_subcommand("simulate", "simulate a run, check and export results");
  add_model_options(simulate, o);
  add_uncertainty_options(simulate, o);
  simulate->add_option("--out", o.out, "output directory for CSV and JSON files");
  simulate->add_flag("--quiet", o.quiet, "do not print the verdict table");

  CLI::App* analyze = app.add_subcommand("analyze", "analyze a density-matrix snapshot file");
  add_model_options(analyze, o);
  add_uncertainty_options(analyze, o);
  analyze->add_option("--snapshots", o.snapshots, "snapshot file (.json or .csv)")
      ->required()
      ->check(CLI::ExistingFile);
  analyze->add_option("--out", o.out, "output directory for CSV and JSON files");
  analyze->add_flag("--quiet", o.quiet, "do not print the verdict table");

  CLI::App* check = app.add_subcommand("check", "print fluctuation-theorem verdicts only");
  add_model_options(check, o);
  add_uncertainty_options(check, o);
  check->add_option("--snapshots", o.snapshots, "analyze this snapshot file instead")
      ->check(CLI::ExistingFile);

  CLI::App* exporter = app.add_subcommand("export", "write simulated states as a snapshot file");
  add_model_options(exporter, o);
  exporter->add_option("--out", o.out, "snapshot file")->required();
  exporter->add_option("--format", o.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

  CLI::App* compare = app.add_subcommand("compare", "diff two summary.json files");
  compare->add_option("files", o.compare_files, "A.json B.json")->expected(2)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*simulate) {
      qfluct::RunConfig c = build_config(o, qfluct::RunMode::kSimulate);
      if (!o.out.empty()) c.output_dir = o.out;
      return run_report(c, o.quiet);
    }
    if (*analyze) {
      qfluct::RunConfig c = build_config(o, qfluct::RunMode::kAnalyze);
      if (!o.out.empty()) c.output_dir = o.out;
      return run_report(c, o.quiet);
    }
    if (*check) {
      qfluct::RunConfig c = build_config(
          o, o.snapshots.empty() ? qfluct::RunMode::kSimulate : qfluct::RunMode::kAnalyze);
      c.output_dir.clear();
      return run_report(c, false);
    }
    if (*exporter) {
      const qfluct::RunConfig c = build_config(o, qfluct::RunMode::kSimulate);
      const auto snapshots = qfluct::simulate_snapshots(c);
      qfluct::export_snapshots(snapshots, o.out,
                               o.format == "csv" ? qfluct::SnapshotFormat::kCsv
                                                 : qfluct::SnapshotFormat::kJson);
      std::cout << "wrote " << snapshots.size() << " states to " << o.out << '\n';
      return 0;
    }
    if (*compare) {
      const auto a = qfluct::report_from_json(read_text(o.compare_files[0]));
      const auto b = qfluct::report_from_json(read_text(o.compare_files[1]));
      const qfluct::RunComparison cmp = qfluct::compare_runs(a, b);
      std::cout << "max |difference| = " << g(cmp.max_difference, 3) << " over "
                << cmp.diffs.size() << " quantities\n";
      for (const auto& d : cmp.psi_departures) {
        std::cout << "psi departs from 1 at t = " << g(d.time * 1e3, 5) << " ms " << d.quantity
                  << ": " << g(d.a) << " vs " << g(d.b) << '\n';
      }
      return 0;
    }
  } catch (const qfluct::ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const qfluct::InvalidSnapshot& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const qfluct::GridMismatch& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const qfluct::InvalidParameter& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return kExitUsage;
  } catch (const qfluct::AlphaOutOfBound& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPipeline;
  }
  return kExitUsage;
}
