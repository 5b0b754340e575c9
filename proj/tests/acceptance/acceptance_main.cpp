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

// Acceptance checks for the two-qubit fluctuation-theorem pipeline. Prints one
// PASS / FAIL line per criterion; exits nonzero if any selected one fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "path_oracle.hpp"
#include "qfluct/dynamics.hpp"
#include "qfluct/functionals.hpp"
#include "qfluct/ingest.hpp"
#include "qfluct/report.hpp"
#include "qfluct/states.hpp"

namespace {

using namespace qfluct;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

RunConfig preset_config(const std::string& name) {
  RunConfig c;
  c.preset = name;
  c.thermal = preset_by_name(name);
  return c;
}

const FtReport& correlated_report() {
  static const FtReport r = run(preset_config("correlated"));
  return r;
}

const FtReport& uncorrelated_report() {
  static const FtReport r = run(preset_config("uncorrelated"));
  return r;
}

double worst_row_deviation(const FtReport& r, const std::function<bool(const std::string&)>& pick) {
  double worst = 0.0;
  for (const TimePointReport& p : r.points) {
    for (const IntegralCheck& c : p.integral) {
      if (pick(c.name)) worst = std::max(worst, std::abs(c.value - 1.0));
    }
  }
  return worst;
}

Outcome composite_integral_ft() {
  const auto start = std::chrono::steady_clock::now();
  const FtReport r = run(preset_config("correlated"));
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double dev = worst_row_deviation(r, [](const std::string& n) { return n == "sigma"; });
  const bool ok = r.points.size() == 22 && dev <= 1e-9 && secs < 1.0;
  return {ok, "max |<e^-sigma> - 1| = " + fmt("%.3g", dev) + " over " +
                  std::to_string(r.points.size()) + " points, runtime " + fmt("%.3g", secs) + " s"};
}

Outcome individual_integral_fts() {
  double worst = 0.0;
  std::size_t rows = 0;
  for (const FtReport* r : {&correlated_report(), &uncorrelated_report()}) {
    worst = std::max(worst, worst_row_deviation(*r, [](const std::string& n) { return n != "sigma"; }));
    for (const TimePointReport& p : r->points) rows += p.integral.size() - 1;
  }
  return {rows == 2 * 22 * 9 && worst <= 1e-9,
          "max |<e^-X> - 1| = " + fmt("%.3g", worst) + " over " + std::to_string(rows) +
              " (functional, time, preset) rows"};
}

Outcome jarzynski_wojcik_limit() {
  const FtReport& r = uncorrelated_report();
  const double dbeta = r.config.thermal.delta_beta();
  double worst_avg = 0.0, worst_ratio = 0.0;
  std::size_t compared = 0;
  for (const TimePointReport& p : r.points) {
    worst_avg = std::max(worst_avg, std::abs(p.jw_plus_average - 1.0));
    for (const DetailedFtRecord& d : p.detailed) {
      if (d.bin == 0 || d.p_forward <= 1e-12 || d.p_reverse_mirror <= 1e-12) continue;
      worst_ratio = std::max(worst_ratio, std::abs(std::log(d.p_forward / d.p_reverse_mirror) -
                                                   d.q * dbeta));
      ++compared;
    }
  }
  const bool avg_ok = worst_avg <= 1e-9;
  const bool ratio_ok = compared > 0 && worst_ratio <= 1e-9;
  return {avg_ok && ratio_ok,
          std::string("<e^{+Q dbeta}> = 1: ") + (avg_ok ? "ok" : "violated") + " (max dev " +
              fmt("%.3g", worst_avg) + "); ln[P_f(Q)/P_r(-Q)] = Q dbeta: " +
              (ratio_ok ? "ok" : "violated") + " (max dev " + fmt("%.3g", worst_ratio) + ", " +
              std::to_string(compared) + " records)"};
}

Outcome detailed_ft_with_correlations() {
  RunConfig c = preset_config("correlated");
  c.grid = TimeGrid::from_times({0.0, 1.88e-3, 2.32e-3});
  const FtReport r = run(c);
  bool ok = true;
  std::string detail;
  for (int bin : {-1, 1}) {
    const DetailedFtRecord& a = r.points[1].detailed[bin + 1];
    const DetailedFtRecord& b = r.points[2].detailed[bin + 1];
    ok = ok && a.defined && b.defined && std::abs(a.psi - 1.0) > 1e-3 &&
         std::abs(b.psi - 1.0) > 1e-3 && std::abs(a.psi - b.psi) > 1e-3;
    detail += std::string(bin < 0 ? "Psi(-h nu0)" : " Psi(+h nu0)") + " = " + fmt("%.6g", a.psi) +
              " @1.88 ms, " + fmt("%.6g", b.psi) + " @2.32 ms;";
  }
  return {ok, detail};
}

Outcome mirror_symmetry() {
  double worst = 0.0;
  for (const TimePointReport& p : uncorrelated_report().points) {
    for (int bin = -1; bin <= 1; ++bin) {
      worst = std::max(worst, std::abs(p.forward[bin + 1] - p.reverse[1 - bin]));
    }
  }
  return {worst <= 1e-10, "max |P_f(Q) - P_r(-Q)| = " + fmt("%.3g", worst)};
}

Outcome second_law() {
  double lowest = 0.0;
  for (const FtReport* r : {&correlated_report(), &uncorrelated_report()}) {
    for (const TimePointReport& p : r->points) {
      lowest = std::min(lowest, p.mean_sigma);
      for (const IntegralCheck& c : p.integral) lowest = std::min(lowest, c.mean);
    }
  }
  return {lowest >= -1e-10, "min over <sigma> and <X> = " + fmt("%.3g", lowest)};
}

Outcome oracle_equivalence() {
  const std::vector<double> times = TimeGrid::default_grid().times();
  std::vector<std::size_t> idx(times.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(20260415);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(5);
  double worst = 0.0;
  std::size_t entries = 0;
  std::string picked;
  for (const char* name : {"correlated", "uncorrelated"}) {
    const ThermalParameters p = preset_by_name(name);
    const oracle::Model m{p.beta_a, p.beta_b, p.nu0, p.coupling_j, p.alpha};
    const ComplexMatrix rho0 = correlated_initial_state(p);
    const ExchangeCoupling c = build_exchange(p.coupling_j, p.nu0);
    for (std::size_t k : idx) {
      const double t = times[k];
      const ComplexMatrix u = propagator_at(c, t);
      const TimePointResult res = analyze_time_point(t, rho0, evolve(rho0, u), u, p);
      const std::vector<oracle::Path> ref = oracle::enumerate_paths(m, t);
      if (ref.size() != res.paths.size()) return {false, "table sizes differ"};
      for (std::size_t i = 0; i < ref.size(); ++i) {
        worst = std::max({worst, std::abs(res.paths[i].p_forward - ref[i].p_forward),
                          std::abs(res.paths[i].p_reverse - ref[i].p_reverse)});
        entries += 2;
      }
    }
  }
  for (std::size_t k : idx) picked += " " + std::to_string(k);
  return {worst <= 1e-10, "max entry difference " + fmt("%.3g", worst) + " over " +
                              std::to_string(entries) + " entries, grid indices" + picked};
}

Outcome structural_checks() {
  double comm = 0.0, unit = 0.0;
  bool states_ok = true, support_ok = true;
  for (const char* name : {"correlated", "uncorrelated"}) {
    const ThermalParameters p = preset_by_name(name);
    const double h_nu0 = 4.135667696e-3 * p.nu0;
    const ComplexMatrix rho0 = correlated_initial_state(p);
    const ExchangeCoupling c = build_exchange(p.coupling_j, p.nu0);
    const TimeGrid grid = TimeGrid::default_grid();
    for (double t : grid.times()) {
      const ComplexMatrix u = propagator_at(c, t);
      const ComplexMatrix rho_t = evolve(rho0, u);
      states_ok = states_ok && validate_density_matrix(rho0).valid() &&
                  validate_density_matrix(rho_t).valid();
      const TimePointResult res = analyze_time_point(t, rho0, rho_t, u, p);
      comm = std::max(comm, res.commutator_norm);
      unit = std::max(unit, res.unitarity_defect);
      support_ok = support_ok && res.forward.level_spacing == h_nu0 &&
                   res.reverse.level_spacing == h_nu0;
      for (const auto& f : res.functionals) {
        if (!f) continue;
        support_ok = support_ok && (f->q_a == -h_nu0 || f->q_a == 0.0 || f->q_a == h_nu0);
      }
    }
  }
  const bool ok = comm < 1e-10 && unit < 1e-10 && states_ok && support_ok;
  return {ok, "max ||[U, H_A + H_B]|| = " + fmt("%.3g", comm) + ", max unitarity defect " +
                  fmt("%.3g", unit) + ", states " + (states_ok ? "valid" : "INVALID") +
                  ", heat support " + (support_ok ? "{-h nu0, 0, +h nu0}" : "OFF SUPPORT")};
}

Outcome ingest_round_trip() {
  const RunConfig sim = preset_config("correlated");
  const FtReport direct = run(sim);
  const auto dir = std::filesystem::temp_directory_path() / "qfluct_acceptance";
  std::filesystem::create_directories(dir);
  const auto file = dir / "states.json";
  export_snapshots(simulate_snapshots(sim), file, SnapshotFormat::kJson);
  RunConfig ana = sim;
  ana.mode = RunMode::kAnalyze;
  ana.snapshot_file = file.string();
  const FtReport analyzed = run(ana);
  std::filesystem::remove_all(dir);
  const RunComparison cmp = compare_runs(direct, analyzed);
  return {!cmp.diffs.empty() && cmp.max_difference <= 1e-12,
          "max difference " + fmt("%.3g", cmp.max_difference) + " over " +
              std::to_string(cmp.diffs.size()) + " compared quantities"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qfluct acceptance checks"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "criterion number(s), default all")
      ->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8, 9};

  const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
      {"composite integral FT", composite_integral_ft},
      {"individual integral FTs", individual_integral_fts},
      {"Jarzynski-Wojcik limit", jarzynski_wojcik_limit},
      {"detailed FT with correlations", detailed_ft_with_correlations},
      {"mirror symmetry", mirror_symmetry},
      {"second law and Jensen", second_law},
      {"oracle equivalence", oracle_equivalence},
      {"structural checks", structural_checks},
      {"ingest round trip", ingest_round_trip},
  };

  int failures = 0;
  for (int n : selected) {
    const auto& [title, check] = criteria[static_cast<std::size_t>(n - 1)];
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d [%s] %s: %s\n", n, o.pass ? "PASS" : "FAIL", title, o.detail.c_str());
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
