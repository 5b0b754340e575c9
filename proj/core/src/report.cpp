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

#include "qfluct/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "qfluct/errors.hpp"

namespace qfluct {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kAnalyzeSnapFraction = 0.1;
constexpr double kPsiDepartureThreshold = 1e-3;
constexpr double kGridMatchTolerance = 1e-15;

const char* to_string(JointProbabilityState s) {
  return s == JointProbabilityState::kTimeResolved ? "time_resolved" : "literal_initial";
}

JointProbabilityState joint_state_from(const std::string& s) {
  if (s == "time_resolved") return JointProbabilityState::kTimeResolved;
  if (s == "literal_initial") return JointProbabilityState::kLiteralInitial;
  throw ParseError("unknown joint_state '" + s + "'");
}

RunMode mode_from(const std::string& s) {
  if (s == "simulate") return RunMode::kSimulate;
  if (s == "analyze") return RunMode::kAnalyze;
  throw ParseError("unknown mode '" + s + "'");
}

std::optional<CheckCategory> category_from(const std::string& s) {
  for (CheckCategory c : {CheckCategory::kIntegralFt, CheckCategory::kSecondLaw,
                          CheckCategory::kJarzynskiWojcik, CheckCategory::kPathMass}) {
    if (s == to_string(c)) return c;
  }
  return std::nullopt;
}

// NaN is written as null.
json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double number_from(const json& j) {
  if (j.is_null()) return kNaN;
  if (!j.is_number()) throw ParseError("expected a number");
  return j.get<double>();
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key) || obj[key].is_null()) return fallback;
  try {
    return obj[key].get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("key '") + key + "': " + e.what());
  }
}

json config_object(const RunConfig& c) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["preset"] = c.preset;
  j["thermal"] = {{"beta_a", c.thermal.beta_a},
                  {"beta_b", c.thermal.beta_b},
                  {"nu0", c.thermal.nu0},
                  {"coupling_j", c.thermal.coupling_j},
                  {"alpha", {c.thermal.alpha.real(), c.thermal.alpha.imag()}}};
  j["grid"] = {{"times", c.grid.times()}};
  j["mode"] = to_string(c.mode);
  j["joint_state"] = to_string(c.joint_state);
  j["heat_snap_tolerance"] = c.heat_snap_tolerance ? json(*c.heat_snap_tolerance) : json(nullptr);
  j["snapshot_file"] = c.snapshot_file;
  j["tol_psd_ingest"] = c.tol_psd_ingest;
  if (c.uncertainty) {
    j["uncertainty"] = {{"n_resamples", c.uncertainty->n_resamples},
                        {"noise_sigma", c.uncertainty->noise_sigma
                                            ? json(*c.uncertainty->noise_sigma)
                                            : json(nullptr)},
                        {"seed", c.uncertainty->seed}};
  } else {
    j["uncertainty"] = nullptr;
  }
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  j["tolerance"] = c.tolerance;
  return j;
}

RunConfig config_from_object(const json& j) {
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  RunConfig c;
  c.preset = get_or<std::string>(j, "preset", c.preset);
  try {
    c.thermal = preset_by_name(c.preset);
  } catch (const InvalidParameter& e) {
    throw ParseError(e.what());
  }
  if (j.contains("thermal")) {
    const json& t = j["thermal"];
    if (!t.is_object()) throw ParseError("'thermal' must be an object");
    c.thermal.beta_a = get_or<double>(t, "beta_a", c.thermal.beta_a);
    c.thermal.beta_b = get_or<double>(t, "beta_b", c.thermal.beta_b);
    if (t.contains("beta_a_inv")) c.thermal.beta_a = 1.0 / get_or<double>(t, "beta_a_inv", 0.0);
    if (t.contains("beta_b_inv")) c.thermal.beta_b = 1.0 / get_or<double>(t, "beta_b_inv", 0.0);
    c.thermal.nu0 = get_or<double>(t, "nu0", c.thermal.nu0);
    c.thermal.coupling_j = get_or<double>(t, "coupling_j", c.thermal.coupling_j);
    if (t.contains("alpha")) {
      const json& a = t["alpha"];
      if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number()) {
        throw ParseError("'alpha' must be [re, im]");
      }
      c.thermal.alpha = Complex(a[0].get<double>(), a[1].get<double>());
    }
  }
  try {
    if (j.contains("grid")) {
      const json& g = j["grid"];
      if (g.contains("times")) {
        c.grid = TimeGrid::from_times(g["times"].get<std::vector<double>>());
      } else {
        c.grid = TimeGrid::uniform(get_or<double>(g, "t_max", 2.32e-3),
                                   get_or<std::size_t>(g, "points", 22));
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("'grid': ") + e.what());
  } catch (const InvalidParameter& e) {
    throw ParseError(std::string("'grid': ") + e.what());
  }
  c.mode = mode_from(get_or<std::string>(j, "mode", to_string(c.mode)));
  c.joint_state = joint_state_from(get_or<std::string>(j, "joint_state", to_string(c.joint_state)));
  if (j.contains("heat_snap_tolerance") && !j["heat_snap_tolerance"].is_null()) {
    c.heat_snap_tolerance = get_or<double>(j, "heat_snap_tolerance", 0.0);
  }
  c.snapshot_file = get_or<std::string>(j, "snapshot_file", c.snapshot_file);
  c.tol_psd_ingest = get_or<double>(j, "tol_psd_ingest", c.tol_psd_ingest);
  if (j.contains("uncertainty") && !j["uncertainty"].is_null()) {
    const json& u = j["uncertainty"];
    UncertaintyConfig uc;
    uc.n_resamples = get_or<std::size_t>(u, "n_resamples", uc.n_resamples);
    if (u.contains("noise_sigma") && !u["noise_sigma"].is_null()) {
      uc.noise_sigma = get_or<double>(u, "noise_sigma", 0.0);
    }
    uc.seed = get_or<std::uint64_t>(u, "seed", uc.seed);
    c.uncertainty = uc;
  }
  c.output_dir = get_or<std::string>(j, "output_dir", c.output_dir);
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  c.tolerance = get_or<double>(j, "tolerance", c.tolerance);
  return c;
}

const char* stage_of(const std::exception& e) {
  if (dynamic_cast<const NotHermitian*>(&e) || dynamic_cast<const NoConvergence*>(&e)) {
    return "eigendecomposition";
  }
  if (dynamic_cast<const EnergyConservationViolated*>(&e) || dynamic_cast<const NotUnitary*>(&e)) {
    return "dynamics";
  }
  if (dynamic_cast<const UnsnappableHeat*>(&e)) return "heat binning";
  if (dynamic_cast<const UndefinedOnPath*>(&e)) return "functionals";
  if (dynamic_cast<const InvalidState*>(&e)) return "basis assignment";
  return "analysis";
}

void apply_verdicts(FtReport& report) {
  const RunConfig& c = report.config;
  const bool uncorrelated = c.thermal.alpha == Complex(0.0, 0.0);
  for (TimePointReport& p : report.points) {
    p.failures.clear();
    bool integral_ok = true;
    bool second_law_ok = p.mean_sigma >= -c.tolerance;
    for (IntegralCheck& row : p.integral) {
      row.deviation = std::abs(row.value - 1.0);
      row.pass = row.deviation <= std::max(c.tolerance, 3.0 * row.stddev);
      integral_ok = integral_ok && row.pass;
      second_law_ok = second_law_ok && row.mean >= -c.tolerance;
    }
    bool jw_ok = true;
    if (uncorrelated) {
      jw_ok = std::abs(p.jw_average - 1.0) <= c.tolerance;
      for (const DetailedFtRecord& r : p.detailed) {
        if (r.defined && !(std::abs(r.lhs - r.rhs_jw) <= c.tolerance)) jw_ok = false;
      }
    }
    const bool mass_ok = p.excluded_mass + p.undefined_mass < kMaxExcludedMass;
    if (!integral_ok) p.failures.push_back(CheckCategory::kIntegralFt);
    if (!second_law_ok) p.failures.push_back(CheckCategory::kSecondLaw);
    if (!jw_ok) p.failures.push_back(CheckCategory::kJarzynskiWojcik);
    if (!mass_ok) p.failures.push_back(CheckCategory::kPathMass);
  }
}

struct Flattened {
  std::vector<std::string> names;
  std::vector<double> values;
};

Flattened flatten(const FtReport& r) {
  Flattened f;
  static const char* const kBins[] = {"-1", "0", "+1"};
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    const TimePointReport& p = r.points[i];
    const std::string prefix = "t" + std::to_string(i) + ".";
    for (std::size_t b = 0; b < 3; ++b) {
      f.names.push_back(prefix + "P_f(" + kBins[b] + ")");
      f.values.push_back(p.forward[b]);
    }
    for (std::size_t b = 0; b < 3; ++b) {
      f.names.push_back(prefix + "P_r(" + kBins[b] + ")");
      f.values.push_back(p.reverse[b]);
    }
    for (const IntegralCheck& row : p.integral) {
      f.names.push_back(prefix + "exp(-" + row.name + ")");
      f.values.push_back(row.value);
    }
    f.names.push_back(prefix + "exp(-Q_A*dbeta)");
    f.values.push_back(p.jw_average);
    f.names.push_back(prefix + "exp(+Q_A*dbeta)");
    f.values.push_back(p.jw_plus_average);
    for (std::size_t b = 0; b < 3; ++b) {
      f.names.push_back(prefix + "psi(" + kBins[b] + ")");
      f.values.push_back(p.detailed[b].psi);
    }
  }
  return f;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("write failed for " + path.string());
}

json report_object(const FtReport& r) {
  json j;
  j["schema_version"] = r.schema_version;
  j["metadata"] = {
      {"joint_probability_state", to_string(r.config.joint_state)},
      {"relative_entropy_reference", "initial local marginal <j1|rho_j(0)|j1>"},
      {"reverse_distribution", "time-reversed protocol: rho0 evolved with U^dag"},
      {"averaging_measure", "forward path measure"},
      {"heat_snap_tolerance_peV", r.config.effective_snap_tolerance()},
      {"monte_carlo",
       "per-entry Gaussian perturbation of the Hermitian degrees of freedom, repair, full "
       "re-analysis"}};
  j["config"] = config_object(r.config);
  j["level_spacing_peV"] = r.level_spacing;
  j["pass"] = r.pass();
  j["exit_code"] = r.exit_code();
  json points = json::array();
  for (const TimePointReport& p : r.points) {
    json jp;
    jp["time_s"] = p.time;
    json integral = json::array();
    for (const IntegralCheck& row : p.integral) {
      integral.push_back({{"name", row.name},
                          {"value", number(row.value)},
                          {"mean", number(row.mean)},
                          {"deviation", number(row.deviation)},
                          {"stddev", number(row.stddev)},
                          {"pass", row.pass}});
    }
    jp["integral"] = integral;
    jp["jw_average"] = number(p.jw_average);
    jp["jw_plus_average"] = number(p.jw_plus_average);
    json detailed = json::array();
    for (const DetailedFtRecord& d : p.detailed) {
      detailed.push_back({{"bin", d.bin},
                          {"q_peV", d.q},
                          {"p_forward", number(d.p_forward)},
                          {"p_reverse_mirror", number(d.p_reverse_mirror)},
                          {"lhs", number(d.lhs)},
                          {"rhs_jw", number(d.rhs_jw)},
                          {"psi", number(d.psi)},
                          {"defined", d.defined}});
    }
    jp["detailed"] = detailed;
    jp["forward"] = {number(p.forward[0]), number(p.forward[1]), number(p.forward[2])};
    jp["reverse"] = {number(p.reverse[0]), number(p.reverse[1]), number(p.reverse[2])};
    jp["mean_heat_peV"] = number(p.mean_heat);
    jp["mean_sigma"] = number(p.mean_sigma);
    jp["effective_delta_beta"] = number(p.effective_delta_beta);
    jp["excluded_mass"] = number(p.excluded_mass);
    jp["undefined_mass"] = number(p.undefined_mass);
    jp["commutator_norm"] = number(p.commutator_norm);
    jp["unitarity_defect"] = number(p.unitarity_defect);
    jp["warnings"] = p.warnings;
    json failures = json::array();
    for (CheckCategory c : p.failures) failures.push_back(to_string(c));
    jp["failures"] = failures;
    points.push_back(jp);
  }
  j["points"] = points;
  if (r.uncertainty) {
    json q = json::array();
    for (const QuantityStatistics& s : r.uncertainty->quantities) {
      q.push_back({{"name", s.name}, {"mean", number(s.mean)}, {"stddev", number(s.stddev)}});
    }
    j["uncertainty"] = {{"resamples", r.uncertainty->resamples},
                        {"failed", r.uncertainty->failed},
                        {"quantities", q}};
  } else {
    j["uncertainty"] = nullptr;
  }
  return j;
}

void add_diff(RunComparison& out, double time, std::string name, double a, double b) {
  QuantityDiff d{time, std::move(name), a, b, 0.0};
  if (std::isnan(a) && std::isnan(b)) {
    d.difference = 0.0;
  } else if (std::isnan(a) || std::isnan(b)) {
    d.difference = std::numeric_limits<double>::infinity();
  } else {
    d.difference = std::abs(a - b);
  }
  out.max_difference = std::max(out.max_difference, d.difference);
  out.diffs.push_back(std::move(d));
}

}  // namespace

const char* to_string(RunMode m) noexcept {
  return m == RunMode::kSimulate ? "simulate" : "analyze";
}

const char* to_string(CheckCategory c) noexcept {
  switch (c) {
    case CheckCategory::kIntegralFt:
      return "integral_ft";
    case CheckCategory::kSecondLaw:
      return "second_law";
    case CheckCategory::kJarzynskiWojcik:
      return "jarzynski_wojcik";
    case CheckCategory::kPathMass:
      return "path_mass";
  }
  return "unknown";
}

double RunConfig::effective_snap_tolerance() const {
  if (heat_snap_tolerance) return *heat_snap_tolerance;
  return mode == RunMode::kSimulate ? kDefaultHeatSnapTolerance
                                    : kAnalyzeSnapFraction * thermal.level_spacing();
}

std::string config_to_json(const RunConfig& config) { return config_object(config).dump(2) + "\n"; }

RunConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config JSON: ") + e.what());
  }
  return config_from_object(j);
}

bool FtReport::pass() const noexcept {
  return std::all_of(points.begin(), points.end(),
                     [](const TimePointReport& p) { return p.pass(); });
}

int FtReport::exit_code() const noexcept {
  int code = 0;
  for (const TimePointReport& p : points) {
    for (CheckCategory c : p.failures) {
      const int v = static_cast<int>(c);
      if (code == 0 || v < code) code = v;
    }
  }
  return code;
}

PipelineFailure::PipelineFailure(std::size_t index, double time, std::string stage,
                                 const std::string& what)
    : Error("time point " + std::to_string(index) + " (t = " + fmt(time) + " s), stage '" + stage +
            "': " + what),
      index_(index),
      time_(time),
      stage_(std::move(stage)) {}

std::vector<StateSnapshot> simulate_snapshots(const RunConfig& config) {
  config.thermal.validate();
  const ComplexMatrix rho0 = correlated_initial_state(config.thermal);
  const ExchangeCoupling coupling = build_exchange(config.thermal.coupling_j, config.thermal.nu0);
  std::vector<StateSnapshot> out;
  out.reserve(config.grid.size());
  for (std::size_t i = 0; i < config.grid.size(); ++i) {
    const double t = config.grid[i];
    StateSnapshot s;
    s.time = t;
    s.source = SnapshotSource::kSimulated;
    try {
      s.rho = evolve(rho0, propagator_at(coupling, t));
    } catch (const Error& e) {
      throw PipelineFailure(i, t, "dynamics", e.what());
    }
    out.push_back(std::move(s));
  }
  return out;
}

FtReport analyze_snapshots(const RunConfig& config, const std::vector<StateSnapshot>& snapshots) {
  if (snapshots.empty()) throw InvalidParameter("no snapshots to analyze");
  std::vector<double> times;
  times.reserve(snapshots.size());
  for (const StateSnapshot& s : snapshots) times.push_back(s.time);

  FtReport report;
  report.config = config;
  report.config.grid = TimeGrid::from_times(times);
  report.level_spacing = config.thermal.level_spacing();

  const ExchangeCoupling coupling = build_exchange(config.thermal.coupling_j, config.thermal.nu0);
  AnalysisOptions options;
  options.joint_state = config.joint_state;
  options.heat_snap_tolerance = config.effective_snap_tolerance();
  options.mode =
      config.mode == RunMode::kSimulate ? AssignmentMode::kSimulation : AssignmentMode::kIngest;
  const double tol_psd = config.mode == RunMode::kSimulate ? kDefaultTolPsd : config.tol_psd_ingest;
  const ComplexMatrix& rho0 = snapshots.front().rho;

  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    const double t = snapshots[i].time;
    const ValidityVerdict v = validate_density_matrix(snapshots[i].rho, tol_psd);
    if (!v.valid()) {
      std::string what = "invalid state:";
      for (Violation x : v.violations) what += std::string(" ") + to_string(x);
      throw PipelineFailure(i, t, "state validation", what);
    }
    TimePointResult res;
    try {
      const ComplexMatrix u = propagator_at(coupling, t);
      res = analyze_time_point(t, rho0, snapshots[i].rho, u, config.thermal, options);
    } catch (const Error& e) {
      throw PipelineFailure(i, t, stage_of(e), e.what());
    }

    TimePointReport p;
    p.time = t;
    for (const IntegralAverage& row : res.integral.rows) {
      IntegralCheck c;
      c.name = row.name;
      c.value = row.exp_average;
      c.mean = row.mean;
      p.integral.push_back(c);
    }
    p.jw_average = res.integral.jw_average;
    p.jw_plus_average = res.integral.jw_plus_average;
    p.detailed = res.detailed;
    p.forward = res.forward.masses;
    p.reverse = res.reverse.masses;
    p.mean_heat = res.integral.mean_heat;
    p.mean_sigma = res.integral.rows.front().mean;
    p.effective_delta_beta = res.effective_delta_beta;
    p.excluded_mass = res.excluded_mass;
    p.undefined_mass = res.undefined_mass;
    p.commutator_norm = res.commutator_norm;
    p.unitarity_defect = res.unitarity_defect;
    p.warnings = res.bases.warnings;
    for (const std::string& w : res.reversed.bases.warnings) p.warnings.push_back("reverse: " + w);
    report.points.push_back(std::move(p));

    for (std::size_t k = 0; k < res.paths.size(); ++k) {
      const PathRecord& rec = res.paths[k];
      PathRow row;
      row.time = t;
      row.labels = rec.labels;
      row.p_forward = rec.p_forward;
      row.p_reverse = rec.p_reverse;
      row.p_s = res.bases.global_initial.eigenvalues[rec.labels.s];
      row.p_s_star = res.bases.global_final.eigenvalues[res.bases.partner[rec.labels.s]];
      try {
        row.q = heat_of_path(rec, res.bases, options.heat_snap_tolerance).snapped;
      } catch (const UnsnappableHeat& e) {
        row.q = e.raw();
      }
      row.functionals = res.functionals[k];
      report.paths.push_back(row);
    }
  }
  apply_verdicts(report);
  return report;
}

FtReport run(const RunConfig& config) {
  config.thermal.validate();
  std::vector<StateSnapshot> snapshots;
  if (config.mode == RunMode::kSimulate) {
    snapshots = simulate_snapshots(config);
  } else {
    if (config.snapshot_file.empty()) throw InvalidParameter("analyze mode needs a snapshot file");
    snapshots = load_snapshots(config.snapshot_file, format_from_extension(config.snapshot_file),
                               config.tol_psd_ingest);
  }
  FtReport report = analyze_snapshots(config, snapshots);

  if (config.uncertainty) {
    RunConfig mc = report.config;
    mc.mode = RunMode::kAnalyze;
    mc.uncertainty.reset();
    mc.output_dir.clear();
    const Flattened base = flatten(report);
    SnapshotPipeline pipeline = [mc](const std::vector<StateSnapshot>& s) {
      FtReport r = analyze_snapshots(mc, s);
      return flatten(r).values;
    };
    report.uncertainty = monte_carlo_uncertainty(snapshots, *config.uncertainty, base.names,
                                                 pipeline, config.tol_psd_ingest);
    for (std::size_t i = 0; i < report.points.size(); ++i) {
      const std::string prefix = "t" + std::to_string(i) + ".exp(-";
      for (IntegralCheck& row : report.points[i].integral) {
        const std::string name = prefix + row.name + ")";
        for (const QuantityStatistics& q : report.uncertainty->quantities) {
          if (q.name == name) row.stddev = q.stddev;
        }
      }
    }
    apply_verdicts(report);
  }

  if (!config.output_dir.empty()) write_outputs(report, config.output_dir);
  return report;
}

void write_outputs(const FtReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string version = "# schema_version: " + std::to_string(report.schema_version) + "\n";

  std::string forward = version + "time_s,q_peV,probability\n";
  std::string reverse = forward;
  std::string detailed =
      version + "time_s,q_peV,p_forward,p_reverse_mirror,lhs_nats,rhs_jw_nats,psi,defined\n";
  std::string integral = version + "time_s,quantity,exp_average,mean_nats,abs_deviation,stddev,pass\n";
  for (const TimePointReport& p : report.points) {
    const std::string t = fmt(p.time);
    for (int b = -1; b <= 1; ++b) {
      const std::size_t k = static_cast<std::size_t>(b + 1);
      const std::string q = fmt(b * report.level_spacing);
      forward += t + ',' + q + ',' + fmt(p.forward[k]) + '\n';
      reverse += t + ',' + q + ',' + fmt(p.reverse[k]) + '\n';
      const DetailedFtRecord& d = p.detailed[k];
      detailed += t + ',' + q + ',' + fmt(d.p_forward) + ',' + fmt(d.p_reverse_mirror) + ',' +
                  fmt(d.lhs) + ',' + fmt(d.rhs_jw) + ',' + fmt(d.psi) + ',' +
                  (d.defined ? "1" : "0") + '\n';
    }
    for (const IntegralCheck& row : p.integral) {
      integral += t + ',' + row.name + ',' + fmt(row.value) + ',' + fmt(row.mean) + ',' +
                  fmt(row.deviation) + ',' + fmt(row.stddev) + ',' + (row.pass ? "1" : "0") + '\n';
    }
    integral += t + ",jw:exp(-Q_A*dbeta)," + fmt(p.jw_average) + ",nan," +
                fmt(std::abs(p.jw_average - 1.0)) + ",0,nan\n";
    integral += t + ",jw:exp(+Q_A*dbeta)," + fmt(p.jw_plus_average) + ",nan," +
                fmt(std::abs(p.jw_plus_average - 1.0)) + ",0,nan\n";
  }

  std::string paths = version +
                      "time_s,s,a0,b0,a1,b1,p_forward,p_reverse,p_s,p_s_star,q_peV,i0,i1,j0,j1,c0,"
                      "c1,sigma_a,sigma_b,gamma,sigma,defined\n";
  for (const PathRow& r : report.paths) {
    const PathLabels& l = r.labels;
    paths += fmt(r.time) + ',' + std::to_string(l.s) + ',' + std::to_string(l.a0) + ',' +
             std::to_string(l.b0) + ',' + std::to_string(l.a1) + ',' + std::to_string(l.b1) + ',' +
             fmt(r.p_forward) + ',' + fmt(r.p_reverse) + ',' + fmt(r.p_s) + ',' + fmt(r.p_s_star) +
             ',' + fmt(r.q);
    if (r.functionals) {
      const PathFunctionals& f = *r.functionals;
      for (double x : {f.i0, f.i1, f.j0, f.j1, f.c0, f.c1, f.sigma_a, f.sigma_b, f.gamma,
                       f.sigma_total}) {
        paths += ',' + fmt(x);
      }
      paths += ",1\n";
    } else {
      paths += ",nan,nan,nan,nan,nan,nan,nan,nan,nan,nan,0\n";
    }
  }

  write_file(dir / "heat_forward.csv", forward);
  write_file(dir / "heat_reverse.csv", reverse);
  write_file(dir / "detailed_ft.csv", detailed);
  write_file(dir / "integral_ft.csv", integral);
  write_file(dir / "paths.csv", paths);
  write_file(dir / "summary.json", report_to_json(report));
}

std::string report_to_json(const FtReport& report) { return report_object(report).dump(2) + "\n"; }

FtReport report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("report JSON: ") + e.what());
  }
  try {
    FtReport r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kReportSchemaVersion) throw ParseError("unsupported schema_version");
    r.config = config_from_object(j.at("config"));
    r.level_spacing = j.at("level_spacing_peV").get<double>();
    for (const json& jp : j.at("points")) {
      TimePointReport p;
      p.time = jp.at("time_s").get<double>();
      for (const json& row : jp.at("integral")) {
        IntegralCheck c;
        c.name = row.at("name").get<std::string>();
        c.value = number_from(row.at("value"));
        c.mean = number_from(row.at("mean"));
        c.deviation = number_from(row.at("deviation"));
        c.stddev = number_from(row.at("stddev"));
        c.pass = row.at("pass").get<bool>();
        p.integral.push_back(c);
      }
      p.jw_average = number_from(jp.at("jw_average"));
      p.jw_plus_average = number_from(jp.at("jw_plus_average"));
      const json& det = jp.at("detailed");
      if (det.size() != 3) throw ParseError("'detailed' needs three records");
      for (std::size_t k = 0; k < 3; ++k) {
        DetailedFtRecord& d = p.detailed[k];
        d.bin = det[k].at("bin").get<int>();
        d.q = det[k].at("q_peV").get<double>();
        d.p_forward = number_from(det[k].at("p_forward"));
        d.p_reverse_mirror = number_from(det[k].at("p_reverse_mirror"));
        d.lhs = number_from(det[k].at("lhs"));
        d.rhs_jw = number_from(det[k].at("rhs_jw"));
        d.psi = number_from(det[k].at("psi"));
        d.defined = det[k].at("defined").get<bool>();
      }
      for (std::size_t k = 0; k < 3; ++k) {
        p.forward[k] = number_from(jp.at("forward").at(k));
        p.reverse[k] = number_from(jp.at("reverse").at(k));
      }
      p.mean_heat = number_from(jp.at("mean_heat_peV"));
      p.mean_sigma = number_from(jp.at("mean_sigma"));
      p.effective_delta_beta = number_from(jp.at("effective_delta_beta"));
      p.excluded_mass = number_from(jp.at("excluded_mass"));
      p.undefined_mass = number_from(jp.at("undefined_mass"));
      p.commutator_norm = number_from(jp.at("commutator_norm"));
      p.unitarity_defect = number_from(jp.at("unitarity_defect"));
      p.warnings = jp.at("warnings").get<std::vector<std::string>>();
      for (const json& f : jp.at("failures")) {
        const auto c = category_from(f.get<std::string>());
        if (!c) throw ParseError("unknown failure category");
        p.failures.push_back(*c);
      }
      r.points.push_back(std::move(p));
    }
    if (j.contains("uncertainty") && !j["uncertainty"].is_null()) {
      const json& u = j["uncertainty"];
      MonteCarloSummary s;
      s.resamples = u.at("resamples").get<std::size_t>();
      s.failed = u.at("failed").get<std::size_t>();
      for (const json& q : u.at("quantities")) {
        s.quantities.push_back({q.at("name").get<std::string>(), number_from(q.at("mean")),
                                number_from(q.at("stddev"))});
      }
      r.uncertainty = s;
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("report JSON: ") + e.what());
  }
}

RunComparison compare_runs(const FtReport& a, const FtReport& b) {
  if (a.points.size() != b.points.size()) {
    throw GridMismatch("reports have " + std::to_string(a.points.size()) + " and " +
                       std::to_string(b.points.size()) + " time points");
  }
  RunComparison out;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    const TimePointReport& pa = a.points[i];
    const TimePointReport& pb = b.points[i];
    if (std::abs(pa.time - pb.time) > kGridMatchTolerance) {
      throw GridMismatch("time point " + std::to_string(i) + " differs: " + fmt(pa.time) +
                         " vs " + fmt(pb.time));
    }
    const double t = pa.time;
    const std::size_t rows = std::min(pa.integral.size(), pb.integral.size());
    for (std::size_t k = 0; k < rows; ++k) {
      add_diff(out, t, "exp(-" + pa.integral[k].name + ")", pa.integral[k].value,
               pb.integral[k].value);
      add_diff(out, t, "mean(" + pa.integral[k].name + ")", pa.integral[k].mean,
               pb.integral[k].mean);
    }
    add_diff(out, t, "exp(-Q_A*dbeta)", pa.jw_average, pb.jw_average);
    add_diff(out, t, "exp(+Q_A*dbeta)", pa.jw_plus_average, pb.jw_plus_average);
    add_diff(out, t, "mean_heat", pa.mean_heat, pb.mean_heat);
    static const char* const kBins[] = {"-1", "0", "+1"};
    for (std::size_t k = 0; k < 3; ++k) {
      const std::string bin = kBins[k];
      add_diff(out, t, "P_f(" + bin + ")", pa.forward[k], pb.forward[k]);
      add_diff(out, t, "P_r(" + bin + ")", pa.reverse[k], pb.reverse[k]);
      add_diff(out, t, "lhs(" + bin + ")", pa.detailed[k].lhs, pb.detailed[k].lhs);
      add_diff(out, t, "psi(" + bin + ")", pa.detailed[k].psi, pb.detailed[k].psi);
      const double psi_a = pa.detailed[k].psi;
      const double psi_b = pb.detailed[k].psi;
      if (std::abs(psi_a - 1.0) > kPsiDepartureThreshold ||
          std::abs(psi_b - 1.0) > kPsiDepartureThreshold) {
        out.psi_departures.push_back(out.diffs.back());
      }
    }
  }
  return out;
}

}  // namespace qfluct
