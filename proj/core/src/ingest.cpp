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

#include "qfluct/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qfluct/errors.hpp"

namespace qfluct {

namespace {

using nlohmann::json;

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_defect(const char* what, double defect) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s (defect %.3e)", what, defect);
  return buf;
}

SnapshotSource parse_source(const std::string& s) {
  if (s == "simulated") return SnapshotSource::kSimulated;
  if (s == "measured") return SnapshotSource::kMeasured;
  throw ParseError("unknown snapshot source '" + s + "'");
}

ComplexMatrix matrix_from_json(const json& j, std::size_t index) {
  const std::string where = "states[" + std::to_string(index) + "]";
  if (!j.is_array() || j.size() != 4) throw ParseError(where + " must be a 4x4 array");
  ComplexMatrix m(4);
  for (int r = 0; r < 4; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || row.size() != 4) throw ParseError(where + " row must have 4 entries");
    for (int c = 0; c < 4; ++c) {
      const json& e = row[static_cast<std::size_t>(c)];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        throw ParseError(where + " entries must be [re, im] number pairs");
      }
      m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

std::array<double, 16> uncertainty_from_json(const json& j, std::size_t index) {
  const std::string where = "uncertainties[" + std::to_string(index) + "]";
  if (!j.is_array() || j.size() != 4) throw ParseError(where + " must be a 4x4 array");
  std::array<double, 16> out{};
  for (std::size_t r = 0; r < 4; ++r) {
    if (!j[r].is_array() || j[r].size() != 4) throw ParseError(where + " row must have 4 entries");
    for (std::size_t c = 0; c < 4; ++c) {
      if (!j[r][c].is_number()) throw ParseError(where + " entries must be numbers");
      out[r * 4 + c] = j[r][c].get<double>();
      if (!(out[r * 4 + c] >= 0.0)) throw ParseError(where + " entries must be >= 0");
    }
  }
  return out;
}

std::vector<StateSnapshot> parse_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("snapshot JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("snapshot JSON must be an object");
  if (doc.contains("schema_version") &&
      (!doc["schema_version"].is_number_integer() ||
       doc["schema_version"].get<int>() != kSnapshotSchemaVersion)) {
    throw ParseError("unsupported snapshot schema_version");
  }
  if (!doc.contains("times") || !doc["times"].is_array()) throw ParseError("missing 'times' array");
  if (!doc.contains("states") || !doc["states"].is_array()) {
    throw ParseError("missing 'states' array");
  }
  const json& times = doc["times"];
  const json& states = doc["states"];
  if (times.size() != states.size()) throw ParseError("'times' and 'states' differ in length");
  SnapshotSource source = SnapshotSource::kMeasured;
  if (doc.contains("source")) {
    if (!doc["source"].is_string()) throw ParseError("'source' must be a string");
    source = parse_source(doc["source"].get<std::string>());
  }
  const json* unc = nullptr;
  if (doc.contains("uncertainties")) {
    unc = &doc["uncertainties"];
    if (!unc->is_array() || unc->size() != states.size()) {
      throw ParseError("'uncertainties' must match 'states' in length");
    }
  }
  std::vector<StateSnapshot> out(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (!times[i].is_number()) throw ParseError("times must be numbers");
    out[i].time = times[i].get<double>();
    out[i].rho = matrix_from_json(states[i], i);
    out[i].source = source;
    if (unc) out[i].uncertainty = uncertainty_from_json((*unc)[i], i);
  }
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  return out;
}

double parse_number(const std::string& s, std::size_t line_no) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw ParseError("line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

std::vector<StateSnapshot> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  SnapshotSource source = SnapshotSource::kMeasured;
  std::map<double, std::pair<ComplexMatrix, std::array<bool, 16>>> by_time;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string key = "# source:";
      if (line.rfind(key, 0) == 0) {
        std::string v = line.substr(key.size());
        v.erase(0, v.find_first_not_of(' '));
        source = parse_source(v);
      }
      continue;
    }
    if (!header_seen) {
      if (line != "t,row,col,re,im") throw ParseError("CSV header must be 't,row,col,re,im'");
      header_seen = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 5) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 5 fields");
    }
    const double t = parse_number(fields[0], line_no);
    const double row = parse_number(fields[1], line_no);
    const double col = parse_number(fields[2], line_no);
    if (row != std::floor(row) || col != std::floor(col) || row < 0 || row > 3 || col < 0 ||
        col > 3) {
      throw ParseError("line " + std::to_string(line_no) + ": row/col must be 0..3");
    }
    auto [it, inserted] = by_time.try_emplace(t, ComplexMatrix(4), std::array<bool, 16>{});
    const int r = static_cast<int>(row);
    const int c = static_cast<int>(col);
    if (it->second.second[r * 4 + c]) {
      throw ParseError("line " + std::to_string(line_no) + ": duplicate entry");
    }
    it->second.second[r * 4 + c] = true;
    it->second.first(r, c) =
        Complex(parse_number(fields[3], line_no), parse_number(fields[4], line_no));
  }
  if (!header_seen) throw ParseError("CSV snapshot file is empty");
  std::vector<StateSnapshot> out;
  for (const auto& [t, entry] : by_time) {
    if (!std::all_of(entry.second.begin(), entry.second.end(), [](bool b) { return b; })) {
      throw ParseError("time " + format_double(t) + " is missing matrix entries");
    }
    StateSnapshot s;
    s.time = t;
    s.rho = entry.first;
    s.source = source;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

const char* to_string(SnapshotSource s) noexcept {
  return s == SnapshotSource::kSimulated ? "simulated" : "measured";
}

SnapshotFormat format_from_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".csv" ? SnapshotFormat::kCsv : SnapshotFormat::kJson;
}

PsdProjection psd_project(const ComplexMatrix& rho, double tol) {
  PsdProjection out;
  out.rho = rho;
  const SpectralEnsemble eig = hermitian_eig(rho);
  if (eig.eigenvalues.back() >= -tol) return out;
  double total = 0.0;
  std::vector<double> clipped(eig.eigenvalues.size());
  for (std::size_t k = 0; k < clipped.size(); ++k) {
    clipped[k] = std::max(0.0, eig.eigenvalues[k]);
    total += clipped[k];
  }
  ComplexMatrix m(rho.dim());
  for (std::size_t k = 0; k < clipped.size(); ++k) {
    m += Complex(clipped[k] / total) *
         ComplexMatrix::outer(eig.eigenvectors[k], eig.eigenvectors[k]);
  }
  out.rho = hermitian_part(m);
  out.distance = frobenius_norm(out.rho - rho);
  out.changed = true;
  return out;
}

void repair_snapshot(StateSnapshot& s, std::size_t index, double tol_psd) {
  if (!s.rho.all_finite()) throw InvalidSnapshot(index, {"non-finite entry"});
  const double herm = hermiticity_defect(s.rho);
  if (herm > kRepairThreshold) {
    s.rho = hermitian_part(s.rho);
    s.repair_log.push_back(format_defect("hermitized", herm));
  }
  const double tr = trace(s.rho).real();
  if (!(tr > 0.0)) throw InvalidSnapshot(index, {to_string(Violation::kTraceNotOne)});
  if (std::abs(tr - 1.0) > kRepairThreshold) {
    s.rho *= Complex(1.0 / tr);
    s.repair_log.push_back(format_defect("trace renormalized", std::abs(tr - 1.0)));
  }
  const ValidityVerdict v = validate_density_matrix(s.rho, tol_psd);
  if (!v.valid()) {
    std::vector<std::string> names;
    for (Violation x : v.violations) {
      std::string n = to_string(x);
      if (x == Violation::kNegativeEigenvalue) n += " (" + format_double(v.min_eigenvalue) + ")";
      names.push_back(n);
    }
    throw InvalidSnapshot(index, std::move(names));
  }
  const PsdProjection p = psd_project(s.rho);
  if (p.changed) {
    s.rho = p.rho;
    s.repair_log.push_back(format_defect("negative eigenvalues clipped", p.distance));
  }
}

std::vector<StateSnapshot> parse_snapshots(const std::string& text, SnapshotFormat format,
                                           double tol_psd) {
  std::vector<StateSnapshot> out =
      format == SnapshotFormat::kJson ? parse_json(text) : parse_csv(text);
  std::stable_sort(out.begin(), out.end(),
                   [](const StateSnapshot& a, const StateSnapshot& b) { return a.time < b.time; });
  for (std::size_t i = 0; i < out.size(); ++i) repair_snapshot(out[i], i, tol_psd);
  return out;
}

std::vector<StateSnapshot> load_snapshots(const std::filesystem::path& path, SnapshotFormat format,
                                          double tol_psd) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open snapshot file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_snapshots(buf.str(), format, tol_psd);
}

std::string serialize_snapshots(std::span<const StateSnapshot> snapshots, SnapshotFormat format) {
  const SnapshotSource source =
      snapshots.empty() ? SnapshotSource::kSimulated : snapshots.front().source;
  if (format == SnapshotFormat::kCsv) {
    std::string out = std::string("# source: ") + to_string(source) + "\nt,row,col,re,im\n";
    for (const StateSnapshot& s : snapshots) {
      const std::string t = format_double(s.time);
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
          out += t + ',' + std::to_string(r) + ',' + std::to_string(c) + ',' +
                 format_double(s.rho(r, c).real()) + ',' + format_double(s.rho(r, c).imag()) +
                 '\n';
        }
    }
    return out;
  }
  json doc;
  doc["schema_version"] = kSnapshotSchemaVersion;
  doc["source"] = to_string(source);
  json times = json::array();
  json states = json::array();
  json unc = json::array();
  bool any_unc = false;
  for (const StateSnapshot& s : snapshots) {
    times.push_back(s.time);
    json m = json::array();
    for (int r = 0; r < 4; ++r) {
      json row = json::array();
      for (int c = 0; c < 4; ++c) row.push_back({s.rho(r, c).real(), s.rho(r, c).imag()});
      m.push_back(row);
    }
    states.push_back(m);
    if (s.uncertainty) any_unc = true;
  }
  doc["times"] = times;
  doc["states"] = states;
  if (any_unc) {
    for (const StateSnapshot& s : snapshots) {
      json m = json::array();
      for (std::size_t r = 0; r < 4; ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < 4; ++c) {
          row.push_back(s.uncertainty ? (*s.uncertainty)[r * 4 + c] : 0.0);
        }
        m.push_back(row);
      }
      unc.push_back(m);
    }
    doc["uncertainties"] = unc;
  }
  return doc.dump(1) + "\n";
}

void export_snapshots(std::span<const StateSnapshot> snapshots, const std::filesystem::path& path,
                      SnapshotFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write snapshot file " + path.string());
  out << serialize_snapshots(snapshots, format);
  if (!out) throw Error("write failed for " + path.string());
}

MonteCarloSummary monte_carlo_uncertainty(const std::vector<StateSnapshot>& snapshots,
                                          const UncertaintyConfig& cfg,
                                          const std::vector<std::string>& names,
                                          const SnapshotPipeline& pipeline, double tol_psd) {
  if (cfg.n_resamples < 1) throw InvalidParameter("n_resamples must be >= 1");
  if (cfg.noise_sigma && !(*cfg.noise_sigma >= 0.0)) {
    throw InvalidParameter("noise_sigma must be >= 0");
  }
  if (!cfg.noise_sigma) {
    for (const StateSnapshot& s : snapshots) {
      if (!s.uncertainty) {
        throw InvalidParameter("no noise_sigma given and snapshots carry no uncertainties");
      }
    }
  }

  const std::size_t q = names.size();
  std::vector<std::vector<double>> samples;
  samples.reserve(cfg.n_resamples);
  MonteCarloSummary out;
  out.resamples = cfg.n_resamples;

  for (std::size_t k = 0; k < cfg.n_resamples; ++k) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed & 0xffffffffu),
                      static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(k & 0xffffffffu),
                      static_cast<std::uint32_t>(k >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<StateSnapshot> perturbed = snapshots;
    try {
      for (std::size_t i = 0; i < perturbed.size(); ++i) {
        StateSnapshot& s = perturbed[i];
        auto sigma = [&](int r, int c) {
          return cfg.noise_sigma ? *cfg.noise_sigma
                                 : (*s.uncertainty)[static_cast<std::size_t>(r * 4 + c)];
        };
        for (int r = 0; r < 4; ++r) {
          s.rho(r, r) += Complex(sigma(r, r) * normal(rng), 0.0);
          for (int c = r + 1; c < 4; ++c) {
            const double re = sigma(r, c) * normal(rng);
            const double im = sigma(r, c) * normal(rng);
            s.rho(r, c) += Complex(re, im);
            s.rho(c, r) += Complex(re, -im);
          }
        }
        s.repair_log.clear();
        repair_snapshot(s, i, tol_psd);
      }
      std::vector<double> values = pipeline(perturbed);
      if (values.size() != q) throw Error("pipeline returned the wrong number of quantities");
      samples.push_back(std::move(values));
    } catch (const Error&) {
      ++out.failed;
    }
  }
  if (static_cast<double>(out.failed) > 0.01 * static_cast<double>(cfg.n_resamples)) {
    throw Error("Monte-Carlo uncertainty: " + std::to_string(out.failed) + " of " +
                std::to_string(cfg.n_resamples) + " resamples failed");
  }

  const double n = static_cast<double>(samples.size());
  out.quantities.resize(q);
  for (std::size_t j = 0; j < q; ++j) {
    double mean = 0.0;
    for (const auto& v : samples) mean += v[j];
    mean /= n;
    double var = 0.0;
    for (const auto& v : samples) var += (v[j] - mean) * (v[j] - mean);
    out.quantities[j] = {names[j], mean, samples.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0};
  }
  return out;
}

}  // namespace qfluct
