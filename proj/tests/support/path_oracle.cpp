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

#include "path_oracle.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace oracle {

namespace {

using Mat4 = Eigen::Matrix4cd;
using Mat2 = Eigen::Matrix2cd;
using Vec4 = Eigen::Vector4cd;
using Vec2 = Eigen::Vector2cd;

constexpr double kPi = 3.14159265358979323846;

struct Spectrum4 {
  std::array<double, 4> values;
  std::array<Vec4, 4> vectors;
};

struct Spectrum2 {
  std::array<double, 2> values;
  std::array<Vec2, 2> vectors;
};

// Descending order.
Spectrum4 spectrum(const Mat4& m) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(m);
  Spectrum4 out;
  for (int k = 0; k < 4; ++k) {
    out.values[k] = es.eigenvalues()(3 - k);
    out.vectors[k] = es.eigenvectors().col(3 - k);
  }
  return out;
}

Spectrum2 spectrum(const Mat2& m) {
  Eigen::SelfAdjointEigenSolver<Mat2> es(m);
  Spectrum2 out;
  for (int k = 0; k < 2; ++k) {
    out.values[k] = es.eigenvalues()(1 - k);
    out.vectors[k] = es.eigenvectors().col(1 - k);
  }
  return out;
}

Mat2 reduce(const Mat4& rho, bool keep_a) {
  Mat2 out = Mat2::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        out(i, j) += keep_a ? rho(2 * i + k, 2 * j + k) : rho(2 * k + i, 2 * k + j);
      }
  return out;
}

Vec4 product(const Vec2& a, const Vec2& b) {
  Vec4 v;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) v(2 * i + j) = a(i) * b(j);
  return v;
}

double overlap(const Vec4& u, const Vec4& v) { return std::norm(u.dot(v)); }

double diag(const Vec4& v, const Mat4& m) { return v.dot(m * v).real(); }
double diag(const Vec2& v, const Mat2& m) { return v.dot(m * v).real(); }

std::array<double, 2> gibbs(double beta, double gap) {
  const double w = std::exp(-beta * gap);
  return {1.0 / (1.0 + w), w / (1.0 + w)};
}

Mat4 initial_state(const Model& m) {
  const double gap = planck_pev_seconds() * m.nu0;
  const auto pa = gibbs(m.beta_a, gap);
  const auto pb = gibbs(m.beta_b, gap);
  Mat4 rho = Mat4::Zero();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) rho(2 * a + b, 2 * a + b) = pa[a] * pb[b];
  rho(1, 2) = m.alpha;
  rho(2, 1) = std::conj(m.alpha);
  return rho;
}

// Partial swap by angle pi J t / 2 on span{|01>, |10>}.
Mat4 propagator(const Model& m, double t) {
  const double theta = kPi * m.coupling_j * t / 2.0;
  Mat4 u = Mat4::Identity();
  u(1, 1) = std::cos(theta);
  u(2, 2) = std::cos(theta);
  u(1, 2) = -std::sin(theta);
  u(2, 1) = std::sin(theta);
  return u;
}

}  // namespace

double planck_pev_seconds() { return 4.135667696e-3; }

std::array<std::complex<double>, 16> evolved_state(const Model& m, double t) {
  const Mat4 u = propagator(m, t);
  const Mat4 rho = u * initial_state(m) * u.adjoint();
  std::array<std::complex<double>, 16> out;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out[r * 4 + c] = rho(r, c);
  return out;
}

std::vector<Path> enumerate_paths(const Model& m, double t) {
  const double gap = planck_pev_seconds() * m.nu0;
  const Mat4 u = propagator(m, t);
  const Mat4 rho0 = initial_state(m);
  const Mat4 rho_t = u * rho0 * u.adjoint();
  const Spectrum4 g0 = spectrum(rho0);
  const Spectrum4 gt = spectrum(rho_t);
  const Mat2 ra0 = reduce(rho0, true);
  const Mat2 rb0 = reduce(rho0, false);
  const Mat2 rat = reduce(rho_t, true);
  const Mat2 rbt = reduce(rho_t, false);
  const Spectrum2 la0 = spectrum(ra0);
  const Spectrum2 lb0 = spectrum(rb0);
  const Spectrum2 lat = spectrum(rat);
  const Spectrum2 lbt = spectrum(rbt);
  Mat2 h = Mat2::Zero();
  h(1, 1) = gap;

  std::array<int, 4> partner{};
  for (int s = 0; s < 4; ++s) {
    const Vec4 us = u * g0.vectors[s];
    int best = 0;
    for (int k = 1; k < 4; ++k) {
      if (overlap(gt.vectors[k], us) > overlap(gt.vectors[best], us)) best = k;
    }
    partner[s] = best;
  }

  std::vector<Path> out;
  for (int s = 0; s < 4; ++s)
    for (int a0 = 0; a0 < 2; ++a0)
      for (int b0 = 0; b0 < 2; ++b0)
        for (int a1 = 0; a1 < 2; ++a1)
          for (int b1 = 0; b1 < 2; ++b1) {
            Path p{s, a0, b0, a1, b1};
            const Vec4 v0 = product(la0.vectors[a0], lb0.vectors[b0]);
            const Vec4 v1 = product(lat.vectors[a1], lbt.vectors[b1]);
            const int k = partner[s];
            const double o_init = overlap(v0, g0.vectors[s]);
            const double o_evol = overlap(v1, u * g0.vectors[s]);
            const double o_fin = overlap(v1, gt.vectors[k]);
            const double o_back = overlap(v0, u.adjoint() * gt.vectors[k]);
            p.p_forward = g0.values[s] * o_init * o_evol;
            p.p_reverse = gt.values[k] * o_fin * o_back;
            p.q = diag(lat.vectors[a1], h) - diag(la0.vectors[a0], h);

            double marg_a = 0.0;
            double marg_b = 0.0;
            for (int x = 0; x < 2; ++x) {
              marg_a += diag(product(lat.vectors[a1], lbt.vectors[x]), rho_t);
              marg_b += diag(product(lat.vectors[x], lbt.vectors[b1]), rho_t);
            }
            const double p_a0b0 = diag(v0, rho0);
            const double p_a1b1 = diag(v1, rho_t);
            const double pa0 = la0.values[a0];
            const double pb0 = lb0.values[b0];
            p.i0 = std::log(g0.values[s] / (pa0 * pb0));
            p.j0 = std::log(p_a0b0 / (pa0 * pb0));
            p.c0 = std::log(g0.values[s] / p_a0b0);
            p.i1 = std::log(gt.values[k] / (marg_a * marg_b));
            p.j1 = std::log(p_a1b1 / (marg_a * marg_b));
            p.c1 = std::log(gt.values[k] / p_a1b1);
            p.sigma_a = std::log(marg_a / diag(lat.vectors[a1], ra0));
            p.sigma_b = std::log(marg_b / diag(lbt.vectors[b1], rb0));
            p.gamma = std::log(o_init * o_evol / (o_fin * o_back));
            out.push_back(p);
          }
  return out;
}

std::array<double, 3> tpm_heat_distribution(const Model& m, double t) {
  const double gap = planck_pev_seconds() * m.nu0;
  const auto pa = gibbs(m.beta_a, gap);
  const auto pb = gibbs(m.beta_b, gap);
  const Mat4 u = propagator(m, t);
  std::array<double, 3> out{};
  for (int a0 = 0; a0 < 2; ++a0)
    for (int b0 = 0; b0 < 2; ++b0)
      for (int a1 = 0; a1 < 2; ++a1)
        for (int b1 = 0; b1 < 2; ++b1) {
          const double amp = std::norm(u(2 * a1 + b1, 2 * a0 + b0));
          out[static_cast<std::size_t>(a1 - a0 + 1)] += pa[a0] * pb[b0] * amp;
        }
  return out;
}

}  // namespace oracle
