/*
 * Copyright 2026 the chi-mhd authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "chi_mhd/semigroup.hpp"

#include <cmath>
#include <stdexcept>

#include "chi_mhd/norms.hpp"

namespace chi_mhd {

namespace {

void require_positive_kappa(double kappa) {
  if (!(kappa > 0.0))
    throw std::invalid_argument("heat semigroup: kappa must be positive");
}

}  // namespace

double phi1(double z) {
  if (std::abs(z) < 1e-5)
    return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0)));
  return std::expm1(z) / z;
}

double phi2(double z) {
  if (std::abs(z) < 1e-5)
    return 0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z * (1.0 / 120.0)));
  return (std::expm1(z) - z) / (z * z);
}

SpectralField heat_propagate(const SpectralField& f, double kappa, double t) {
  require_positive_kappa(kappa);
  if (t < 0.0) throw std::invalid_argument("heat_propagate: t must be >= 0");
  const Grid& g = f.grid();
  SpectralField out(g);
  for (int k = 0; k < g.size(); ++k)
    out[k] = f[k] * std::exp(-kappa * t * g.xi_norm2(k));
  return out;
}

VectorField heat_propagate(const VectorField& v, double kappa, double t) {
  VectorField out(v.grid());
  out.x = heat_propagate(v.x, kappa, t);
  out.y = heat_propagate(v.y, kappa, t);
  return out;
}

StatePair heat_propagate(const StatePair& s, double mu, double nu, double t) {
  return StatePair(heat_propagate(s.u, mu, t), heat_propagate(s.b, nu, t));
}

std::vector<SpectralField> heat_solve(const SpectralField& v0,
                                      const std::vector<double>& times,
                                      const std::vector<SpectralField>& forcing,
                                      double kappa) {
  require_positive_kappa(kappa);
  if (times.empty() || forcing.size() != times.size())
    throw std::invalid_argument("heat_solve: times/forcing size mismatch");
  const Grid& g = v0.grid();
  for (const auto& f : forcing)
    if (!(f.grid() == g)) throw std::invalid_argument("heat_solve: grid mismatch");

  std::vector<SpectralField> out;
  out.reserve(times.size());
  out.push_back(v0);
  for (size_t m = 0; m + 1 < times.size(); ++m) {
    const double h = times[m + 1] - times[m];
    if (!(h > 0.0)) throw std::invalid_argument("heat_solve: times must increase");
    SpectralField next(g);
    for (int k = 0; k < g.size(); ++k) {
      const double z = -kappa * h * g.xi_norm2(k);
      const Complex fa = forcing[m][k], fb = forcing[m + 1][k];
      next[k] = std::exp(z) * out.back()[k] +
                h * (phi1(z) * fa + phi2(z) * (fb - fa));
    }
    out.push_back(std::move(next));
  }
  return out;
}

std::vector<StatePair> duhamel_bilinear(const std::vector<double>& times,
                                        const std::vector<StatePair>& states,
                                        double mu, double nu,
                                        const std::vector<double>& eval_times,
                                        const FluxSigns& signs) {
  if (!(mu > 0.0) || !(nu > 0.0))
    throw std::invalid_argument("duhamel_bilinear: viscosities must be positive");
  if (times.empty() || states.size() != times.size())
    throw std::invalid_argument("duhamel_bilinear: empty or mismatched trajectory");
  const Grid& g = states.front().grid();

  // Quadratic flux terms at every quadrature node.
  std::vector<VectorField> fu, fb;
  fu.reserve(times.size());
  fb.reserve(times.size());
  for (const auto& s : states) {
    auto [a, b] = mhd_flux_terms(s, signs);
    fu.push_back(std::move(a));
    fb.push_back(std::move(b));
  }

  auto advance = [&](const SpectralField& cur, const SpectralField& fa,
                     const SpectralField& fb_, double h, double kappa) {
    SpectralField next(g);
    for (int k = 0; k < g.size(); ++k) {
      const double z = -kappa * h * g.xi_norm2(k);
      next[k] = std::exp(z) * cur[k] +
                h * (phi1(z) * fa[k] + phi2(z) * (fb_[k] - fa[k]));
    }
    return next;
  };
  auto lerp = [&](const SpectralField& fa, const SpectralField& fb_, double w) {
    SpectralField out(g);
    for (int k = 0; k < g.size(); ++k) out[k] = fa[k] + w * (fb_[k] - fa[k]);
    return out;
  };

  std::vector<StatePair> result;
  result.reserve(eval_times.size());
  StatePair running(g);  // B at times[node]
  size_t node = 0;
  for (double te : eval_times) {
    if (te < times.front() - 1e-12 || te > times.back() + 1e-12)
      throw std::invalid_argument("duhamel_bilinear: eval time out of range");
    while (node + 1 < times.size() && times[node + 1] <= te + 1e-12) {
      const double h = times[node + 1] - times[node];
      running.u.x = advance(running.u.x, fu[node].x, fu[node + 1].x, h, mu);
      running.u.y = advance(running.u.y, fu[node].y, fu[node + 1].y, h, mu);
      running.b.x = advance(running.b.x, fb[node].x, fb[node + 1].x, h, nu);
      running.b.y = advance(running.b.y, fb[node].y, fb[node + 1].y, h, nu);
      ++node;
    }
    StatePair value = running;
    const double hp = te - times[node];
    if (hp > 1e-12) {
      // partial step with the forcing interpolated at te
      const double h = times[node + 1] - times[node];
      const double w = hp / h;
      const SpectralField fux = lerp(fu[node].x, fu[node + 1].x, w);
      const SpectralField fuy = lerp(fu[node].y, fu[node + 1].y, w);
      const SpectralField fbx = lerp(fb[node].x, fb[node + 1].x, w);
      const SpectralField fby = lerp(fb[node].y, fb[node + 1].y, w);
      value.u.x = advance(value.u.x, fu[node].x, fux, hp, mu);
      value.u.y = advance(value.u.y, fu[node].y, fuy, hp, mu);
      value.b.x = advance(value.b.x, fb[node].x, fbx, hp, nu);
      value.b.y = advance(value.b.y, fb[node].y, fby, hp, nu);
    }
    result.push_back(std::move(value));
  }
  return result;
}

FreeEvolutionBound free_evolution_l2chi0(const VectorField& u0,
                                         const VectorField& b0, double mu,
                                         double nu, double T,
                                         int quad_points) {
  if (!(T > 0.0)) throw std::invalid_argument("free_evolution: T must be > 0");
  if (!(mu > 0.0) || !(nu > 0.0))
    throw std::invalid_argument("free_evolution: viscosities must be positive");
  const Grid& g = u0.grid();
  if (quad_points % 2 != 0) ++quad_points;

  // Per-mode moduli and |xi|^2, zero mode excluded.
  std::vector<double> au, ab, xi2;
  au.reserve(g.size());
  for (int k = 1; k < g.size(); ++k) {
    au.push_back(std::hypot(std::abs(u0.x[k]), std::abs(u0.y[k])));
    ab.push_back(std::hypot(std::abs(b0.x[k]), std::abs(b0.y[k])));
    xi2.push_back(g.xi_norm2(k));
  }

  auto chi0sq_at = [&](double t) {
    double su = 0.0, sb = 0.0;
    for (size_t k = 0; k < au.size(); ++k) {
      su += au[k] * std::exp(-mu * t * xi2[k]);
      sb += ab[k] * std::exp(-nu * t * xi2[k]);
    }
    return su * su + sb * sb;
  };

  // Composite Simpson on [0, T].
  const double h = T / quad_points;
  double acc = chi0sq_at(0.0) + chi0sq_at(T);
  for (int m = 1; m < quad_points; ++m)
    acc += (m % 2 == 1 ? 4.0 : 2.0) * chi0sq_at(m * h);
  const double value = std::sqrt(acc * h / 3.0);

  double mink_u = 0.0, mink_b = 0.0;
  for (size_t k = 0; k < au.size(); ++k) {
    mink_u += au[k] * std::sqrt(-std::expm1(-2.0 * mu * T * xi2[k]) /
                                (2.0 * mu * xi2[k]));
    mink_b += ab[k] * std::sqrt(-std::expm1(-2.0 * nu * T * xi2[k]) /
                                (2.0 * nu * xi2[k]));
  }
  const double minkowski = std::hypot(mink_u, mink_b);

  const double kmin = std::min(mu, nu);
  const double chi_m1_pair =
      std::hypot(chi_norm(u0, -1.0), chi_norm(b0, -1.0));
  const double chi_bound = chi_m1_pair / std::sqrt(2.0 * kmin);

  return {value, minkowski, chi_bound};
}

}  // namespace chi_mhd
