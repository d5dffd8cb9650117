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

#include "chi_mhd/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chi_mhd {

namespace {

void require_mean_free_for_negative_s(bool mean_free, double s) {
  if (s < 0.0 && !mean_free)
    throw std::invalid_argument(
        "chi_norm: s < 0 requires a mean-free field (zero mode excluded)");
}

double lp_combine(double a, double b, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("pair norm: p must be positive");
  if (p == kInf) return std::max(a, b);
  if (p == 1.0) return a + b;
  if (p == 2.0) return std::hypot(a, b);
  return std::pow(std::pow(a, p) + std::pow(b, p), 1.0 / p);
}

}  // namespace

double chi_norm(const SpectralField& f, double s) {
  require_mean_free_for_negative_s(f.mean_free(), s);
  const Grid& g = f.grid();
  double acc = 0.0;
  for (int k = 1; k < g.size(); ++k) {
    const double r = g.xi_norm(k);
    if (r == 0.0) continue;  // zero mode excluded from every chi sum
    acc += std::pow(r, s) * std::abs(f[k]);
  }
  return acc;
}

double chi_norm(const VectorField& v, double s) {
  require_mean_free_for_negative_s(v.x.mean_free() && v.y.mean_free(), s);
  const Grid& g = v.grid();
  double acc = 0.0;
  for (int k = 1; k < g.size(); ++k) {
    const double r = g.xi_norm(k);
    if (r == 0.0) continue;
    acc += std::pow(r, s) * std::hypot(std::abs(v.x[k]), std::abs(v.y[k]));
  }
  return acc;
}

double l2_norm(const SpectralField& f) {
  double acc = 0.0;
  for (int k = 0; k < f.grid().size(); ++k) acc += std::norm(f[k]);
  return f.grid().period() * std::sqrt(acc);
}

double l2_norm(const VectorField& v) {
  double acc = 0.0;
  for (int k = 0; k < v.grid().size(); ++k)
    acc += std::norm(v.x[k]) + std::norm(v.y[k]);
  return v.grid().period() * std::sqrt(acc);
}

double h1_seminorm(const SpectralField& f) {
  const Grid& g = f.grid();
  double acc = 0.0;
  for (int k = 0; k < g.size(); ++k) acc += g.xi_norm2(k) * std::norm(f[k]);
  return g.period() * std::sqrt(acc);
}

double h1_seminorm(const VectorField& v) {
  const Grid& g = v.grid();
  double acc = 0.0;
  for (int k = 0; k < g.size(); ++k)
    acc += g.xi_norm2(k) * (std::norm(v.x[k]) + std::norm(v.y[k]));
  return g.period() * std::sqrt(acc);
}

double pair_chi_norm(const StatePair& s, double exponent_s, double p) {
  return lp_combine(chi_norm(s.u, exponent_s), chi_norm(s.b, exponent_s), p);
}

double pair_l2_norm(const StatePair& s, double p) {
  return lp_combine(l2_norm(s.u), l2_norm(s.b), p);
}

NormReport NormReport::of(const StatePair& s) {
  const Grid& g = s.grid();
  NormReport r;
  double l2u = 0, l2b = 0, h1u = 0, h1b = 0;
  for (int k = 0; k < g.size(); ++k) {
    const double mu = std::hypot(std::abs(s.u.x[k]), std::abs(s.u.y[k]));
    const double mb = std::hypot(std::abs(s.b.x[k]), std::abs(s.b.y[k]));
    const double xi2 = g.xi_norm2(k);
    l2u += mu * mu;
    l2b += mb * mb;
    h1u += xi2 * mu * mu;
    h1b += xi2 * mb * mb;
    if (xi2 == 0.0) continue;
    const double xi = std::sqrt(xi2);
    const double sq = std::sqrt(xi);
    r.chi_m1_u += mu / xi;
    r.chi_mhalf_u += mu / sq;
    r.chi0_u += mu;
    r.chi1_u += mu * xi;
    r.chi_m1_b += mb / xi;
    r.chi_mhalf_b += mb / sq;
    r.chi0_b += mb;
    r.chi1_b += mb * xi;
  }
  const double L = g.period();
  r.l2_u = L * std::sqrt(l2u);
  r.l2_b = L * std::sqrt(l2b);
  r.h1_u = L * std::sqrt(h1u);
  r.h1_b = L * std::sqrt(h1b);
  return r;
}

double NormReport::get(NormKind k, Field f) const {
  const bool u = (f == Field::U);
  switch (k) {
    case NormKind::ChiM1:
      return u ? chi_m1_u : chi_m1_b;
    case NormKind::ChiMHalf:
      return u ? chi_mhalf_u : chi_mhalf_b;
    case NormKind::Chi0:
      return u ? chi0_u : chi0_b;
    case NormKind::Chi1:
      return u ? chi1_u : chi1_b;
    case NormKind::L2:
      return u ? l2_u : l2_b;
    case NormKind::H1:
      return u ? h1_u : h1_b;
  }
  return 0.0;
}

double NormReport::pair(NormKind k, double p) const {
  return lp_combine(get(k, Field::U), get(k, Field::B), p);
}

TrajectoryNorms::TrajectoryNorms(const Grid& grid)
    : grid_(grid),
      sup_u_(static_cast<size_t>(grid.size()), 0.0),
      sup_b_(static_cast<size_t>(grid.size()), 0.0) {}

void TrajectoryNorms::append(double t, const StatePair& s) {
  if (!(s.grid() == grid_))
    throw std::invalid_argument("TrajectoryNorms: grid mismatch");
  if (!t_.empty() && !(t > t_.back()))
    throw std::invalid_argument("TrajectoryNorms: times must increase");
  t_.push_back(t);
  reports_.push_back(NormReport::of(s));
  for (int k = 0; k < grid_.size(); ++k) {
    sup_u_[k] = std::max(sup_u_[k],
                         std::hypot(std::abs(s.u.x[k]), std::abs(s.u.y[k])));
    sup_b_[k] = std::max(sup_b_[k],
                         std::hypot(std::abs(s.b.x[k]), std::abs(s.b.y[k])));
  }
}

double TrajectoryNorms::time_lp(double p, NormKind kind, Field which) const {
  if (t_.empty()) throw std::invalid_argument("time_lp: empty trajectory");
  if (p == kInf) {
    double best = 0.0;
    for (const auto& r : reports_) best = std::max(best, r.get(kind, which));
    return best;
  }
  if (!(p >= 1.0)) throw std::invalid_argument("time_lp: p must be >= 1");
  if (t_.size() < 2)
    throw std::invalid_argument("time_lp: p < inf needs >= 2 snapshots");
  double acc = 0.0;
  for (size_t m = 0; m + 1 < t_.size(); ++m) {
    const double fa = std::pow(reports_[m].get(kind, which), p);
    const double fb = std::pow(reports_[m + 1].get(kind, which), p);
    acc += 0.5 * (fa + fb) * (t_[m + 1] - t_[m]);
  }
  return std::pow(acc, 1.0 / p);
}

double TrajectoryNorms::time_lp_pair(double p_time, NormKind kind,
                                     double pair_p) const {
  if (t_.empty()) throw std::invalid_argument("time_lp_pair: empty trajectory");
  if (p_time != kInf && !(p_time >= 1.0))
    throw std::invalid_argument("time_lp_pair: p must be >= 1");
  if (p_time == kInf) {
    double best = 0.0;
    for (const auto& r : reports_) best = std::max(best, r.pair(kind, pair_p));
    return best;
  }
  if (t_.size() < 2)
    throw std::invalid_argument("time_lp_pair: p < inf needs >= 2 snapshots");
  double acc = 0.0;
  for (size_t m = 0; m + 1 < t_.size(); ++m) {
    const double fa = std::pow(reports_[m].pair(kind, pair_p), p_time);
    const double fb = std::pow(reports_[m + 1].pair(kind, pair_p), p_time);
    acc += 0.5 * (fa + fb) * (t_[m + 1] - t_[m]);
  }
  return std::pow(acc, 1.0 / p_time);
}

double TrajectoryNorms::tilde_linf(double s, Field which) const {
  if (t_.empty()) throw std::invalid_argument("tilde_linf: empty trajectory");
  const auto& sup = (which == Field::U) ? sup_u_ : sup_b_;
  double acc = 0.0;
  for (int k = 0; k < grid_.size(); ++k) {
    const double r = grid_.xi_norm(k);
    if (r == 0.0) continue;
    acc += std::pow(r, s) * sup[k];
  }
  return acc;
}

double TrajectoryNorms::tilde_linf_pair(double s, double pair_p) const {
  return lp_combine(tilde_linf(s, Field::U), tilde_linf(s, Field::B), pair_p);
}

double TrajectoryNorms::tilde_tail(double rho, double s, Field which) const {
  if (t_.empty()) throw std::invalid_argument("tilde_tail: empty trajectory");
  const auto& sup = (which == Field::U) ? sup_u_ : sup_b_;
  double acc = 0.0;
  for (int k = 0; k < grid_.size(); ++k) {
    const double r = grid_.xi_norm(k);
    if (r <= rho) continue;
    acc += std::pow(r, s) * sup[k];
  }
  return acc;
}

void TrajectoryNorms::extend(const TrajectoryNorms& other, double t_offset,
                             size_t skip_first) {
  if (!(other.grid_ == grid_))
    throw std::invalid_argument("TrajectoryNorms::extend: grid mismatch");
  for (size_t m = skip_first; m < other.t_.size(); ++m) {
    const double t = other.t_[m] + t_offset;
    if (!t_.empty() && !(t > t_.back()))
      throw std::invalid_argument("TrajectoryNorms::extend: time overlap");
    t_.push_back(t);
    reports_.push_back(other.reports_[m]);
  }
  for (int k = 0; k < grid_.size(); ++k) {
    sup_u_[k] = std::max(sup_u_[k], other.sup_u_[k]);
    sup_b_[k] = std::max(sup_b_[k], other.sup_b_[k]);
  }
}

std::vector<double> TrajectoryNorms::prefix_integral(
    const std::function<double(const NormReport&)>& value) const {
  std::vector<double> out(t_.size(), 0.0);
  for (size_t m = 1; m < t_.size(); ++m) {
    out[m] = out[m - 1] + 0.5 * (value(reports_[m - 1]) + value(reports_[m])) *
                              (t_[m] - t_[m - 1]);
  }
  return out;
}

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double fa, double b, double fb, double fm, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson(f, a, fa, m, fm, flm, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, fm, b, fb, frm, 0.5 * tol, depth - 1);
}

double integrate_segment(const std::function<double(double)>& f, double a,
                         double b, double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return adaptive_simpson(f, a, fa, b, fb, fm, tol, 40);
}

}  // namespace

double continuum_radial_chi_norm(const std::function<double(double)>& phi,
                                 double s, double r_min, double r_max) {
  if (!(r_min >= 0.0) || !(r_max > r_min))
    throw std::invalid_argument("continuum_radial_chi_norm: bad interval");
  const auto integrand = [&](double r) {
    return 2.0 * kPi * std::pow(r, s + 1.0) * phi(r);
  };
  if (std::isfinite(r_max))
    return integrate_segment(integrand, r_min, r_max, 1e-9);

  // Doubling segments; once consecutive segment integrals fall geometrically
  // the remaining tail is bounded by last * q / (1 - q).
  double total = integrate_segment(integrand, r_min,
                                   2.0 * std::max(r_min, 1.0), 1e-11);
  double a = 2.0 * std::max(r_min, 1.0);
  double prev = std::abs(total);
  int stalled = 0;
  for (int j = 0; j < 200; ++j) {
    const double seg = integrate_segment(integrand, a, 2.0 * a, 1e-11);
    total += seg;
    a *= 2.0;
    const double mag = std::abs(seg);
    if (prev > 0.0 && mag >= 0.95 * prev) {
      if (++stalled >= 8)
        throw std::runtime_error(
            "continuum_radial_chi_norm: tail fails to decay (divergent or "
            "too slowly convergent integral)");
    } else {
      stalled = 0;
    }
    if (prev > 0.0 && mag < prev) {
      const double q = mag / prev;
      if (mag * q / (1.0 - q) < 1e-10) return total;
    }
    if (mag == 0.0) return total;
    prev = mag;
    if (std::abs(total) > 1e12)
      throw std::runtime_error("continuum_radial_chi_norm: integral blow-up");
  }
  throw std::runtime_error(
      "continuum_radial_chi_norm: tail estimate did not converge");
}

}  // namespace chi_mhd
