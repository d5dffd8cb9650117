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

#include "chi_mhd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chi_mhd/calibration.hpp"

namespace chi_mhd {

namespace {

double pair_chi0_sq(const NormReport& r) {
  return r.chi0_u * r.chi0_u + r.chi0_b * r.chi0_b;
}

void require_admissible_state(const StatePair& s0) {
  if (!(s0.u.grid() == s0.b.grid()))
    throw std::invalid_argument("initial data: u and b on different grids");
  if (divergence_ratio(s0.u) > 1e-9 || divergence_ratio(s0.b) > 1e-9)
    throw std::invalid_argument("initial data: not divergence-free");
  double scale = 0.0;
  for (int k = 0; k < s0.grid().size(); ++k)
    scale = std::max({scale, std::abs(s0.u.x[k]), std::abs(s0.u.y[k]),
                      std::abs(s0.b.x[k]), std::abs(s0.b.y[k])});
  const double mean = std::max(
      {std::abs(s0.u.x[0]), std::abs(s0.u.y[0]), std::abs(s0.b.x[0]),
       std::abs(s0.b.y[0])});
  if (scale > 0.0 && mean > 1e-12 * scale)
    throw std::invalid_argument("initial data: not mean-free");
}

long resolve_steps(double t_end, double dt) {
  const long steps = std::lround(t_end / dt);
  if (steps < 1 || std::abs(steps * dt - t_end) > 1e-9 * std::max(1.0, t_end))
    throw std::invalid_argument(
        "SolverConfig: t_end must be a whole number of dt steps");
  return steps;
}

// L2-in-time of the pair chi^0 norm over a uniform-in-index state sequence.
double l2chi0_of(const std::vector<double>& times,
                 const std::vector<StatePair>& states) {
  double acc = 0.0;
  double prev = 0.0;
  for (size_t m = 0; m < states.size(); ++m) {
    const double cu = chi_norm(states[m].u, 0.0);
    const double cb = chi_norm(states[m].b, 0.0);
    const double cur = cu * cu + cb * cb;
    if (m > 0) acc += 0.5 * (prev + cur) * (times[m] - times[m - 1]);
    prev = cur;
  }
  return std::sqrt(acc);
}

double l2chi0_distance(const std::vector<double>& times,
                       const std::vector<StatePair>& a,
                       const std::vector<StatePair>& b) {
  double acc = 0.0;
  double prev = 0.0;
  for (size_t m = 0; m < a.size(); ++m) {
    StatePair d = a[m];
    d -= b[m];
    const double cu = chi_norm(d.u, 0.0);
    const double cb = chi_norm(d.b, 0.0);
    const double cur = cu * cu + cb * cb;
    if (m > 0) acc += 0.5 * (prev + cur) * (times[m] - times[m - 1]);
    prev = cur;
  }
  return std::sqrt(acc);
}

}  // namespace

void SolverConfig::validate() const {
  if (n_modes < 8 || n_modes % 2 != 0)
    throw std::invalid_argument("SolverConfig: n_modes must be even and >= 8");
  if (!(period > 0.0)) throw std::invalid_argument("SolverConfig: period <= 0");
  if (!(mu > 0.0) || !(nu > 0.0))
    throw std::invalid_argument("SolverConfig: viscosities must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("SolverConfig: dt <= 0");
  if (!(t_end > 0.0)) throw std::invalid_argument("SolverConfig: t_end <= 0");
  if (snapshot_stride < 1)
    throw std::invalid_argument("SolverConfig: snapshot_stride < 1");
  if (!(picard_tol > 0.0))
    throw std::invalid_argument("SolverConfig: picard_tol <= 0");
  if (picard_max_iters < 1)
    throw std::invalid_argument("SolverConfig: picard_max_iters < 1");
  if (c0 < 0.0) throw std::invalid_argument("SolverConfig: c0 < 0");
  if (!(blowup_guard > 0.0))
    throw std::invalid_argument("SolverConfig: blowup_guard <= 0");
}

double SolverConfig::resolved_c0() const {
  return c0 > 0.0 ? c0 : calibration::kDefaultC0;
}

std::vector<double> Trajectory::blowup_series() const {
  return norms.prefix_integral(pair_chi0_sq);
}

double Trajectory::blowup_integral() const {
  const auto series = blowup_series();
  return series.empty() ? 0.0 : series.back();
}

MhdStepper::MhdStepper(const SolverConfig& cfg, const StatePair& s0)
    : cfg_(cfg),
      grid_(cfg.make_grid()),
      state_(s0),
      eu_full_(static_cast<size_t>(grid_.size())),
      eu_half_(static_cast<size_t>(grid_.size())),
      eb_full_(static_cast<size_t>(grid_.size())),
      eb_half_(static_cast<size_t>(grid_.size())) {
  if (!(s0.grid() == grid_))
    throw std::invalid_argument("MhdStepper: initial data grid mismatch");
  for (int k = 0; k < grid_.size(); ++k) {
    const double xi2 = grid_.xi_norm2(k);
    eu_full_[k] = std::exp(-cfg.mu * cfg.dt * xi2);
    eu_half_[k] = std::exp(-0.5 * cfg.mu * cfg.dt * xi2);
    eb_full_[k] = std::exp(-cfg.nu * cfg.dt * xi2);
    eb_half_[k] = std::exp(-0.5 * cfg.nu * cfg.dt * xi2);
  }
}

void MhdStepper::step() {
  const double h = cfg_.dt;
  const int sz = grid_.size();

  auto stage = [sz](SpectralField& out, const std::vector<double>& decay,
                    const SpectralField& c, const SpectralField& k,
                    double w) {
    for (int i = 0; i < sz; ++i) out[i] = decay[i] * (c[i] + w * k[i]);
  };
  auto stage_mixed = [sz](SpectralField& out, const std::vector<double>& decay,
                          const SpectralField& c, const SpectralField& k,
                          double w) {
    for (int i = 0; i < sz; ++i) out[i] = decay[i] * c[i] + w * k[i];
  };

  auto [k1u, k1b] = nonlinear_rhs(state_);

  StatePair s2(grid_);
  stage(s2.u.x, eu_half_, state_.u.x, k1u.x, 0.5 * h);
  stage(s2.u.y, eu_half_, state_.u.y, k1u.y, 0.5 * h);
  stage(s2.b.x, eb_half_, state_.b.x, k1b.x, 0.5 * h);
  stage(s2.b.y, eb_half_, state_.b.y, k1b.y, 0.5 * h);
  auto [k2u, k2b] = nonlinear_rhs(s2);

  StatePair s3(grid_);
  stage_mixed(s3.u.x, eu_half_, state_.u.x, k2u.x, 0.5 * h);
  stage_mixed(s3.u.y, eu_half_, state_.u.y, k2u.y, 0.5 * h);
  stage_mixed(s3.b.x, eb_half_, state_.b.x, k2b.x, 0.5 * h);
  stage_mixed(s3.b.y, eb_half_, state_.b.y, k2b.y, 0.5 * h);
  auto [k3u, k3b] = nonlinear_rhs(s3);

  StatePair s4(grid_);
  auto stage4 = [sz, h](SpectralField& out, const std::vector<double>& full,
                        const std::vector<double>& half,
                        const SpectralField& c, const SpectralField& k) {
    for (int i = 0; i < sz; ++i) out[i] = full[i] * c[i] + h * half[i] * k[i];
  };
  stage4(s4.u.x, eu_full_, eu_half_, state_.u.x, k3u.x);
  stage4(s4.u.y, eu_full_, eu_half_, state_.u.y, k3u.y);
  stage4(s4.b.x, eb_full_, eb_half_, state_.b.x, k3b.x);
  stage4(s4.b.y, eb_full_, eb_half_, state_.b.y, k3b.y);
  auto [k4u, k4b] = nonlinear_rhs(s4);

  auto combine = [sz, h](SpectralField& c, const std::vector<double>& full,
                         const std::vector<double>& half,
                         const SpectralField& k1, const SpectralField& k2,
                         const SpectralField& k3, const SpectralField& k4) {
    for (int i = 0; i < sz; ++i) {
      c[i] = full[i] * c[i] +
             (h / 6.0) * (full[i] * k1[i] + 2.0 * half[i] * (k2[i] + k3[i]) +
                          k4[i]);
    }
  };
  combine(state_.u.x, eu_full_, eu_half_, k1u.x, k2u.x, k3u.x, k4u.x);
  combine(state_.u.y, eu_full_, eu_half_, k1u.y, k2u.y, k3u.y, k4u.y);
  combine(state_.b.x, eb_full_, eb_half_, k1b.x, k2b.x, k3b.x, k4b.x);
  combine(state_.b.y, eb_full_, eb_half_, k1b.y, k2b.y, k3b.y, k4b.y);

  state_.u = leray_project(state_.u);
  state_.u.zero_mean();
  state_.b.zero_mean();
  t_ += h;
}

double advective_dt_bound(const SolverConfig& cfg, const StatePair& s0) {
  const double speed = chi_norm(s0.u, 0.0) + chi_norm(s0.b, 0.0);
  if (speed == 0.0) return kInf;
  const double xi_max =
      (2.0 * kPi / cfg.period) * (cfg.n_modes / 2) * std::sqrt(2.0);
  return 0.5 / (xi_max * speed);
}

Trajectory integrate(const SolverConfig& cfg, const StatePair& s0) {
  cfg.validate();
  const Grid g = cfg.make_grid();
  if (!(s0.grid() == g))
    throw std::invalid_argument("integrate: initial data grid mismatch");
  require_admissible_state(s0);
  if (cfg.dt > advective_dt_bound(cfg, s0))
    throw std::invalid_argument("integrate: dt exceeds the advective bound");
  const long steps = resolve_steps(cfg.t_end, cfg.dt);

  MhdStepper stepper(cfg, s0);
  Trajectory tr(cfg, g);
  tr.norms.append(0.0, s0);
  tr.snap_times.push_back(0.0);
  tr.snapshots.push_back(s0);

  double blowup = 0.0;
  double prev_chi0sq = pair_chi0_sq(tr.norms.report(0));
  for (long m = 1; m <= steps; ++m) {
    stepper.step();
    const double t = m * cfg.dt;
    tr.norms.append(t, stepper.state());
    const NormReport& r = tr.norms.report(tr.norms.size() - 1);
    const double cur = pair_chi0_sq(r);
    if (!std::isfinite(cur) || !std::isfinite(r.l2_u + r.l2_b + r.chi1_u +
                                              r.chi1_b))
      throw SolverError(AbortKind::NonFinite, (m - 1) * cfg.dt,
                        "integrate: non-finite state at t = " +
                            std::to_string(t));
    blowup += 0.5 * (prev_chi0sq + cur) * cfg.dt;
    prev_chi0sq = cur;
    if (blowup > cfg.blowup_guard)
      throw SolverError(AbortKind::BlowupGuard, t,
                        "integrate: blow-up monitor exceeded the guard at t = " +
                            std::to_string(t));
    if (m % cfg.snapshot_stride == 0 || m == steps) {
      tr.snap_times.push_back(t);
      tr.snapshots.push_back(stepper.state());
    }
  }
  return tr;
}

std::pair<Trajectory, PicardDiagnostics> picard_solve(const SolverConfig& cfg,
                                                      const StatePair& s0) {
  cfg.validate();
  const Grid g = cfg.make_grid();
  if (!(s0.grid() == g))
    throw std::invalid_argument("picard_solve: initial data grid mismatch");
  require_admissible_state(s0);

  const double T = cfg.t_end;
  const long M = std::max<long>(2, std::lround(std::ceil(T / cfg.dt - 1e-12)));
  const double h = T / static_cast<double>(M);
  std::vector<double> times(M + 1);
  for (long m = 0; m <= M; ++m) times[m] = m * h;

  // Free heat evolution a(t_m), advanced one exact factor per interval.
  std::vector<double> eu(g.size()), eb(g.size());
  for (int k = 0; k < g.size(); ++k) {
    eu[k] = std::exp(-cfg.mu * h * g.xi_norm2(k));
    eb[k] = std::exp(-cfg.nu * h * g.xi_norm2(k));
  }
  std::vector<StatePair> a;
  a.reserve(M + 1);
  a.push_back(s0);
  for (long m = 1; m <= M; ++m) {
    StatePair next = a.back();
    for (int k = 0; k < g.size(); ++k) {
      next.u.x[k] *= eu[k];
      next.u.y[k] *= eu[k];
      next.b.x[k] *= eb[k];
      next.b.y[k] *= eb[k];
    }
    a.push_back(std::move(next));
  }

  // phi weights per mode for the uniform step.
  std::vector<double> wu0(g.size()), wu1(g.size()), wb0(g.size()),
      wb1(g.size());
  for (int k = 0; k < g.size(); ++k) {
    const double zu = -cfg.mu * h * g.xi_norm2(k);
    const double zb = -cfg.nu * h * g.xi_norm2(k);
    wu0[k] = h * phi1(zu);
    wu1[k] = h * phi2(zu);
    wb0[k] = h * phi1(zb);
    wb1[k] = h * phi2(zb);
  }

  PicardDiagnostics diag;
  const double kmin = std::min(cfg.mu, cfg.nu);
  diag.bilinear_norm_estimate = calibration::kBilinearRatio / std::sqrt(kmin);
  diag.free_term_norm = l2chi0_of(times, a);
  diag.max_iterate_norm = diag.free_term_norm;

  std::vector<StatePair> X = a;
  double dprev = kInf;
  int grow = 0;
  for (int n = 1; n <= cfg.picard_max_iters; ++n) {
    // Integral-form quadratic terms along the current iterate.
    std::vector<VectorField> fu, fb;
    fu.reserve(X.size());
    fb.reserve(X.size());
    for (const auto& s : X) {
      auto [nu_term, nb_term] = nonlinear_rhs(s);
      fu.push_back(std::move(nu_term));
      fb.push_back(std::move(nb_term));
    }
    std::vector<StatePair> Y;
    Y.reserve(X.size());
    Y.push_back(a.front());
    StatePair B(g);
    for (long m = 0; m < M; ++m) {
      for (int k = 0; k < g.size(); ++k) {
        B.u.x[k] = eu[k] * B.u.x[k] + wu0[k] * fu[m].x[k] +
                   wu1[k] * (fu[m + 1].x[k] - fu[m].x[k]);
        B.u.y[k] = eu[k] * B.u.y[k] + wu0[k] * fu[m].y[k] +
                   wu1[k] * (fu[m + 1].y[k] - fu[m].y[k]);
        B.b.x[k] = eb[k] * B.b.x[k] + wb0[k] * fb[m].x[k] +
                   wb1[k] * (fb[m + 1].x[k] - fb[m].x[k]);
        B.b.y[k] = eb[k] * B.b.y[k] + wb0[k] * fb[m].y[k] +
                   wb1[k] * (fb[m + 1].y[k] - fb[m].y[k]);
      }
      StatePair ym = a[m + 1];
      ym += B;
      Y.push_back(std::move(ym));
    }

    const double d = l2chi0_distance(times, X, Y);
    diag.distances.push_back(d);
    diag.max_iterate_norm =
        std::max(diag.max_iterate_norm, l2chi0_of(times, Y));
    X = std::move(Y);
    diag.iterations = n;
    if (!std::isfinite(d))
      throw SolverError(AbortKind::NotContracting, T,
                        "picard_solve: iterate overflowed (data too large "
                        "for this horizon)");
    if (d <= cfg.picard_tol) {
      diag.converged = true;
      break;
    }
    if (d > dprev) {
      if (++grow >= 3)
        throw SolverError(
            AbortKind::NotContracting, T,
            "picard_solve: distances grew three times in a row (data too "
            "large for this horizon)");
    } else {
      grow = 0;
    }
    dprev = d;
  }
  if (diag.distances.size() >= 2) {
    const size_t last = diag.distances.size() - 1;
    diag.contraction_ratio = diag.distances[last] / diag.distances[last - 1];
  } else if (!diag.distances.empty() && diag.free_term_norm > 0.0) {
    diag.contraction_ratio = diag.distances.back() / diag.free_term_norm;
  }

  Trajectory tr(cfg, g);
  for (long m = 0; m <= M; ++m) {
    tr.norms.append(times[m], X[m]);
    if (m == 0 || m == M || m % cfg.snapshot_stride == 0) {
      tr.snap_times.push_back(times[m]);
      tr.snapshots.push_back(X[m]);
    }
  }
  return {std::move(tr), std::move(diag)};
}

double smallness_threshold(double mu, double nu, double c0) {
  if (!(mu > 0.0) || !(nu > 0.0) || !(c0 > 0.0))
    throw std::invalid_argument("smallness_threshold: arguments must be > 0");
  return std::min(mu, nu) * std::pow(2.0, -1.5) / c0;
}

FrequencySplit split_frequency(const StatePair& s0, double eps) {
  if (!(eps > 0.0))
    throw std::invalid_argument("split_frequency: eps must be positive");
  const Grid& g = s0.grid();

  struct ModeMass {
    double radius;
    double mass;
    int flat;
  };
  std::vector<ModeMass> modes;
  modes.reserve(g.size());
  double total = 0.0;
  for (int k = 1; k < g.size(); ++k) {
    const double r = g.xi_norm(k);
    if (r == 0.0) continue;
    const double mu_mod = std::hypot(std::abs(s0.u.x[k]), std::abs(s0.u.y[k]));
    const double mb_mod = std::hypot(std::abs(s0.b.x[k]), std::abs(s0.b.y[k]));
    const double mass = (mu_mod + mb_mod) / r;
    modes.push_back({r, mass, k});
    total += mass;
  }
  std::sort(modes.begin(), modes.end(),
            [](const ModeMass& a, const ModeMass& b) {
              return a.radius < b.radius;
            });

  double rho = 0.0;
  double tail = total;
  if (total > eps) {
    // Scan radii upward; tail(r) drops once every mode at radius <= r is low.
    size_t i = 0;
    while (i < modes.size()) {
      const double r = modes[i].radius;
      double shell = 0.0;
      while (i < modes.size() && modes[i].radius == r) shell += modes[i++].mass;
      tail -= shell;
      rho = r;
      if (tail <= eps) break;
    }
  }

  FrequencySplit out{StatePair(g), StatePair(g), rho, tail};
  for (int k = 0; k < g.size(); ++k) {
    const bool is_low = g.xi_norm(k) <= rho;
    StatePair& dst = is_low ? out.low : out.high;
    dst.u.x[k] = s0.u.x[k];
    dst.u.y[k] = s0.u.y[k];
    dst.b.x[k] = s0.b.x[k];
    dst.b.y[k] = s0.b.y[k];
  }
  // Zero mode (radius 0) lands in `low`; it is zero for admissible states.
  return out;
}

double local_existence_time(double mu, double nu, double rho, double c0,
                            double chi_m1_norm) {
  if (!(mu > 0.0) || !(nu > 0.0) || !(c0 > 0.0) || rho < 0.0 ||
      chi_m1_norm < 0.0)
    throw std::invalid_argument("local_existence_time: bad arguments");
  if (rho == 0.0 || chi_m1_norm == 0.0) return kInf;
  const double root = std::sqrt(std::min(mu, nu)) /
                      (8.0 * rho * c0 * chi_m1_norm);
  return root * root;
}

std::pair<Trajectory, ContinuationReport> continuation_solve(
    const SolverConfig& cfg, const StatePair& s0) {
  cfg.validate();
  const Grid g = cfg.make_grid();
  if (!(s0.grid() == g))
    throw std::invalid_argument("continuation_solve: grid mismatch");
  require_admissible_state(s0);

  const double kmin = std::min(cfg.mu, cfg.nu);
  const double c0 = cfg.resolved_c0();
  const double eps = kmin * std::pow(2.0, -2.5) / c0;
  const double thresh = smallness_threshold(cfg.mu, cfg.nu, c0);

  Trajectory total(cfg, g);
  total.norms.append(0.0, s0);
  total.snap_times.push_back(0.0);
  total.snapshots.push_back(s0);
  ContinuationReport report;

  StatePair current = s0;
  double t = 0.0;
  while (t < cfg.t_end - 1e-12) {
    const double chi = pair_chi_norm(current, -1.0, 1.0);
    double rho = 0.0;
    double t_local = kInf;
    if (chi > thresh) {
      const FrequencySplit fs = split_frequency(current, eps);
      rho = fs.rho;
      t_local = local_existence_time(cfg.mu, cfg.nu, rho, c0, chi);
    }
    const double horizon = std::min(t_local, cfg.t_end - t);

    SolverConfig seg_cfg = cfg;
    seg_cfg.t_end = horizon;
    seg_cfg.dt = std::min(cfg.dt, horizon / 16.0);
    auto [seg, diag] = picard_solve(seg_cfg, current);
    if (!diag.converged)
      throw SolverError(AbortKind::NotContracting, t,
                        "continuation_solve: segment did not converge within "
                        "the iteration budget");

    total.norms.extend(seg.norms, t, 1);
    for (size_t m = 1; m < seg.snap_times.size(); ++m) {
      total.snap_times.push_back(seg.snap_times[m] + t);
      total.snapshots.push_back(seg.snapshots[m]);
    }
    current = seg.snapshots.back();
    t += horizon;

    ContinuationSegment entry;
    entry.t_start = t - horizon;
    entry.rho = rho;
    entry.t_local = t_local;
    entry.horizon = horizon;
    entry.chi_m1_start = chi;
    entry.iterations = diag.iterations;
    entry.final_distance =
        diag.distances.empty() ? 0.0 : diag.distances.back();
    entry.blowup_at_end = total.blowup_integral();
    report.segments.push_back(entry);
  }
  return {std::move(total), std::move(report)};
}

StatePair taylor_green_state(const Grid& grid, double amplitude,
                             double b_amplitude, int b_harmonic) {
  const int n = grid.n();
  std::vector<Complex> ux(grid.size()), uy(grid.size()), bx(grid.size()),
      by(grid.size());
  for (int i = 0; i < n; ++i) {
    const double x = 2.0 * kPi * i / n;
    for (int j = 0; j < n; ++j) {
      const double y = 2.0 * kPi * j / n;
      const int f = i * n + j;
      ux[f] = amplitude * std::sin(x) * std::cos(y);
      uy[f] = -amplitude * std::cos(x) * std::sin(y);
      bx[f] = b_amplitude * std::sin(b_harmonic * x) * std::cos(b_harmonic * y);
      by[f] =
          -b_amplitude * std::cos(b_harmonic * x) * std::sin(b_harmonic * y);
    }
  }
  StatePair s(grid);
  s.u.x = from_physical(grid, ux);
  s.u.y = from_physical(grid, uy);
  s.b.x = from_physical(grid, bx);
  s.b.y = from_physical(grid, by);
  s.u.zero_mean();
  s.b.zero_mean();
  return s;
}

}  // namespace chi_mhd
