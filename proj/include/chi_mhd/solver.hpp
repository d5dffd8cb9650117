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

// Two independent solution paths for the incompressible MHD system:
// an integrating-factor RK4 time stepper and a Picard fixed-point solver on
// the Duhamel integral form, plus the smallness threshold, frequency
// splitting, local horizon formula and the segment-by-segment continuation.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "chi_mhd/norms.hpp"
#include "chi_mhd/semigroup.hpp"
#include "chi_mhd/spectral.hpp"

namespace chi_mhd {

struct SolverConfig {
  int n_modes = 32;
  double period = 2.0 * kPi;
  double mu = 1.0;   // viscosity
  double nu = 1.0;   // resistivity
  double dt = 1e-3;
  double t_end = 1.0;
  int snapshot_stride = 10;
  double picard_tol = 1e-10;
  int picard_max_iters = 80;
  double c0 = 0.0;  // 0 selects the calibrated default
  double blowup_guard = 1e6;

  void validate() const;
  double resolved_c0() const;
  Grid make_grid() const { return Grid(n_modes, period); }
};

struct Trajectory {
  SolverConfig cfg;
  Grid grid;
  std::vector<double> snap_times;
  std::vector<StatePair> snapshots;
  TrajectoryNorms norms;

  Trajectory(const SolverConfig& c, const Grid& g)
      : cfg(c), grid(g), norms(g) {}

  const StatePair& final_state() const { return snapshots.back(); }
  double final_time() const { return snap_times.back(); }
  // Running integral of ||(u,b)||_{chi^0}^2 over the per-step time series.
  std::vector<double> blowup_series() const;
  double blowup_integral() const;
};

enum class AbortKind { NonFinite, BlowupGuard, NotContracting };

class SolverError : public std::runtime_error {
 public:
  SolverError(AbortKind kind, double last_time, const std::string& message)
      : std::runtime_error(message), kind_(kind), last_time_(last_time) {}
  AbortKind kind() const { return kind_; }
  double last_time() const { return last_time_; }

 private:
  AbortKind kind_;
  double last_time_;
};

// Integrating-factor RK4: the diffusion factor e^{-kappa dt |xi|^2} is exact,
// RK4 acts on the transformed nonlinearity. The velocity is re-projected
// after every step.
class MhdStepper {
 public:
  MhdStepper(const SolverConfig& cfg, const StatePair& s0);

  void step();
  const StatePair& state() const { return state_; }
  double time() const { return t_; }
  const Grid& grid() const { return grid_; }

 private:
  SolverConfig cfg_;
  Grid grid_;
  StatePair state_;
  double t_ = 0.0;
  std::vector<double> eu_full_, eu_half_, eb_full_, eb_half_;
};

// Advective CFL bound 0.5 / (max|xi| * speed) with the sup-norm speed bound
// chi^0(u0) + chi^0(b0); diffusion is handled exactly and does not restrict
// dt. Returns +inf for zero data.
double advective_dt_bound(const SolverConfig& cfg, const StatePair& s0);

Trajectory integrate(const SolverConfig& cfg, const StatePair& s0);

struct PicardDiagnostics {
  std::vector<double> distances;       // d_n = ||X_{n+1} - X_n||_{L2 chi^0}
  double contraction_ratio = 0.0;      // last observed d_{n+1} / d_n
  bool converged = false;
  int iterations = 0;
  double bilinear_norm_estimate = 0.0;  // calibrated C / sqrt(min(mu,nu))
  double free_term_norm = 0.0;          // ||a||_{L2([0,T]; chi^0)}
  double max_iterate_norm = 0.0;        // max_n ||X_n||_{L2([0,T]; chi^0)}
};

// Fixed-point iteration X_{n+1} = a + B(X_n, X_n) with a the free heat
// evolution of s0 and B the Duhamel operator with the integral-form signs.
// Throws SolverError{NotContracting} when the distances grow three times in
// a row.
std::pair<Trajectory, PicardDiagnostics> picard_solve(const SolverConfig& cfg,
                                                      const StatePair& s0);

// min{mu, nu} 2^{-3/2} / c0.
double smallness_threshold(double mu, double nu, double c0);

struct FrequencySplit {
  StatePair low;
  StatePair high;
  double rho = 0.0;       // smallest lattice radius with tail <= eps
  double tail_norm = 0.0; // chi^{-1} mass above rho (p = 1 pair convention)
};

// Indicator-mask split at the smallest lattice radius rho such that
// sum_{|xi| > rho} |xi|^{-1} (|u_hat| + |b_hat|) <= eps. low + high == s0
// coefficient-for-coefficient.
FrequencySplit split_frequency(const StatePair& s0, double eps);

// ( min{mu,nu}^{1/2} / (8 rho c0 chi_m1_norm) )^2; +inf when rho or the norm
// vanishes (free heat flow).
double local_existence_time(double mu, double nu, double rho, double c0,
                            double chi_m1_norm);

struct ContinuationSegment {
  double t_start = 0.0;
  double rho = 0.0;
  double t_local = 0.0;   // horizon formula value (inf on the small-data branch)
  double horizon = 0.0;   // actually integrated span
  double chi_m1_start = 0.0;
  int iterations = 0;
  double final_distance = 0.0;
  double blowup_at_end = 0.0;
};

struct ContinuationReport {
  std::vector<ContinuationSegment> segments;
};

// Repeated local Picard solves: split the current state, compute the local
// horizon, solve, restart from the endpoint until t_end.
std::pair<Trajectory, ContinuationReport> continuation_solve(
    const SolverConfig& cfg, const StatePair& s0);

// sin/cos cellular field (sin x cos y, -cos x sin y) scaled to the grid
// period; divergence-free, single shell.
StatePair taylor_green_state(const Grid& grid, double amplitude,
                             double b_amplitude = 0.0, int b_harmonic = 2);

}  // namespace chi_mhd
