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

// Frequency-weighted L1 norms chi^s = sum_{k != 0} |xi_k|^s |c_k|, Parseval
// L2 / H1 norms, their time-mixed L^p and per-mode-supremum variants, and the
// radial quadrature for continuum profiles.
//
// Pair conventions follow ||(u,b)||_X^p = ||u||_X^p + ||b||_X^p with the
// exponent always explicit at the call site.

#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "chi_mhd/spectral.hpp"

namespace chi_mhd {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// sum_{k != 0} |xi_k|^s |c_k|; vector fields use the Euclidean modulus of the
// component pair. Rejects s < 0 on fields with a nonzero mean.
double chi_norm(const SpectralField& f, double s);
double chi_norm(const VectorField& v, double s);

// L ( sum |c_k|^2 )^{1/2} and L ( sum |xi_k|^2 |c_k|^2 )^{1/2}.
double l2_norm(const SpectralField& f);
double l2_norm(const VectorField& v);
double h1_seminorm(const SpectralField& f);
double h1_seminorm(const VectorField& v);

// ( ||u||_{chi^s}^p + ||b||_{chi^s}^p )^{1/p}, p > 0.
double pair_chi_norm(const StatePair& s, double exponent_s, double p);
// ( ||u||_{L2}^p + ||b||_{L2}^p )^{1/p}.
double pair_l2_norm(const StatePair& s, double p);

enum class Field { U, B };

enum class NormKind { ChiM1, ChiMHalf, Chi0, Chi1, L2, H1 };

// Snapshot norms for both fields, computed in one pass over the lattice.
struct NormReport {
  double chi_m1_u = 0, chi_mhalf_u = 0, chi0_u = 0, chi1_u = 0, l2_u = 0,
         h1_u = 0;
  double chi_m1_b = 0, chi_mhalf_b = 0, chi0_b = 0, chi1_b = 0, l2_b = 0,
         h1_b = 0;

  static NormReport of(const StatePair& s);

  double get(NormKind k, Field f) const;
  double pair(NormKind k, double p) const;
};

// Time series of snapshot norms plus the per-mode running suprema that the
// tilde norms need. Appends must have strictly increasing times.
class TrajectoryNorms {
 public:
  explicit TrajectoryNorms(const Grid& grid);

  void append(double t, const StatePair& s);

  size_t size() const { return t_.size(); }
  bool empty() const { return t_.empty(); }
  double time(size_t m) const { return t_[m]; }
  const std::vector<double>& times() const { return t_; }
  const NormReport& report(size_t m) const { return reports_[m]; }
  const Grid& grid() const { return grid_; }

  // Composite trapezoid ( int ||f||^p dt )^{1/p}; p = kInf is the snapshot
  // maximum. p < kInf requires at least two snapshots.
  double time_lp(double p, NormKind kind, Field which) const;
  double time_lp_pair(double p_time, NormKind kind, double pair_p) const;

  // sum_{k != 0} |xi_k|^s sup_m |c(t_m, xi_k)|; always >= the plain
  // sup-in-time chi^s norm because the supremum is taken mode by mode.
  double tilde_linf(double s, Field which) const;
  double tilde_linf_pair(double s, double pair_p) const;
  // Same sum restricted to |xi_k| > rho.
  double tilde_tail(double rho, double s, Field which) const;

  // Running trapezoid integral of a per-snapshot functional; entry m holds
  // int_0^{t_m}. Entry 0 is 0.
  std::vector<double> prefix_integral(
      const std::function<double(const NormReport&)>& value) const;

  // Concatenate another accumulator (same grid) with its times shifted by
  // t_offset, skipping its first skip_first entries; per-mode suprema merge
  // by maximum.
  void extend(const TrajectoryNorms& other, double t_offset,
              size_t skip_first);

 private:
  Grid grid_;
  std::vector<double> t_;
  std::vector<NormReport> reports_;
  std::vector<double> sup_u_, sup_b_;  // per-mode modulus suprema
};

// 2 pi int r^{s+1} phi(r) dr over (r_min, r_max), adaptive quadrature with
// absolute tolerance 1e-9. r_max may be kInf; the tail is then truncated once
// its geometric estimate drops below 1e-10. Throws std::runtime_error when
// the tail fails to decay.
double continuum_radial_chi_norm(const std::function<double(double)>& phi,
                                 double s, double r_min, double r_max);

}  // namespace chi_mhd
