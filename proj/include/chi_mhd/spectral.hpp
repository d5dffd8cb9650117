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

// Periodic spectral grid, complex Fourier coefficients, Leray projection and
// the dealiased incompressible-MHD nonlinearity.
//
// Conventions (fixed project-wide):
//   f(x) = sum_k c_k exp(i xi_k . x),  xi_k = (2 pi / L) k,  k in [-n/2, n/2)^2
//   Parseval: ||f||_L2^2 = L^2 sum |c_k|^2
//   Products are dealiased by the 2/3 rule: any mode with 3|k_i| >= n is
//   zeroed in both factors and in the result, which keeps the truncated
//   quadratic terms exactly energy-neutral.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <utility>
#include <vector>

namespace chi_mhd {

inline constexpr double kPi = 3.14159265358979323846;

using Complex = std::complex<double>;

// Square integer frequency lattice on the torus [0, L)^2.
// Flat storage is row-major over (i, j) with the usual FFT index order:
// index i maps to integer frequency i for i < n/2 and i - n otherwise.
class Grid {
 public:
  Grid(int n_modes, double period);

  int n() const { return n_; }
  double period() const { return period_; }
  int size() const { return n_ * n_; }

  int freq(int index) const { return index < n_ / 2 ? index : index - n_; }
  int index_of(int kx, int ky) const {
    return ((kx + n_) % n_) * n_ + ((ky + n_) % n_);
  }

  // xi_k = (2 pi / L) k, componentwise.
  double xi_step() const { return 2.0 * kPi / period_; }
  std::array<double, 2> xi(int flat) const {
    return {xi_step() * freq(flat / n_), xi_step() * freq(flat % n_)};
  }
  double xi_norm2(int flat) const {
    const auto v = xi(flat);
    return v[0] * v[0] + v[1] * v[1];
  }
  double xi_norm(int flat) const { return std::sqrt(xi_norm2(flat)); }

  // Index of -k, with Nyquist lines mapping to themselves.
  int conj_index(int flat) const {
    const int i = flat / n_, j = flat % n_;
    return ((n_ - i) % n_) * n_ + ((n_ - j) % n_);
  }

  // 2/3-rule mask: a mode survives products iff 3|k_i| < n on both axes.
  bool dealias_keep(int flat) const {
    const int kx = freq(flat / n_), ky = freq(flat % n_);
    return 3 * std::abs(kx) < n_ && 3 * std::abs(ky) < n_;
  }
  int dealias_limit() const { return (n_ - 1) / 3; }

  bool operator==(const Grid& o) const {
    return n_ == o.n_ && period_ == o.period_;
  }

 private:
  int n_;
  double period_;
};

// Complex Fourier coefficients of a (nominally real) scalar field.
class SpectralField {
 public:
  explicit SpectralField(const Grid& grid)
      : grid_(grid), c_(static_cast<size_t>(grid.size())) {}

  const Grid& grid() const { return grid_; }
  Complex& operator[](int flat) { return c_[static_cast<size_t>(flat)]; }
  const Complex& operator[](int flat) const {
    return c_[static_cast<size_t>(flat)];
  }
  Complex& at(int kx, int ky) { return c_[grid_.index_of(kx, ky)]; }
  const Complex& at(int kx, int ky) const { return c_[grid_.index_of(kx, ky)]; }
  std::span<Complex> coeffs() { return c_; }
  std::span<const Complex> coeffs() const { return c_; }

  bool mean_free() const { return c_[0] == Complex{0.0, 0.0}; }
  void zero_mean() { c_[0] = Complex{0.0, 0.0}; }

  // max |c_k - conj(c_{-k})| over the lattice.
  double hermitian_defect() const;
  // Project onto the Hermitian subspace: c_k <- (c_k + conj(c_{-k})) / 2.
  void symmetrize();

  void scale(double a);
  void apply_dealias_mask();

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  friend SpectralField operator+(SpectralField a, const SpectralField& b) {
    a += b;
    return a;
  }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) {
    a -= b;
    return a;
  }

 private:
  Grid grid_;
  std::vector<Complex> c_;
};

// Two scalar components on one grid.
struct VectorField {
  SpectralField x, y;

  explicit VectorField(const Grid& grid) : x(grid), y(grid) {}
  const Grid& grid() const { return x.grid(); }

  double hermitian_defect() const {
    return std::max(x.hermitian_defect(), y.hermitian_defect());
  }
  void zero_mean() {
    x.zero_mean();
    y.zero_mean();
  }
  void scale(double a) {
    x.scale(a);
    y.scale(a);
  }
  void apply_dealias_mask() {
    x.apply_dealias_mask();
    y.apply_dealias_mask();
  }

  VectorField& operator+=(const VectorField& o);
  VectorField& operator-=(const VectorField& o);
  friend VectorField operator+(VectorField a, const VectorField& b) {
    a += b;
    return a;
  }
  friend VectorField operator-(VectorField a, const VectorField& b) {
    a -= b;
    return a;
  }
};

// Velocity/magnetic pair at one instant.
struct StatePair {
  VectorField u, b;

  explicit StatePair(const Grid& grid) : u(grid), b(grid) {}
  StatePair(VectorField u_, VectorField b_)
      : u(std::move(u_)), b(std::move(b_)) {}
  const Grid& grid() const { return u.grid(); }

  StatePair& operator+=(const StatePair& o);
  StatePair& operator-=(const StatePair& o);
  friend StatePair operator+(StatePair a, const StatePair& b) {
    a += b;
    return a;
  }
  friend StatePair operator-(StatePair a, const StatePair& b) {
    a -= b;
    return a;
  }
};

// Unnormalized inverse transform: samples f(x_j) on the n x n physical grid.
std::vector<Complex> to_physical(const SpectralField& f);
// Forward transform with 1/n^2 normalization; inverse of to_physical.
SpectralField from_physical(const Grid& grid, std::span<const Complex> samples);

// Coefficientwise divergence-free projection I - xi xi^T / |xi|^2; the zero
// mode is set to zero.
VectorField leray_project(const VectorField& v);

// i xi . v_hat per mode.
SpectralField divergence(const VectorField& v);

// max_k |xi . v_hat| / max_k |xi| |v_hat|; 0 for the zero field.
double divergence_ratio(const VectorField& v);

// Real L2 inner product <f, g> = L^2 Re sum conj(f_hat) g_hat.
double inner_product(const SpectralField& f, const SpectralField& g);
double inner_product(const VectorField& f, const VectorField& g);

// Signs attached to the four quadratic MHD fluxes; the momentum slot gets
// s_uu P div(u x u) + s_bb P div(b x b), the induction slot
// s_ub div(u x b) + s_bu div(b x u).
struct FluxSigns {
  double uu, bb, ub, bu;
};

// Dealiased quadratic terms: inverse transform, pointwise products, forward
// transform, 2/3 mask on inputs and outputs. Both slots are mean-free; the
// momentum slot is Leray-projected.
std::pair<VectorField, VectorField> mhd_flux_terms(const StatePair& s,
                                                   const FluxSigns& signs);

// Right-hand side of the evolution system: momentum -P div(u x u - b x b),
// induction -div(u x b - b x u).
std::pair<VectorField, VectorField> nonlinear_rhs(const StatePair& s);

}  // namespace chi_mhd
