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

#include "chi_mhd/spectral.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace chi_mhd {

namespace {

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

// Plan creation is not thread-safe in FFTW; executing a cached plan on
// per-call buffers is. FFTW_UNALIGNED lets us execute on std::vector storage.
const PlanPair& plans_for(int n) {
  static std::mutex mu;
  static std::map<int, PlanPair> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) {
    std::vector<Complex> a(static_cast<size_t>(n) * n),
        b(static_cast<size_t>(n) * n);
    PlanPair p;
    p.fwd = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(a.data()),
                             reinterpret_cast<fftw_complex*>(b.data()),
                             FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.bwd = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(a.data()),
                             reinterpret_cast<fftw_complex*>(b.data()),
                             FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    it = cache.emplace(n, p).first;
  }
  return it->second;
}

void execute(fftw_plan plan, const Complex* in, Complex* out) {
  fftw_execute_dft(plan,
                   reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

std::vector<Complex> physical_of(const SpectralField& f) {
  const int n = f.grid().n();
  std::vector<Complex> out(static_cast<size_t>(n) * n);
  execute(plans_for(n).bwd, f.coeffs().data(), out.data());
  return out;
}

}  // namespace

Grid::Grid(int n_modes, double period) : n_(n_modes), period_(period) {
  if (n_modes < 8 || n_modes % 2 != 0)
    throw std::invalid_argument("Grid: n_modes must be even and >= 8");
  if (!(period > 0.0))
    throw std::invalid_argument("Grid: period must be positive");
}

double SpectralField::hermitian_defect() const {
  double worst = 0.0;
  for (int k = 0; k < grid_.size(); ++k) {
    const Complex d = c_[k] - std::conj(c_[grid_.conj_index(k)]);
    worst = std::max(worst, std::abs(d));
  }
  return worst;
}

void SpectralField::symmetrize() {
  for (int k = 0; k < grid_.size(); ++k) {
    const int m = grid_.conj_index(k);
    if (m < k) continue;
    const Complex avg = 0.5 * (c_[k] + std::conj(c_[m]));
    c_[k] = avg;
    c_[m] = std::conj(avg);
  }
}

void SpectralField::scale(double a) {
  for (auto& c : c_) c *= a;
}

void SpectralField::apply_dealias_mask() {
  for (int k = 0; k < grid_.size(); ++k)
    if (!grid_.dealias_keep(k)) c_[k] = Complex{0.0, 0.0};
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  if (!(grid_ == o.grid_))
    throw std::invalid_argument("SpectralField: grid mismatch");
  for (size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  if (!(grid_ == o.grid_))
    throw std::invalid_argument("SpectralField: grid mismatch");
  for (size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

VectorField& VectorField::operator+=(const VectorField& o) {
  x += o.x;
  y += o.y;
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
  x -= o.x;
  y -= o.y;
  return *this;
}

StatePair& StatePair::operator+=(const StatePair& o) {
  u += o.u;
  b += o.b;
  return *this;
}

StatePair& StatePair::operator-=(const StatePair& o) {
  u -= o.u;
  b -= o.b;
  return *this;
}

std::vector<Complex> to_physical(const SpectralField& f) {
  return physical_of(f);
}

SpectralField from_physical(const Grid& grid,
                            std::span<const Complex> samples) {
  if (static_cast<int>(samples.size()) != grid.size())
    throw std::invalid_argument("from_physical: sample count != grid size");
  SpectralField f(grid);
  execute(plans_for(grid.n()).fwd, samples.data(), f.coeffs().data());
  const double inv = 1.0 / static_cast<double>(grid.size());
  f.scale(inv);
  return f;
}

VectorField leray_project(const VectorField& v) {
  const Grid& g = v.grid();
  VectorField out(g);
  for (int k = 0; k < g.size(); ++k) {
    const double n2 = g.xi_norm2(k);
    if (n2 == 0.0) continue;
    const auto xi = g.xi(k);
    const Complex dot = (xi[0] * v.x[k] + xi[1] * v.y[k]) / n2;
    out.x[k] = v.x[k] - xi[0] * dot;
    out.y[k] = v.y[k] - xi[1] * dot;
  }
  return out;
}

SpectralField divergence(const VectorField& v) {
  const Grid& g = v.grid();
  SpectralField out(g);
  for (int k = 0; k < g.size(); ++k) {
    const auto xi = g.xi(k);
    out[k] = Complex{0.0, 1.0} * (xi[0] * v.x[k] + xi[1] * v.y[k]);
  }
  return out;
}

double divergence_ratio(const VectorField& v) {
  const Grid& g = v.grid();
  double num = 0.0, den = 0.0;
  for (int k = 0; k < g.size(); ++k) {
    const auto xi = g.xi(k);
    const double mod = std::hypot(std::abs(v.x[k]), std::abs(v.y[k]));
    num = std::max(num, std::abs(xi[0] * v.x[k] + xi[1] * v.y[k]));
    den = std::max(den, g.xi_norm(k) * mod);
  }
  return den == 0.0 ? 0.0 : num / den;
}

double inner_product(const SpectralField& f, const SpectralField& g) {
  if (!(f.grid() == g.grid()))
    throw std::invalid_argument("inner_product: grid mismatch");
  const double L = f.grid().period();
  double acc = 0.0;
  for (int k = 0; k < f.grid().size(); ++k)
    acc += (std::conj(f[k]) * g[k]).real();
  return L * L * acc;
}

double inner_product(const VectorField& f, const VectorField& g) {
  return inner_product(f.x, g.x) + inner_product(f.y, g.y);
}

std::pair<VectorField, VectorField> mhd_flux_terms(const StatePair& s,
                                                   const FluxSigns& signs) {
  const Grid& g = s.grid();
  if (!(s.u.grid() == s.b.grid()))
    throw std::invalid_argument("mhd_flux_terms: grid mismatch between u and b");
  const int sz = g.size();

  SpectralField ux = s.u.x, uy = s.u.y, bx = s.b.x, by = s.b.y;
  ux.apply_dealias_mask();
  uy.apply_dealias_mask();
  bx.apply_dealias_mask();
  by.apply_dealias_mask();

  const auto pux = physical_of(ux), puy = physical_of(uy);
  const auto pbx = physical_of(bx), pby = physical_of(by);

  auto product_modes = [&](const std::vector<Complex>& a,
                           const std::vector<Complex>& b) {
    std::vector<Complex> prod(static_cast<size_t>(sz));
    for (int k = 0; k < sz; ++k) prod[k] = a[k] * b[k];
    SpectralField f = from_physical(g, prod);
    f.apply_dealias_mask();
    return f;
  };

  // u x u and b x b are symmetric: three distinct entries apiece.
  const SpectralField uu_xx = product_modes(pux, pux);
  const SpectralField uu_xy = product_modes(pux, puy);
  const SpectralField uu_yy = product_modes(puy, puy);
  const SpectralField bb_xx = product_modes(pbx, pbx);
  const SpectralField bb_xy = product_modes(pbx, pby);
  const SpectralField bb_yy = product_modes(pby, pby);
  // q_ij = u_i b_j; b x u entries are the transposes q_ji.
  const SpectralField q_xx = product_modes(pux, pbx);
  const SpectralField q_xy = product_modes(pux, pby);
  const SpectralField q_yx = product_modes(puy, pbx);
  const SpectralField q_yy = product_modes(puy, pby);

  VectorField mom(g), ind(g);
  const Complex I{0.0, 1.0};
  for (int k = 0; k < sz; ++k) {
    const auto xi = g.xi(k);
    const Complex dx = I * xi[0], dy = I * xi[1];
    // [div(P)]_j = i xi_i P_ij
    mom.x[k] = dx * (signs.uu * uu_xx[k] + signs.bb * bb_xx[k]) +
               dy * (signs.uu * uu_xy[k] + signs.bb * bb_xy[k]);
    mom.y[k] = dx * (signs.uu * uu_xy[k] + signs.bb * bb_xy[k]) +
               dy * (signs.uu * uu_yy[k] + signs.bb * bb_yy[k]);
    ind.x[k] = dx * (signs.ub * q_xx[k] + signs.bu * q_xx[k]) +
               dy * (signs.ub * q_yx[k] + signs.bu * q_xy[k]);
    ind.y[k] = dx * (signs.ub * q_xy[k] + signs.bu * q_yx[k]) +
               dy * (signs.ub * q_yy[k] + signs.bu * q_yy[k]);
  }
  mom = leray_project(mom);
  mom.zero_mean();
  ind.zero_mean();
  return {std::move(mom), std::move(ind)};
}

std::pair<VectorField, VectorField> nonlinear_rhs(const StatePair& s) {
  return mhd_flux_terms(s, FluxSigns{-1.0, +1.0, -1.0, +1.0});
}

}  // namespace chi_mhd
