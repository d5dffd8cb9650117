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

// Heat semigroup on the lattice, forced heat solves with exact per-mode
// exponential quadrature, and the Duhamel bilinear operator built from the
// quadratic MHD fluxes.

#pragma once

#include <vector>

#include "chi_mhd/spectral.hpp"

namespace chi_mhd {

// Multiply every coefficient by exp(-kappa t |xi_k|^2). kappa must be > 0.
SpectralField heat_propagate(const SpectralField& f, double kappa, double t);
VectorField heat_propagate(const VectorField& v, double kappa, double t);
// u with viscosity mu, b with resistivity nu.
StatePair heat_propagate(const StatePair& s, double mu, double nu, double t);

// phi1(z) = (e^z - 1)/z and phi2(z) = (e^z - 1 - z)/z^2, series-stabilized
// near z = 0. Exponential-integrator weights for piecewise-linear forcing.
double phi1(double z);
double phi2(double z);

// Solve d/dt v = -kappa |xi|^2 v + f on the given time grid. The forcing is
// interpolated piecewise-linearly between snapshots and the exponential
// factor is integrated exactly, so constant forcing is reproduced without
// quadrature error. forcing[m] is f(times[m]); times[0] is the initial time.
std::vector<SpectralField> heat_solve(const SpectralField& v0,
                                      const std::vector<double>& times,
                                      const std::vector<SpectralField>& forcing,
                                      double kappa);

// B(u,b)(t) = int_0^t [ e^{mu(t-s)Lap} P div(u x u + b x b),
//                       e^{nu(t-s)Lap}   div(u x b + b x u) ] ds
// evaluated at eval_times (sorted, within [times.front(), times.back()]),
// with the same exponential-integrator quadrature as heat_solve. Custom
// signs select other combinations of the four fluxes.
std::vector<StatePair> duhamel_bilinear(
    const std::vector<double>& times, const std::vector<StatePair>& states,
    double mu, double nu, const std::vector<double>& eval_times,
    const FluxSigns& signs = FluxSigns{+1.0, +1.0, +1.0, +1.0});

struct FreeEvolutionBound {
  double value = 0;            // quadrature L2-in-time of the pair chi^0 norm
  double minkowski_bound = 0;  // per-mode exact time integrals, then summed
  double chi_bound = 0;        // (2 min{mu,nu})^{-1/2} ||(u0,b0)||_{chi^-1,p=2}
};

// L2([0,T]) norm of t -> ||(e^{mu t Lap} u0, e^{nu t Lap} b0)||_{chi^0}
// (pair exponent 2), with its two analytic majorants. Composite-Simpson
// quadrature on a uniform grid of `quad_points` intervals.
FreeEvolutionBound free_evolution_l2chi0(const VectorField& u0,
                                         const VectorField& b0, double mu,
                                         double nu, double T,
                                         int quad_points = 2048);

}  // namespace chi_mhd
