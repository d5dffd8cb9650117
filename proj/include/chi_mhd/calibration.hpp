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

// Frozen empirical constants for the inequality checks whose generic
// constants are not fixed by theory. Measured once with
// measure_calibration() on the fixed calibration family — seeds 0..99,
// n_modes = 32, period 2 pi, beta 2.5 random fields for the static checks,
// beta 4.0 amplitude 0.3 solver runs with mu, nu in {0.5, 1, 2} — and pinned
// here. A 10-seed n_modes = 64 replay stays within 14% of every value.
// Checks assert against these values times kCalibrationMargin.

#pragma once

namespace chi_mhd::calibration {

// max ||f||_{chi^{-1/2}} / (||f||_{L2}^{1/2} ||f||_{H1}^{1/2}) over the family.
inline constexpr double kL2H1Ratio = 0.53740;

// max ||B(u,b)||_{L2(chi^0)} * min{mu,nu}^{1/2} / ||(u,b)||^2_{L2(chi^0)}.
inline constexpr double kBilinearRatio = 0.08245;

// max (||v||_{tilde-Linf(chi^s)} + kappa ||v||_{L1(chi^{s+2})}) / rhs for the
// forced heat solve; the two-halves argument caps this at 2.
inline constexpr double kHeatEstimateRatio = 1.40283;

// max (lhs - ||(u0,b0)||_{chi^-1}) * 2 min{mu,nu} / ||(u0,b0)||_{L2}^4 over
// the solver-run family, for the dissipation-weighted chi^{-1} envelope.
// Not amplitude-invariant: the quartic right side cannot dominate the linear
// dissipation for arbitrarily small data, so the check is tied to the
// calibration family's amplitude.
inline constexpr double kAprioriConstant = 0.00104;

// Gronwall rate of the twin-run envelope, scaled by min{mu,nu}. Measured
// requirement over the twin family (random bases at two amplitudes and two
// viscosity pairs, cellular base, perturbation scales 1e-3 and 1e-2) is 0:
// the difference energy never exceeds its initial value at these viscosities.
// Floored at 0.05 to keep the margin meaningful; the envelope right side is
// increasing in this constant, so the floor preserves every measured pass.
inline constexpr double kWeakStrongConstantScaled = 0.05;

inline constexpr double kCalibrationMargin = 1.25;

// Contraction threshold constant; kept strictly above the measured bilinear
// ratio so the fixed-point ball argument has slack.
inline constexpr double kDefaultC0 = kBilinearRatio * 1.25;

}  // namespace chi_mhd::calibration
