#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "chi_mhd/norms.hpp"
#include "chi_mhd/semigroup.hpp"
#include "chi_mhd/verification.hpp"

using namespace chi_mhd;

namespace {

StatePair single_mode_state(const Grid& g, int kx, int ky, Complex cu) {
  StatePair s(g);
  s.u.x.at(kx, ky) = cu;
  return s;
}

}  // namespace

TEST_CASE("chi norm basics") {
  const Grid g(16, 2.0 * kPi);

  SUBCASE("single mode at |xi| = 2 with |c| = 3 and s = -1") {
    SpectralField f(g);
    f.at(2, 0) = Complex{0.0, 3.0};
    CHECK(chi_norm(f, -1.0) == doctest::Approx(1.5).epsilon(1e-14));
  }

  SUBCASE("zero field vanishes for every s") {
    const SpectralField z(g);
    for (double s : {-1.0, -0.5, 0.0, 1.0, 2.0}) CHECK(chi_norm(z, s) == 0.0);
  }

  SUBCASE("disjoint single modes add") {
    SpectralField f(g), h(g), both(g);
    f.at(1, 0) = 2.0;
    h.at(0, 3) = Complex{0.0, 1.0};
    both.at(1, 0) = 2.0;
    both.at(0, 3) = Complex{0.0, 1.0};
    for (double s : {-1.0, 0.0, 1.0})
      CHECK(chi_norm(both, s) ==
            doctest::Approx(chi_norm(f, s) + chi_norm(h, s)).epsilon(1e-15));
  }

  SUBCASE("scaling is exactly homogeneous") {
    RandomFieldSpec spec;
    spec.seed = 5;
    spec.n_modes = 16;
    SpectralField f = random_scalar_field(spec);
    const double base = chi_norm(f, -0.5);
    f.scale(3.0);
    CHECK(chi_norm(f, -0.5) == doctest::Approx(3.0 * base).epsilon(1e-14));
  }

  SUBCASE("negative s rejects fields with a mean") {
    SpectralField f(g);
    f[0] = 1.0;
    CHECK_THROWS_AS(chi_norm(f, -1.0), std::invalid_argument);
    CHECK_NOTHROW(chi_norm(f, 0.0));
  }

  SUBCASE("triangle inequality on random pairs") {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      RandomFieldSpec a, b;
      a.seed = seed;
      b.seed = seed + 100000;
      a.n_modes = b.n_modes = 16;
      const SpectralField f = random_scalar_field(a);
      const SpectralField h = random_scalar_field(b);
      SpectralField sum = f;
      sum += h;
      for (double s : {-1.0, 0.0}) {
        CHECK(chi_norm(sum, s) <=
              (chi_norm(f, s) + chi_norm(h, s)) * (1.0 + 1e-12));
      }
    }
  }

  SUBCASE("zeroing modes never increases any chi norm") {
    RandomFieldSpec spec;
    spec.seed = 12;
    spec.n_modes = 16;
    const SpectralField f = random_scalar_field(spec);
    std::uint64_t rng = 99;
    for (int trial = 0; trial < 20; ++trial) {
      SpectralField trunc = f;
      for (int k = 0; k < g.size(); ++k) {
        rng = rng * 6364136223846793005ULL + 1442695040888963407ULL;
        if ((rng >> 40) & 1) trunc[k] = Complex{0.0, 0.0};
      }
      for (double s : {-1.0, -0.5, 0.0, 1.0})
        CHECK(chi_norm(trunc, s) <= chi_norm(f, s) * (1.0 + 1e-15));
    }
  }
}

TEST_CASE("pair norms") {
  const Grid g(16, 2.0 * kPi);
  RandomFieldSpec spec;
  spec.seed = 8;
  spec.n_modes = 16;
  StatePair s(g);
  s.u = random_vector_field(spec, 0);

  SUBCASE("b = 0 reduces to the velocity norm for every p") {
    for (double p : {1.0, 2.0, 4.0})
      CHECK(pair_chi_norm(s, -1.0, p) ==
            doctest::Approx(chi_norm(s.u, -1.0)).epsilon(1e-14));
  }

  SUBCASE("aligned pair scales by the p-th root of 2") {
    s.b = s.u;
    const double one = chi_norm(s.u, 0.0);
    CHECK(pair_chi_norm(s, 0.0, 2.0) ==
          doctest::Approx(std::sqrt(2.0) * one).epsilon(1e-14));
    CHECK(pair_chi_norm(s, 0.0, 1.0) ==
          doctest::Approx(2.0 * one).epsilon(1e-14));
  }

  SUBCASE("non-positive p is rejected") {
    CHECK_THROWS_AS(pair_chi_norm(s, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(pair_chi_norm(s, 0.0, -1.0), std::invalid_argument);
  }
}

TEST_CASE("parseval norms") {
  const Grid g(16, 2.0 * kPi);

  SUBCASE("single mode with |c| = 1 has L2 norm = period") {
    SpectralField f(g);
    f.at(1, 0) = Complex{0.0, 1.0};
    CHECK(l2_norm(f) == doctest::Approx(2.0 * kPi).epsilon(1e-14));
  }

  SUBCASE("H1 seminorm weights by |xi|") {
    SpectralField f(g);
    f.at(2, 0) = 1.0;
    CHECK(h1_seminorm(f) == doctest::Approx(4.0 * kPi).epsilon(1e-14));
  }

  SUBCASE("zero field") {
    const SpectralField z(g);
    CHECK(l2_norm(z) == 0.0);
    CHECK(h1_seminorm(z) == 0.0);
  }
}

TEST_CASE("time-mixed norms") {
  const Grid g(16, 2.0 * kPi);

  SUBCASE("constant trajectory over [0, T]") {
    const StatePair s = single_mode_state(g, 1, 0, Complex{0.0, 2.0});
    TrajectoryNorms tn(g);
    const double T = 3.0;
    for (int m = 0; m <= 30; ++m) tn.append(T * m / 30, s);
    const double base = chi_norm(s.u, 0.0);
    for (double p : {1.0, 2.0, 4.0})
      CHECK(tn.time_lp(p, NormKind::Chi0, Field::U) ==
            doctest::Approx(std::pow(T, 1.0 / p) * base).epsilon(1e-12));
    CHECK(tn.time_lp(kInf, NormKind::Chi0, Field::U) ==
          doctest::Approx(base).epsilon(1e-14));
  }

  SUBCASE("p = inf of a decaying trajectory picks t = 0") {
    TrajectoryNorms tn(g);
    for (int m = 0; m <= 20; ++m) {
      StatePair s = single_mode_state(g, 1, 0, Complex{0.0, 1.0});
      s.u.scale(std::exp(-0.3 * m));
      tn.append(0.1 * m, s);
    }
    CHECK(tn.time_lp(kInf, NormKind::Chi0, Field::U) ==
          doctest::Approx(1.0).epsilon(1e-14));
  }

  SUBCASE("heat decay of a single mode matches the closed form") {
    const double kappa = 1.0, T = 10.0;
    const StatePair s0 = single_mode_state(g, 1, 0, Complex{1.0, 0.0});
    TrajectoryNorms tn(g);
    const int M = 8000;
    for (int m = 0; m <= M; ++m) {
      const double t = T * m / M;
      tn.append(t, heat_propagate(s0, kappa, kappa, t));
    }
    const double exact = std::sqrt(1.0 / (2.0 * kappa));  // |xi| = 1, |c| = 1
    CHECK(tn.time_lp(2.0, NormKind::Chi0, Field::U) ==
          doctest::Approx(exact).epsilon(1e-6));
  }

  SUBCASE("errors on degenerate trajectories") {
    TrajectoryNorms tn(g);
    CHECK_THROWS_AS(tn.time_lp(2.0, NormKind::Chi0, Field::U),
                    std::invalid_argument);
    CHECK_THROWS_AS(tn.tilde_linf(-1.0, Field::U), std::invalid_argument);
    tn.append(0.0, StatePair(g));
    CHECK_THROWS_AS(tn.time_lp(2.0, NormKind::Chi0, Field::U),
                    std::invalid_argument);
    CHECK_NOTHROW(tn.time_lp(kInf, NormKind::Chi0, Field::U));
    CHECK_NOTHROW(tn.tilde_linf(-1.0, Field::U));
    CHECK_THROWS_AS(tn.append(0.0, StatePair(g)), std::invalid_argument);
  }
}

TEST_CASE("per-mode supremum norms") {
  const Grid g(16, 2.0 * kPi);

  SUBCASE("constant trajectory equals the snapshot norm") {
    const StatePair s = single_mode_state(g, 2, 1, Complex{1.0, 1.0});
    TrajectoryNorms tn(g);
    for (int m = 0; m <= 5; ++m) tn.append(0.5 * m, s);
    CHECK(tn.tilde_linf(-1.0, Field::U) ==
          doctest::Approx(chi_norm(s.u, -1.0)).epsilon(1e-14));
  }

  SUBCASE("disjoint supports add across snapshots") {
    const StatePair a = single_mode_state(g, 1, 0, Complex{2.0, 0.0});
    const StatePair b = single_mode_state(g, 0, 3, Complex{0.0, 1.0});
    TrajectoryNorms tn(g);
    tn.append(0.0, a);
    tn.append(1.0, b);
    const double tilde = tn.tilde_linf(0.0, Field::U);
    CHECK(tilde ==
          doctest::Approx(chi_norm(a.u, 0.0) + chi_norm(b.u, 0.0))
              .epsilon(1e-14));
    // strictly exceeds the plain sup-in-time norm
    CHECK(tilde > tn.time_lp(kInf, NormKind::Chi0, Field::U) + 0.5);
  }

  SUBCASE("heat flow: the supremum sits at t = 0") {
    RandomFieldSpec spec;
    spec.seed = 17;
    spec.n_modes = 16;
    StatePair s0(g);
    s0.u = random_vector_field(spec, 0);
    TrajectoryNorms tn(g);
    for (int m = 0; m <= 20; ++m)
      tn.append(0.05 * m, heat_propagate(s0, 1.0, 1.0, 0.05 * m));
    CHECK(tn.tilde_linf(-1.0, Field::U) ==
          doctest::Approx(chi_norm(s0.u, -1.0)).epsilon(1e-12));
  }

  SUBCASE("dominates the plain sup-in-time norm on random trajectories") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      TrajectoryNorms tn(g);
      for (int m = 0; m <= 6; ++m) {
        RandomFieldSpec spec;
        spec.seed = seed * 31 + m;
        spec.n_modes = 16;
        StatePair s(g);
        s.u = random_vector_field(spec, 0);
        s.b = random_vector_field(spec, 1);
        tn.append(0.1 * m, s);
      }
      for (double s : {-1.0, 0.0, 1.0}) {
        const NormKind kind = s < -0.5 ? NormKind::ChiM1
                              : s < 0.5 ? NormKind::Chi0
                                        : NormKind::Chi1;
        CHECK(tn.tilde_linf(s, Field::U) >=
              tn.time_lp(kInf, kind, Field::U) * (1.0 - 1e-12));
        CHECK(tn.tilde_linf(s, Field::B) >=
              tn.time_lp(kInf, kind, Field::B) * (1.0 - 1e-12));
      }
    }
  }
}

TEST_CASE("trapezoid convergence order on a smooth trajectory") {
  const Grid g(16, 2.0 * kPi);
  const double T = 2.0;
  auto norm_at_resolution = [&](int M) {
    TrajectoryNorms tn(g);
    for (int m = 0; m <= M; ++m) {
      const double t = T * m / M;
      StatePair s = single_mode_state(g, 1, 0, Complex{1.0, 0.0});
      s.u.scale(1.0 + 0.5 * std::sin(3.0 * t));
      tn.append(t, s);
    }
    return tn.time_lp(2.0, NormKind::Chi0, Field::U);
  };
  const double exact = norm_at_resolution(1 << 14);
  const double e1 = std::abs(norm_at_resolution(64) - exact);
  const double e2 = std::abs(norm_at_resolution(128) - exact);
  const double e3 = std::abs(norm_at_resolution(256) - exact);
  const double order1 = std::log2(e1 / e2);
  const double order2 = std::log2(e2 / e3);
  CHECK(order1 >= 1.9);
  CHECK(order2 >= 1.9);
}

TEST_CASE("radial profile integrals") {
  SUBCASE("inverse-square tail from 2") {
    const double v = continuum_radial_chi_norm(
        [](double r) { return 1.0 / (r * r); }, -1.0, 2.0, kInf);
    CHECK(std::abs(v - kPi) < 1e-8);
  }

  SUBCASE("squared-modulus tail from 2") {
    const double v = continuum_radial_chi_norm(
        [](double r) { return std::pow(r, -4.0); }, 0.0, 2.0, kInf);
    CHECK(std::abs(v - kPi / 4.0) < 1e-8);
  }

  SUBCASE("zero profile") {
    CHECK(continuum_radial_chi_norm([](double) { return 0.0; }, -1.0, 2.0,
                                    kInf) == 0.0);
  }

  SUBCASE("finite interval") {
    // 2 pi int_1^2 r dr = 3 pi
    const double v = continuum_radial_chi_norm([](double) { return 1.0; }, 0.0,
                                               1.0, 2.0);
    CHECK(std::abs(v - 3.0 * kPi) < 1e-9);
  }

  SUBCASE("divergent tail is detected") {
    CHECK_THROWS_AS(continuum_radial_chi_norm(
                        [](double r) { return 1.0 / r; }, -1.0, 2.0, kInf),
                    std::runtime_error);
    CHECK_THROWS_AS(continuum_radial_chi_norm([](double) { return 1.0; }, 0.0,
                                              2.0, kInf),
                    std::runtime_error);
  }
}

TEST_CASE("norm report and pair conventions") {
  const Grid g(16, 2.0 * kPi);
  RandomFieldSpec spec;
  spec.seed = 77;
  spec.n_modes = 16;
  const StatePair s = random_state(spec);
  const NormReport r = NormReport::of(s);
  CHECK(r.chi_m1_u == doctest::Approx(chi_norm(s.u, -1.0)).epsilon(1e-12));
  CHECK(r.chi_mhalf_b ==
        doctest::Approx(chi_norm(s.b, -0.5)).epsilon(1e-12));
  CHECK(r.chi0_u == doctest::Approx(chi_norm(s.u, 0.0)).epsilon(1e-12));
  CHECK(r.chi1_b == doctest::Approx(chi_norm(s.b, 1.0)).epsilon(1e-12));
  CHECK(r.l2_u == doctest::Approx(l2_norm(s.u)).epsilon(1e-12));
  CHECK(r.h1_b == doctest::Approx(h1_seminorm(s.b)).epsilon(1e-12));
  CHECK(r.pair(NormKind::Chi0, 1.0) ==
        doctest::Approx(pair_chi_norm(s, 0.0, 1.0)).epsilon(1e-12));
  CHECK(r.pair(NormKind::L2, 2.0) ==
        doctest::Approx(pair_l2_norm(s, 2.0)).epsilon(1e-12));
}
