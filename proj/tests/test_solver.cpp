#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "chi_mhd/solver.hpp"
#include "chi_mhd/verification.hpp"

using namespace chi_mhd;

namespace {

double max_rel_coeff_error(const VectorField& got, const VectorField& want) {
  double worst = 0.0, scale = 0.0;
  for (int k = 0; k < got.grid().size(); ++k) {
    scale = std::max({scale, std::abs(want.x[k]), std::abs(want.y[k])});
  }
  if (scale == 0.0) {
    for (int k = 0; k < got.grid().size(); ++k)
      worst = std::max({worst, std::abs(got.x[k]), std::abs(got.y[k])});
    return worst;
  }
  for (int k = 0; k < got.grid().size(); ++k) {
    worst = std::max({worst, std::abs(got.x[k] - want.x[k]),
                      std::abs(got.y[k] - want.y[k])});
  }
  return worst / scale;
}

double snapshot_l2chi0_distance(const Trajectory& a, const Trajectory& b) {
  REQUIRE(a.snap_times.size() == b.snap_times.size());
  double acc = 0.0, prev = 0.0;
  for (size_t m = 0; m < a.snapshots.size(); ++m) {
    REQUIRE(a.snap_times[m] == doctest::Approx(b.snap_times[m]));
    StatePair d = a.snapshots[m];
    d -= b.snapshots[m];
    const double cu = chi_norm(d.u, 0.0), cb = chi_norm(d.b, 0.0);
    const double cur = cu * cu + cb * cb;
    if (m > 0) acc += 0.5 * (prev + cur) * (a.snap_times[m] - a.snap_times[m - 1]);
    prev = cur;
  }
  return std::sqrt(acc);
}

StatePair scaled_random_state(const SolverConfig& cfg, std::uint64_t seed,
                              double beta, double target_chi_m1) {
  RandomFieldSpec spec;
  spec.seed = seed;
  spec.beta = beta;
  spec.n_modes = cfg.n_modes;
  spec.period = cfg.period;
  StatePair s = random_state(spec);
  const double norm = pair_chi_norm(s, -1.0, 1.0);
  const double factor = target_chi_m1 / norm;
  s.u.scale(factor);
  s.b.scale(factor);
  return s;
}

}  // namespace

TEST_CASE("config validation") {
  SolverConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  SolverConfig bad = cfg;
  bad.n_modes = 6;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.dt = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.mu = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.snapshot_stride = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  // t_end must land on the step grid
  SolverConfig off = cfg;
  off.dt = 3e-3;
  off.t_end = 0.01;
  const StatePair z(off.make_grid());
  CHECK_THROWS_AS(integrate(off, z), std::invalid_argument);
}

TEST_CASE("cellular vortex decays on the exact exponential") {
  SolverConfig cfg;
  cfg.n_modes = 32;
  cfg.dt = 1e-3;
  cfg.t_end = 0.3;
  cfg.snapshot_stride = 100;
  const Grid g = cfg.make_grid();
  const StatePair s0 = taylor_green_state(g, 1.0);
  const Trajectory tr = integrate(cfg, s0);
  for (size_t m = 0; m < tr.snapshots.size(); ++m) {
    VectorField want = s0.u;
    want.scale(std::exp(-2.0 * tr.snap_times[m]));
    CHECK(max_rel_coeff_error(tr.snapshots[m].u, want) < 1e-6);
    CHECK(chi_norm(tr.snapshots[m].b, 0.0) < 1e-12);
  }
}

TEST_CASE("aligned fields reduce to the heat flow") {
  SolverConfig cfg;
  cfg.n_modes = 32;
  cfg.mu = cfg.nu = 0.7;
  cfg.dt = 1e-3;
  cfg.t_end = 0.5;
  cfg.snapshot_stride = 250;
  const Grid g = cfg.make_grid();
  StatePair s0 = taylor_green_state(g, 0.8);
  s0.b = s0.u;
  const Trajectory tr = integrate(cfg, s0);
  for (size_t m = 0; m < tr.snapshots.size(); ++m) {
    const VectorField want = heat_propagate(s0.u, cfg.mu, tr.snap_times[m]);
    CHECK(max_rel_coeff_error(tr.snapshots[m].u, want) < 1e-6);
    CHECK(max_rel_coeff_error(tr.snapshots[m].b, want) < 1e-6);
  }
}

TEST_CASE("zero data stays zero") {
  SolverConfig cfg;
  cfg.n_modes = 16;
  cfg.dt = 1e-2;
  cfg.t_end = 0.1;
  const Trajectory tr = integrate(cfg, StatePair(cfg.make_grid()));
  CHECK(tr.norms.time_lp(kInf, NormKind::Chi0, Field::U) == 0.0);
  CHECK(tr.blowup_integral() == 0.0);
}

TEST_CASE("integrate keeps states admissible and dissipates energy") {
  SolverConfig cfg;
  cfg.n_modes = 32;
  cfg.dt = 1e-3;
  cfg.t_end = 0.2;
  cfg.snapshot_stride = 20;
  const StatePair s0 = scaled_random_state(cfg, 42, 3.0, 2.0);
  const Trajectory tr = integrate(cfg, s0);
  for (const auto& s : tr.snapshots) {
    CHECK(divergence_ratio(s.u) <= 1e-10);
    CHECK(divergence_ratio(s.b) <= 1e-10);
    CHECK(s.u.x.mean_free());
    CHECK(s.b.y.mean_free());
  }
  double prev = kInf;
  for (size_t m = 0; m < tr.norms.size(); ++m) {
    const NormReport& r = tr.norms.report(m);
    const double energy = r.l2_u * r.l2_u + r.l2_b * r.l2_b;
    CHECK(energy <= prev * (1.0 + 1e-12));
    prev = energy;
  }
}

TEST_CASE("blow-up guard aborts with the last valid time") {
  SolverConfig cfg;
  cfg.n_modes = 16;
  cfg.dt = 1e-3;
  cfg.t_end = 0.5;
  cfg.blowup_guard = 1e-4;  // deliberately tiny
  const StatePair s0 = taylor_green_state(cfg.make_grid(), 1.0);
  try {
    integrate(cfg, s0);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.kind() == AbortKind::BlowupGuard);
    CHECK(e.last_time() > 0.0);
    CHECK(e.last_time() < 0.5);
  }
}

TEST_CASE("stability bound rejects oversized steps") {
  SolverConfig cfg;
  cfg.n_modes = 64;
  cfg.dt = 0.05;
  cfg.t_end = 0.5;
  const StatePair s0 = taylor_green_state(cfg.make_grid(), 5.0);
  CHECK(advective_dt_bound(cfg, s0) < cfg.dt);
  CHECK_THROWS_AS(integrate(cfg, s0), std::invalid_argument);
}

TEST_CASE("smallness threshold formula") {
  CHECK(smallness_threshold(1.0, 1.0, 1.0) ==
        doctest::Approx(0.35355339059327373).epsilon(1e-12));
  CHECK(smallness_threshold(4.0, 1.0, 2.0) ==
        doctest::Approx(0.17677669529663687).epsilon(1e-12));
  // linear in min{mu, nu}
  CHECK(smallness_threshold(3.0, 2.0, 1.5) ==
        doctest::Approx(2.0 * smallness_threshold(1.5, 1.0, 1.5))
            .epsilon(1e-12));
  CHECK_THROWS_AS(smallness_threshold(0.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("frequency splitting") {
  SolverConfig cfg;
  cfg.n_modes = 32;
  const Grid g = cfg.make_grid();

  SUBCASE("single low shell with empty tail") {
    const StatePair s = taylor_green_state(g, 1.0);
    const FrequencySplit fs = split_frequency(s, 0.1);
    CHECK(fs.rho == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(pair_chi_norm(fs.high, -1.0, 1.0) < 1e-15);
    CHECK(fs.tail_norm <= 0.1);
  }

  SUBCASE("eps above the full norm leaves low empty") {
    const StatePair s = taylor_green_state(g, 1.0);
    const double full = pair_chi_norm(s, -1.0, 1.0);
    const FrequencySplit fs = split_frequency(s, full * 1.01);
    CHECK(fs.rho == 0.0);
    CHECK(chi_norm(fs.low.u, 0.0) == 0.0);
    CHECK(pair_chi_norm(fs.high, -1.0, 1.0) ==
          doctest::Approx(full).epsilon(1e-12));
  }

  SUBCASE("partition is exact and the tail obeys the budget") {
    RandomFieldSpec spec;
    spec.seed = 5;
    spec.n_modes = 32;
    const StatePair s = random_state(spec);
    for (double eps : {0.01, 0.1, 0.5}) {
      const FrequencySplit fs = split_frequency(s, eps);
      CHECK(fs.tail_norm <= eps);
      StatePair sum = fs.low;
      sum += fs.high;
      double worst = 0.0;
      for (int k = 0; k < g.size(); ++k) {
        worst = std::max(worst, std::abs(sum.u.x[k] - s.u.x[k]));
        worst = std::max(worst, std::abs(sum.b.y[k] - s.b.y[k]));
      }
      CHECK(worst == 0.0);  // indicator masks: exact partition
      CHECK(pair_chi_norm(fs.high, -1.0, 1.0) ==
            doctest::Approx(fs.tail_norm).epsilon(1e-12));
    }
  }

  SUBCASE("rho is nonincreasing in eps") {
    RandomFieldSpec spec;
    spec.seed = 8;
    spec.n_modes = 32;
    const StatePair s = random_state(spec);
    double prev_rho = kInf;
    for (double eps = 0.01; eps < 2.0; eps *= 1.6) {
      const FrequencySplit fs = split_frequency(s, eps);
      CHECK(fs.rho <= prev_rho + 1e-15);
      prev_rho = fs.rho;
      // scan oracle: recompute the tail directly at fs.rho
      double tail = 0.0;
      for (int k = 1; k < g.size(); ++k) {
        const double r = g.xi_norm(k);
        if (r <= fs.rho) continue;
        tail += (std::hypot(std::abs(s.u.x[k]), std::abs(s.u.y[k])) +
                 std::hypot(std::abs(s.b.x[k]), std::abs(s.b.y[k]))) /
                r;
      }
      CHECK(tail <= eps * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("local horizon formula") {
  CHECK(local_existence_time(1.0, 1.0, 1.0, 1.0, 1.0) ==
        doctest::Approx(1.0 / 64.0).epsilon(1e-12));
  const double base = local_existence_time(1.0, 1.0, 2.0, 1.5, 1.0);
  CHECK(local_existence_time(1.0, 1.0, 2.0, 1.5, 4.0) ==
        doctest::Approx(base / 16.0).epsilon(1e-12));
  CHECK(local_existence_time(2.0, 3.0, 2.0, 1.5, 1.0) ==
        doctest::Approx(2.0 * local_existence_time(1.0, 1.0, 2.0, 1.5, 1.0))
            .epsilon(1e-12));
  CHECK(local_existence_time(1.0, 1.0, 0.0, 1.0, 1.0) == kInf);
  CHECK(local_existence_time(1.0, 1.0, 1.0, 1.0, 0.0) == kInf);
}

TEST_CASE("fixed-point solver") {
  SUBCASE("zero data converges immediately to zero") {
    SolverConfig cfg;
    cfg.n_modes = 16;
    cfg.dt = 1e-2;
    cfg.t_end = 0.2;
    auto [tr, diag] = picard_solve(cfg, StatePair(cfg.make_grid()));
    CHECK(diag.converged);
    CHECK(diag.iterations == 1);
    CHECK(tr.norms.time_lp(kInf, NormKind::Chi0, Field::U) == 0.0);
  }

  SUBCASE("small data: geometric contraction inside the ball") {
    SolverConfig cfg;
    cfg.n_modes = 32;
    cfg.dt = 1e-3;
    cfg.t_end = 0.25;
    cfg.snapshot_stride = 25;
    const double thresh =
        smallness_threshold(cfg.mu, cfg.nu, cfg.resolved_c0());
    const StatePair s0 = scaled_random_state(cfg, 3, 2.5, 0.5 * thresh);
    auto [tr, diag] = picard_solve(cfg, s0);
    CHECK(diag.converged);
    CHECK(diag.contraction_ratio < 1.0);
    CHECK(diag.distances.size() >= 2);
    // Lemma-style ball: iterates stay within twice the free term
    const double alpha = diag.free_term_norm;
    CHECK(alpha * 4.0 * diag.bilinear_norm_estimate < 1.0);
    CHECK(diag.max_iterate_norm <= 2.0 * alpha * (1.0 + 1e-9));

    const Trajectory oracle = integrate(cfg, s0);
    CHECK(snapshot_l2chi0_distance(tr, oracle) < 1e-4);
  }

  SUBCASE("oversized data on a long horizon fails to contract") {
    SolverConfig cfg;
    cfg.n_modes = 32;
    cfg.dt = 2e-3;
    cfg.t_end = 1.0;
    cfg.picard_max_iters = 40;
    const Grid g = cfg.make_grid();
    const StatePair s0 = taylor_green_state(g, 40.0, 8.0, 2);
    CHECK_THROWS_AS(picard_solve(cfg, s0), SolverError);
  }
}

TEST_CASE("continuation") {
  SUBCASE("small data covers the horizon in one segment") {
    SolverConfig cfg;
    cfg.n_modes = 32;
    cfg.dt = 1e-3;
    cfg.t_end = 0.2;
    cfg.snapshot_stride = 20;
    const double thresh =
        smallness_threshold(cfg.mu, cfg.nu, cfg.resolved_c0());
    const StatePair s0 = scaled_random_state(cfg, 11, 2.5, 0.4 * thresh);
    auto [tr, report] = continuation_solve(cfg, s0);
    CHECK(report.segments.size() == 1);
    CHECK(report.segments[0].t_local == kInf);
    CHECK(tr.final_time() == doctest::Approx(cfg.t_end));

    // the running chi^0-squared integral stays under the cap assembled from
    // the dissipation-weighted envelope of the run
    const double kmin = std::min(cfg.mu, cfg.nu);
    const auto chi1_int = tr.norms.prefix_integral(
        [](const NormReport& r) { return r.chi1_u + r.chi1_b; });
    const double envelope = tr.norms.tilde_linf_pair(-1.0, 1.0) +
                            0.5 * kmin * chi1_int.back();
    CHECK(tr.blowup_integral() <=
          2.0 * envelope * envelope / kmin * (1.0 + 1e-12));
  }

  SUBCASE("large cellular data needs several segments and matches the stepper") {
    SolverConfig cfg;
    cfg.n_modes = 32;
    cfg.dt = 5e-4;
    cfg.t_end = 0.2;
    cfg.snapshot_stride = 400;
    const Grid g = cfg.make_grid();
    const double thresh =
        smallness_threshold(cfg.mu, cfg.nu, cfg.resolved_c0());
    const double amp = 4.0 * thresh;
    const StatePair s0 = taylor_green_state(g, amp, 0.2 * amp, 2);
    auto [tr, report] = continuation_solve(cfg, s0);
    CHECK(report.segments.size() >= 2);
    double min_t_local = kInf;
    for (const auto& seg : report.segments) {
      CHECK(seg.horizon <= seg.t_local * (1.0 + 1e-12));
      // horizon formula recomputed from the logged quantities
      if (std::isfinite(seg.t_local)) {
        const double expect = local_existence_time(
            cfg.mu, cfg.nu, seg.rho, cfg.resolved_c0(), seg.chi_m1_start);
        CHECK(seg.t_local == doctest::Approx(expect).epsilon(1e-12));
        min_t_local = std::min(min_t_local, seg.t_local);
      }
    }
    // Uniform positive lower bound assembled from the run's per-mode
    // suprema: every per-segment radius is <= the tilde radius and every
    // segment norm is <= the tilde norm.
    const double c0 = cfg.resolved_c0();
    const double eps =
        std::min(cfg.mu, cfg.nu) * std::pow(2.0, -2.5) / c0;
    double rho_star = 0.0;
    if (tr.norms.tilde_tail(0.0, -1.0, Field::U) +
            tr.norms.tilde_tail(0.0, -1.0, Field::B) >
        eps) {
      std::vector<double> radii;
      for (int k = 1; k < g.size(); ++k) radii.push_back(g.xi_norm(k));
      std::sort(radii.begin(), radii.end());
      radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
      for (double r : radii) {
        rho_star = r;
        if (tr.norms.tilde_tail(r, -1.0, Field::U) +
                tr.norms.tilde_tail(r, -1.0, Field::B) <=
            eps)
          break;
      }
    }
    const double t_star = local_existence_time(
        cfg.mu, cfg.nu, rho_star, c0, tr.norms.tilde_linf_pair(-1.0, 1.0));
    CHECK(t_star > 0.0);
    CHECK(min_t_local >= t_star * (1.0 - 1e-9));

    const Trajectory oracle = integrate(cfg, s0);
    StatePair d = tr.final_state();
    d -= oracle.final_state();
    CHECK(tr.final_time() == doctest::Approx(oracle.final_time()));
    CHECK(pair_chi_norm(d, 0.0, 2.0) < 1e-4);
    // blow-up log is nondecreasing across segments
    for (size_t i = 1; i < report.segments.size(); ++i)
      CHECK(report.segments[i].blowup_at_end >=
            report.segments[i - 1].blowup_at_end - 1e-14);
  }
}

TEST_CASE("grid refinement leaves a smooth solution unchanged") {
  SolverConfig c32;
  c32.n_modes = 32;
  c32.dt = 1e-3;
  c32.t_end = 0.2;
  c32.snapshot_stride = 200;
  SolverConfig c64 = c32;
  c64.n_modes = 64;

  const StatePair s32 = taylor_green_state(c32.make_grid(), 1.0, 0.3, 2);
  const StatePair s64 = taylor_green_state(c64.make_grid(), 1.0, 0.3, 2);
  const Trajectory t32 = integrate(c32, s32);
  const Trajectory t64 = integrate(c64, s64);

  // embed the coarse solution in the fine lattice and compare
  const Grid g64 = c64.make_grid();
  StatePair embedded(g64);
  const Grid g32 = c32.make_grid();
  const StatePair& fin32 = t32.final_state();
  for (int i = 0; i < 32; ++i) {
    const int kx = g32.freq(i);
    for (int j = 0; j < 32; ++j) {
      const int ky = g32.freq(j);
      embedded.u.x.at(kx, ky) = fin32.u.x[i * 32 + j];
      embedded.u.y.at(kx, ky) = fin32.u.y[i * 32 + j];
      embedded.b.x.at(kx, ky) = fin32.b.x[i * 32 + j];
      embedded.b.y.at(kx, ky) = fin32.b.y[i * 32 + j];
    }
  }
  StatePair d = embedded;
  d -= t64.final_state();
  CHECK(pair_chi_norm(d, 0.0, 2.0) < 1e-8);
}
