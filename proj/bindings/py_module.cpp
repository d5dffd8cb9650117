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

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "chi_mhd/io.hpp"
#include "chi_mhd/norms.hpp"
#include "chi_mhd/semigroup.hpp"
#include "chi_mhd/solver.hpp"
#include "chi_mhd/spectral.hpp"
#include "chi_mhd/verification.hpp"

namespace py = pybind11;
using namespace chi_mhd;

namespace {

py::array_t<Complex> field_to_array(const SpectralField& f) {
  const int n = f.grid().n();
  py::array_t<Complex> out({n, n});
  auto r = out.mutable_unchecked<2>();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = f[i * n + j];
  return out;
}

SpectralField field_from_array(const Grid& g, py::array_t<Complex> arr) {
  auto r = arr.unchecked<2>();
  if (r.shape(0) != g.n() || r.shape(1) != g.n())
    throw std::invalid_argument("array shape does not match the grid");
  SpectralField f(g);
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j) f[i * g.n() + j] = r(i, j);
  return f;
}

py::dict check_to_dict(const CheckResult& c) {
  py::dict d;
  d["name"] = c.name;
  d["lhs"] = c.lhs;
  d["rhs"] = c.rhs;
  d["ratio"] = c.ratio;
  d["pass"] = c.pass;
  if (c.empirical_constant) d["empirical_constant"] = *c.empirical_constant;
  py::dict meta;
  for (const auto& [k, v] : c.meta) meta[py::str(k)] = v;
  d["meta"] = meta;
  return d;
}

py::dict norms_to_dict(const Trajectory& tr) {
  py::dict d;
  const size_t m = tr.norms.size();
  std::vector<double> t(m);
  std::vector<double> cols[12];
  for (auto& c : cols) c.resize(m);
  for (size_t i = 0; i < m; ++i) {
    t[i] = tr.norms.time(i);
    const NormReport& r = tr.norms.report(i);
    cols[0][i] = r.l2_u;
    cols[1][i] = r.l2_b;
    cols[2][i] = r.h1_u;
    cols[3][i] = r.h1_b;
    cols[4][i] = r.chi_m1_u;
    cols[5][i] = r.chi_m1_b;
    cols[6][i] = r.chi_mhalf_u;
    cols[7][i] = r.chi_mhalf_b;
    cols[8][i] = r.chi0_u;
    cols[9][i] = r.chi0_b;
    cols[10][i] = r.chi1_u;
    cols[11][i] = r.chi1_b;
  }
  d["t"] = t;
  const char* names[12] = {"l2_u",       "l2_b",       "h1_u",     "h1_b",
                           "chi_m1_u",   "chi_m1_b",   "chi_mhalf_u",
                           "chi_mhalf_b", "chi0_u",    "chi0_b",
                           "chi1_u",     "chi1_b"};
  for (int c = 0; c < 12; ++c) d[names[c]] = cols[c];
  d["blowup_integral"] = tr.blowup_series();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pseudo-spectral 2D MHD laboratory over frequency-weighted L1 "
            "norms";

  py::class_<Grid>(m, "Grid")
      .def(py::init<int, double>(), py::arg("n_modes"), py::arg("period"))
      .def_property_readonly("n_modes", &Grid::n)
      .def_property_readonly("period", &Grid::period);

  py::class_<StatePair>(m, "StatePair")
      .def(py::init<const Grid&>())
      .def_property_readonly("grid", &StatePair::grid)
      .def("u_x", [](const StatePair& s) { return field_to_array(s.u.x); })
      .def("u_y", [](const StatePair& s) { return field_to_array(s.u.y); })
      .def("b_x", [](const StatePair& s) { return field_to_array(s.b.x); })
      .def("b_y", [](const StatePair& s) { return field_to_array(s.b.y); })
      .def("divergence_ratio_u",
           [](const StatePair& s) { return divergence_ratio(s.u); })
      .def("divergence_ratio_b",
           [](const StatePair& s) { return divergence_ratio(s.b); });

  m.def(
      "state_from_arrays",
      [](const Grid& g, py::array_t<Complex> ux, py::array_t<Complex> uy,
         py::array_t<Complex> bx, py::array_t<Complex> by) {
        StatePair s(g);
        s.u.x = field_from_array(g, ux);
        s.u.y = field_from_array(g, uy);
        s.b.x = field_from_array(g, bx);
        s.b.y = field_from_array(g, by);
        return s;
      },
      py::arg("grid"), py::arg("u_x"), py::arg("u_y"), py::arg("b_x"),
      py::arg("b_y"));

  m.def("taylor_green_state", &taylor_green_state, py::arg("grid"),
        py::arg("amplitude"), py::arg("b_amplitude") = 0.0,
        py::arg("b_harmonic") = 2);
  m.def(
      "random_state",
      [](std::uint64_t seed, double beta, double amplitude, int n_modes,
         double period) {
        RandomFieldSpec spec;
        spec.seed = seed;
        spec.beta = beta;
        spec.amplitude = amplitude;
        spec.n_modes = n_modes;
        spec.period = period;
        return random_state(spec);
      },
      py::arg("seed"), py::arg("beta") = 2.5, py::arg("amplitude") = 1.0,
      py::arg("n_modes") = 32, py::arg("period") = 2.0 * kPi);

  m.def("pair_chi_norm", &pair_chi_norm, py::arg("state"), py::arg("s"),
        py::arg("p"));
  m.def("pair_l2_norm", &pair_l2_norm, py::arg("state"), py::arg("p") = 2.0);
  m.def(
      "heat_propagate",
      [](const StatePair& s, double mu, double nu, double t) {
        return heat_propagate(s, mu, nu, t);
      },
      py::arg("state"), py::arg("mu"), py::arg("nu"), py::arg("t"));
  m.def("leray_project_state", [](const StatePair& s) {
    StatePair out = s;
    out.u = leray_project(s.u);
    out.b = leray_project(s.b);
    return out;
  });

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("n_modes", &SolverConfig::n_modes)
      .def_readwrite("period", &SolverConfig::period)
      .def_readwrite("mu", &SolverConfig::mu)
      .def_readwrite("nu", &SolverConfig::nu)
      .def_readwrite("dt", &SolverConfig::dt)
      .def_readwrite("t_end", &SolverConfig::t_end)
      .def_readwrite("snapshot_stride", &SolverConfig::snapshot_stride)
      .def_readwrite("picard_tol", &SolverConfig::picard_tol)
      .def_readwrite("picard_max_iters", &SolverConfig::picard_max_iters)
      .def_readwrite("c0", &SolverConfig::c0)
      .def_readwrite("blowup_guard", &SolverConfig::blowup_guard)
      .def("resolved_c0", &SolverConfig::resolved_c0);

  py::class_<Trajectory>(m, "Trajectory")
      .def_property_readonly("times",
                             [](const Trajectory& t) { return t.snap_times; })
      .def("state", [](const Trajectory& t, size_t i) {
        return t.snapshots.at(i);
      })
      .def("final_state", &Trajectory::final_state)
      .def("final_time", &Trajectory::final_time)
      .def("blowup_integral", &Trajectory::blowup_integral)
      .def("norms", &norms_to_dict);

  py::class_<PicardDiagnostics>(m, "PicardDiagnostics")
      .def_readonly("distances", &PicardDiagnostics::distances)
      .def_readonly("contraction_ratio", &PicardDiagnostics::contraction_ratio)
      .def_readonly("converged", &PicardDiagnostics::converged)
      .def_readonly("iterations", &PicardDiagnostics::iterations)
      .def_readonly("bilinear_norm_estimate",
                    &PicardDiagnostics::bilinear_norm_estimate)
      .def_readonly("free_term_norm", &PicardDiagnostics::free_term_norm)
      .def_readonly("max_iterate_norm", &PicardDiagnostics::max_iterate_norm);

  py::class_<ContinuationSegment>(m, "ContinuationSegment")
      .def_readonly("t_start", &ContinuationSegment::t_start)
      .def_readonly("rho", &ContinuationSegment::rho)
      .def_readonly("t_local", &ContinuationSegment::t_local)
      .def_readonly("horizon", &ContinuationSegment::horizon)
      .def_readonly("chi_m1_start", &ContinuationSegment::chi_m1_start)
      .def_readonly("iterations", &ContinuationSegment::iterations)
      .def_readonly("blowup_at_end", &ContinuationSegment::blowup_at_end);

  py::register_exception<SolverError>(m, "SolverAbort");

  m.def("integrate", &integrate, py::arg("config"), py::arg("state"),
        py::call_guard<py::gil_scoped_release>());
  m.def("picard_solve", &picard_solve, py::arg("config"), py::arg("state"),
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "continuation_solve",
      [](const SolverConfig& cfg, const StatePair& s0) {
        auto [tr, report] = continuation_solve(cfg, s0);
        return py::make_tuple(std::move(tr), report.segments);
      },
      py::arg("config"), py::arg("state"));
  m.def("smallness_threshold", &smallness_threshold, py::arg("mu"),
        py::arg("nu"), py::arg("c0"));
  m.def(
      "split_frequency",
      [](const StatePair& s, double eps) {
        const FrequencySplit fs = split_frequency(s, eps);
        return py::make_tuple(fs.low, fs.high, fs.rho, fs.tail_norm);
      },
      py::arg("state"), py::arg("eps"));
  m.def("local_existence_time", &local_existence_time, py::arg("mu"),
        py::arg("nu"), py::arg("rho"), py::arg("c0"), py::arg("chi_m1_norm"));

  m.def("continuum_radial_chi_norm", &continuum_radial_chi_norm,
        py::arg("phi"), py::arg("s"), py::arg("r_min"), py::arg("r_max"));

  m.def("check_energy_equality",
        [](const Trajectory& tr) { return check_to_dict(check_energy_equality(tr, 1e-6)); });
  m.def("check_apriori", [](const Trajectory& tr) {
    return check_to_dict(check_apriori(tr));
  });
  m.def("check_blowup_majorant", [](const Trajectory& tr) {
    return check_to_dict(check_blowup_majorant(tr));
  });
  m.def(
      "weak_strong_experiment",
      [](const SolverConfig& cfg, const StatePair& s0, const StatePair& pert) {
        const auto res = weak_strong_experiment(cfg, s0, pert);
        py::dict d;
        d["envelope"] = check_to_dict(res.envelope);
        d["cancellations"] = check_to_dict(res.cancellations);
        d["times"] = res.times;
        d["lhs"] = res.lhs;
        d["rhs"] = res.rhs;
        return d;
      },
      py::arg("config"), py::arg("state"), py::arg("perturbation"));

  m.def(
      "run_suite",
      [](const std::string& suite, const std::vector<std::uint64_t>& seeds,
         int n_modes, int threads) {
        SuiteOptions opt;
        opt.seeds = seeds;
        opt.n_modes = n_modes;
        opt.threads = threads;
        const SuiteReport r = run_suite(suite, opt);
        py::dict d;
        d["suite"] = r.suite;
        d["pass"] = r.pass;
        py::list checks;
        for (const auto& c : r.checks) checks.append(check_to_dict(c));
        d["checks"] = checks;
        return d;
      },
      py::arg("suite"), py::arg("seeds"), py::arg("n_modes") = 32,
      py::arg("threads") = 0);

  m.attr("DEFAULT_C0") = calibration::kDefaultC0;
  m.attr("__version__") = "0.1.0";
}
