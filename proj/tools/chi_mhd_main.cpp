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

// chi-mhd <simulate|picard|verify|weakstrong|sweep>
// Spectral MHD runs, fixed-point solves, and the inequality harness, driven
// by flat key=value configs. Every command drops a manifest next to its
// outputs; CHI_MHD_THREADS caps harness workers.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "chi_mhd/io.hpp"
#include "chi_mhd/solver.hpp"
#include "chi_mhd/verification.hpp"

namespace fs = std::filesystem;
using namespace chi_mhd;

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitSolverAbort = 3;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::string preset;
  std::vector<std::string> overrides;  // key=value
  bool continuation = false;
};

RunConfig resolve_config(const CommonArgs& args) {
  std::map<std::string, std::string> kv;
  if (!args.config_path.empty()) kv = parse_flat_config_file(args.config_path);
  for (const auto& item : args.overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--set expects key=value, got '" + item +
                                  "'");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  if (!args.preset.empty()) kv["preset"] = args.preset;
  RunConfig rc = config_from_map(kv);
  if (args.continuation) rc.continuation = true;
  return rc;
}

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  std::vector<std::uint64_t> seeds;
  if (dots == std::string::npos) {
    seeds.push_back(std::stoull(text));
    return seeds;
  }
  const std::uint64_t a = std::stoull(text.substr(0, dots));
  const std::uint64_t b = std::stoull(text.substr(dots + 2));
  if (b < a) throw std::invalid_argument("--seeds range is reversed");
  for (std::uint64_t s = a; s <= b; ++s) seeds.push_back(s);
  return seeds;
}

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << body;
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const RunConfig& rc,
                    const std::vector<std::string>& outputs,
                    const std::vector<std::uint64_t>& seeds = {}) {
  write_text(dir / "manifest.json",
             run_manifest(command, rc, outputs, seeds).dump(2) + "\n");
}

nlohmann::json norm_summary(const Trajectory& tr) {
  const NormReport& r = tr.norms.report(tr.norms.size() - 1);
  const CheckResult energy = check_energy_equality(tr, 1e-6);
  return nlohmann::json{
      {"t_final", tr.final_time()},
      {"l2_u", r.l2_u},
      {"l2_b", r.l2_b},
      {"h1_u", r.h1_u},
      {"h1_b", r.h1_b},
      {"chi_m1", r.chi_m1_u + r.chi_m1_b},
      {"chi0", r.chi0_u + r.chi0_b},
      {"chi1", r.chi1_u + r.chi1_b},
      {"energy", r.l2_u * r.l2_u + r.l2_b * r.l2_b},
      {"energy_residual", energy.ratio},
      {"blowup_integral", tr.blowup_integral()}};
}

int cmd_simulate(const CommonArgs& args) {
  const RunConfig rc = resolve_config(args);
  const StatePair s0 = build_initial_state(rc);
  const fs::path out(args.out_dir);
  fs::create_directories(out);

  nlohmann::json summary;
  Trajectory tr(rc.solver, rc.solver.make_grid());
  if (rc.continuation) {
    auto [traj, report] = continuation_solve(rc.solver, s0);
    tr = std::move(traj);
    nlohmann::json segs = nlohmann::json::array();
    for (const auto& s : report.segments)
      segs.push_back({{"t_start", s.t_start},
                      {"rho", s.rho},
                      {"t_local", std::isfinite(s.t_local) ? s.t_local : -1.0},
                      {"horizon", s.horizon},
                      {"chi_m1_start", s.chi_m1_start},
                      {"iterations", s.iterations},
                      {"blowup_at_end", s.blowup_at_end}});
    summary["segments"] = segs;
  } else {
    tr = integrate(rc.solver, s0);
  }
  write_norms_csv(out / "norms.csv", tr);
  write_checkpoint(out / "checkpoint_final", tr.final_state(), rc.solver,
                   tr.final_time());
  summary.update(norm_summary(tr));
  write_text(out / "summary.json", summary.dump(2) + "\n");
  write_manifest(out, "simulate", rc,
                 {"norms.csv", "checkpoint_final.json", "checkpoint_final.bin",
                  "summary.json"});
  std::cout << "simulate: done, t_final=" << tr.final_time()
            << " energy_residual=" << summary["energy_residual"] << "\n";
  return 0;
}

int cmd_picard(const CommonArgs& args) {
  const RunConfig rc = resolve_config(args);
  const StatePair s0 = build_initial_state(rc);
  const fs::path out(args.out_dir);
  fs::create_directories(out);

  auto [tr, diag] = picard_solve(rc.solver, s0);
  nlohmann::json j{{"converged", diag.converged},
                   {"iterations", diag.iterations},
                   {"distances", diag.distances},
                   {"contraction_ratio", diag.contraction_ratio},
                   {"bilinear_norm_estimate", diag.bilinear_norm_estimate},
                   {"free_term_norm", diag.free_term_norm},
                   {"max_iterate_norm", diag.max_iterate_norm}};
  write_text(out / "picard.json", j.dump(2) + "\n");
  write_norms_csv(out / "norms.csv", tr);
  write_manifest(out, "picard", rc, {"picard.json", "norms.csv"});
  std::cout << "picard: converged=" << (diag.converged ? "true" : "false")
            << " iterations=" << diag.iterations
            << " ratio=" << diag.contraction_ratio << "\n";
  return 0;
}

int cmd_verify(const CommonArgs& args, const std::string& suite,
               const std::string& seeds_text) {
  const RunConfig rc = resolve_config(args);
  SuiteOptions opt;
  opt.n_modes = rc.solver.n_modes;
  opt.period = rc.solver.period;
  if (!seeds_text.empty()) opt.seeds = parse_seed_range(seeds_text);
  const SuiteReport report = run_suite(suite, opt);

  const fs::path out(args.out_dir);
  fs::create_directories(out);
  write_text(out / "report.json", report_to_json(report).dump(2) + "\n");
  write_manifest(out, "verify", rc, {"report.json"}, opt.seeds);
  for (const auto& c : report.checks)
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " ratio=" << c.ratio
              << "\n";
  std::cout << "verify " << suite << ": " << (report.pass ? "PASS" : "FAIL")
            << " (" << report.checks.size() << " checks)\n";
  return report.pass ? 0 : kExitCheckFailed;
}

int cmd_weakstrong(const CommonArgs& args, double delta) {
  RunConfig rc = resolve_config(args);
  rc.delta = delta;
  const StatePair s0 = build_initial_state(rc);
  const Grid grid = rc.solver.make_grid();

  StatePair pert(grid);
  if (rc.delta != 0.0) {
    RandomFieldSpec pspec;
    pspec.seed = rc.seed + 0x5AFE;
    pspec.beta = rc.beta;
    pspec.n_modes = rc.solver.n_modes;
    pspec.period = rc.solver.period;
    pert = random_state(pspec);
    const double norm = pair_l2_norm(pert, 2.0);
    const double want = rc.delta * std::max(pair_l2_norm(s0, 2.0), 1.0);
    if (norm > 0.0) {
      pert.u.scale(want / norm);
      pert.b.scale(want / norm);
    }
  }
  const auto res = weak_strong_experiment(rc.solver, s0, pert);

  const fs::path out(args.out_dir);
  fs::create_directories(out);
  std::ofstream csv(out / "weakstrong.csv");
  csv << "# delta=" << format_double(rc.delta)
      << " difference_energy=l2_pair_p2_squared envelope=lhs0*exp(C*I)\n";
  csv << "t,lhs,rhs\n";
  for (size_t m = 0; m < res.times.size(); ++m)
    csv << format_double(res.times[m]) << ',' << format_double(res.lhs[m])
        << ',' << format_double(res.rhs[m]) << '\n';
  csv.close();
  nlohmann::json j{{"envelope", check_to_json(res.envelope)},
                   {"cancellations", check_to_json(res.cancellations)}};
  write_text(out / "weakstrong.json", j.dump(2) + "\n");
  write_manifest(out, "weakstrong", rc, {"weakstrong.csv", "weakstrong.json"});
  const bool pass = res.envelope.pass && res.cancellations.pass;
  std::cout << "weakstrong: " << (pass ? "PASS" : "FAIL")
            << " max_ratio=" << res.envelope.ratio << "\n";
  return pass ? 0 : kExitCheckFailed;
}

int cmd_sweep(const CommonArgs& args, const std::string& param,
              const std::string& values_text) {
  if (param.empty() || values_text.empty())
    throw std::invalid_argument("sweep needs --param and --values");
  std::vector<std::string> values;
  size_t pos = 0;
  while (pos <= values_text.size()) {
    const auto comma = values_text.find(',', pos);
    const std::string v = values_text.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (v.empty()) throw std::invalid_argument("sweep: empty value in list");
    values.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }

  // Validate every configuration before launching any run.
  std::map<std::string, std::string> base;
  if (!args.config_path.empty())
    base = parse_flat_config_file(args.config_path);
  for (const auto& item : args.overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--set expects key=value");
    base[item.substr(0, eq)] = item.substr(eq + 1);
  }
  if (!args.preset.empty()) base["preset"] = args.preset;
  std::vector<RunConfig> configs;
  for (const auto& v : values) {
    auto kv = base;
    kv[param] = v;
    configs.push_back(config_from_map(kv));
  }

  const fs::path out(args.out_dir);
  fs::create_directories(out);
  std::vector<Trajectory> runs;
  runs.reserve(configs.size());
  for (const auto& rc : configs)
    runs.emplace_back(rc.solver, rc.solver.make_grid());
  parallel_for(configs.size(), 0, [&](size_t i) {
    const StatePair s0 = build_initial_state(configs[i]);
    runs[i] = configs[i].continuation
                  ? continuation_solve(configs[i].solver, s0).first
                  : integrate(configs[i].solver, s0);
    write_norms_csv(out / ("norms_" + param + "_" + values[i] + ".csv"),
                    runs[i]);
  });

  std::ofstream csv(out / "sweep.csv");
  csv << "# param=" << param << " chi_pair_p=1 energy=l2_pair_p2_squared\n";
  csv << param
      << ",t,l2_u,l2_b,h1_u,h1_b,chi_m1,chi_mhalf,chi0,chi1,energy,"
         "blowup_integral\n";
  for (size_t i = 0; i < runs.size(); ++i) {
    // re-read the per-run CSV so the combined file is assembled from the
    // same bytes the individual files carry
    std::ifstream in(out / ("norms_" + param + "_" + values[i] + ".csv"));
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || line.rfind("t,", 0) == 0) continue;
      csv << values[i] << ',' << line << '\n';
      ++rows;
    }
    if (rows == 0) throw std::runtime_error("sweep: empty run output");
  }
  csv.close();
  std::vector<std::string> outputs{"sweep.csv"};
  for (const auto& v : values) outputs.push_back("norms_" + param + "_" + v + ".csv");
  write_manifest(out, "sweep", configs.front(), outputs);
  std::cout << "sweep: " << values.size() << " runs over " << param << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral 2D MHD laboratory over frequency-weighted "
               "L1 norms"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string suite = "all";
  std::string seeds_text;
  double delta = 1e-3;
  std::string param, values_text;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", args.config_path, "flat key=value config file");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--preset", args.preset,
                    "taylor-green|aligned|random-beta|zero");
    cmd->add_option("--set", args.overrides,
                    "override a config key (key=value, repeatable)");
    return cmd;
  };

  CLI::App* simulate = add_common(app.add_subcommand(
      "simulate", "advance the system and emit norm series"));
  simulate->add_flag("--continuation", args.continuation,
                     "use the segment-by-segment fixed-point path");
  CLI::App* picard = add_common(
      app.add_subcommand("picard", "fixed-point solve with diagnostics"));
  CLI::App* verify = add_common(
      app.add_subcommand("verify", "run an inequality suite"));
  verify->add_option("suite", suite, "lemmas|theorem1|theorem2|all");
  verify->add_option("--seeds", seeds_text, "seed range A..B");
  CLI::App* weakstrong = add_common(app.add_subcommand(
      "weakstrong", "twin-run difference envelope"));
  weakstrong->add_option("--delta", delta, "perturbation scale");
  CLI::App* sweep = add_common(app.add_subcommand(
      "sweep", "vary one config parameter over a list"));
  sweep->add_option("--param", param, "config key to vary");
  sweep->add_option("--values", values_text, "comma-separated values");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(args);
    if (picard->parsed()) return cmd_picard(args);
    if (verify->parsed()) return cmd_verify(args, suite, seeds_text);
    if (weakstrong->parsed()) return cmd_weakstrong(args, delta);
    if (sweep->parsed()) return cmd_sweep(args, param, values_text);
  } catch (const SolverError& e) {
    const char* kind = e.kind() == AbortKind::NonFinite ? "NonFinite"
                       : e.kind() == AbortKind::BlowupGuard
                           ? "BlowupGuardTripped"
                           : "NotContracting";
    std::cerr << "solver abort (" << kind << ") at t=" << e.last_time() << ": "
              << e.what() << "\n";
    return kExitSolverAbort;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return 0;
}
