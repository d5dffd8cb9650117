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

#include "chi_mhd/io.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

namespace chi_mhd {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& v) {
  size_t pos = 0;
  double out;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number for " + key);
  }
  if (pos != v.size())
    throw std::invalid_argument("config: trailing junk after " + key);
  return out;
}

long to_long(const std::string& key, const std::string& v) {
  size_t pos = 0;
  long out;
  try {
    out = std::stol(v, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer for " + key);
  }
  if (pos != v.size())
    throw std::invalid_argument("config: trailing junk after " + key);
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config: bad boolean for " + key);
}

}  // namespace

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::map<std::string, std::string> parse_flat_config(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: missing '=' on line " +
                                  std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config: empty key or value on line " +
                                  std::to_string(lineno));
    out[key] = value;
  }
  return out;
}

std::map<std::string, std::string> parse_flat_config_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path.string());
  return parse_flat_config(in);
}

RunConfig config_from_map(const std::map<std::string, std::string>& kv) {
  RunConfig rc;
  for (const auto& [key, value] : kv) {
    if (key == "n_modes")
      rc.solver.n_modes = static_cast<int>(to_long(key, value));
    else if (key == "period")
      rc.solver.period = to_double(key, value);
    else if (key == "mu")
      rc.solver.mu = to_double(key, value);
    else if (key == "nu")
      rc.solver.nu = to_double(key, value);
    else if (key == "dt")
      rc.solver.dt = to_double(key, value);
    else if (key == "t_end")
      rc.solver.t_end = to_double(key, value);
    else if (key == "snapshot_stride")
      rc.solver.snapshot_stride = static_cast<int>(to_long(key, value));
    else if (key == "picard_tol")
      rc.solver.picard_tol = to_double(key, value);
    else if (key == "picard_max_iters")
      rc.solver.picard_max_iters = static_cast<int>(to_long(key, value));
    else if (key == "c0")
      rc.solver.c0 = to_double(key, value);
    else if (key == "blowup_guard")
      rc.solver.blowup_guard = to_double(key, value);
    else if (key == "preset")
      rc.preset = value;
    else if (key == "amplitude")
      rc.amplitude = to_double(key, value);
    else if (key == "b_amplitude")
      rc.b_amplitude = to_double(key, value);
    else if (key == "b_harmonic")
      rc.b_harmonic = static_cast<int>(to_long(key, value));
    else if (key == "beta")
      rc.beta = to_double(key, value);
    else if (key == "seed")
      rc.seed = static_cast<std::uint64_t>(to_long(key, value));
    else if (key == "delta")
      rc.delta = to_double(key, value);
    else if (key == "continuation")
      rc.continuation = to_bool(key, value);
    else
      throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  rc.solver.validate();
  if (rc.preset != "taylor-green" && rc.preset != "aligned" &&
      rc.preset != "random-beta" && rc.preset != "zero")
    throw std::invalid_argument("config: unknown preset '" + rc.preset + "'");
  return rc;
}

std::map<std::string, std::string> RunConfig::resolved() const {
  std::map<std::string, std::string> kv;
  kv["n_modes"] = std::to_string(solver.n_modes);
  kv["period"] = format_double(solver.period);
  kv["mu"] = format_double(solver.mu);
  kv["nu"] = format_double(solver.nu);
  kv["dt"] = format_double(solver.dt);
  kv["t_end"] = format_double(solver.t_end);
  kv["snapshot_stride"] = std::to_string(solver.snapshot_stride);
  kv["picard_tol"] = format_double(solver.picard_tol);
  kv["picard_max_iters"] = std::to_string(solver.picard_max_iters);
  kv["c0"] = format_double(solver.resolved_c0());
  kv["blowup_guard"] = format_double(solver.blowup_guard);
  kv["preset"] = preset;
  kv["amplitude"] = format_double(amplitude);
  kv["b_amplitude"] = format_double(b_amplitude);
  kv["b_harmonic"] = std::to_string(b_harmonic);
  kv["beta"] = format_double(beta);
  kv["seed"] = std::to_string(seed);
  kv["delta"] = format_double(delta);
  kv["continuation"] = continuation ? "true" : "false";
  return kv;
}

StatePair build_initial_state(const RunConfig& rc) {
  const Grid grid = rc.solver.make_grid();
  if (rc.preset == "taylor-green")
    return taylor_green_state(grid, rc.amplitude, rc.b_amplitude,
                              rc.b_harmonic);
  if (rc.preset == "aligned") {
    StatePair s = taylor_green_state(grid, rc.amplitude);
    s.b = s.u;
    return s;
  }
  if (rc.preset == "random-beta") {
    RandomFieldSpec spec;
    spec.seed = rc.seed;
    spec.beta = rc.beta;
    spec.amplitude = rc.amplitude;
    spec.n_modes = rc.solver.n_modes;
    spec.period = rc.solver.period;
    return random_state(spec);
  }
  return StatePair(grid);  // zero
}

nlohmann::json check_to_json(const CheckResult& c) {
  nlohmann::json meta(c.meta);
  if (c.empirical_constant)
    meta["empirical_constant"] = format_double(*c.empirical_constant);
  return nlohmann::json{{"name", c.name}, {"lhs", c.lhs},   {"rhs", c.rhs},
                        {"ratio", c.ratio}, {"pass", c.pass}, {"meta", meta}};
}

nlohmann::json report_to_json(const SuiteReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) checks.push_back(check_to_json(c));
  return nlohmann::json{
      {"suite", r.suite}, {"checks", checks}, {"pass", r.pass}};
}

void write_norms_csv(const std::filesystem::path& path, const Trajectory& tr) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("write_norms_csv: cannot open " + path.string());
  out << "# period=" << format_double(tr.grid.period())
      << " n_modes=" << tr.grid.n()
      << " chi_pair_p=1 energy=l2_pair_p2_squared"
      << " convention=\"f(x)=sum c_k exp(i xi_k x)\"\n";
  out << "t,l2_u,l2_b,h1_u,h1_b,chi_m1,chi_mhalf,chi0,chi1,energy,"
         "blowup_integral\n";
  const auto blowup = tr.blowup_series();
  const auto& times = tr.norms.times();
  size_t cursor = 0;
  for (double ts : tr.snap_times) {
    while (cursor + 1 < times.size() && times[cursor] < ts - 1e-15) ++cursor;
    const NormReport& r = tr.norms.report(cursor);
    out << format_double(ts) << ',' << format_double(r.l2_u) << ','
        << format_double(r.l2_b) << ',' << format_double(r.h1_u) << ','
        << format_double(r.h1_b) << ','
        << format_double(r.chi_m1_u + r.chi_m1_b) << ','
        << format_double(r.chi_mhalf_u + r.chi_mhalf_b) << ','
        << format_double(r.chi0_u + r.chi0_b) << ','
        << format_double(r.chi1_u + r.chi1_b) << ','
        << format_double(r.l2_u * r.l2_u + r.l2_b * r.l2_b) << ','
        << format_double(blowup[cursor]) << '\n';
  }
}

void write_checkpoint(const std::filesystem::path& base, const StatePair& s,
                      const SolverConfig& cfg, double time) {
  const Grid& g = s.grid();
  nlohmann::json header{
      {"format", "chi-mhd-checkpoint-v1"},
      {"n_modes", g.n()},
      {"period", g.period()},
      {"time", time},
      {"mu", cfg.mu},
      {"nu", cfg.nu},
      {"fields", {"u.x", "u.y", "b.x", "b.y"}},
      {"layout", "row-major complex interleaved re,im float64 little-endian"}};
  {
    std::ofstream out(base.string() + ".json");
    if (!out)
      throw std::runtime_error("write_checkpoint: cannot open " +
                               base.string() + ".json");
    out << header.dump(2) << '\n';
  }
  std::ofstream bin(base.string() + ".bin", std::ios::binary);
  if (!bin)
    throw std::runtime_error("write_checkpoint: cannot open " + base.string() +
                             ".bin");
  auto dump = [&](const SpectralField& f) {
    for (int k = 0; k < g.size(); ++k) {
      const double re = f[k].real(), im = f[k].imag();
      bin.write(reinterpret_cast<const char*>(&re), sizeof(double));
      bin.write(reinterpret_cast<const char*>(&im), sizeof(double));
    }
  };
  dump(s.u.x);
  dump(s.u.y);
  dump(s.b.x);
  dump(s.b.y);
}

StatePair read_checkpoint(const std::filesystem::path& base) {
  std::ifstream jin(base.string() + ".json");
  if (!jin)
    throw std::runtime_error("read_checkpoint: cannot open " + base.string() +
                             ".json");
  nlohmann::json header = nlohmann::json::parse(jin);
  const Grid g(header.at("n_modes").get<int>(),
               header.at("period").get<double>());
  std::ifstream bin(base.string() + ".bin", std::ios::binary);
  if (!bin)
    throw std::runtime_error("read_checkpoint: cannot open " + base.string() +
                             ".bin");
  StatePair s(g);
  auto load = [&](SpectralField& f) {
    for (int k = 0; k < g.size(); ++k) {
      double re, im;
      bin.read(reinterpret_cast<char*>(&re), sizeof(double));
      bin.read(reinterpret_cast<char*>(&im), sizeof(double));
      f[k] = Complex{re, im};
    }
  };
  load(s.u.x);
  load(s.u.y);
  load(s.b.x);
  load(s.b.y);
  if (!bin) throw std::runtime_error("read_checkpoint: truncated array file");
  return s;
}

nlohmann::json run_manifest(const std::string& command, const RunConfig& rc,
                            const std::vector<std::string>& outputs,
                            const std::vector<std::uint64_t>& seeds) {
  const auto now = std::chrono::system_clock::now();
  const auto secs =
      std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch())
          .count();
  return nlohmann::json{{"command", command},
                        {"config", rc.resolved()},
                        {"outputs", outputs},
                        {"seeds", seeds},
                        {"unix_time", secs}};
}

}  // namespace chi_mhd
