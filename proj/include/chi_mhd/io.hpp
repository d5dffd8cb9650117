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

// Flat key=value configs with presets, deterministic CSV/JSON emission, and
// the JSON-header + raw-array checkpoint format.

#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "json.hpp"

#include "chi_mhd/solver.hpp"
#include "chi_mhd/verification.hpp"

namespace chi_mhd {

struct RunConfig {
  SolverConfig solver;
  std::string preset = "taylor-green";  // taylor-green|aligned|random-beta|zero
  double amplitude = 1.0;
  double b_amplitude = 0.0;
  int b_harmonic = 2;
  double beta = 4.0;
  std::uint64_t seed = 0;
  double delta = 1e-3;  // twin-run perturbation scale
  bool continuation = false;

  std::map<std::string, std::string> resolved() const;
};

// "key = value" lines, '#' comments. Unknown keys are rejected.
std::map<std::string, std::string> parse_flat_config(std::istream& in);
std::map<std::string, std::string> parse_flat_config_file(
    const std::filesystem::path& path);
RunConfig config_from_map(const std::map<std::string, std::string>& kv);

StatePair build_initial_state(const RunConfig& rc);

nlohmann::json check_to_json(const CheckResult& c);
nlohmann::json report_to_json(const SuiteReport& r);

// One row per stored snapshot: t, l2_u, l2_b, h1_u, h1_b, chi_m1, chi_mhalf,
// chi0, chi1, energy, blowup_integral. chi columns use the sum (p=1) pair
// convention; energy is the squared-sum (p=2) L2 pair.
void write_norms_csv(const std::filesystem::path& path, const Trajectory& tr);

// base.json (grid, config, time, layout) + base.bin (u.x, u.y, b.x, b.y as
// interleaved re/im float64, row-major, little-endian).
void write_checkpoint(const std::filesystem::path& base, const StatePair& s,
                      const SolverConfig& cfg, double time);
StatePair read_checkpoint(const std::filesystem::path& base);

nlohmann::json run_manifest(const std::string& command, const RunConfig& rc,
                            const std::vector<std::string>& outputs,
                            const std::vector<std::uint64_t>& seeds);

std::string format_double(double v);  // fixed 17-significant-digit form

}  // namespace chi_mhd
