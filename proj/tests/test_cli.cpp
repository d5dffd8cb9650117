#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "chi_mhd/io.hpp"

using namespace chi_mhd;
namespace fs = std::filesystem;

namespace {

std::string bin_path() {
  const char* p = std::getenv("CHI_MHD_BIN");
  REQUIRE(p != nullptr);
  return p;
}

fs::path work_dir() {
  const char* p = std::getenv("CHI_MHD_WORK");
  REQUIRE(p != nullptr);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& cli_args) {
  const std::string cmd = bin_path() + " " + cli_args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// rows of a norms-style CSV: skip comment and header lines
std::vector<std::vector<double>> csv_rows(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' ||
        (!line.empty() && !std::isdigit(line[0]) && line[0] != '-'))
      continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

TEST_CASE("flat config parsing") {
  std::istringstream in(
      "# comment\n"
      "n_modes = 16\n"
      "mu = 0.5   # trailing comment\n"
      "preset = aligned\n"
      "continuation = true\n");
  const auto kv = parse_flat_config(in);
  const RunConfig rc = config_from_map(kv);
  CHECK(rc.solver.n_modes == 16);
  CHECK(rc.solver.mu == 0.5);
  CHECK(rc.preset == "aligned");
  CHECK(rc.continuation);

  std::istringstream bad_key("nope = 3\n");
  CHECK_THROWS_AS(config_from_map(parse_flat_config(bad_key)),
                  std::invalid_argument);
  std::istringstream bad_line("n_modes 16\n");
  CHECK_THROWS_AS(parse_flat_config(bad_line), std::invalid_argument);
  std::istringstream bad_value("dt = fast\n");
  CHECK_THROWS_AS(config_from_map(parse_flat_config(bad_value)),
                  std::invalid_argument);
}

TEST_CASE("checkpoint round trip") {
  RunConfig rc;
  rc.solver.n_modes = 16;
  rc.preset = "taylor-green";
  const StatePair s = build_initial_state(rc);
  const fs::path base = work_dir() / "ckpt";
  write_checkpoint(base, s, rc.solver, 0.25);
  const StatePair back = read_checkpoint(base);
  for (int k = 0; k < s.grid().size(); ++k) {
    CHECK(back.u.x[k] == s.u.x[k]);
    CHECK(back.b.y[k] == s.b.y[k]);
  }
  const auto header = nlohmann::json::parse(slurp(base.string() + ".json"));
  CHECK(header.at("n_modes") == 16);
  CHECK(header.at("time") == 0.25);
}

TEST_CASE("simulate: cellular preset decays on the exact exponential") {
  const fs::path out = work_dir() / "sim_tg";
  fs::remove_all(out);
  const int rc = run_cli(
      "simulate --preset taylor-green --out " + out.string() +
      " --set n_modes=32 --set dt=1e-3 --set t_end=0.25 --set "
      "snapshot_stride=50");
  CHECK(rc == 0);
  const auto rows = csv_rows(out / "norms.csv");
  REQUIRE(rows.size() > 2);
  const double e0 = rows.front()[9];
  for (const auto& row : rows) {
    const double t = row[0], energy = row[9];
    CHECK(energy == doctest::Approx(e0 * std::exp(-4.0 * t)).epsilon(1e-6));
  }
  CHECK(fs::exists(out / "summary.json"));
  CHECK(fs::exists(out / "manifest.json"));
  CHECK(fs::exists(out / "checkpoint_final.bin"));
}

TEST_CASE("simulate: zero preset emits all-zero norm columns") {
  const fs::path out = work_dir() / "sim_zero";
  fs::remove_all(out);
  const int rc = run_cli("simulate --preset zero --out " + out.string() +
                         " --set n_modes=16 --set dt=1e-2 --set t_end=0.1");
  CHECK(rc == 0);
  for (const auto& row : csv_rows(out / "norms.csv"))
    for (size_t c = 1; c < row.size(); ++c) CHECK(row[c] == 0.0);
}

TEST_CASE("simulate: malformed config exits 2 with no partial outputs") {
  const fs::path out = work_dir() / "sim_bad";
  fs::remove_all(out);
  const fs::path cfg = work_dir() / "bad.cfg";
  std::ofstream(cfg) << "dt = -1\n";
  const int rc =
      run_cli("simulate --config " + cfg.string() + " --out " + out.string());
  CHECK(rc == 2);
  CHECK(!fs::exists(out / "norms.csv"));
  CHECK(!fs::exists(out / "summary.json"));
}

TEST_CASE("simulate: deterministic outputs byte for byte") {
  const fs::path out1 = work_dir() / "det1";
  const fs::path out2 = work_dir() / "det2";
  fs::remove_all(out1);
  fs::remove_all(out2);
  const std::string common =
      " --preset random-beta --set seed=3 --set beta=4.0 --set amplitude=0.3"
      " --set n_modes=32 --set dt=1e-3 --set t_end=0.05";
  CHECK(run_cli("simulate --out " + out1.string() + common) == 0);
  CHECK(run_cli("simulate --out " + out2.string() + common) == 0);
  CHECK(slurp(out1 / "norms.csv") == slurp(out2 / "norms.csv"));
  CHECK(slurp(out1 / "summary.json") == slurp(out2 / "summary.json"));
}

TEST_CASE("picard command reports convergence on small data") {
  const fs::path out = work_dir() / "picard_small";
  fs::remove_all(out);
  const int rc = run_cli(
      "picard --preset random-beta --out " + out.string() +
      " --set seed=3 --set beta=2.5 --set amplitude=0.08 --set n_modes=32"
      " --set dt=1e-3 --set t_end=0.25");
  CHECK(rc == 0);
  const auto j = nlohmann::json::parse(slurp(out / "picard.json"));
  CHECK(j.at("converged").get<bool>());
  CHECK(j.at("contraction_ratio").get<double>() < 1.0);
}

TEST_CASE("verify lemmas produces a passing JSON report") {
  const fs::path out = work_dir() / "verify_lemmas";
  fs::remove_all(out);
  const int rc = run_cli("verify lemmas --seeds 0..3 --out " + out.string() +
                         " --set n_modes=32");
  CHECK(rc == 0);
  const auto j = nlohmann::json::parse(slurp(out / "report.json"));
  CHECK(j.at("suite") == "lemmas");
  CHECK(j.at("pass").get<bool>());
  CHECK(j.at("checks").size() >= 5);
  for (const auto& c : j.at("checks")) {
    CHECK(c.contains("name"));
    CHECK(c.contains("lhs"));
    CHECK(c.contains("rhs"));
    CHECK(c.contains("ratio"));
    CHECK(c.at("pass").get<bool>());
  }
}

TEST_CASE("weakstrong with delta 0 emits an identically zero lhs column") {
  const fs::path out = work_dir() / "ws_zero";
  fs::remove_all(out);
  const int rc = run_cli(
      "weakstrong --delta 0 --preset random-beta --out " + out.string() +
      " --set seed=1 --set beta=4.0 --set amplitude=0.3 --set n_modes=32"
      " --set dt=1e-3 --set t_end=0.05");
  CHECK(rc == 0);
  const auto rows = csv_rows(out / "weakstrong.csv");
  REQUIRE(!rows.empty());
  for (const auto& row : rows) CHECK(row[1] == 0.0);
}

TEST_CASE("sweep combines per-run files") {
  const fs::path out = work_dir() / "sweep_mu";
  fs::remove_all(out);
  const int rc = run_cli(
      "sweep --param mu --values 0.5,1.0 --preset taylor-green --out " +
      out.string() +
      " --set n_modes=16 --set dt=1e-3 --set t_end=0.05 --set "
      "snapshot_stride=10");
  CHECK(rc == 0);
  CHECK(fs::exists(out / "norms_mu_0.5.csv"));
  CHECK(fs::exists(out / "norms_mu_1.0.csv"));
  const auto rows = csv_rows(out / "sweep.csv");
  REQUIRE(!rows.empty());
  // first column carries the swept value; both values appear
  bool saw_half = false, saw_one = false;
  for (const auto& row : rows) {
    if (row[0] == 0.5) saw_half = true;
    if (row[0] == 1.0) saw_one = true;
  }
  CHECK(saw_half);
  CHECK(saw_one);
}

TEST_CASE("unknown suite exits with a config error") {
  const fs::path out = work_dir() / "verify_bad";
  CHECK(run_cli("verify bogus --out " + out.string()) == 2);
}
