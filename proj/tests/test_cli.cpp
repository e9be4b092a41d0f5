#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "calabi/csv.hpp"
#include "doctest.h"

namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

std::string cli_path() {
  const char* p = std::getenv("CALABI_CLI_PATH");
  if (p && *p) return p;
#ifdef CALABI_CLI_PATH
  return CALABI_CLI_PATH;
#else
  return "";
#endif
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::absolute(fs::path("cli_scratch") / name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
  static int seq = 0;
  const fs::path so = dir / ("stdout_" + std::to_string(seq) + ".txt");
  const fs::path se = dir / ("stderr_" + std::to_string(seq) + ".txt");
  ++seq;
  const std::string cmd = "CALABI_OUT_DIR=" + dir.string() + " " + cli_path() + " " + args +
                          " > " + so.string() + " 2> " + se.string();
  const int rc = std::system(cmd.c_str());
  RunResult r;
  if (WIFEXITED(rc)) r.exit_code = WEXITSTATUS(rc);
  r.out = slurp(so);
  r.err = slurp(se);
  return r;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

std::string fmt(double v) { return calabi::format_double(v); }

// Numeric value of a "key = value" report line; NaN when the key is absent.
double value_of(const std::string& out, const std::string& key) {
  for (const std::string& line : lines_of(out)) {
    const std::string prefix = key + " = ";
    if (line.rfind(prefix, 0) == 0) return std::strtod(line.c_str() + prefix.size(), nullptr);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

TEST_CASE("cli: reference construction parameters") {
  REQUIRE(!cli_path().empty());
  const fs::path dir = scratch_dir("params_ref");
  const RunResult r = run_cli("params --n 2 --theta " + fmt(pi / 6), dir);
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "n = 2\n"));
  CHECK(contains(r.out, "branch_m = 0\n"));
  CHECK(contains(r.out, "admissible = yes\n"));
  CHECK(value_of(r.out, "c") == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(value_of(r.out, "q") == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-14));
  CHECK(value_of(r.out, "a") == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(value_of(r.out, "ap") == doctest::Approx(-4 * std::sqrt(3.0)).epsilon(1e-14));
  CHECK(value_of(r.out, "ratio_ap_over_q") == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(value_of(r.out, "kq") == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(value_of(r.out, "kap") == doctest::Approx(-4.0).epsilon(1e-14));
}

TEST_CASE("cli: degree input matches radians") {
  const fs::path dir = scratch_dir("params_deg");
  const double rad = 30.0 * pi / 180.0;
  const RunResult deg = run_cli("params --n 2 --degrees --theta 30", dir);
  const RunResult base = run_cli("params --n 2 --theta " + fmt(rad), dir);
  CHECK(deg.exit_code == 0);
  CHECK(base.exit_code == 0);
  CHECK(deg.out == base.out);
}

TEST_CASE("cli: solver and usage failures set distinct exit codes") {
  const fs::path dir = scratch_dir("exit_codes");
  CHECK(run_cli("params --n 2 --theta " + fmt(pi / 2), dir).exit_code == 2);
  CHECK(run_cli("params --theta 0.5", dir).exit_code == 64);       // missing --n
  CHECK(run_cli("params --n 2", dir).exit_code == 64);             // neither theta nor p
  CHECK(run_cli("params --n 2 --theta 0.5 --p -1", dir).exit_code == 64);  // exclusive
  CHECK(run_cli("params --n 2 --theta 0.5 --bogus 1", dir).exit_code == 64);
  CHECK(run_cli("levelset --n 2 --theta 0.5", dir).exit_code == 64);  // missing --c
  CHECK(run_cli("nonsense", dir).exit_code == 64);
  CHECK(run_cli("flow --params-file " + (dir / "absent.conf").string(), dir).exit_code == 74);
}

TEST_CASE("cli: level-set outputs are byte-identical across runs") {
  const fs::path d1 = scratch_dir("level_a");
  const fs::path d2 = scratch_dir("level_b");
  const std::string args = "levelset --n 3 --theta 1 --c 3 --xmin -4 --xmax 4 --ymin -4 --ymax 4";
  const RunResult r1 = run_cli(args, d1);
  const RunResult r2 = run_cli(args, d2);
  CHECK(r1.exit_code == 0);
  CHECK(r2.exit_code == 0);
  CHECK(contains(r1.out, "components = 3\n"));
  CHECK(contains(r1.out, "csv = " + (d1 / "levelset.csv").string()));
  const std::string csv1 = slurp(d1 / "levelset.csv");
  CHECK(!csv1.empty());
  CHECK(csv1 == slurp(d2 / "levelset.csv"));
  const std::string svg1 = slurp(d1 / "levelset.svg");
  CHECK(!svg1.empty());
  CHECK(svg1 == slurp(d2 / "levelset.svg"));
  CHECK(contains(svg1, "calabi svg v1"));
  CHECK(lines_of(csv1).front() == "component,x,y");
}

TEST_CASE("cli: wall verdicts bracket the blow-down locus") {
  const fs::path dir = scratch_dir("wall_verdicts");
  const RunResult r = run_cli(
      "wall --n 2 --theta " + fmt(pi / 6) + " --b-min 0.99 --b-max 1.01 --steps 3", dir);
  CHECK(r.exit_code == 0);
  const auto rows = lines_of(slurp(dir / "wall.csv"));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "b,ReZ1,ImZ1,ReZ2,ImZ2,lambda1,lambda2,verdict");
  CHECK(split_csv(rows[1]).back() == "Stable");
  CHECK(split_csv(rows[2]).back() == "Wall");
  CHECK(split_csv(rows[3]).back() == "Unstable");

  // Corrected-charge columns exist only for n = 3.
  CHECK(run_cli("wall --n 2 --theta 0.5 --bridgeland", dir).exit_code == 64);
  const RunResult r3 = run_cli("wall --n 3 --theta 0.5 --bridgeland --out w3.csv", dir);
  CHECK(r3.exit_code == 0);
  const auto rows3 = lines_of(slurp(dir / "w3.csv"));
  CHECK(rows3.front() == "b,ReZ1,ImZ1,ReZ2,ImZ2,lambda1,lambda2,verdict,ReZG1,ImZG1,ReZG2,ImZG2");
}

TEST_CASE("cli: flow with t_max = 0 writes the initial snapshot only") {
  const fs::path dir = scratch_dir("flow_t0");
  const fs::path conf = dir / "params.conf";
  {
    std::ofstream out(conf);
    out << "n = 2\n" << "theta = " << fmt(pi / 6) << "\n";
  }
  const RunResult r = run_cli("flow --params-file " + conf.string() +
                                  " --b 1.05 --t-max 0 --points 120 --prefix run",
                              dir);
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "status = t_max\n"));
  CHECK(contains(r.out, "snapshots = 1\n"));
  const auto log = lines_of(slurp(dir / "run_log.csv"));
  REQUIRE(log.size() == 2);
  CHECK(log.front() == "t,x_c,y_c,max_speed,barrier_ok");
  CHECK(split_csv(log[1]).front() == "0");
  CHECK(fs::exists(dir / "run_final.csv"));
  CHECK(fs::exists(dir / "run_barrier_upper.csv"));
  CHECK(fs::exists(dir / "run_barrier_lower.csv"));
  CHECK(fs::exists(dir / "run_snap_0000.csv"));
  CHECK(!fs::exists(dir / "run_snap_0001.csv"));
  // The snapshot is the initial curve and matches the final curve at t = 0.
  CHECK(slurp(dir / "run_snap_0000.csv") == slurp(dir / "run_final.csv"));
}

TEST_CASE("cli: config file supplies defaults, flags win") {
  const fs::path dir = scratch_dir("config");
  const fs::path conf = dir / "wall.conf";
  {
    std::ofstream out(conf);
    out << "# reference scan\n"
        << "n = 2\n"
        << "theta = " << fmt(pi / 6) << "  # phase\n"
        << "b-min = 0.99\n"
        << "b-max = 1.01\n"
        << "steps = 3\n"
        << "out = w1.csv\n";
  }
  const RunResult r1 = run_cli("wall --config " + conf.string(), dir);
  CHECK(r1.exit_code == 0);
  const RunResult r2 = run_cli("wall --n 2 --theta " + fmt(pi / 6) +
                                   " --b-min 0.99 --b-max 1.01 --steps 3 --out w2.csv",
                               dir);
  CHECK(r2.exit_code == 0);
  CHECK(slurp(dir / "w1.csv") == slurp(dir / "w2.csv"));

  // Command line overrides a config entry.
  const RunResult r3 = run_cli("wall --config " + conf.string() + " --steps 5 --out w3.csv", dir);
  CHECK(r3.exit_code == 0);
  CHECK(contains(r3.out, "rows = 5\n"));
  CHECK(lines_of(slurp(dir / "w3.csv")).size() == 6);

  // Unknown config keys are rejected.
  const fs::path bad = dir / "bad.conf";
  {
    std::ofstream out(bad);
    out << "n = 2\ntheta = 0.5\nbogus = 1\n";
  }
  CHECK(run_cli("wall --config " + bad.string(), dir).exit_code == 64);
}

TEST_CASE("cli: split-bundle boundary report") {
  const fs::path dir = scratch_dir("bundle_ref");
  const RunResult r = run_cli(
      "bundle --r 2 --m 2 --xi-re 2 --xi-im -1 --b 0.3 --max-den 100", dir);
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "theta_hat = 0.643501"));
  CHECK(contains(r.out, "(mod pi)"));
  CHECK(contains(r.out, "q = "));
  CHECK(contains(r.out, "q_prime = "));
  CHECK(contains(r.out, "commensurable = "));
  CHECK(contains(r.out, "monotonicity_at_q = "));
  CHECK(contains(r.out, "monotonicity_at_q_prime = "));
  const auto rows = lines_of(slurp(dir / "bundle.csv"));
  REQUIRE(rows.size() > 10);
  CHECK(rows.front() == "arm,x,y");
  CHECK(rows[1] == "0,0,0");  // arms start at the origin
  CHECK(contains(slurp(dir / "bundle.svg"), "calabi svg v1"));
}
