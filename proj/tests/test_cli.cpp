#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "evac/error.hpp"
#include "evac/simulation.hpp"

#ifndef EVACSIM_BIN
#error "EVACSIM_BIN must point at the evacsim executable"
#endif
#ifndef SCENARIO_DIR
#error "SCENARIO_DIR must point at the bundled scenarios"
#endif

namespace fs = std::filesystem;
using namespace evac;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("evacsim_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int evacsim(const std::string& args) {
  const std::string cmd = std::string(EVACSIM_BIN) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string scenario(const std::string& name) { return std::string(SCENARIO_DIR) + "/" + name; }

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("exit codes per error class") {
  const auto dir = scratch("codes");
  write(dir / "bad.cfg", "[domain]\nwidth = 10\nheight = 10\nh = 1\n[obstacles]\nrect = 8 8 12 9\n"
                         "[exits]\nsegment = 10 0 10 2\n");
  CHECK(evacsim("run --scenario " + (dir / "bad.cfg").string() + " --out " + (dir / "o").string()) == 2);
  CHECK(evacsim("run --scenario " + (dir / "missing.cfg").string()) == 2);
  CHECK(evacsim("run --scenario " + scenario("minimal.cfg") + " --dt 5 --t-end 10 --out " +
                (dir / "o").string()) == 4);
  // Spawn area entirely inside an obstacle: valid input, no room to place anyone.
  write(dir / "buried.cfg", "[domain]\nwidth = 6\nheight = 6\nh = 1\n[obstacles]\nrect = 2 0 4 6\n"
                            "[exits]\nsegment = 6 2 6 4\n[population]\nactive = 1\nspawn = 2 1 4 5\n");
  CHECK(evacsim("run --scenario " + (dir / "buried.cfg").string() + " --t-end 1 --out " +
                (dir / "o").string()) == 3);
  CHECK(evacsim("run --scenario " + scenario("minimal.cfg") + " --t-end 1 --out " +
                (dir / "ok").string()) == 0);
  CHECK(evacsim("bogus") == 2);
}

TEST_CASE("zero-agent continuous run still writes smoke") {
  const auto dir = scratch("empty");
  REQUIRE(evacsim("run --mode continuous --scenario " + scenario("minimal.cfg") +
                  " --t-end 2 --dt 0.1 --snapshot-every 5 --out " + dir.string()) == 0);
  const auto exits = slurp(dir / "exit_times.csv");
  CHECK(exits.find("id,species,exit_time\n") != std::string::npos);
  CHECK(exits.substr(exits.find("exit_time\n") + 10).empty());
  CHECK(fs::exists(dir / "smoke_000005.txt"));
  CHECK(fs::exists(dir / "smoke_000020.txt"));
  CHECK(fs::exists(dir / "summary.txt"));
}

TEST_CASE("lattice runs are byte-identical per seed") {
  const auto a = scratch("lat_a");
  const auto b = scratch("lat_b");
  const auto c = scratch("lat_c");
  const std::string base = "run --mode lattice --scenario " + scenario("lattice_small.cfg");
  REQUIRE(evacsim(base + " --seed 7 --out " + a.string()) == 0);
  REQUIRE(evacsim(base + " --seed 7 --out " + b.string()) == 0);
  REQUIRE(evacsim(base + " --seed 8 --out " + c.string()) == 0);
  CHECK(slurp(a / "lattice_series.csv") == slurp(b / "lattice_series.csv"));
  CHECK(slurp(a / "lattice_final.txt") == slurp(b / "lattice_final.txt"));
  CHECK(slurp(a / "lattice_series.csv") != slurp(c / "lattice_series.csv"));
  CHECK(slurp(a / "lattice_series.csv").rfind("# config_hash=", 0) == 0);
}

TEST_CASE("bundled cases complete and summarize") {
  for (const char* name : {"case1.cfg", "case2.cfg"}) {
    const auto dir = scratch(name);
    CAPTURE(name);
    REQUIRE(evacsim(std::string("run --scenario ") + scenario(name) + " --t-end 20 --out " +
                    dir.string()) == 0);
    const auto summary = slurp(dir / "summary.txt");
    CHECK(summary.find("active.count") != std::string::npos);
    CHECK(summary.find("peak_discomfort") != std::string::npos);
  }
}

TEST_CASE("replicate aggregation") {
  RunSpec spec;
  spec.mode = RunMode::Lattice;
  spec.scenario_path = scenario("lattice_small.cfg");
  const auto one = replicate(spec, 1, 5);
  REQUIRE(one.rows.size() == 1);
  for (std::size_t k = 0; k < one.aggregate.size(); ++k) {
    const double v = one.rows[0].values[k].second;
    if (std::isfinite(v)) CHECK(one.aggregate[k].mean == v);
    CHECK(one.aggregate[k].stddev == 0.0);
  }
  const auto same = replicate(spec, 2, 5, true);
  for (const auto& a : same.aggregate) CHECK(a.stddev == 0.0);
  const auto spread = replicate(spec, 3, 5);
  CHECK(spread.rows[1].seed == 6);
  CHECK(spread.rows[2].seed == 7);
  CHECK_THROWS_AS(replicate(spec, 0, 1), ConfigError);
}

TEST_CASE("config hash differs between scenarios") {
  const auto a = scratch("hash_a");
  const auto b = scratch("hash_b");
  REQUIRE(evacsim("run --scenario " + scenario("minimal.cfg") + " --t-end 0.5 --out " + a.string()) == 0);
  REQUIRE(evacsim("run --scenario " + scenario("corridor.cfg") + " --t-end 0.5 --out " + b.string()) == 0);
  auto first_line = [](const std::string& s) { return s.substr(0, s.find('\n')); };
  CHECK(first_line(slurp(a / "summary.txt")) != first_line(slurp(b / "summary.txt")));
  CHECK(first_line(slurp(a / "exit_times.csv")).rfind("# config_hash=", 0) == 0);
}

TEST_CASE("exit_code_for maps the hierarchy") {
  CHECK(exit_code_for(MissingKey("x")) == 2);
  CHECK(exit_code_for(GeometryViolation("x")) == 2);
  CHECK(exit_code_for(UnstableTimestep("x")) == 4);
  CHECK(exit_code_for(NegativeDensity("x")) == 3);
  CHECK(exit_code_for(std::runtime_error("x")) == 3);
}
