// Wall-clock comparison of the OpenMP kernels against their serial references,
// plus end-to-end timings of one continuous and one lattice run.

#include <chrono>
#include <functional>
#include <string>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "evac/config.hpp"
#include "evac/crowd.hpp"
#include "evac/lattice.hpp"
#include "evac/parallel.hpp"
#include "evac/simulation.hpp"
#include "evac/smoke.hpp"

using namespace evac;

namespace {

double seconds(int reps, const std::function<void()>& body) {
  const auto start = std::chrono::steady_clock::now();
  for (int k = 0; k < reps; ++k) body();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / reps;
}

void report(const std::string& name, double serial_s, double parallel_s) {
  fmt::print("{:<22} serial {:>10.3f} ms   omp {:>10.3f} ms   speedup {:5.2f}\n", name, 1e3 * serial_s,
             1e3 * parallel_s, serial_s / parallel_s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evacsim kernel benchmark"};
  std::string scenario_path = "scenarios/reference.cfg";
  int agents = 1000;
  int reps = 20;
  app.add_option("--scenario", scenario_path, "continuous scenario file");
  app.add_option("--agents", agents, "population for the agent kernels");
  app.add_option("--reps", reps, "repetitions per kernel");
  CLI11_PARSE(app, argc, argv);

  fmt::print("threads: {}\n", configure_threads());
  auto scenario = build_scenario(ConfigDocument::load(scenario_path));
  scenario.population.active = agents * 8 / 10;
  scenario.population.passive = agents - scenario.population.active;
  const auto setup = prepare_continuous(scenario);
  const auto crowd = spawn_agents(setup.scenario, setup.mask, 1);
  const auto positions = crowd.live_positions();
  const double delta = setup.params.delta;

  report("discomfort_field",
         seconds(reps, [&] { serial::discomfort_field(positions, delta, setup.mask); }),
         seconds(reps, [&] { discomfort_field(positions, delta, setup.mask); }));

  auto smoke = initial_smoke(setup.smoke);
  const double dt = max_stable_dt(setup.smoke);
  for (int k = 0; k < 100; ++k) smoke = step_smoke(setup.smoke, smoke, dt);
  report("step_smoke", seconds(reps * 10, [&] { serial::step_smoke(setup.smoke, smoke, dt); }),
         seconds(reps * 10, [&] { step_smoke(setup.smoke, smoke, dt); }));

  const auto p = discomfort_field(positions, delta, setup.mask);
  const CrowdEnvironment env{&setup.mask, &setup.potentials, &p, &smoke.s, &setup.fire_eps, setup.params};
  const CounterRng rng{1};
  report("propose_moves", seconds(reps, [&] { serial::propose_moves(crowd, env, 0.05, rng); }),
         seconds(reps, [&] { propose_moves(crowd, env, 0.05, rng); }));

  ContinuousOptions opt;
  opt.t_end = 20.0;
  const double cont = seconds(1, [&] { run_continuous(setup, opt); });
  fmt::print("{:<22} {:.3f} s for {} agents over {} s of simulated time\n", "continuous run", cont,
             agents, opt.t_end);

  LatticeConfig lattice;
  lattice.Lx = 50;
  lattice.Ly = 50;
  lattice.i_ex = 24;
  std::uint64_t events = 0;
  const double lat = seconds(1, [&] { events = run_lattice(lattice, {}).events; });
  fmt::print("{:<22} {:.3f} s for {} events ({:.2f} M events/s)\n", "lattice 50x50 run", lat, events,
             events / lat / 1e6);
  return 0;
}
