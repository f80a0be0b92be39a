#include <CLI11.hpp>
#include <fmt/core.h>

#include <cstdio>
#include <exception>
#include <string>

#include "evac/parallel.hpp"
#include "evac/simulation.hpp"

namespace {

void add_common(CLI::App* cmd, evac::RunSpec& spec, std::string& mode) {
  cmd->add_option("--mode", mode, "continuous or lattice")
      ->check(CLI::IsMember({"continuous", "lattice"}))
      ->default_val("continuous");
  cmd->add_option("--scenario", spec.scenario_path, "scenario file")->required();
  cmd->add_option("--t-end", spec.t_end, "simulated time horizon");
  cmd->add_option("--dt", spec.dt, "continuous time step")->default_val(0.05);
  cmd->add_option("--max-events", spec.max_events, "lattice event cap");
  cmd->add_option("--out", spec.out_dir, "output directory")->default_val("out");
  cmd->add_option("--snapshot-every", spec.snapshot_every, "steps between smoke snapshots");
  cmd->add_flag("--log-trajectories", spec.log_trajectories, "write trajectories.csv");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crowd evacuation simulator"};
  app.require_subcommand(1);

  evac::RunSpec spec;
  std::string mode;
  int replicas = 1;
  std::uint64_t base_seed = 1;
  bool same_seed = false;

  auto* run_cmd = app.add_subcommand("run", "single run");
  add_common(run_cmd, spec, mode);
  run_cmd->add_option("--seed", spec.seed, "random seed")->default_val(1);

  auto* rep_cmd = app.add_subcommand("replicate", "independent runs over consecutive seeds");
  add_common(rep_cmd, spec, mode);
  rep_cmd->add_option("--n", replicas, "number of runs")->required()->check(CLI::PositiveNumber);
  rep_cmd->add_option("--base-seed", base_seed, "first seed")->default_val(1);
  rep_cmd->add_flag("--same-seed", same_seed, "reuse base seed for every run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  spec.mode = mode == "lattice" ? evac::RunMode::Lattice : evac::RunMode::Continuous;
  evac::configure_threads();
  try {
    if (*run_cmd) {
      evac::run(spec);
      fmt::print("wrote {}\n", spec.out_dir);
    } else {
      const auto res = evac::replicate(spec, replicas, base_seed, same_seed);
      for (const auto& a : res.aggregate) {
        fmt::print("{:<28} mean {:>12.5f}  sd {:>10.5f}  n {}\n", a.name, a.mean, a.stddev,
                   a.samples);
      }
    }
  } catch (const std::exception& e) {
    fmt::print(stderr, "evacsim: {}\n", e.what());
    return evac::exit_code_for(e);
  }
  return 0;
}
