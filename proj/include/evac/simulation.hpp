#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "evac/config.hpp"
#include "evac/crowd.hpp"
#include "evac/geometry.hpp"
#include "evac/lattice.hpp"
#include "evac/metrics.hpp"
#include "evac/potential.hpp"
#include "evac/smoke.hpp"

namespace evac {

enum class RunMode : std::uint8_t { Continuous, Lattice };

struct RunSpec {
  RunMode mode = RunMode::Continuous;
  std::string scenario_path;
  std::uint64_t seed = 1;
  std::optional<double> t_end;
  std::optional<std::uint64_t> max_events;
  double dt = 0.05;
  int snapshot_every = 0;  // steps between smoke snapshots; 0 = final only
  std::string out_dir;     // empty: nothing written
  bool log_trajectories = false;
};

/// Everything static in a continuous run, derived once from the scenario.
struct ContinuousSetup {
  Scenario scenario;
  GridMask mask;
  ScalarField fire;      // H
  ScalarField fire_eps;  // H_eps
  Potentials potentials;
  SmokeModel smoke;
  CrowdParams params;
};

ContinuousSetup prepare_continuous(const Scenario& s);

struct ContinuousOptions {
  std::uint64_t seed = 1;
  double t_end = 60.0;
  double dt = 0.05;
  int snapshot_every = 0;
  bool log_trajectories = false;
  bool stop_when_evacuated = false;  // end early once every agent has left
  std::string out_dir;
  std::string config_hash;
};

struct ContinuousResult {
  RunRecord record;
  Summary summary;
  CrowdState crowd;
  SmokeState smoke;
  std::uint64_t steps = 0;
};

/// Coupled loop, per step: smoke, fire awareness, discomfort, agents,
/// metrics. The smoke never sees the agents.
ContinuousResult run_continuous(const ContinuousSetup& setup, const ContinuousOptions& opt);

struct LatticeResult {
  LatticeConfig config;
  LatticeRun run;
};

LatticeResult run_lattice_mode(const LatticeConfig& cfg, const LatticeStop& stop,
                               const std::string& out_dir, const std::string& config_hash);

/// Named per-seed statistics, in a fixed column order.
struct SeedRow {
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, double>> values;
};

struct Aggregate {
  std::string name;
  double mean = 0.0;
  double stddev = 0.0;
  int samples = 0;  // finite values only
};

struct ReplicateResult {
  std::vector<SeedRow> rows;  // ordered by seed index
  std::vector<Aggregate> aggregate;
};

SeedRow lattice_row(std::uint64_t seed, const LatticeRun& run);
SeedRow continuous_row(std::uint64_t seed, const Summary& s);

/// Runs seeds base_seed .. base_seed + n - 1 (all equal to base_seed when
/// same_seed is set) in parallel; aggregation is ordered by seed.
ReplicateResult replicate(const RunSpec& spec, int n, std::uint64_t base_seed,
                          bool same_seed = false);

std::vector<Aggregate> aggregate_rows(const std::vector<SeedRow>& rows);

/// Executes one run as described by the RunSpec, writing its artifacts.
void run(const RunSpec& spec);

/// Process exit code for an exception escaping run()/replicate().
int exit_code_for(const std::exception& e);

}  // namespace evac
