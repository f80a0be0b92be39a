#include "evac/simulation.hpp"

#include <fmt/format.h>

#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>

#include "evac/error.hpp"

namespace evac {
namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::ofstream out(fs::path(dir) / name, std::ios::binary);
  if (!out) throw Error("cannot write " + (fs::path(dir) / name).string());
  return out;
}

std::vector<std::string> provenance(const std::string& hash, std::uint64_t seed) {
  return {fmt::format("config_hash={} seed={}", hash, seed)};
}

const char* species_name(Species s) { return s == Species::Active ? "active" : "passive"; }

}  // namespace

ContinuousSetup prepare_continuous(const Scenario& s) {
  validate(s);
  ContinuousSetup setup;
  setup.scenario = s;
  setup.mask = rasterize(s);
  setup.fire = fire_field(s, setup.mask);
  setup.fire_eps = mollify(setup.fire, s.fire.mollify);
  setup.potentials = build_potentials(s, setup.mask, setup.fire);
  setup.smoke = SmokeModel::from_scenario(s, setup.mask, setup.fire_eps);
  setup.params = CrowdParams::from_scenario(s, setup.mask);
  return setup;
}

ContinuousResult run_continuous(const ContinuousSetup& setup, const ContinuousOptions& opt) {
  if (!(opt.dt > 0.0)) throw ConfigError("dt must be positive");
  if (opt.dt > max_stable_dt(setup.smoke) * (1.0 + 1e-12)) {
    throw UnstableTimestep(fmt::format("dt {} exceeds the smoke stability bound {}", opt.dt,
                                       max_stable_dt(setup.smoke)));
  }
  const bool write = !opt.out_dir.empty();
  const auto comments = provenance(opt.config_hash, opt.seed);
  if (write) fs::create_directories(opt.out_dir);

  ContinuousResult res;
  res.crowd = spawn_agents(setup.scenario, setup.mask, opt.seed);
  res.smoke = initial_smoke(setup.smoke);
  const CounterRng rng{opt.seed};
  DiscomfortAccumulator accumulated(setup.fire);

  std::unique_ptr<std::ofstream> traj;
  if (write && opt.log_trajectories) {
    traj = std::make_unique<std::ofstream>(open_out(opt.out_dir, "trajectories.csv"));
    *traj << "# " << comments.front() << "\nt,id,species,x,y,w\n";
  }
  auto log_positions = [&]() {
    if (!traj) return;
    for (const auto& ag : res.crowd.agents) {
      if (ag.exited) continue;
      *traj << fmt::format("{:.17g},{},{},{:.17g},{:.17g},{}\n", res.crowd.t, ag.id,
                           species_name(ag.species), ag.position.x, ag.position.y,
                           ag.aware ? 1 : 0);
    }
  };
  auto snapshot = [&](std::uint64_t step) {
    if (!write) return;
    save_matrix((fs::path(opt.out_dir) / fmt::format("smoke_{:06d}.txt", step)).string(),
                res.smoke.s, comments);
  };

  const auto steps = static_cast<std::uint64_t>(std::llround(opt.t_end / opt.dt));
  CrowdEnvironment env{&setup.mask, &setup.potentials, nullptr, nullptr, &setup.fire_eps,
                       setup.params};
  log_positions();
  std::uint64_t step = 0;
  for (; step < steps; ++step) {
    if (opt.stop_when_evacuated && res.crowd.live_count() == 0) break;
    res.smoke = step_smoke(setup.smoke, res.smoke, opt.dt);
    fire_awareness_update(res.crowd.agents, setup.scenario);
    const auto positions = res.crowd.live_positions();
    const ScalarField p = discomfort_field(positions, setup.params.delta, setup.mask);
    env.discomfort = &p;
    env.smoke = &res.smoke.s;
    step_agents(res.crowd, env, opt.dt, rng);
    accumulated.add(p, opt.dt);
    log_positions();
    if (opt.snapshot_every > 0 && (step + 1) % static_cast<std::uint64_t>(opt.snapshot_every) == 0) {
      snapshot(step + 1);
    }
  }
  res.steps = step;
  const double t_final = res.crowd.t;
  if (write && (opt.snapshot_every <= 0 || step % static_cast<std::uint64_t>(opt.snapshot_every) != 0 || step == 0)) {
    snapshot(step);
  }

  res.record = make_run_record(res.crowd, opt.stop_when_evacuated ? t_final : opt.t_end,
                               accumulated.value(), opt.seed, opt.config_hash);
  res.summary = summarize(res.record);

  if (write) {
    auto exits = open_out(opt.out_dir, "exit_times.csv");
    write_exit_times(exits, res.record);
    auto summary = open_out(opt.out_dir, "summary.txt");
    write_summary(summary, res.summary, res.record);
    summary << "displacement_warnings = " << res.crowd.displacement_warnings << '\n';
    save_matrix((fs::path(opt.out_dir) / "discomfort_cumulative.txt").string(),
                accumulated.value(), comments);
    save_matrix((fs::path(opt.out_dir) / "discomfort_cumulative_log10.txt").string(),
                log_view(accumulated.value()), comments);
    save_matrix((fs::path(opt.out_dir) / "potential_unaware.txt").string(),
                setup.potentials.unaware, comments);
    save_matrix((fs::path(opt.out_dir) / "potential_aware.txt").string(),
                setup.potentials.aware, comments);
  }
  return res;
}

LatticeResult run_lattice_mode(const LatticeConfig& cfg, const LatticeStop& stop,
                               const std::string& out_dir, const std::string& config_hash) {
  LatticeResult res{cfg, run_lattice(cfg, stop)};
  if (out_dir.empty()) return res;
  fs::create_directories(out_dir);
  const auto comments = provenance(config_hash, cfg.seed);
  const auto& st = res.run.final_state;
  {
    auto out = open_out(out_dir, "lattice_series.csv");
    write_lattice_series(out, res.run.series, st.n_A0, st.n_U0, comments);
  }
  {
    auto out = open_out(out_dir, "lattice_final.txt");
    out << "# " << comments.front() << '\n';
    write_occupancy(out, cfg, st);
  }
  {
    auto out = open_out(out_dir, "summary.txt");
    out << "# " << comments.front() << '\n';
    const auto row = lattice_row(cfg.seed, res.run);
    for (const auto& [name, value] : row.values) out << fmt::format("{} = {:.6f}\n", name, value);
    out << fmt::format("final_time = {:.6f}\nN_A = {}\nN_U = {}\n", st.t, st.n_A, st.n_U);
  }
  return res;
}

SeedRow lattice_row(std::uint64_t seed, const LatticeRun& run) {
  const auto& st = run.final_state;
  const auto& series = run.series;
  auto val = [](const std::optional<double>& v) { return v.value_or(kInf); };
  SeedRow row{seed, {}};
  const double t99_a = val(evacuation_time(series, st.n_A0, Tally::A, 0.99));
  const double t99_u = val(evacuation_time(series, st.n_U0, Tally::U, 0.99));
  row.values.emplace_back("t99_A", t99_a);
  row.values.emplace_back("t99_U", t99_u);
  row.values.emplace_back("t95_all",
                          val(evacuation_time(series, st.n_A0 + st.n_U0, Tally::Both, 0.95)));
  double j_a = 0.0;
  double j_u = 0.0;
  if (!series.empty()) {
    const auto& mid = series[series.size() / 2];
    j_a = particle_current(st.n_A0, mid.n_A, mid.t);
    j_u = particle_current(st.n_U0, mid.n_U, mid.t);
  }
  row.values.emplace_back("J_A_median_sample", j_a);
  row.values.emplace_back("J_U_median_sample", j_u);
  row.values.emplace_back("A_evacuates_first", t99_a < t99_u ? 1.0 : 0.0);
  row.values.emplace_back("J_A_ge_J_U", j_a >= j_u ? 1.0 : 0.0);
  row.values.emplace_back("events", static_cast<double>(run.events));
  return row;
}

SeedRow continuous_row(std::uint64_t seed, const Summary& s) {
  auto val = [](const std::optional<double>& v) { return v.value_or(kInf); };
  SeedRow row{seed, {}};
  row.values.emplace_back("mean_residence_active", val(s.active.mean));
  row.values.emplace_back("median_residence_active", val(s.active.median));
  row.values.emplace_back("mean_residence_passive", val(s.passive.mean));
  row.values.emplace_back("median_residence_passive", val(s.passive.median));
  row.values.emplace_back("t95", val(s.t95));
  row.values.emplace_back("peak_discomfort", s.peak_discomfort);
  row.values.emplace_back("stragglers", s.stragglers);
  return row;
}

std::vector<Aggregate> aggregate_rows(const std::vector<SeedRow>& rows) {
  std::vector<Aggregate> out;
  if (rows.empty()) return out;
  for (std::size_t c = 0; c < rows.front().values.size(); ++c) {
    Aggregate a;
    a.name = rows.front().values[c].first;
    double sum = 0.0;
    for (const auto& r : rows) {
      const double v = r.values[c].second;
      if (!std::isfinite(v)) continue;
      sum += v;
      ++a.samples;
    }
    if (a.samples > 0) a.mean = sum / a.samples;
    double ss = 0.0;
    for (const auto& r : rows) {
      const double v = r.values[c].second;
      if (std::isfinite(v)) ss += (v - a.mean) * (v - a.mean);
    }
    a.stddev = a.samples > 1 ? std::sqrt(ss / (a.samples - 1)) : 0.0;
    out.push_back(a);
  }
  return out;
}

namespace {

struct LoadedSpec {
  ConfigDocument doc;
  std::string hash;
};

LoadedSpec load(const RunSpec& spec) {
  LoadedSpec l{ConfigDocument::load(spec.scenario_path), {}};
  l.hash = l.doc.hash_hex();
  return l;
}

LatticeStop lattice_stop(const RunSpec& spec) {
  LatticeStop stop;
  stop.t_end = spec.t_end;
  stop.max_events = spec.max_events;
  stop.until_empty = true;
  return stop;
}

SeedRow run_one(const RunSpec& spec, const LoadedSpec& loaded, std::uint64_t seed,
                const std::string& out_dir) {
  if (spec.mode == RunMode::Lattice) {
    auto cfg = build_lattice_config(loaded.doc);
    cfg.seed = seed;
    auto res = run_lattice_mode(cfg, lattice_stop(spec), out_dir, loaded.hash);
    return lattice_row(seed, res.run);
  }
  const auto setup = prepare_continuous(build_scenario(loaded.doc));
  ContinuousOptions opt;
  opt.seed = seed;
  opt.t_end = spec.t_end.value_or(60.0);
  opt.dt = spec.dt;
  opt.snapshot_every = spec.snapshot_every;
  opt.log_trajectories = spec.log_trajectories;
  opt.out_dir = out_dir;
  opt.config_hash = loaded.hash;
  const auto res = run_continuous(setup, opt);
  return continuous_row(seed, res.summary);
}

}  // namespace

void run(const RunSpec& spec) {
  const auto loaded = load(spec);
  run_one(spec, loaded, spec.seed, spec.out_dir);
}

ReplicateResult replicate(const RunSpec& spec, int n, std::uint64_t base_seed, bool same_seed) {
  if (n < 1) throw ConfigError("replicate: n must be at least 1");
  const auto loaded = load(spec);
  ReplicateResult res;
  res.rows.resize(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));

#pragma omp parallel for schedule(dynamic, 1)
  for (int k = 0; k < n; ++k) {
    const std::uint64_t seed = same_seed ? base_seed : base_seed + static_cast<std::uint64_t>(k);
    try {
      const std::string dir =
          spec.out_dir.empty() ? std::string()
                               : (fs::path(spec.out_dir) / fmt::format("run_{:04d}", k)).string();
      res.rows[static_cast<std::size_t>(k)] = run_one(spec, loaded, seed, dir);
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  res.aggregate = aggregate_rows(res.rows);

  if (!spec.out_dir.empty()) {
    fs::create_directories(spec.out_dir);
    auto out = open_out(spec.out_dir, "replicate.csv");
    out << "# config_hash=" << loaded.hash << " base_seed=" << base_seed << '\n';
    out << "seed";
    for (const auto& [name, _] : res.rows.front().values) out << ',' << name;
    out << '\n';
    for (const auto& r : res.rows) {
      out << r.seed;
      for (const auto& [_, v] : r.values) out << fmt::format(",{:.17g}", v);
      out << '\n';
    }
    auto summary = open_out(spec.out_dir, "replicate_summary.txt");
    summary << "# config_hash=" << loaded.hash << " base_seed=" << base_seed << " n=" << n
            << '\n';
    for (const auto& a : res.aggregate) {
      summary << fmt::format("{}.mean = {:.6f}\n{}.stddev = {:.6f}\n{}.samples = {}\n", a.name,
                             a.mean, a.name, a.stddev, a.name, a.samples);
    }
  }
  return res;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const UnstableTimestep*>(&e)) return 4;
  return 3;
}

}  // namespace evac
