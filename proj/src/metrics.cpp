#include "evac/metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "evac/error.hpp"

namespace evac {

double particle_current(int n0, int nt, double t) {
  if (!(t > 0.0)) throw ZeroTime();
  return static_cast<double>(n0 - nt) / t;
}

int StepCurve::operator()(double t) const {
  return static_cast<int>(std::upper_bound(times_.begin(), times_.end(), t) - times_.begin());
}

StepCurve exit_time_curve(std::span<const ExitEvent> events) {
  std::vector<double> times;
  times.reserve(events.size());
  for (const auto& e : events) {
    if (!times.empty() && e.t < times.back()) {
      throw std::invalid_argument("exit_time_curve: events not sorted by time");
    }
    times.push_back(e.t);
  }
  return StepCurve(std::move(times));
}

StepCurve exit_time_curve(std::span<const ExitEvent> events, Species only) {
  std::vector<ExitEvent> picked;
  std::copy_if(events.begin(), events.end(), std::back_inserter(picked),
               [only](const ExitEvent& e) { return e.species == only; });
  return exit_time_curve(picked);
}

void DiscomfortAccumulator::add(const ScalarField& p, double dt) {
  if (!p.same_shape(sum_)) throw DimensionMismatch("discomfort snapshot shape differs");
  for (std::size_t k = 0; k < p.size(); ++k) sum_[k] += p[k] * dt;
}

ScalarField cumulative_discomfort(std::span<const ScalarField> history, double dt) {
  if (history.empty()) return {};
  DiscomfortAccumulator acc(history.front());
  for (const auto& p : history) acc.add(p, dt);
  return acc.value();
}

ScalarField log_view(const ScalarField& f) {
  ScalarField out(f.nx(), f.ny(), f.h());
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = f[k] > 0.0 ? std::log10(1.0 + f[k]) : 0.0;
  return out;
}

RunRecord make_run_record(const CrowdState& crowd, double t_end,
                          const ScalarField& cumulative, std::uint64_t seed,
                          const std::string& config_hash) {
  RunRecord r;
  r.t_end = t_end;
  r.cumulative_discomfort = cumulative;
  r.seed = seed;
  r.config_hash = config_hash;
  for (const auto& ag : crowd.agents) {
    (ag.species == Species::Active ? r.n_active : r.n_passive) += 1;
    if (ag.exited) r.exits.push_back({ag.id, ag.species, ag.exit_time});
  }
  return r;
}

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ResidenceStats residence(const RunRecord& run, std::optional<Species> only) {
  ResidenceStats s;
  s.count = only ? (*only == Species::Active ? run.n_active : run.n_passive)
                 : run.n_active + run.n_passive;
  std::vector<double> times;
  for (const auto& e : run.exits) {
    if (!only || e.species == *only) times.push_back(e.t);
  }
  s.exited = static_cast<int>(times.size());
  s.censored = s.count - s.exited;
  times.insert(times.end(), static_cast<std::size_t>(s.censored), run.t_end);
  if (!times.empty()) {
    s.mean = std::accumulate(times.begin(), times.end(), 0.0) / static_cast<double>(times.size());
    s.median = median_of(std::move(times));
  }
  return s;
}

std::string opt(const std::optional<double>& v) {
  return v ? fmt::format("{:.6f}", *v) : std::string("no data");
}

}  // namespace

StageReport detect_stages(std::span<const double> t) {
  StageReport r;
  if (t.size() < 3) return r;
  const double last = t.back();
  if (!(last > 0.0)) return r;
  const auto early = std::upper_bound(t.begin(), t.end(), 0.25 * last) - t.begin();
  r.early_fraction = static_cast<double>(early) / static_cast<double>(t.size());
  std::size_t gap_at = 1;
  double gap = -1.0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (t[k] - t[k - 1] > gap) {
      gap = t[k] - t[k - 1];
      gap_at = k;
    }
  }
  r.stage1_end = t[gap_at - 1];
  r.stage2_end = t[gap_at];
  r.detected = r.early_fraction >= kStageEarlyFraction && gap >= kStagePlateauFraction * last;
  return r;
}

Summary summarize(const RunRecord& run) {
  Summary s;
  s.active = residence(run, Species::Active);
  s.passive = residence(run, Species::Passive);
  s.all = residence(run, std::nullopt);
  std::vector<double> times;
  for (const auto& e : run.exits) times.push_back(e.t);
  std::sort(times.begin(), times.end());
  const int n = run.n_active + run.n_passive;
  const auto need = static_cast<std::size_t>(std::ceil(0.95 * n - 1e-9));
  if (n > 0 && times.size() >= need && need > 0) s.t95 = times[need - 1];
  s.peak_discomfort = run.cumulative_discomfort.size() ? run.cumulative_discomfort.max_finite() : 0.0;
  s.stragglers = n - static_cast<int>(times.size());
  s.stages = detect_stages(times);
  return s;
}

void write_summary(std::ostream& out, const Summary& s, const RunRecord& run) {
  out << "# config_hash=" << run.config_hash << " seed=" << run.seed << '\n';
  auto block = [&](const char* name, const ResidenceStats& r) {
    out << fmt::format("{}.count = {}\n{}.exited = {}\n{}.censored = {}\n", name, r.count, name,
                       r.exited, name, r.censored);
    out << fmt::format("{}.mean_residence = {}\n{}.median_residence = {}\n", name, opt(r.mean),
                       name, opt(r.median));
  };
  block("active", s.active);
  block("passive", s.passive);
  block("all", s.all);
  out << "t95 = " << opt(s.t95) << '\n';
  out << fmt::format("peak_discomfort = {:.6f}\n", s.peak_discomfort);
  out << "stragglers = " << s.stragglers << '\n';
  out << "stages.detected = " << (s.stages.detected ? "yes" : "no") << '\n';
  out << fmt::format("stages.early_fraction = {:.6f}\n", s.stages.early_fraction);
  out << "stages.stage1_end = " << opt(s.stages.stage1_end) << '\n';
  out << "stages.stage2_end = " << opt(s.stages.stage2_end) << '\n';
}

void write_exit_times(std::ostream& out, const RunRecord& run) {
  out << "# config_hash=" << run.config_hash << " seed=" << run.seed << '\n';
  out << "id,species,exit_time\n";
  for (const auto& e : run.exits) {
    out << fmt::format("{},{},{:.17g}\n", e.id, e.species == Species::Active ? "active" : "passive",
                       e.t);
  }
}

std::optional<double> evacuation_time(std::span<const LatticeSample> series, int n0,
                                      Tally which, double fraction) {
  if (n0 <= 0) return 0.0;
  const double target = (1.0 - fraction) * n0;
  auto count = [which](const LatticeSample& s) {
    switch (which) {
      case Tally::A: return double(s.n_A);
      case Tally::U: return double(s.n_U);
      case Tally::Both: return double(s.n_A + s.n_U);
    }
    return 0.0;
  };
  double t_prev = 0.0;
  double c_prev = n0;
  for (const auto& s : series) {
    const double c = count(s);
    if (c <= target) {
      if (c_prev == c) return s.t;
      return t_prev + (s.t - t_prev) * (c_prev - target) / (c_prev - c);
    }
    t_prev = s.t;
    c_prev = c;
  }
  return std::nullopt;
}

void write_lattice_series(std::ostream& out, std::span<const LatticeSample> series, int n_A0,
                          int n_U0, std::span<const std::string> comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "t,N_A,N_U,J_A,J_U\n";
  for (const auto& s : series) {
    out << fmt::format("{:.17g},{},{},{:.17g},{:.17g}\n", s.t, s.n_A, s.n_U,
                       particle_current(n_A0, s.n_A, s.t), particle_current(n_U0, s.n_U, s.t));
  }
}

}  // namespace evac
