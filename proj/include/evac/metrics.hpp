#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evac/crowd.hpp"
#include "evac/field.hpp"
#include "evac/lattice.hpp"

namespace evac {

/// (N0 - Nt) / t. Throws ZeroTime for t <= 0.
double particle_current(int n0, int nt, double t);

struct ExitEvent {
  int id = 0;
  Species species = Species::Active;
  double t = 0.0;
};

/// Right-continuous cumulative count of exits.
class StepCurve {
public:
  StepCurve() = default;
  explicit StepCurve(std::vector<double> times) : times_(std::move(times)) {}

  /// Number of exits at times <= t.
  int operator()(double t) const;
  int final_value() const { return static_cast<int>(times_.size()); }
  std::span<const double> jumps() const { return times_; }

private:
  std::vector<double> times_;
};

/// Requires `events` sorted by time; throws std::invalid_argument otherwise.
StepCurve exit_time_curve(std::span<const ExitEvent> events);
StepCurve exit_time_curve(std::span<const ExitEvent> events, Species only);

/// Running per-cell integral of p dt (rectangle rule).
class DiscomfortAccumulator {
public:
  DiscomfortAccumulator() = default;
  explicit DiscomfortAccumulator(const ScalarField& shape)
      : sum_(shape.nx(), shape.ny(), shape.h(), 0.0) {}

  void add(const ScalarField& p, double dt);
  const ScalarField& value() const { return sum_; }

private:
  ScalarField sum_;
};

/// sum_k p_k dt over a uniform-cadence history.
ScalarField cumulative_discomfort(std::span<const ScalarField> history, double dt);

/// log10(1 + v) per cell; zero stays zero.
ScalarField log_view(const ScalarField& f);

struct RunRecord {
  std::vector<ExitEvent> exits;  // ordered by agent id
  int n_active = 0;
  int n_passive = 0;
  double t_end = 0.0;
  ScalarField cumulative_discomfort;
  std::uint64_t seed = 0;
  std::string config_hash;
};

/// Exit events and censoring from a finished crowd.
RunRecord make_run_record(const CrowdState& crowd, double t_end,
                          const ScalarField& cumulative, std::uint64_t seed,
                          const std::string& config_hash);

struct ResidenceStats {
  int count = 0;
  int exited = 0;
  int censored = 0;
  std::optional<double> mean;    // residence time; censored agents count as t_end
  std::optional<double> median;
};

/// Stage structure of the aggregate exit curve: a fast first stage, a
/// plateau (largest gap between consecutive exits) and a tail.
struct StageReport {
  bool detected = false;
  double early_fraction = 0.0;  // exits before a quarter of the last exit time
  std::optional<double> stage1_end;
  std::optional<double> stage2_end;
};

inline constexpr double kStageEarlyFraction = 0.6;
inline constexpr double kStagePlateauFraction = 0.15;

StageReport detect_stages(std::span<const double> sorted_exit_times);

struct Summary {
  ResidenceStats active;
  ResidenceStats passive;
  ResidenceStats all;
  std::optional<double> t95;  // time by which 95% of all agents exited
  double peak_discomfort = 0.0;
  int stragglers = 0;
  StageReport stages;
};

Summary summarize(const RunRecord& run);
void write_summary(std::ostream& out, const Summary& s, const RunRecord& run);

void write_exit_times(std::ostream& out, const RunRecord& run);

/// Time at which the remaining count first reaches (1 - fraction) N0,
/// linearly interpolated between samples; nullopt when never reached.
enum class Tally : std::uint8_t { A, U, Both };
std::optional<double> evacuation_time(std::span<const LatticeSample> series, int n0,
                                      Tally which, double fraction);

/// Columns t, N_A, N_U, J_A, J_U.
void write_lattice_series(std::ostream& out, std::span<const LatticeSample> series, int n_A0,
                          int n_U0, std::span<const std::string> comments = {});

}  // namespace evac
