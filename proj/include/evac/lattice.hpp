#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "evac/config.hpp"
#include "evac/rng.hpp"
#include "evac/sum_tree.hpp"

namespace evac {

enum class Site : std::uint8_t { Empty, U, A, Obstacle };

/// Inclusive block of lattice sites, 1-based like the lattice coordinates.
struct SiteBlock {
  int i0 = 1, j0 = 1, i1 = 1, j1 = 1;
};

/// Two-species exclusion process on {1..Lx} x {1..Ly}; the exit door sits
/// in the top row j = Ly.
struct LatticeConfig {
  int Lx = 50;
  int Ly = 50;
  int i_ex = 0;  // first door column; 0 selects the centred door
  int w_ex = 2;
  double eps_x = 0.1;
  double eps_y = 0.1;
  bool door_inclusive = true;  // door = [i_ex, i_ex + w_ex] (w_ex + 1 sites)
  std::vector<SiteBlock> obstacles;
  double rho0 = 0.985;
  std::optional<int> n_active;   // overrides the rho0 split when both are set
  std::optional<int> n_unaware;
  std::uint64_t seed = 1;
  // Geometric sample times t0 * gamma^k.
  double sample_t0 = 1.0;
  double sample_gamma = 1.1;

  int door_lo() const { return i_ex; }
  int door_hi() const { return door_inclusive ? i_ex + w_ex : i_ex + w_ex - 1; }
  bool in_door_band(int i) const { return i >= door_lo() && i <= door_hi(); }
  std::size_t sites() const { return static_cast<std::size_t>(Lx) * static_cast<std::size_t>(Ly); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j - 1) * static_cast<std::size_t>(Lx) +
           static_cast<std::size_t>(i - 1);
  }
  bool contains(int i, int j) const { return i >= 1 && j >= 1 && i <= Lx && j <= Ly; }
  bool is_obstacle(int i, int j) const;
};

/// Reads the [lattice] section; fills the centred door when i_ex is absent.
LatticeConfig build_lattice_config(const ConfigDocument& doc);
void validate(const LatticeConfig& cfg);

struct LatticeState {
  std::vector<Site> sites;  // index (j - 1) * Lx + (i - 1)
  int n_A = 0;
  int n_U = 0;
  int n_A0 = 0;
  int n_U0 = 0;
  double t = 0.0;

  Site at(const LatticeConfig& cfg, int i, int j) const { return sites[cfg.index(i, j)]; }
};

struct SiteCoord {
  int i = 1;
  int j = 1;
};

/// eta_U(x) [1 - eta_U(y) - eta_A(y)].
double rate_U(SiteCoord x, SiteCoord y, const LatticeState& st, const LatticeConfig& cfg);
/// Biased hop rate of an A particle from x to the neighbour y.
double rate_A(SiteCoord x, SiteCoord y, const LatticeState& st, const LatticeConfig& cfg);
/// Annihilation rate at a door site: 1 for U, 1 + eps_y for A.
double exit_rate(SiteCoord x, const LatticeState& st, const LatticeConfig& cfg);

enum class Move : std::uint8_t { Right, Left, Up, Down, Exit };
inline constexpr int kMoves = 5;

/// Rate of the transition (site, move) in the current state; 0 for
/// bonds leaving the lattice (except door exits) or touching obstacles.
double transition_rate(const LatticeState& st, const LatticeConfig& cfg, std::size_t site,
                       Move m);

/// Random placement of the configured particle numbers on distinct
/// accessible sites. N = floor(rho0 |accessible|), split N_A = floor(N/2),
/// N_U = N - N_A unless explicit counts are given. Throws Overfull.
LatticeState init_lattice(const LatticeConfig& cfg);

struct KmcEvent {
  std::size_t site = 0;
  Move move = Move::Right;
  Site species = Site::Empty;
  double dt = 0.0;
};

/// Rejection-free kinetic Monte Carlo over a sum tree of transition rates.
class KmcEngine {
public:
  KmcEngine(LatticeConfig cfg, LatticeState st);

  /// Samples one transition proportionally to its rate, advances time by
  /// an Exp(total rate) waiting time and applies it. Throws EmptySystem.
  KmcEvent step();

  /// Waiting time of the next event, drawn once and reused by step(), so
  /// callers can look ahead before the state changes.
  double draw_dt();

  const LatticeState& state() const { return state_; }
  const LatticeConfig& config() const { return cfg_; }
  const SumTree& catalog() const { return catalog_; }
  double total_rate() const { return catalog_.total(); }
  std::uint64_t events() const { return events_; }

  /// Catalog built from scratch for the current state.
  SumTree rebuild_catalog() const;
  /// Incremental catalog equals a rebuild leaf-for-leaf and the total
  /// matches a fresh sum to 1e-9 relative.
  bool catalog_consistent() const;
  /// Exclusion, obstacle and count invariants of the current state.
  bool state_consistent() const;

private:
  void refresh_site(int i, int j);
  void refresh_around(int i, int j);

  LatticeConfig cfg_;
  LatticeState state_;
  SumTree catalog_;
  SeqRng rng_;
  std::optional<double> pending_dt_;
  std::uint64_t events_ = 0;
};

struct LatticeStop {
  std::optional<double> t_end;
  std::optional<std::uint64_t> max_events;
  bool until_empty = true;
};

struct LatticeSample {
  double t = 0.0;
  int n_A = 0;
  int n_U = 0;
};

struct LatticeRun {
  std::vector<LatticeSample> series;
  LatticeState final_state;
  std::vector<double> exit_times_A;
  std::vector<double> exit_times_U;
  std::uint64_t events = 0;
};

/// Runs the KMC loop until the stop condition. Samples are taken at the
/// geometric times of the config, plus one final row at the stop time.
LatticeRun run_lattice(const LatticeConfig& cfg, const LatticeStop& stop);

/// ASCII occupancy: '.', 'U', 'A', '#'; top row (j = Ly, door row) first.
void write_occupancy(std::ostream& out, const LatticeConfig& cfg, const LatticeState& st);

}  // namespace evac
