#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "evac/field.hpp"
#include "evac/geometry.hpp"
#include "evac/potential.hpp"
#include "evac/rng.hpp"

namespace evac {

/// Guard for every normalised direction; below it the direction is zero.
inline constexpr double kStallEps = 1e-9;

enum class Species : std::uint8_t { Active, Passive };

struct AgentState {
  int id = 0;
  Species species = Species::Active;
  Vec2 position;
  Vec2 velocity;
  bool aware = false;  // w; only ever set for active agents
  bool exited = false;
  double exit_time = std::numeric_limits<double>::quiet_NaN();
};

struct CrowdParams {
  double v_s = 1.3;
  double r_s0 = 2.0;
  Mat2 D_tilde{0.3, 0.0, 0.0, 0.3};
  double a = 0.5;
  double b = 1.0;
  double delta = 0.5;  // discomfort ball radius
  double awareness_radius = 3.0;
  DynamicsMode mode = DynamicsMode::SecondOrderPassive;
  bool upsilon_scaling = false;
  double passive_speed_cap = 2.0;
  double p_max = 1.0;

  /// p_max defaults to N |Omega| with |Omega| the walkable grid area.
  static CrowdParams from_scenario(const Scenario& s, const GridMask& mask);
};

/// Number of agents within `delta` of each cell centre (bucketed, OpenMP).
ScalarField discomfort_field(std::span<const Vec2> positions, double delta,
                             const GridMask& grid);

/// exp(-d^2 / r_s^2) / r_s^2.
double weight(double d, double r_s);
/// r_s0 / (1 + s).
double sight_radius(double s_local, double r_s0);
/// max(0, b - a s).
double upsilon(double s_local, double a, double b);

/// Direction from -(grad Phi_w - grad p) at walking speed v_s (or zero when
/// the two gradients cancel). With upsilon_scaling the speed is v_s Upsilon(s).
Vec2 active_velocity(const AgentState& ag, const Potentials& phi, const ScalarField& p,
                     const ScalarField& smoke, const CrowdParams& params);

/// -Upsilon(s) grad(phi)/|grad(phi)| (p_max - p), first-order mode.
Vec2 active_velocity_overdamped(const AgentState& ag, const Potentials& phi,
                                const ScalarField& p, const ScalarField& smoke,
                                const CrowdParams& params);

/// Deterministic acceleration of a passive agent in second-order mode:
/// velocity alignment with every other agent, fire repulsion -grad H_eps and
/// Upsilon (v - grad p)/|v - grad p| (Upsilon = 1 in this mode).
Vec2 passive_force(const AgentState& ag, std::span<const AgentState> agents,
                   const ScalarField& p, const ScalarField& smoke, const ScalarField& H_eps,
                   const CrowdParams& params);

/// Deterministic drift of a passive agent in first-order mode: unit vectors
/// towards every other agent weighted by w(|x_j - x_i|, r_s(s)), minus grad H_eps.
Vec2 passive_velocity_overdamped(const AgentState& ag, std::span<const AgentState> agents,
                                 const ScalarField& smoke, const ScalarField& H_eps,
                                 const CrowdParams& params);

/// Active agents within the awareness radius of the fire switch to w = 1
/// for good. Returns the number of agents that flipped.
int fire_awareness_update(std::span<AgentState> agents, const Scenario& s);

/// Fields the agents read during one step; all immutable for its duration.
struct CrowdEnvironment {
  const GridMask* mask = nullptr;
  const Potentials* potentials = nullptr;
  const ScalarField* discomfort = nullptr;
  const ScalarField* smoke = nullptr;
  const ScalarField* fire = nullptr;  // H_eps
  CrowdParams params;
};

struct CrowdState {
  std::vector<AgentState> agents;  // ordered by id
  double t = 0.0;
  std::uint64_t step = 0;
  std::uint64_t displacement_warnings = 0;

  std::vector<Vec2> live_positions() const;
  int live_count() const;
};

/// Places agents uniformly on Free cells of the spawn region: active ids
/// first, then passive.
CrowdState spawn_agents(const Scenario& s, const GridMask& mask, std::uint64_t seed);

/// Candidate update of one agent before wall handling.
struct AgentProposal {
  Vec2 position;
  Vec2 velocity;
};

/// Proposals for every live agent (OpenMP over agents). Exited agents keep
/// their state.
std::vector<AgentProposal> propose_moves(const CrowdState& st, const CrowdEnvironment& env,
                                         double dt, const CounterRng& rng);

/// Nearest point of a non-obstacle cell inside the domain.
Vec2 project_to_walkable(const GridMask& mask, Vec2 p);

/// One explicit Euler / Euler-Maruyama step. Evaluation may run in
/// parallel; the commit (walls, exits) runs sequentially in id order.
void step_agents(CrowdState& st, const CrowdEnvironment& env, double dt, const CounterRng& rng);

namespace serial {
ScalarField discomfort_field(std::span<const Vec2> positions, double delta, const GridMask& grid);
std::vector<AgentProposal> propose_moves(const CrowdState& st, const CrowdEnvironment& env,
                                         double dt, const CounterRng& rng);
}  // namespace serial

}  // namespace evac
