#include "evac/crowd.hpp"

#include <algorithm>
#include <cmath>

#include "evac/error.hpp"

namespace evac {

CrowdParams CrowdParams::from_scenario(const Scenario& s, const GridMask& mask) {
  const auto& ph = s.physics;
  CrowdParams p;
  p.v_s = ph.v_s;
  p.r_s0 = ph.r_s0;
  p.D_tilde = ph.D_tilde;
  p.a = ph.a;
  p.b = ph.b;
  p.delta = ph.delta;
  p.awareness_radius = ph.awareness_radius;
  p.mode = ph.mode;
  p.upsilon_scaling = ph.upsilon_scaling;
  p.passive_speed_cap = ph.passive_speed_cap;
  if (ph.p_max > 0.0) {
    p.p_max = ph.p_max;
  } else {
    const auto walkable = mask.size() - mask.cells_of(CellType::Obstacle).size();
    const double area = static_cast<double>(walkable) * mask.h() * mask.h();
    const int n = s.population.active + s.population.passive;
    p.p_max = std::max(1.0, n * area);
  }
  return p;
}

double weight(double d, double r_s) {
  const double r2 = r_s * r_s;
  return std::exp(-d * d / r2) / r2;
}

double sight_radius(double s_local, double r_s0) { return r_s0 / (1.0 + s_local); }

double upsilon(double s_local, double a, double b) { return std::max(0.0, b - a * s_local); }

namespace {

Vec2 unit_or_zero(Vec2 v) {
  const double n = norm(v);
  return n > kStallEps ? v * (1.0 / n) : Vec2{};
}

const ScalarField& potential_for(const AgentState& ag, const Potentials& phi) {
  return ag.aware ? phi.aware : phi.unaware;
}

// Upsilon acting on passive agents: 1 in the second-order model.
double passive_upsilon(double s_local, const CrowdParams& p) {
  return p.mode == DynamicsMode::SecondOrderPassive ? 1.0 : upsilon(s_local, p.a, p.b);
}

}  // namespace

Vec2 active_velocity(const AgentState& ag, const Potentials& phi, const ScalarField& p,
                     const ScalarField& smoke, const CrowdParams& params) {
  const Vec2 g = gradient_at(potential_for(ag, phi), ag.position) - gradient_at(p, ag.position);
  const double n = norm(g);
  if (!(n > kStallEps)) return {};
  double speed = params.v_s;
  if (params.upsilon_scaling) {
    speed *= upsilon(std::max(0.0, interpolate(smoke, ag.position)), params.a, params.b);
  }
  return g * (-speed / n);
}

Vec2 active_velocity_overdamped(const AgentState& ag, const Potentials& phi,
                                const ScalarField& p, const ScalarField& smoke,
                                const CrowdParams& params) {
  const Vec2 g = gradient_at(potential_for(ag, phi), ag.position);
  const double n = norm(g);
  if (!(n > kStallEps)) return {};
  const double s = std::max(0.0, interpolate(smoke, ag.position));
  const double saturation = params.p_max - interpolate(p, ag.position);
  return g * (-upsilon(s, params.a, params.b) * saturation / n);
}

Vec2 passive_force(const AgentState& ag, std::span<const AgentState> agents,
                   const ScalarField& p, const ScalarField& smoke, const ScalarField& H_eps,
                   const CrowdParams& params) {
  const double s = std::max(0.0, interpolate(smoke, ag.position));
  const double r_s = sight_radius(s, params.r_s0);
  Vec2 align;
  for (const auto& other : agents) {
    if (other.exited || other.id == ag.id) continue;
    align += (other.velocity - ag.velocity) * weight(norm(other.position - ag.position), r_s);
  }
  const Vec2 heading = unit_or_zero(ag.velocity - gradient_at(p, ag.position));
  return align - gradient_at(H_eps, ag.position) + heading * passive_upsilon(s, params);
}

Vec2 passive_velocity_overdamped(const AgentState& ag, std::span<const AgentState> agents,
                                 const ScalarField& smoke, const ScalarField& H_eps,
                                 const CrowdParams& params) {
  const double s = std::max(0.0, interpolate(smoke, ag.position));
  const double r_s = sight_radius(s, params.r_s0);
  Vec2 attract;
  for (const auto& other : agents) {
    if (other.exited || other.id == ag.id) continue;
    const Vec2 d = other.position - ag.position;
    const double dist = norm(d);
    if (!(dist >= kStallEps)) continue;
    attract += d * (weight(dist, r_s) / dist);
  }
  return attract - gradient_at(H_eps, ag.position);
}

int fire_awareness_update(std::span<AgentState> agents, const Scenario& s) {
  if (!s.fire.present) return 0;
  int flipped = 0;
  for (auto& ag : agents) {
    if (ag.species != Species::Active || ag.exited || ag.aware) continue;
    if (norm(ag.position - s.fire.center) <= s.physics.awareness_radius) {
      ag.aware = true;
      ++flipped;
    }
  }
  return flipped;
}

std::vector<Vec2> CrowdState::live_positions() const {
  std::vector<Vec2> out;
  out.reserve(agents.size());
  for (const auto& ag : agents) {
    if (!ag.exited) out.push_back(ag.position);
  }
  return out;
}

int CrowdState::live_count() const {
  return static_cast<int>(
      std::count_if(agents.begin(), agents.end(), [](const auto& a) { return !a.exited; }));
}

CrowdState spawn_agents(const Scenario& s, const GridMask& mask, std::uint64_t seed) {
  const Rect region = s.population.spawn.value_or(Rect{0.0, 0.0, s.width, s.height});
  std::vector<std::size_t> candidates;
  for (int j = 0; j < mask.ny(); ++j) {
    for (int i = 0; i < mask.nx(); ++i) {
      if (mask(i, j) == CellType::Free && region.contains(mask.center(i, j))) {
        candidates.push_back(mask.index(i, j));
      }
    }
  }
  const int total = s.population.active + s.population.passive;
  if (total > 0 && candidates.empty()) {
    throw Overfull("spawn region contains no free cell");
  }
  SeqRng rng(seed ^ 0x5eed5eed5eedull);
  CrowdState st;
  st.agents.reserve(static_cast<std::size_t>(total));
  const double h = mask.h();
  for (int id = 0; id < total; ++id) {
    const std::size_t cell = candidates[rng.below(candidates.size())];
    const int i = static_cast<int>(cell % static_cast<std::size_t>(mask.nx()));
    const int j = static_cast<int>(cell / static_cast<std::size_t>(mask.nx()));
    AgentState ag;
    ag.id = id;
    ag.species = id < s.population.active ? Species::Active : Species::Passive;
    ag.position = {(i + rng.uniform()) * h, (j + rng.uniform()) * h};
    st.agents.push_back(ag);
  }
  return st;
}

namespace {

AgentProposal propose_one(const AgentState& ag, const CrowdState& st,
                          const CrowdEnvironment& env, double dt, const CounterRng& rng) {
  const auto& params = env.params;
  const auto& p = *env.discomfort;
  const auto& smoke = *env.smoke;
  if (ag.species == Species::Active) {
    const Vec2 v = params.mode == DynamicsMode::SecondOrderPassive
                       ? active_velocity(ag, *env.potentials, p, smoke, params)
                       : active_velocity_overdamped(ag, *env.potentials, p, smoke, params);
    return {ag.position + v * dt, v};
  }
  const auto [g1, g2] = rng.gaussian_pair(static_cast<std::uint64_t>(ag.id), st.step);
  const double sq = std::sqrt(dt);
  const Vec2 noise = params.D_tilde * Vec2{g1 * sq, g2 * sq};
  if (params.mode == DynamicsMode::SecondOrderPassive) {
    const Vec2 acc = passive_force(ag, st.agents, p, smoke, *env.fire, params);
    Vec2 v = ag.velocity + acc * dt + noise;
    const double speed = norm(v);
    if (speed > params.passive_speed_cap) v *= params.passive_speed_cap / speed;
    return {ag.position + ag.velocity * dt, v};
  }
  const Vec2 drift = passive_velocity_overdamped(ag, st.agents, smoke, *env.fire, params);
  const Vec2 step = drift * dt + noise;
  return {ag.position + step, step * (1.0 / dt)};
}

}  // namespace

std::vector<AgentProposal> propose_moves(const CrowdState& st, const CrowdEnvironment& env,
                                         double dt, const CounterRng& rng) {
  const auto n = static_cast<std::ptrdiff_t>(st.agents.size());
  std::vector<AgentProposal> out(st.agents.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto& ag = st.agents[static_cast<std::size_t>(k)];
    out[static_cast<std::size_t>(k)] =
        ag.exited ? AgentProposal{ag.position, ag.velocity} : propose_one(ag, st, env, dt, rng);
  }
  return out;
}

namespace serial {

std::vector<AgentProposal> propose_moves(const CrowdState& st, const CrowdEnvironment& env,
                                         double dt, const CounterRng& rng) {
  std::vector<AgentProposal> out;
  out.reserve(st.agents.size());
  for (const auto& ag : st.agents) {
    out.push_back(ag.exited ? AgentProposal{ag.position, ag.velocity}
                            : propose_one(ag, st, env, dt, rng));
  }
  return out;
}

}  // namespace serial

Vec2 project_to_walkable(const GridMask& mask, Vec2 p) {
  const double h = mask.h();
  const double inset = 1e-9 * h;
  p.x = std::clamp(p.x, inset, mask.nx() * h - inset);
  p.y = std::clamp(p.y, inset, mask.ny() * h - inset);
  auto [ci, cj] = mask.cell_of(p);
  if (mask(ci, cj) != CellType::Obstacle) return p;

  Vec2 best = p;
  double best_d = kInf;
  const int max_ring = std::max(mask.nx(), mask.ny());
  for (int r = 1; r <= max_ring; ++r) {
    if ((r - 1) * h > best_d) break;
    for (int dj = -r; dj <= r; ++dj) {
      for (int di = -r; di <= r; ++di) {
        if (std::max(std::abs(di), std::abs(dj)) != r) continue;
        const int i = ci + di;
        const int j = cj + dj;
        if (!mask.walkable(i, j)) continue;
        const Vec2 q{std::clamp(p.x, i * h + inset, (i + 1) * h - inset),
                     std::clamp(p.y, j * h + inset, (j + 1) * h - inset)};
        const double d = norm(q - p);
        if (d < best_d) {
          best_d = d;
          best = q;
        }
      }
    }
  }
  return best;
}

void step_agents(CrowdState& st, const CrowdEnvironment& env, double dt, const CounterRng& rng) {
  const auto proposals = propose_moves(st, env, dt, rng);
  const auto& mask = *env.mask;
  const double t_next = st.t + dt;
  for (std::size_t k = 0; k < st.agents.size(); ++k) {
    auto& ag = st.agents[k];
    if (ag.exited) continue;
    const auto& prop = proposals[k];
    Vec2 pos = project_to_walkable(mask, prop.position);
    Vec2 vel = prop.velocity;
    const Vec2 push = pos - prop.position;
    if (norm(push) > 0.0) {
      const Vec2 n = push * (1.0 / norm(push));
      vel -= n * dot(vel, n);
    }
    if (norm(pos - ag.position) > mask.h()) ++st.displacement_warnings;
    ag.position = pos;
    ag.velocity = vel;
    auto [i, j] = mask.cell_of(pos);
    if (mask(i, j) == CellType::Exit) {
      ag.exited = true;
      ag.exit_time = t_next;
    }
  }
  st.t = t_next;
  ++st.step;
}

}  // namespace evac
