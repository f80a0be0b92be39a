#include "evac/lattice.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "evac/error.hpp"

namespace evac {

bool LatticeConfig::is_obstacle(int i, int j) const {
  return std::any_of(obstacles.begin(), obstacles.end(), [=](const SiteBlock& b) {
    return i >= b.i0 && i <= b.i1 && j >= b.j0 && j <= b.j1;
  });
}

void validate(const LatticeConfig& cfg) {
  if (cfg.Lx < 1) throw NonPositiveParameter("lattice.Lx");
  if (cfg.Ly < 1) throw NonPositiveParameter("lattice.Ly");
  if (cfg.w_ex < (cfg.door_inclusive ? 0 : 1)) throw NonPositiveParameter("lattice.w_ex");
  if (cfg.eps_x < 0.0 || cfg.eps_y < 0.0) throw ConfigError("lattice drifts must be >= 0");
  if (cfg.door_lo() < 1 || cfg.door_hi() > cfg.Lx) {
    throw GeometryViolation(fmt::format("door [{}, {}] not inside columns [1, {}]",
                                        cfg.door_lo(), cfg.door_hi(), cfg.Lx));
  }
  for (const auto& b : cfg.obstacles) {
    if (b.i0 > b.i1 || b.j0 > b.j1 || !cfg.contains(b.i0, b.j0) || !cfg.contains(b.i1, b.j1)) {
      throw GeometryViolation("lattice obstacle block outside the lattice");
    }
  }
  for (int i = cfg.door_lo(); i <= cfg.door_hi(); ++i) {
    if (cfg.is_obstacle(i, cfg.Ly)) throw GeometryViolation("obstacle covers a door site");
  }
  if (cfg.rho0 < 0.0 || cfg.rho0 > 1.0) throw ConfigError("lattice.rho0 must lie in [0, 1]");
  if (cfg.n_active.has_value() != cfg.n_unaware.has_value()) {
    throw ConfigError("lattice.n_active and lattice.n_unaware must be given together");
  }
  if ((cfg.n_active && *cfg.n_active < 0) || (cfg.n_unaware && *cfg.n_unaware < 0)) {
    throw ConfigError("lattice particle counts must be non-negative");
  }
  if (!(cfg.sample_t0 > 0.0)) throw NonPositiveParameter("lattice.sample_t0");
  if (!(cfg.sample_gamma > 1.0)) throw ConfigError("lattice.sample_gamma must exceed 1");
}

LatticeConfig build_lattice_config(const ConfigDocument& doc) {
  const std::string sec = "lattice";
  LatticeConfig cfg;
  cfg.Lx = static_cast<int>(doc.get_int(sec, "Lx", cfg.Lx));
  cfg.Ly = static_cast<int>(doc.get_int(sec, "Ly", cfg.Ly));
  cfg.w_ex = static_cast<int>(doc.get_int(sec, "w_ex", cfg.w_ex));
  cfg.eps_x = doc.get_double(sec, "eps_x", cfg.eps_x);
  cfg.eps_y = doc.get_double(sec, "eps_y", cfg.eps_y);
  cfg.door_inclusive = doc.get_bool(sec, "door_inclusive", cfg.door_inclusive);
  cfg.rho0 = doc.get_double(sec, "rho0", cfg.rho0);
  if (doc.has(sec, "n_active")) cfg.n_active = static_cast<int>(doc.get_int(sec, "n_active"));
  if (doc.has(sec, "n_unaware")) cfg.n_unaware = static_cast<int>(doc.get_int(sec, "n_unaware"));
  cfg.sample_t0 = doc.get_double(sec, "sample_t0", cfg.sample_t0);
  cfg.sample_gamma = doc.get_double(sec, "sample_gamma", cfg.sample_gamma);
  for (const auto& text : doc.all(sec, "obstacle")) {
    auto v = parse_numbers(text, "lattice.obstacle");
    if (v.size() != 4) throw ConfigError("lattice.obstacle: expected 'i0 j0 i1 j1'");
    cfg.obstacles.push_back({static_cast<int>(v[0]), static_cast<int>(v[1]),
                             static_cast<int>(v[2]), static_cast<int>(v[3])});
  }
  if (doc.has(sec, "i_ex")) {
    cfg.i_ex = static_cast<int>(doc.get_int(sec, "i_ex"));
  } else {
    const int span = cfg.door_inclusive ? cfg.w_ex + 1 : cfg.w_ex;
    cfg.i_ex = (cfg.Lx - span) / 2 + 1;
  }
  validate(cfg);
  return cfg;
}

namespace {

double vacancy(Site y) { return y == Site::Empty ? 1.0 : 0.0; }

bool blocked(SiteCoord x, SiteCoord y, const LatticeState& st, const LatticeConfig& cfg) {
  return !cfg.contains(x.i, x.j) || !cfg.contains(y.i, y.j) ||
         st.at(cfg, x.i, x.j) == Site::Obstacle || st.at(cfg, y.i, y.j) == Site::Obstacle;
}

}  // namespace

double rate_U(SiteCoord x, SiteCoord y, const LatticeState& st, const LatticeConfig& cfg) {
  if (blocked(x, y, st, cfg)) return 0.0;
  return st.at(cfg, x.i, x.j) == Site::U ? vacancy(st.at(cfg, y.i, y.j)) : 0.0;
}

double rate_A(SiteCoord x, SiteCoord y, const LatticeState& st, const LatticeConfig& cfg) {
  if (blocked(x, y, st, cfg)) return 0.0;
  if (st.at(cfg, x.i, x.j) != Site::A) return 0.0;
  const double free = vacancy(st.at(cfg, y.i, y.j));
  if (y.i == x.i) {  // vertical bond
    return y.j > x.j ? (1.0 + cfg.eps_y) * free : 0.0;
  }
  if (cfg.in_door_band(x.i)) return 0.0;
  const bool towards_door = (y.i - x.i) * (cfg.i_ex - y.i) >= 0;
  return (towards_door ? 1.0 + cfg.eps_x : 1.0) * free;
}

double exit_rate(SiteCoord x, const LatticeState& st, const LatticeConfig& cfg) {
  if (x.j != cfg.Ly || !cfg.in_door_band(x.i)) return 0.0;
  switch (st.at(cfg, x.i, x.j)) {
    case Site::U: return 1.0;
    case Site::A: return 1.0 + cfg.eps_y;
    default: return 0.0;
  }
}

namespace {

constexpr int kDi[4] = {1, -1, 0, 0};
constexpr int kDj[4] = {0, 0, 1, -1};

SiteCoord coord_of(const LatticeConfig& cfg, std::size_t site) {
  return {static_cast<int>(site % static_cast<std::size_t>(cfg.Lx)) + 1,
          static_cast<int>(site / static_cast<std::size_t>(cfg.Lx)) + 1};
}

}  // namespace

double transition_rate(const LatticeState& st, const LatticeConfig& cfg, std::size_t site,
                       Move m) {
  const SiteCoord x = coord_of(cfg, site);
  const Site s = st.sites[site];
  if (s != Site::U && s != Site::A) return 0.0;
  if (m == Move::Exit) return exit_rate(x, st, cfg);
  const int d = static_cast<int>(m);
  const SiteCoord y{x.i + kDi[d], x.j + kDj[d]};
  return s == Site::U ? rate_U(x, y, st, cfg) : rate_A(x, y, st, cfg);
}

LatticeState init_lattice(const LatticeConfig& cfg) {
  validate(cfg);
  LatticeState st;
  st.sites.assign(cfg.sites(), Site::Empty);
  std::vector<std::size_t> accessible;
  for (int j = 1; j <= cfg.Ly; ++j) {
    for (int i = 1; i <= cfg.Lx; ++i) {
      if (cfg.is_obstacle(i, j)) {
        st.sites[cfg.index(i, j)] = Site::Obstacle;
      } else {
        accessible.push_back(cfg.index(i, j));
      }
    }
  }
  int n_a = 0;
  int n_u = 0;
  if (cfg.n_active) {
    n_a = *cfg.n_active;
    n_u = *cfg.n_unaware;
  } else {
    const int total = static_cast<int>(std::floor(cfg.rho0 * accessible.size() + 1e-9));
    n_a = total / 2;
    n_u = total - n_a;
  }
  if (static_cast<std::size_t>(n_a) + static_cast<std::size_t>(n_u) > accessible.size()) {
    throw Overfull(fmt::format("{} particles requested for {} accessible sites", n_a + n_u,
                               accessible.size()));
  }
  SeqRng rng(cfg.seed);
  // Partial Fisher-Yates: the first n_a + n_u entries become a uniform sample.
  const std::size_t take = static_cast<std::size_t>(n_a + n_u);
  for (std::size_t k = 0; k < take; ++k) {
    const std::size_t r = k + rng.below(accessible.size() - k);
    std::swap(accessible[k], accessible[r]);
  }
  for (std::size_t k = 0; k < take; ++k) {
    st.sites[accessible[k]] = k < static_cast<std::size_t>(n_a) ? Site::A : Site::U;
  }
  st.n_A = st.n_A0 = n_a;
  st.n_U = st.n_U0 = n_u;
  return st;
}

KmcEngine::KmcEngine(LatticeConfig cfg, LatticeState st)
    : cfg_(std::move(cfg)), state_(std::move(st)), rng_(splitmix64(cfg_.seed) ^ 0x6b6d63ull) {
  catalog_ = rebuild_catalog();
}

SumTree KmcEngine::rebuild_catalog() const {
  SumTree tree(cfg_.sites() * kMoves);
  for (std::size_t s = 0; s < cfg_.sites(); ++s) {
    for (int m = 0; m < kMoves; ++m) {
      tree.set(s * kMoves + m, transition_rate(state_, cfg_, s, static_cast<Move>(m)));
    }
  }
  return tree;
}

void KmcEngine::refresh_site(int i, int j) {
  if (!cfg_.contains(i, j)) return;
  const std::size_t s = cfg_.index(i, j);
  for (int m = 0; m < kMoves; ++m) {
    catalog_.set(s * kMoves + m, transition_rate(state_, cfg_, s, static_cast<Move>(m)));
  }
}

void KmcEngine::refresh_around(int i, int j) {
  refresh_site(i, j);
  for (int d = 0; d < 4; ++d) refresh_site(i + kDi[d], j + kDj[d]);
}

double KmcEngine::draw_dt() {
  if (!pending_dt_) {
    const double total = catalog_.total();
    if (!(total > 0.0)) throw EmptySystem();
    pending_dt_ = rng_.exponential(total);
  }
  return *pending_dt_;
}

KmcEvent KmcEngine::step() {
  const double dt = draw_dt();
  pending_dt_.reset();
  const double total = catalog_.total();
  const std::size_t leaf = catalog_.find(rng_.uniform() * total);
  const std::size_t site = leaf / kMoves;
  const auto move = static_cast<Move>(leaf % kMoves);
  const Site species = state_.sites[site];
  if (catalog_.value(leaf) <= 0.0 || (species != Site::A && species != Site::U)) {
    throw std::logic_error("KMC sampled a disabled transition");
  }
  const SiteCoord x = coord_of(cfg_, site);

  if (move == Move::Exit) {
    state_.sites[site] = Site::Empty;
    (species == Site::A ? state_.n_A : state_.n_U) -= 1;
    refresh_around(x.i, x.j);
  } else {
    const int d = static_cast<int>(move);
    const SiteCoord y{x.i + kDi[d], x.j + kDj[d]};
    const std::size_t target = cfg_.index(y.i, y.j);
    if (state_.sites[target] != Site::Empty) {
      throw std::logic_error("KMC exclusion violated");
    }
    state_.sites[target] = species;
    state_.sites[site] = Site::Empty;
    refresh_around(x.i, x.j);
    refresh_around(y.i, y.j);
  }
  state_.t += dt;
  ++events_;
  return {site, move, species, dt};
}

bool KmcEngine::catalog_consistent() const {
  const SumTree fresh = rebuild_catalog();
  if (!fresh.same_leaves(catalog_)) return false;
  const double exact = catalog_.recompute_total();
  return std::abs(catalog_.total() - exact) <= 1e-9 * std::max(1.0, exact);
}

bool KmcEngine::state_consistent() const {
  int a = 0;
  int u = 0;
  for (int j = 1; j <= cfg_.Ly; ++j) {
    for (int i = 1; i <= cfg_.Lx; ++i) {
      const Site s = state_.at(cfg_, i, j);
      if (cfg_.is_obstacle(i, j) != (s == Site::Obstacle)) return false;
      a += s == Site::A;
      u += s == Site::U;
    }
  }
  return a == state_.n_A && u == state_.n_U && a <= state_.n_A0 && u <= state_.n_U0;
}

LatticeRun run_lattice(const LatticeConfig& cfg, const LatticeStop& stop) {
  KmcEngine engine(cfg, init_lattice(cfg));
  LatticeRun run;
  double next_sample = cfg.sample_t0;
  auto record_before = [&](double t_limit) {
    const auto& st = engine.state();
    while (next_sample < t_limit) {
      run.series.push_back({next_sample, st.n_A, st.n_U});
      next_sample *= cfg.sample_gamma;
    }
  };

  double t_stop = 0.0;
  while (true) {
    const auto& st = engine.state();
    t_stop = st.t;
    if (st.n_A + st.n_U == 0 && (stop.until_empty || !stop.t_end)) break;
    if (stop.max_events && engine.events() >= *stop.max_events) break;
    if (st.n_A + st.n_U == 0) {
      // Nothing left to move; the state is frozen until t_end.
      t_stop = *stop.t_end;
      record_before(t_stop);
      break;
    }
    const double t_event = st.t + engine.draw_dt();
    if (stop.t_end && t_event > *stop.t_end) {
      t_stop = *stop.t_end;
      record_before(t_stop);
      break;
    }
    record_before(t_event);
    const auto ev = engine.step();
    if (ev.move == Move::Exit) {
      (ev.species == Site::A ? run.exit_times_A : run.exit_times_U).push_back(engine.state().t);
    }
  }
  const auto& st = engine.state();
  if (t_stop > 0.0 && (run.series.empty() || run.series.back().t < t_stop)) {
    run.series.push_back({t_stop, st.n_A, st.n_U});
  }
  run.final_state = st;
  run.events = engine.events();
  return run;
}

void write_occupancy(std::ostream& out, const LatticeConfig& cfg, const LatticeState& st) {
  for (int j = cfg.Ly; j >= 1; --j) {
    std::string row;
    row.reserve(static_cast<std::size_t>(cfg.Lx) + 1);
    for (int i = 1; i <= cfg.Lx; ++i) {
      switch (st.at(cfg, i, j)) {
        case Site::Empty: row += '.'; break;
        case Site::U: row += 'U'; break;
        case Site::A: row += 'A'; break;
        case Site::Obstacle: row += '#'; break;
      }
    }
    row += '\n';
    out << row;
  }
}

}  // namespace evac
