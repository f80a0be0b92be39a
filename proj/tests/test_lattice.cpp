#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <sstream>

#include "evac/error.hpp"
#include "evac/lattice.hpp"
#include "evac/sum_tree.hpp"
#include "oracles.hpp"

using namespace evac;

namespace {

LatticeConfig small(int Lx, int Ly, double eps = 0.1) {
  LatticeConfig cfg;
  cfg.Lx = Lx;
  cfg.Ly = Ly;
  cfg.w_ex = 2;
  cfg.i_ex = (Lx - 3) / 2 + 1;
  cfg.eps_x = eps;
  cfg.eps_y = eps;
  cfg.rho0 = 0.0;
  return cfg;
}

LatticeState empty_state(const LatticeConfig& cfg) {
  LatticeState st;
  st.sites.assign(cfg.sites(), Site::Empty);
  for (int j = 1; j <= cfg.Ly; ++j)
    for (int i = 1; i <= cfg.Lx; ++i)
      if (cfg.is_obstacle(i, j)) st.sites[cfg.index(i, j)] = Site::Obstacle;
  return st;
}

void put(LatticeState& st, const LatticeConfig& cfg, int i, int j, Site s) {
  st.sites[cfg.index(i, j)] = s;
  if (s == Site::A) st.n_A = ++st.n_A0;
  if (s == Site::U) st.n_U = ++st.n_U0;
}

}  // namespace

TEST_CASE("sum tree sampling and updates") {
  SumTree t(5);
  t.set(0, 1.0);
  t.set(2, 2.0);
  t.set(4, 1.0);
  CHECK(t.total() == 4.0);
  CHECK(t.find(0.5) == 0);
  CHECK(t.find(1.0) == 2);
  CHECK(t.find(2.99) == 2);
  CHECK(t.find(3.5) == 4);
  CHECK(t.find(3.999999999) == 4);
  t.set(2, 0.0);
  CHECK(t.total() == 2.0);
  CHECK(t.find(1.0) == 4);
  CHECK(t.recompute_total() == 2.0);
}

TEST_CASE("U hop rates") {
  auto cfg = small(6, 6);
  auto st = empty_state(cfg);
  put(st, cfg, 2, 2, Site::U);
  put(st, cfg, 3, 2, Site::A);
  CHECK(rate_U({2, 2}, {2, 3}, st, cfg) == 1.0);
  CHECK(rate_U({2, 2}, {3, 2}, st, cfg) == 0.0);
  CHECK(rate_U({4, 4}, {4, 5}, st, cfg) == 0.0);
}

TEST_CASE("A hop rates") {
  LatticeConfig cfg = small(20, 20);
  cfg.i_ex = 10;
  auto st = empty_state(cfg);
  put(st, cfg, 3, 5, Site::A);
  CHECK(rate_A({3, 5}, {3, 6}, st, cfg) == doctest::Approx(1.1));
  CHECK(rate_A({3, 5}, {3, 4}, st, cfg) == 0.0);
  CHECK(rate_A({3, 5}, {4, 5}, st, cfg) == doctest::Approx(1.1));
  CHECK(rate_A({3, 5}, {2, 5}, st, cfg) == 1.0);
  put(st, cfg, 15, 5, Site::A);
  CHECK(rate_A({15, 5}, {14, 5}, st, cfg) == doctest::Approx(1.1));
  CHECK(rate_A({15, 5}, {16, 5}, st, cfg) == 1.0);
  put(st, cfg, 11, 7, Site::A);
  CHECK(rate_A({11, 7}, {12, 7}, st, cfg) == 0.0);
  CHECK(rate_A({11, 7}, {10, 7}, st, cfg) == 0.0);
  CHECK(rate_A({11, 7}, {11, 8}, st, cfg) == doctest::Approx(1.1));
  put(st, cfg, 3, 6, Site::U);
  CHECK(rate_A({3, 5}, {3, 6}, st, cfg) == 0.0);
}

TEST_CASE("exit rates") {
  auto cfg = small(6, 6);  // door columns 2..4 in row 6
  auto st = empty_state(cfg);
  put(st, cfg, 2, 6, Site::U);
  put(st, cfg, 3, 6, Site::A);
  CHECK(exit_rate({2, 6}, st, cfg) == 1.0);
  CHECK(exit_rate({3, 6}, st, cfg) == doctest::Approx(1.1));
  CHECK(exit_rate({4, 6}, st, cfg) == 0.0);
}

TEST_CASE("zero drift rate table on 6x6") {
  LatticeConfig cfg = small(6, 6, 0.0);
  cfg.i_ex = 3;  // door columns 3, 4, 5 of the top row
  // Total single-particle rate per site, top row first, written out by hand.
  const std::array<std::array<int, 6>, 6> table_A{{{1, 2, 1, 1, 1, 1},
                                                   {2, 3, 1, 1, 1, 2},
                                                   {2, 3, 1, 1, 1, 2},
                                                   {2, 3, 1, 1, 1, 2},
                                                   {2, 3, 1, 1, 1, 2},
                                                   {2, 3, 1, 1, 1, 2}}};
  const std::array<std::array<int, 6>, 6> table_U{{{2, 3, 4, 4, 4, 2},
                                                   {3, 4, 4, 4, 4, 3},
                                                   {3, 4, 4, 4, 4, 3},
                                                   {3, 4, 4, 4, 4, 3},
                                                   {3, 4, 4, 4, 4, 3},
                                                   {2, 3, 3, 3, 3, 2}}};
  for (int j = 1; j <= 6; ++j)
    for (int i = 1; i <= 6; ++i)
      for (Site sp : {Site::A, Site::U}) {
        auto st = empty_state(cfg);
        put(st, cfg, i, j, sp);
        double total = 0.0;
        for (int m = 0; m < kMoves; ++m) total += transition_rate(st, cfg, cfg.index(i, j), static_cast<Move>(m));
        const auto& table = sp == Site::A ? table_A : table_U;
        CAPTURE(i);
        CAPTURE(j);
        CHECK(total == table[static_cast<std::size_t>(6 - j)][static_cast<std::size_t>(i - 1)]);
      }
}

TEST_CASE("obstacle bonds carry no rate") {
  LatticeConfig cfg = small(8, 8);
  cfg.obstacles.push_back({4, 3, 5, 4});
  auto st = empty_state(cfg);
  put(st, cfg, 3, 3, Site::U);
  put(st, cfg, 4, 2, Site::A);
  CHECK(rate_U({3, 3}, {4, 3}, st, cfg) == 0.0);
  CHECK(rate_A({4, 2}, {4, 3}, st, cfg) == 0.0);
  CHECK(transition_rate(st, cfg, cfg.index(4, 3), Move::Up) == 0.0);
}

TEST_CASE("initial placement") {
  LatticeConfig cfg = small(50, 50);
  cfg.rho0 = 0.985;
  const auto st = init_lattice(cfg);
  CHECK(st.n_A + st.n_U == 2462);
  CHECK(st.n_A == 1231);
  CHECK(st.n_U == 1231);
  CHECK(init_lattice(cfg).sites == st.sites);
  cfg.seed = 2;
  CHECK(init_lattice(cfg).sites != st.sites);
  cfg.rho0 = 0.0;
  const auto none = init_lattice(cfg);
  CHECK(none.n_A + none.n_U == 0);
  LatticeConfig tight = small(4, 4);
  tight.n_active = 10;
  tight.n_unaware = 7;
  CHECK_THROWS_AS(init_lattice(tight), Overfull);
}

TEST_CASE("config reading and validation") {
  const auto doc = ConfigDocument::parse(
      "[lattice]\nLx = 20\nLy = 10\nw_ex = 2\neps_x = 0.2\neps_y = 0.3\nrho0 = 0.5\n"
      "obstacle = 5 2 6 3\nseed_ignored = 1\n");
  const auto cfg = build_lattice_config(doc);
  CHECK(cfg.Lx == 20);
  CHECK(cfg.i_ex == 9);
  CHECK(cfg.door_hi() == 11);
  CHECK(cfg.eps_y == 0.3);
  REQUIRE(cfg.obstacles.size() == 1);
  CHECK(cfg.is_obstacle(6, 3));
  const auto half_open = build_lattice_config(
      ConfigDocument::parse("[lattice]\nLx = 20\nLy = 10\nw_ex = 2\ndoor_inclusive = false\n"));
  CHECK(half_open.door_hi() - half_open.door_lo() + 1 == 2);
  CHECK_THROWS_AS(build_lattice_config(ConfigDocument::parse("[lattice]\nLx = 5\ni_ex = 4\nw_ex = 2\n")),
                  GeometryViolation);
  CHECK_THROWS_AS(
      build_lattice_config(ConfigDocument::parse("[lattice]\nLx = 6\nLy = 6\ni_ex = 2\nobstacle = 3 6 3 6\n")),
      GeometryViolation);
  CHECK_THROWS_AS(build_lattice_config(ConfigDocument::parse("[lattice]\nrho0 = 1.5\n")), ConfigError);
}

TEST_CASE("single U in the interior picks each direction evenly") {
  auto cfg = small(11, 11);
  std::array<int, kMoves> counts{};
  const int draws = 40000;
  double dt_sum = 0.0;
  for (int k = 0; k < draws; ++k) {
    cfg.seed = static_cast<std::uint64_t>(k) + 1;
    auto st = empty_state(cfg);
    put(st, cfg, 6, 5, Site::U);
    KmcEngine engine(cfg, st);
    CHECK(engine.total_rate() == 4.0);
    const auto ev = engine.step();
    ++counts[static_cast<std::size_t>(ev.move)];
    dt_sum += ev.dt;
  }
  for (int m = 0; m < 4; ++m) {
    // Binomial(draws, 1/4) standard deviation.
    CHECK(std::abs(counts[static_cast<std::size_t>(m)] - draws / 4.0) <= 4 * std::sqrt(draws * 0.25 * 0.75));
  }
  CHECK(counts[4] == 0);
  CHECK(dt_sum / draws == doctest::Approx(0.25).epsilon(4 * 1.0 / std::sqrt(draws)));
}

TEST_CASE("single A on a door site exits at rate 1 + eps_y") {
  auto cfg = small(9, 9, 0.1);
  std::vector<double> dts;
  for (int k = 0; k < 100000; ++k) {
    cfg.seed = static_cast<std::uint64_t>(k) + 1;
    auto st = empty_state(cfg);
    put(st, cfg, cfg.i_ex + 1, cfg.Ly, Site::A);
    KmcEngine engine(cfg, st);
    CHECK(engine.total_rate() == doctest::Approx(1.1));
    const auto ev = engine.step();
    if (ev.move != Move::Exit) FAIL("unexpected move");
    dts.push_back(ev.dt);
  }
  const auto m = oracle::moments(dts);
  CHECK(std::abs(m.mean - 1.0 / 1.1) <= 3 * m.standard_error());
}

TEST_CASE("catalog matches a rebuild after every prefix of events") {
  LatticeConfig cfg = small(9, 7);
  cfg.obstacles.push_back({3, 2, 4, 3});
  cfg.rho0 = 0.7;
  cfg.seed = 4;
  KmcEngine engine(cfg, init_lattice(cfg));
  for (int k = 0; k < 3000 && engine.total_rate() > 0.0; ++k) {
    engine.step();
    REQUIRE(engine.catalog_consistent());
    REQUIRE(engine.state_consistent());
  }
}

TEST_CASE("counts only change by single exits") {
  LatticeConfig cfg = small(12, 12);
  cfg.rho0 = 0.9;
  cfg.seed = 8;
  KmcEngine engine(cfg, init_lattice(cfg));
  int before = engine.state().n_A + engine.state().n_U;
  while (engine.state().n_A + engine.state().n_U > 0) {
    const auto ev = engine.step();
    const int now = engine.state().n_A + engine.state().n_U;
    CHECK(before - now == (ev.move == Move::Exit ? 1 : 0));
    before = now;
  }
  CHECK_THROWS_AS(engine.step(), EmptySystem);
}

TEST_CASE("run_lattice stop conditions") {
  SUBCASE("empty lattice gives an empty series") {
    auto cfg = small(10, 10);
    const auto run = run_lattice(cfg, {});
    CHECK(run.series.empty());
    CHECK(run.events == 0);
  }
  SUBCASE("a lone U eventually leaves") {
    auto cfg = small(10, 10);
    cfg.n_active = 0;
    cfg.n_unaware = 1;
    const auto run = run_lattice(cfg, {});
    CHECK(run.final_state.n_U == 0);
    CHECK(run.exit_times_U.size() == 1);
    CHECK(run.series.back().n_U == 0);
  }
  SUBCASE("samples are geometric and counts never increase") {
    auto cfg = small(16, 16);
    cfg.rho0 = 0.5;
    cfg.sample_t0 = 0.5;
    cfg.sample_gamma = 1.2;
    const auto run = run_lattice(cfg, {50.0, std::nullopt, true});
    REQUIRE(run.series.size() > 5);
    CHECK(run.series[0].t == 0.5);
    CHECK(run.series[1].t == doctest::Approx(0.6));
    CHECK(run.series.back().t == 50.0);
    for (std::size_t k = 1; k < run.series.size(); ++k) {
      CHECK(run.series[k].n_A <= run.series[k - 1].n_A);
      CHECK(run.series[k].n_U <= run.series[k - 1].n_U);
    }
  }
  SUBCASE("event cap") {
    auto cfg = small(16, 16);
    cfg.rho0 = 0.5;
    const auto run = run_lattice(cfg, {std::nullopt, 1000, true});
    CHECK(run.events == 1000);
  }
}

TEST_CASE("lone U random walk has mean squared displacement 4 t") {
  auto cfg = small(41, 41);
  const double T = 10.0;
  const int trials = 10000;
  std::vector<double> r2;
  r2.reserve(trials);
  for (int k = 0; k < trials; ++k) {
    cfg.seed = static_cast<std::uint64_t>(k) + 17;
    auto st = empty_state(cfg);
    put(st, cfg, 21, 21, Site::U);
    KmcEngine engine(cfg, st);
    int i = 21, j = 21;
    while (engine.state().t + engine.draw_dt() <= T) {
      const auto ev = engine.step();
      switch (ev.move) {
        case Move::Right: ++i; break;
        case Move::Left: --i; break;
        case Move::Up: ++j; break;
        case Move::Down: --j; break;
        case Move::Exit: FAIL("walker reached the door"); break;
      }
    }
    r2.push_back(double(i - 21) * (i - 21) + double(j - 21) * (j - 21));
  }
  const auto m = oracle::moments(r2);
  CHECK(m.mean == doctest::Approx(4.0 * T).epsilon(0.05));
}

TEST_CASE("occupancy dump") {
  LatticeConfig cfg = small(4, 3);
  cfg.i_ex = 1;
  cfg.obstacles.push_back({4, 1, 4, 1});
  auto st = empty_state(cfg);
  put(st, cfg, 1, 3, Site::A);
  put(st, cfg, 2, 1, Site::U);
  std::ostringstream out;
  write_occupancy(out, cfg, st);
  CHECK(out.str() == "A...\n....\n.U.#\n");
}
