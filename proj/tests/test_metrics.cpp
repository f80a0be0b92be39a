#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "evac/error.hpp"
#include "evac/metrics.hpp"

using namespace evac;

TEST_CASE("particle current") {
  CHECK(particle_current(100, 60, 20.0) == 2.0);
  CHECK(particle_current(10, 10, 3.0) == 0.0);
  CHECK_THROWS_AS(particle_current(1, 0, 0.0), ZeroTime);
}

TEST_CASE("exit time curve") {
  CHECK(exit_time_curve({}).final_value() == 0);
  CHECK(exit_time_curve({})(1e9) == 0);
  const std::vector<ExitEvent> ev{{0, Species::Active, 1.0}, {2, Species::Passive, 2.0},
                                  {1, Species::Active, 3.0}};
  const auto c = exit_time_curve(ev);
  CHECK(c(0.999) == 0);
  CHECK(c(1.0) == 1);  // right-continuous
  CHECK(c(2.5) == 2);
  CHECK(c(3.0) == 3);
  const auto a = exit_time_curve(ev, Species::Active);
  const auto p = exit_time_curve(ev, Species::Passive);
  for (double t : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0}) CHECK(a(t) + p(t) == c(t));
  const std::vector<ExitEvent> unsorted{{0, Species::Active, 2.0}, {1, Species::Active, 1.0}};
  CHECK_THROWS_AS(exit_time_curve(unsorted), std::invalid_argument);
}

TEST_CASE("exit curve end value matches the crowd's exited flags") {
  CrowdState crowd;
  for (int id = 0; id < 6; ++id) {
    AgentState a;
    a.id = id;
    a.species = id < 3 ? Species::Active : Species::Passive;
    if (id % 2 == 0) {
      a.exited = true;
      a.exit_time = 10.0 - id;
    }
    crowd.agents.push_back(a);
  }
  auto rec = make_run_record(crowd, 20.0, ScalarField(2, 2, 1.0), 1, "h");
  std::sort(rec.exits.begin(), rec.exits.end(), [](auto& x, auto& y) { return x.t < y.t; });
  CHECK(exit_time_curve(rec.exits)(kInf) == 3);
}

TEST_CASE("cumulative discomfort") {
  const std::vector<ScalarField> zero(5, ScalarField(3, 2, 1.0, 0.0));
  const auto z = cumulative_discomfort(zero, 0.1);
  for (double v : z.values()) CHECK(v == 0.0);
  const std::vector<ScalarField> constant(40, ScalarField(3, 2, 1.0, 2.5));
  const auto c = cumulative_discomfort(constant, 0.25);
  for (double v : c.values()) CHECK(v == doctest::Approx(2.5 * 10.0));

  // Refinement: p(t) = t sampled at dt and dt/2 over [0, T). The rectangle
  // sums differ from each other by at most the rectangle-vs-trapezoid
  // bound |p(T) - p(0)| dt / 2.
  const double T = 4.0;
  auto history = [&](double dt) {
    std::vector<ScalarField> h;
    for (int k = 0; k * dt < T - 1e-12; ++k) h.emplace_back(1, 1, 1.0, k * dt);
    return h;
  };
  const double coarse = cumulative_discomfort(history(0.2), 0.2)[0];
  const double fine = cumulative_discomfort(history(0.1), 0.1)[0];
  CHECK(std::abs(coarse - fine) <= T * 0.2 / 2 + 1e-12);

  ScalarField f(2, 1, 1.0);
  f[1] = 99.0;
  const auto lv = log_view(f);
  CHECK(lv[0] == 0.0);
  CHECK(lv[1] == doctest::Approx(2.0));
}

TEST_CASE("summaries") {
  SUBCASE("zero agents") {
    RunRecord r;
    r.t_end = 10.0;
    const auto s = summarize(r);
    CHECK(!s.all.mean);
    CHECK(!s.t95);
    std::ostringstream out;
    write_summary(out, s, r);
    CHECK(out.str().find("nan") == std::string::npos);
    CHECK(out.str().find("no data") != std::string::npos);
  }
  SUBCASE("everyone exits at t = 5") {
    RunRecord r;
    r.n_active = 2;
    r.n_passive = 2;
    r.t_end = 9.0;
    for (int id = 0; id < 4; ++id) r.exits.push_back({id, id < 2 ? Species::Active : Species::Passive, 5.0});
    const auto s = summarize(r);
    CHECK(*s.all.mean == 5.0);
    CHECK(*s.all.median == 5.0);
    CHECK(*s.t95 == 5.0);
    CHECK(s.stragglers == 0);
  }
  SUBCASE("censored agents count as t_end") {
    RunRecord r;
    r.n_passive = 3;
    r.t_end = 30.0;
    r.exits.push_back({0, Species::Passive, 6.0});
    const auto s = summarize(r);
    CHECK(*s.passive.mean == doctest::Approx((6.0 + 60.0) / 3.0));
    CHECK(*s.passive.median == 30.0);
    CHECK(s.passive.censored == 2);
    CHECK(s.stragglers == 2);
  }
}

TEST_CASE("stage detection") {
  std::vector<double> three;
  for (int k = 0; k < 70; ++k) three.push_back(5.0 + k);
  for (int k = 0; k < 30; ++k) three.push_back(400.0 + 3 * k);
  const auto r = detect_stages(three);
  CHECK(r.detected);
  CHECK(r.early_fraction == doctest::Approx(0.7));
  CHECK(*r.stage1_end == 74.0);
  CHECK(*r.stage2_end == 400.0);
  std::vector<double> smooth;
  for (int k = 0; k < 100; ++k) smooth.push_back(1.0 + k);
  CHECK(!detect_stages(smooth).detected);
}

TEST_CASE("lattice series currents are consistent with the counts") {
  const std::vector<LatticeSample> series{{1.0, 10, 12}, {2.0, 8, 11}, {4.0, 3, 9}, {8.0, 0, 2}};
  std::stringstream ss;
  write_lattice_series(ss, series, 10, 12);
  std::string line;
  std::getline(ss, line);
  CHECK(line == "t,N_A,N_U,J_A,J_U");
  while (std::getline(ss, line)) {
    double t, ja, ju;
    int na, nu;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%d,%d,%lf,%lf", &t, &na, &nu, &ja, &ju) == 5);
    CHECK(ja * t + na == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(ju * t + nu == doctest::Approx(12.0).epsilon(1e-14));
    CHECK(ja == (10.0 - na) / t);
  }
}

TEST_CASE("evacuation time interpolates between samples") {
  const std::vector<LatticeSample> series{{1.0, 10, 0}, {2.0, 6, 0}, {4.0, 2, 0}, {5.0, 0, 0}};
  CHECK(*evacuation_time(series, 10, Tally::A, 0.5) == doctest::Approx(2.0 + 2.0 * (6 - 5) / 4.0));
  CHECK(*evacuation_time(series, 10, Tally::A, 1.0) == 5.0);
  CHECK(!evacuation_time(std::span(series).first(2), 10, Tally::A, 0.9));
  CHECK(*evacuation_time(series, 0, Tally::U, 0.99) == 0.0);
}
