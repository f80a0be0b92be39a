#pragma once

#include <string>

#include "evac/config.hpp"
#include "evac/crowd.hpp"
#include "evac/geometry.hpp"
#include "evac/potential.hpp"
#include "evac/smoke.hpp"

namespace testing {

inline evac::Scenario scenario_from(const std::string& text) {
  return evac::build_scenario(evac::ConfigDocument::parse(text));
}

/// Open w x hgt box with the whole right wall as exit.
inline std::string box(double w, double hgt, double h, const std::string& extra = "") {
  return "[domain]\nwidth = " + std::to_string(w) + "\nheight = " + std::to_string(hgt) +
         "\nh = " + std::to_string(h) + "\n[exits]\nsegment = " + std::to_string(w) + " 0 " +
         std::to_string(w) + " " + std::to_string(hgt) + "\n" + extra;
}

inline evac::AgentState agent(int id, evac::Species sp, evac::Vec2 x, evac::Vec2 v = {}) {
  evac::AgentState a;
  a.id = id;
  a.species = sp;
  a.position = x;
  a.velocity = v;
  return a;
}

// Everything a step needs for a scenario, kept alive together.
struct World {
  evac::Scenario scenario;
  evac::GridMask mask;
  evac::ScalarField fire;
  evac::Potentials potentials;
  evac::ScalarField p;
  evac::ScalarField smoke;
  evac::CrowdParams params;

  explicit World(const std::string& text)
      : scenario(testing::scenario_from(text)),
        mask(evac::rasterize(scenario)),
        fire(evac::mollify(evac::fire_field(scenario, mask), scenario.fire.mollify)),
        potentials(evac::build_potentials(scenario, mask, evac::fire_field(scenario, mask))),
        p(mask.make_field(0.0)),
        smoke(mask.make_field(0.0)),
        params(evac::CrowdParams::from_scenario(scenario, mask)) {}

  evac::CrowdEnvironment env() const { return {&mask, &potentials, &p, &smoke, &fire, params}; }
};

}  // namespace testing
