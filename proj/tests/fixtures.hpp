#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "fleetmc/machine.hpp"
#include "fleetmc/scenario.hpp"

namespace fixtures {

inline fleetmc::Scenario load(const std::string& name) {
  std::ifstream in(std::string(SCENARIO_DIR) + "/" + name);
  if (!in) throw std::runtime_error("missing scenario fixture: " + name);
  return fleetmc::parse_scenario(in);
}

// Canonical two-station state used throughout the examples: n=2, k=1,
// stations {B1,B2}, robots {R1,R2}, R1 at B1, R2 at B2, nothing cleaned.
inline fleetmc::Scenario two_zone() { return load("two_zone.scn"); }

inline fleetmc::Scenario smoke() { return load("smoke.scn"); }

inline fleetmc::Scenario two_zone_faults() { return load("two_zone_faults.scn"); }

inline fleetmc::Scenario accept_a() { return load("accept_a.scn"); }

inline fleetmc::Scenario deadlock_demo() { return load("deadlock_demo.scn"); }

inline fleetmc::SystemState sigma0() {
  return fleetmc::initial_state(two_zone());
}

}  // namespace fixtures
