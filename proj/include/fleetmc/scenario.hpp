#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fleetmc/state.hpp"

namespace fleetmc {

// Malformed scenario or trace document (bad syntax, unknown key,
// duplicate declaration). CLI exit code 2.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Well-formed document whose content violates a scenario constraint.
// CLI exit code 3.
struct ScenarioInvalid : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SchedulerPolicy { uniform, failure_eager, recovery_eager };

inline const char* to_string(SchedulerPolicy p) {
  switch (p) {
    case SchedulerPolicy::uniform: return "uniform";
    case SchedulerPolicy::failure_eager: return "failure-eager";
    case SchedulerPolicy::recovery_eager: return "recovery-eager";
  }
  return "?";
}

enum class GuardVariant { pr8_strict, pr8_literal };

inline const char* to_string(GuardVariant g) {
  return g == GuardVariant::pr8_strict ? "pr8-strict" : "pr8-literal";
}

// Test instrumentation: deliberately broken machine builds used by the
// checker's own negative tests and the shipped defect demos.
enum class InjectBug { none, drop_send_robots, constant_variant };

inline const char* to_string(InjectBug b) {
  switch (b) {
    case InjectBug::none: return "none";
    case InjectBug::drop_send_robots: return "drop-send-robots";
    case InjectBug::constant_variant: return "constant-variant";
  }
  return "?";
}

struct FaultEntry {
  bool is_prob = false;
  int step = 0;        // 1-based, when is_prob is false
  double prob = 0.0;   // per-step probability, when is_prob is true
  AgentKind kind = AgentKind::robot;
  int agent = 0;       // index into robots/stations
};

// Fault budgets bound the failure dimension of the state space; schedule
// entries drive the failure-eager simulator policy.
struct FaultSchedule {
  std::vector<FaultEntry> entries;
  int robot_budget = 0;
  int station_budget = 0;
};

// Instance sizing, initial allocation, fault schedule and run knobs.
// Station and robot ids are kept sorted lexicographically; all indices
// elsewhere in the library refer to these tables.
struct Scenario {
  int zones = 0;
  int sectors = 0;
  std::vector<std::string> stations;
  std::vector<std::string> robots;
  std::vector<int> responsible;  // per zone: station index
  std::vector<int> attached;     // per robot: station index or kDetached
  FaultSchedule faults;
  SchedulerPolicy policy = SchedulerPolicy::uniform;
  std::vector<std::uint64_t> seeds{1};
  GuardVariant guard_variant = GuardVariant::pr8_strict;
  InjectBug inject = InjectBug::none;
  std::size_t max_states = 1000000;
  std::size_t max_depth = 1000000;
  int max_steps = 1000;
  int fairness_bound = 0;  // 0 = candidate-instance count of the machine
  int workers = 1;

  int station_index(const std::string& id) const {
    auto it = std::lower_bound(stations.begin(), stations.end(), id);
    if (it == stations.end() || *it != id) return -1;
    return static_cast<int>(it - stations.begin());
  }
  int robot_index(const std::string& id) const {
    auto it = std::lower_bound(robots.begin(), robots.end(), id);
    if (it == robots.end() || *it != id) return -1;
    return static_cast<int>(it - robots.begin());
  }
};

namespace detail {

inline bool valid_id(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' &&
        c != '.')
      return false;
  return true;
}

inline long parse_long(const std::string& tok, const std::string& where) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(tok, &pos);
  } catch (const std::exception&) {
    throw ParseError(where + ": expected integer, got '" + tok + "'");
  }
  if (pos != tok.size())
    throw ParseError(where + ": expected integer, got '" + tok + "'");
  return v;
}

inline double parse_double(const std::string& tok, const std::string& where) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw ParseError(where + ": expected number, got '" + tok + "'");
  }
  if (pos != tok.size())
    throw ParseError(where + ": expected number, got '" + tok + "'");
  return v;
}

}  // namespace detail

// Small-scope caps; the checker enumerates robot subsets, so sizes well
// beyond these are pointless here anyway.
inline constexpr int kMaxZones = 64;
inline constexpr int kMaxSectors = 64;
inline constexpr int kMaxStations = 16;
inline constexpr int kMaxRobots = 16;

// Validates cross-field constraints. Throws ScenarioInvalid. Called by
// parse_scenario, and usable on hand-built scenarios in tests.
inline void validate_scenario(const Scenario& sc) {
  if (sc.zones < 1) throw ScenarioInvalid("zones must be >= 1");
  if (sc.sectors < 1) throw ScenarioInvalid("sectors-per-zone must be >= 1");
  if (sc.zones > kMaxZones || sc.sectors > kMaxSectors)
    throw ScenarioInvalid("instance too large for small-scope checking");
  if (sc.stations.empty()) throw ScenarioInvalid("at least one station required");
  if (sc.robots.empty()) throw ScenarioInvalid("at least one robot required");
  if (static_cast<int>(sc.stations.size()) > kMaxStations ||
      static_cast<int>(sc.robots.size()) > kMaxRobots)
    throw ScenarioInvalid("instance too large for small-scope checking");
  if (!std::is_sorted(sc.stations.begin(), sc.stations.end()) ||
      std::adjacent_find(sc.stations.begin(), sc.stations.end()) !=
          sc.stations.end())
    throw ScenarioInvalid("station ids must be unique");
  if (!std::is_sorted(sc.robots.begin(), sc.robots.end()) ||
      std::adjacent_find(sc.robots.begin(), sc.robots.end()) != sc.robots.end())
    throw ScenarioInvalid("robot ids must be unique");
  for (const std::string& s : sc.stations)
    if (sc.robot_index(s) >= 0)
      throw ScenarioInvalid("id used for both a station and a robot: " + s);

  if (static_cast<int>(sc.responsible.size()) != sc.zones)
    throw ScenarioInvalid("every zone needs a responsible station");
  for (int z = 1; z <= sc.zones; ++z) {
    int bs = sc.responsible[z - 1];
    if (bs < 0 || bs >= static_cast<int>(sc.stations.size()))
      throw ScenarioInvalid("zone " + std::to_string(z) +
                            " has no declared responsible station");
  }
  if (sc.attached.size() != sc.robots.size())
    throw ScenarioInvalid("attached table size mismatch");
  for (std::size_t r = 0; r < sc.attached.size(); ++r) {
    int bs = sc.attached[r];
    if (bs == kDetached) continue;
    if (bs < 0 || bs >= static_cast<int>(sc.stations.size()))
      throw ScenarioInvalid("robot " + sc.robots[r] +
                            " attached to an undeclared station");
  }

  int nr = static_cast<int>(sc.robots.size());
  int ns = static_cast<int>(sc.stations.size());
  if (sc.faults.robot_budget < 0 || sc.faults.robot_budget > nr - 1)
    throw ScenarioInvalid("robot fault budget must be in 0..robots-1");
  if (sc.faults.station_budget < 0 || sc.faults.station_budget > ns - 1)
    throw ScenarioInvalid("station fault budget must be in 0..stations-1");
  for (const FaultEntry& e : sc.faults.entries) {
    int limit = e.kind == AgentKind::robot ? nr : ns;
    if (e.agent < 0 || e.agent >= limit)
      throw ScenarioInvalid("fault entry references an undeclared agent");
    if (!e.is_prob && e.step < 1)
      throw ScenarioInvalid("fault step must be >= 1");
    if (e.is_prob && (e.prob < 0.0 || e.prob > 1.0))
      throw ScenarioInvalid("fault probability must be in [0,1]");
  }
  if (sc.seeds.empty()) throw ScenarioInvalid("at least one seed required");
  if (sc.max_steps < 1) throw ScenarioInvalid("max-steps must be >= 1");
  if (sc.max_states < 1) throw ScenarioInvalid("max-states must be >= 1");
  if (sc.max_depth < 1) throw ScenarioInvalid("max-depth must be >= 1");
  if (sc.fairness_bound < 0) throw ScenarioInvalid("fairness-bound must be >= 0");
  if (sc.workers < 1) throw ScenarioInvalid("workers must be >= 1");
}

// Parses the key-value scenario format. Strict: unknown keys, duplicate
// declarations and type errors are ParseErrors; constraint violations are
// ScenarioInvalid. `#` starts a comment.
inline Scenario parse_scenario(std::istream& in) {
  using detail::parse_double;
  using detail::parse_long;
  using detail::valid_id;

  Scenario sc;
  sc.seeds.clear();

  std::map<std::string, bool> seen;  // scalar keys already set
  std::map<int, std::string> responsible_decl;       // zone -> station id
  std::map<std::string, std::string> attached_decl;  // robot id -> station id
  std::vector<std::pair<FaultEntry, std::string>> fault_decl;  // entry, agent id
  bool version_seen = false;

  auto once = [&seen](const std::string& key, int line) {
    if (seen[key])
      throw ParseError("line " + std::to_string(line) + ": duplicate key '" +
                       key + "'");
    seen[key] = true;
  };

  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string where = "line " + std::to_string(lineno);
    if (auto hash = raw.find('#'); hash != std::string::npos)
      raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string& key = tok[0];
    auto need = [&](std::size_t n) {
      if (tok.size() != n + 1)
        throw ParseError(where + ": key '" + key + "' takes " +
                         std::to_string(n) + " value(s)");
    };

    if (!version_seen) {
      if (key != "format-version")
        throw ParseError(where + ": document must start with format-version");
      need(1);
      if (tok[1] != "1")
        throw ParseError(where + ": unsupported format-version " + tok[1]);
      version_seen = true;
      continue;
    }

    if (key == "format-version") {
      throw ParseError(where + ": duplicate key 'format-version'");
    } else if (key == "zones") {
      once(key, lineno);
      need(1);
      sc.zones = static_cast<int>(parse_long(tok[1], where));
    } else if (key == "sectors-per-zone") {
      once(key, lineno);
      need(1);
      sc.sectors = static_cast<int>(parse_long(tok[1], where));
    } else if (key == "stations" || key == "robots") {
      once(key, lineno);
      if (tok.size() < 2)
        throw ParseError(where + ": '" + key + "' needs at least one id");
      std::vector<std::string> ids(tok.begin() + 1, tok.end());
      for (const std::string& id : ids)
        if (!valid_id(id)) throw ParseError(where + ": bad id '" + id + "'");
      (key == "stations" ? sc.stations : sc.robots) = std::move(ids);
    } else if (key == "responsible") {
      need(2);
      int z = static_cast<int>(parse_long(tok[1], where));
      if (responsible_decl.count(z))
        throw ParseError(where + ": zone " + tok[1] + " declared twice");
      responsible_decl[z] = tok[2];
    } else if (key == "attached") {
      need(2);
      if (attached_decl.count(tok[1]))
        throw ParseError(where + ": robot " + tok[1] + " declared twice");
      attached_decl[tok[1]] = tok[2];
    } else if (key == "policy") {
      once(key, lineno);
      need(1);
      if (tok[1] == "uniform") sc.policy = SchedulerPolicy::uniform;
      else if (tok[1] == "failure-eager") sc.policy = SchedulerPolicy::failure_eager;
      else if (tok[1] == "recovery-eager") sc.policy = SchedulerPolicy::recovery_eager;
      else throw ParseError(where + ": unknown policy '" + tok[1] + "'");
    } else if (key == "seed") {
      once("seed/seeds", lineno);
      need(1);
      sc.seeds = {static_cast<std::uint64_t>(parse_long(tok[1], where))};
    } else if (key == "seeds") {
      once("seed/seeds", lineno);
      if (tok.size() < 2) throw ParseError(where + ": 'seeds' needs values");
      for (std::size_t i = 1; i < tok.size(); ++i)
        sc.seeds.push_back(static_cast<std::uint64_t>(parse_long(tok[i], where)));
    } else if (key == "guard-variant") {
      once(key, lineno);
      need(1);
      if (tok[1] == "pr8-strict") sc.guard_variant = GuardVariant::pr8_strict;
      else if (tok[1] == "pr8-literal") sc.guard_variant = GuardVariant::pr8_literal;
      else throw ParseError(where + ": unknown guard-variant '" + tok[1] + "'");
    } else if (key == "inject-bug") {
      once(key, lineno);
      need(1);
      if (tok[1] == "none") sc.inject = InjectBug::none;
      else if (tok[1] == "drop-send-robots") sc.inject = InjectBug::drop_send_robots;
      else if (tok[1] == "constant-variant") sc.inject = InjectBug::constant_variant;
      else throw ParseError(where + ": unknown inject-bug '" + tok[1] + "'");
    } else if (key == "fault-budget-robots") {
      once(key, lineno);
      need(1);
      sc.faults.robot_budget = static_cast<int>(parse_long(tok[1], where));
    } else if (key == "fault-budget-stations") {
      once(key, lineno);
      need(1);
      sc.faults.station_budget = static_cast<int>(parse_long(tok[1], where));
    } else if (key == "fault-at-step" || key == "fault-prob") {
      need(3);
      FaultEntry e;
      e.is_prob = key == "fault-prob";
      if (e.is_prob) e.prob = parse_double(tok[1], where);
      else e.step = static_cast<int>(parse_long(tok[1], where));
      if (tok[2] == "robot") e.kind = AgentKind::robot;
      else if (tok[2] == "station") e.kind = AgentKind::station;
      else throw ParseError(where + ": fault kind must be robot or station");
      fault_decl.emplace_back(e, tok[3]);
    } else if (key == "max-steps") {
      once(key, lineno);
      need(1);
      sc.max_steps = static_cast<int>(parse_long(tok[1], where));
    } else if (key == "max-states") {
      once(key, lineno);
      need(1);
      sc.max_states = static_cast<std::size_t>(parse_long(tok[1], where));
    } else if (key == "max-depth") {
      once(key, lineno);
      need(1);
      sc.max_depth = static_cast<std::size_t>(parse_long(tok[1], where));
    } else if (key == "fairness-bound") {
      once(key, lineno);
      need(1);
      sc.fairness_bound = static_cast<int>(parse_long(tok[1], where));
    } else if (key == "workers") {
      once(key, lineno);
      need(1);
      sc.workers = static_cast<int>(parse_long(tok[1], where));
    } else {
      throw ParseError(where + ": unknown key '" + key + "'");
    }
  }
  if (!version_seen) throw ParseError("empty document: format-version missing");

  // Canonical id order: indices are lexicographic ranks.
  std::sort(sc.stations.begin(), sc.stations.end());
  std::sort(sc.robots.begin(), sc.robots.end());

  sc.responsible.assign(sc.zones > 0 ? sc.zones : 0, -1);
  sc.attached.assign(sc.robots.size(), kDetached);
  for (auto& [zone, station] : responsible_decl) {
    if (zone < 1 || zone > sc.zones)
      throw ScenarioInvalid("responsible declares unknown zone " +
                            std::to_string(zone));
    int bs = sc.station_index(station);
    if (bs < 0)
      throw ScenarioInvalid("zone " + std::to_string(zone) +
                            " assigned to undeclared station " + station);
    sc.responsible[zone - 1] = bs;
  }
  for (auto& [robot, station] : attached_decl) {
    int r = sc.robot_index(robot);
    if (r < 0) throw ScenarioInvalid("attached declares unknown robot " + robot);
    int bs = sc.station_index(station);
    if (bs < 0)
      throw ScenarioInvalid("robot " + robot + " attached to undeclared station " +
                            station);
    sc.attached[r] = bs;
  }
  for (auto& [entry, id] : fault_decl) {
    FaultEntry e = entry;
    e.agent = e.kind == AgentKind::robot ? sc.robot_index(id) : sc.station_index(id);
    if (e.agent < 0)
      throw ScenarioInvalid("fault entry references undeclared agent " + id);
    sc.faults.entries.push_back(e);
  }
  if (sc.seeds.empty()) sc.seeds = {1};

  validate_scenario(sc);
  return sc;
}

inline Scenario parse_scenario(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

// Initial state: nothing cleaned, every station holds a complete
// all-incompl map, no messages, no assignments, everyone healthy,
// counter = n*k.
inline SystemState initial_state(const Scenario& sc) {
  validate_scenario(sc);
  SystemState st;
  st.zone_count = sc.zones;
  st.sector_count = sc.sectors;
  st.territory.assign(static_cast<std::size_t>(sc.zones) * sc.sectors, kIncompl);
  st.responsible.assign(sc.responsible.begin(), sc.responsible.end());
  st.attached.assign(sc.attached.begin(), sc.attached.end());
  st.local_map.assign(sc.stations.size() * sc.zones * sc.sectors, kIncompl);
  st.assigned_zone.assign(sc.robots.size(), kUnassigned);
  st.assigned_sector.assign(sc.robots.size(), kUnassigned);
  st.active.assign(sc.robots.size(), 1);
  st.operating.assign(sc.stations.size(), 1);
  st.counter = static_cast<std::int64_t>(sc.zones) * sc.sectors;
  return st;
}

}  // namespace fleetmc
