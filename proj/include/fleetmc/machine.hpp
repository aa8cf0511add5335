#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fleetmc/kernel.hpp"
#include "fleetmc/scenario.hpp"
#include "fleetmc/state.hpp"

namespace fleetmc {

enum class Param { station, robot, zone, sector, robot_set, zone_set };

struct EventSig {
  std::string name;
  EventStatus status;
  std::vector<Param> params;
};

// The nine events of the refined model. TaskSuccess and TaskFailure are
// the convergent ones (they decrease counter + card(dom(attached)));
// everything else is anticipated and must not increase the variant.
inline const std::vector<EventSig>& event_signatures() {
  static const std::vector<EventSig> sigs = {
      {"NewTask", EventStatus::anticipated,
       {Param::station, Param::robot, Param::zone, Param::sector}},
      {"TaskSuccess", EventStatus::convergent,
       {Param::station, Param::robot, Param::zone, Param::sector}},
      {"TaskFailure", EventStatus::convergent, {Param::station, Param::robot}},
      {"RobotFailure", EventStatus::anticipated, {Param::robot}},
      {"UpdateMap", EventStatus::anticipated,
       {Param::station, Param::zone, Param::sector}},
      {"ReassignNewBStoRBs", EventStatus::anticipated,
       {Param::station, Param::station, Param::robot_set}},
      {"SendRobotsToBS", EventStatus::anticipated,
       {Param::station, Param::station, Param::robot_set}},
      {"GetAdditionalResponsibility", EventStatus::anticipated,
       {Param::station, Param::station, Param::zone_set, Param::robot_set}},
      {"BaseStationFailure", EventStatus::anticipated, {Param::station}},
  };
  return sigs;
}

inline const EventSig& event_signature(const std::string& name) {
  for (const EventSig& s : event_signatures())
    if (s.name == name) return s;
  throw std::out_of_range("no such event: " + name);
}

namespace detail {

// True when some robot currently claims (z, s).
inline bool sector_taken(const SystemState& st, int z, int s) {
  for (int r = 0; r < st.robot_count(); ++r)
    if (st.assigned_zone[r] == z && st.assigned_sector[r] == s) return true;
  return false;
}

inline bool station_has_incompl_zone(const SystemState& st, int bs) {
  for (int z = 1; z <= st.zone_count; ++z) {
    if (st.responsible[z - 1] != bs) continue;
    for (int s = 1; s <= st.sector_count; ++s)
      if (st.terr(z, s) == kIncompl) return true;
  }
  return false;
}

inline bool station_zones_all_clean(const SystemState& st, int bs) {
  for (int z = 1; z <= st.zone_count; ++z) {
    if (st.responsible[z - 1] != bs) continue;
    for (int s = 1; s <= st.sector_count; ++s)
      if (st.terr(z, s) == kIncompl) return false;
  }
  return true;
}

inline std::vector<int> zones_of(const SystemState& st, int bs) {
  std::vector<int> zs;
  for (int z = 1; z <= st.zone_count; ++z)
    if (st.responsible[z - 1] == bs) zs.push_back(z);
  return zs;
}

inline std::vector<int> active_robots_of(const SystemState& st, int bs) {
  std::vector<int> rs;
  for (int r = 0; r < st.robot_count(); ++r)
    if (st.active[r] && st.attached[r] == bs) rs.push_back(r);
  return rs;
}

inline std::vector<std::vector<int>> all_subsets(int universe_size, int base) {
  std::vector<std::vector<int>> out;
  out.reserve(std::size_t{1} << universe_size);
  for (unsigned mask = 0; mask < (1u << universe_size); ++mask) {
    std::vector<int> s;
    for (int i = 0; i < universe_size; ++i)
      if (mask & (1u << i)) s.push_back(base + i);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace detail

// Builds the fully refined machine for one scenario. Guards close over
// the scenario constants (declared agent sets, fault budgets, guard
// variant); the state carries everything else.
inline Machine<SystemState> build_machine(const Scenario& scenario) {
  using detail::active_robots_of;
  using detail::sector_taken;
  using detail::station_has_incompl_zone;
  using detail::station_zones_all_clean;
  using detail::zones_of;

  auto ctx = std::make_shared<const Scenario>(scenario);
  const int n_stations = static_cast<int>(ctx->stations.size());
  const int n_robots = static_cast<int>(ctx->robots.size());
  const bool pr8_literal = ctx->guard_variant == GuardVariant::pr8_literal;

  // Parameter domains are fixed by the declared sets, so they are
  // materialised once and shared by every call.
  auto station_vals = std::make_shared<std::vector<Value>>();
  for (int b = 0; b < n_stations; ++b) station_vals->push_back(b);
  auto robot_vals = std::make_shared<std::vector<Value>>();
  for (int r = 0; r < n_robots; ++r) robot_vals->push_back(r);
  auto zone_vals = std::make_shared<std::vector<Value>>();
  for (int z = 1; z <= ctx->zones; ++z) zone_vals->push_back(z);
  auto sector_vals = std::make_shared<std::vector<Value>>();
  for (int s = 1; s <= ctx->sectors; ++s) sector_vals->push_back(s);
  auto robot_sets = std::make_shared<std::vector<Value>>();
  for (auto& s : detail::all_subsets(n_robots, 0)) robot_sets->push_back(std::move(s));
  auto zone_sets = std::make_shared<std::vector<Value>>();
  for (auto& s : detail::all_subsets(ctx->zones, 1)) zone_sets->push_back(std::move(s));

  auto domain_for = [&](Param p) {
    std::shared_ptr<std::vector<Value>> vals;
    switch (p) {
      case Param::station: vals = station_vals; break;
      case Param::robot: vals = robot_vals; break;
      case Param::zone: vals = zone_vals; break;
      case Param::sector: vals = sector_vals; break;
      case Param::robot_set: vals = robot_sets; break;
      case Param::zone_set: vals = zone_sets; break;
    }
    return [vals](const SystemState&) { return *vals; };
  };

  Machine<SystemState> m;
  auto add = [&](const std::string& name,
                 std::function<bool(const SystemState&, const Binding&)> guard,
                 std::function<SystemState(const SystemState&, const Binding&)>
                     action) {
    const EventSig& sig = event_signature(name);
    EventDef<SystemState> ev;
    ev.name = sig.name;
    ev.status = sig.status;
    for (Param p : sig.params) ev.param_domains.push_back(domain_for(p));
    ev.guard = std::move(guard);
    ev.action = std::move(action);
    m.events.push_back(std::move(ev));
  };

  // NewTask(bs, rb, z, s): an operating station hands an idle attached
  // robot a sector it knows to be uncleaned and that no robot holds.
  add("NewTask",
      [](const SystemState& st, const Binding& b) {
        int bs = as_int(b[0]), rb = as_int(b[1]), z = as_int(b[2]), s = as_int(b[3]);
        return st.operating[bs] && st.active[rb] && st.attached[rb] == bs &&
               st.responsible[z - 1] == bs &&
               st.assigned_zone[rb] == kUnassigned && st.zone_mapped(bs, z) &&
               st.lmap(bs, z, s) == kIncompl && !sector_taken(st, z, s);
      },
      [](const SystemState& st, const Binding& b) {
        int rb = as_int(b[1]), z = as_int(b[2]), s = as_int(b[3]);
        SystemState t = st;
        t.assigned_zone[rb] = z;
        t.assigned_sector[rb] = s;
        return t;
      });

  // TaskSuccess(bs, rb, z, s): the assigned robot cleans its sector; the
  // station records it and broadcasts to the other operating stations.
  add("TaskSuccess",
      [](const SystemState& st, const Binding& b) {
        int bs = as_int(b[0]), rb = as_int(b[1]), z = as_int(b[2]), s = as_int(b[3]);
        return st.operating[bs] && st.active[rb] && st.attached[rb] == bs &&
               st.responsible[z - 1] == bs && st.assigned_zone[rb] == z &&
               st.assigned_sector[rb] == s && st.zone_mapped(bs, z) &&
               st.lmap(bs, z, s) == kIncompl;
      },
      [](const SystemState& st, const Binding& b) {
        int bs = as_int(b[0]), rb = as_int(b[1]), z = as_int(b[2]), s = as_int(b[3]);
        SystemState t = st;
        t.set_terr(z, s, kCompl);
        t.set_lmap(bs, z, s, kCompl);
        t.assigned_zone[rb] = kUnassigned;
        t.assigned_sector[rb] = kUnassigned;
        t.counter -= 1;
        for (int other = 0; other < t.station_count(); ++other)
          if (other != bs && t.operating[other]) t.msg_insert(other, z, s);
        return t;
      });

  // TaskFailure(bs, rb): the station detects that an assigned robot has
  // failed; the robot is detached and its sector becomes assignable again.
  add("TaskFailure",
      [](const SystemState& st, const Binding& b) {
        int bs = as_int(b[0]), rb = as_int(b[1]);
        return st.attached[rb] == bs && !st.active[rb] &&
               st.assigned_zone[rb] != kUnassigned;
      },
      [](const SystemState& st, const Binding& b) {
        int rb = as_int(b[1]);
        SystemState t = st;
        t.attached[rb] = kDetached;
        t.assigned_zone[rb] = kUnassigned;
        t.assigned_sector[rb] = kUnassigned;
        return t;
      });

  // RobotFailure(rb): the last active robot cannot fail; the scenario's
  // fault budget keeps the failure dimension finite.
  add("RobotFailure",
      [ctx, n_robots](const SystemState& st, const Binding& b) {
        int rb = as_int(b[0]);
        int used = n_robots - st.active_count();
        return st.active[rb] && st.active_count() > 1 &&
               used < ctx->faults.robot_budget;
      },
      [](const SystemState& st, const Binding& b) {
        SystemState t = st;
        t.active[as_int(b[0])] = 0;
        return t;
      });

  // UpdateMap(bs, z, s): an operating station consumes one broadcast
  // message and marks the sector cleaned in its local map.
  add("UpdateMap",
      [](const SystemState& st, const Binding& b) {
        int bs = as_int(b[0]), z = as_int(b[1]), s = as_int(b[2]);
        return st.msg_contains(bs, z, s) && st.operating[bs] &&
               st.zone_mapped(bs, z);
      },
      [](const SystemState& st, const Binding& b) {
        int bs = as_int(b[0]), z = as_int(b[1]), s = as_int(b[2]);
        SystemState t = st;
        t.set_lmap(bs, z, s, kCompl);
        t.msg_erase(bs, z, s);
        return t;
      });

  // ReassignNewBStoRBs(bs_i, bs_j, rbs): a group of idle robots is sent
  // to a station left with no active robots (strict PR8 reading), or to a
  // station with at least one failed attached robot (literal reading).
  add("ReassignNewBStoRBs",
      [pr8_literal](const SystemState& st, const Binding& b) {
        int bs_i = as_int(b[0]), bs_j = as_int(b[1]);
        const std::vector<int>& rbs = as_set(b[2]);
        if (bs_i == bs_j || !st.operating[bs_i] || !st.operating[bs_j]) return false;
        if (rbs.empty()) return false;
        for (int r : rbs)
          if (!st.active[r] || st.attached[r] != bs_i ||
              st.assigned_sector[r] != kUnassigned)
            return false;
        if (pr8_literal) {
          bool has_failed_attached = false;
          for (int r = 0; r < st.robot_count(); ++r)
            if (st.attached[r] == bs_j && !st.active[r]) has_failed_attached = true;
          if (!has_failed_attached) return false;
        } else {
          for (int r = 0; r < st.robot_count(); ++r)
            if (st.attached[r] == bs_j && st.active[r]) return false;
        }
        return station_has_incompl_zone(st, bs_j);
      },
      [](const SystemState& st, const Binding& b) {
        int bs_j = as_int(b[1]);
        SystemState t = st;
        for (int r : as_set(b[2])) t.attached[r] = bs_j;
        return t;
      });

  // SendRobotsToBS(bs_i, bs_j, rbs): a station whose zones are all clean
  // donates idle robots to one that still has uncleaned sectors.
  if (ctx->inject != InjectBug::drop_send_robots) {
    add("SendRobotsToBS",
        [](const SystemState& st, const Binding& b) {
          int bs_i = as_int(b[0]), bs_j = as_int(b[1]);
          const std::vector<int>& rbs = as_set(b[2]);
          if (bs_i == bs_j || !st.operating[bs_i] || !st.operating[bs_j])
            return false;
          if (rbs.empty()) return false;
          if (!station_zones_all_clean(st, bs_i)) return false;
          for (int r : rbs)
            if (!st.active[r] || st.attached[r] != bs_i ||
                st.assigned_sector[r] != kUnassigned)
              return false;
          return station_has_incompl_zone(st, bs_j);
        },
        [](const SystemState& st, const Binding& b) {
          int bs_j = as_int(b[1]);
          SystemState t = st;
          for (int r : as_set(b[2])) t.attached[r] = bs_j;
          return t;
        });
  }

  // GetAdditionalResponsibility(bs_i, bs_j, zs, rbs): an operating station
  // with a fully accurate map takes over all zones and all still-active
  // robots of a failed station. Stale broadcasts addressed to the failed
  // station are purged so map accuracy stays restatable.
  add("GetAdditionalResponsibility",
      [](const SystemState& st, const Binding& b) {
        int bs_i = as_int(b[0]), bs_j = as_int(b[1]);
        const std::vector<int>& zs = as_set(b[2]);
        const std::vector<int>& rbs = as_set(b[3]);
        if (bs_i == bs_j || st.operating[bs_i] || !st.operating[bs_j]) return false;
        if (zs.empty() || zs != zones_of(st, bs_i)) return false;
        if (rbs != active_robots_of(st, bs_i)) return false;
        return !st.msg_addressed_to(bs_j);
      },
      [](const SystemState& st, const Binding& b) {
        int bs_i = as_int(b[0]), bs_j = as_int(b[1]);
        SystemState t = st;
        for (int z : as_set(b[2])) t.responsible[z - 1] = bs_j;
        for (int r : as_set(b[3])) {
          t.attached[r] = bs_j;
          t.assigned_zone[r] = kUnassigned;
          t.assigned_sector[r] = kUnassigned;
        }
        t.clear_station_map(bs_i);
        t.msg_purge_station(bs_i);
        return t;
      });

  // BaseStationFailure(bs): the last operating station cannot fail.
  add("BaseStationFailure",
      [ctx, n_stations](const SystemState& st, const Binding& b) {
        int bs = as_int(b[0]);
        int used = n_stations - st.operating_count();
        return st.operating[bs] && st.operating_count() > 1 &&
               used < ctx->faults.station_budget;
      },
      [](const SystemState& st, const Binding& b) {
        SystemState t = st;
        t.operating[as_int(b[0])] = 0;
        return t;
      });

  // --- named invariants ---------------------------------------------

  auto station_name = [ctx](int bs) { return ctx->stations[bs]; };
  auto robot_name = [ctx](int rb) { return ctx->robots[rb]; };

  auto inv = [&](const std::string& name,
                 std::function<std::optional<std::string>(const SystemState&)> fn) {
    m.invariants.push_back(NamedPredicate<SystemState>{name, std::move(fn)});
  };

  inv("counter-consistency", [](const SystemState& st) -> std::optional<std::string> {
    std::int64_t incompl = 0;
    for (std::int8_t t : st.territory) incompl += (t == kIncompl);
    if (st.counter == incompl) return std::nullopt;
    return "counter=" + std::to_string(st.counter) + " but " +
           std::to_string(incompl) + " sectors are incompl";
  });

  inv("PR5", [robot_name](const SystemState& st) -> std::optional<std::string> {
    for (int r1 = 0; r1 < st.robot_count(); ++r1) {
      if (st.assigned_zone[r1] == kUnassigned) continue;
      for (int r2 = r1 + 1; r2 < st.robot_count(); ++r2)
        if (st.assigned_zone[r1] == st.assigned_zone[r2] &&
            st.assigned_sector[r1] == st.assigned_sector[r2])
          return robot_name(r1) + " and " + robot_name(r2) +
                 " both assigned zone " + std::to_string(st.assigned_zone[r1]) +
                 " sector " + std::to_string(st.assigned_sector[r1]);
    }
    return std::nullopt;
  });

  inv("PR6-global-local",
      [station_name](const SystemState& st) -> std::optional<std::string> {
        for (int bs = 0; bs < st.station_count(); ++bs) {
          bool responsible_somewhere = false;
          for (int z = 1; z <= st.zone_count; ++z)
            if (st.responsible[z - 1] == bs) responsible_somewhere = true;
          if (!responsible_somewhere) continue;
          for (int z = 1; z <= st.zone_count; ++z) {
            if (!st.zone_mapped(bs, z)) continue;
            for (int s = 1; s <= st.sector_count; ++s)
              if (st.terr(z, s) == kIncompl && st.lmap(bs, z, s) != kIncompl)
                return station_name(bs) + " marks zone " + std::to_string(z) +
                       " sector " + std::to_string(s) +
                       " compl but territory is incompl";
          }
        }
        return std::nullopt;
      });

  inv("PR6-own-zone",
      [station_name](const SystemState& st) -> std::optional<std::string> {
        for (int z = 1; z <= st.zone_count; ++z) {
          int bs = st.responsible[z - 1];
          if (!st.zone_mapped(bs, z))
            return station_name(bs) + " responsible for zone " +
                   std::to_string(z) + " but has no map of it";
          for (int s = 1; s <= st.sector_count; ++s)
            if ((st.terr(z, s) == kIncompl) != (st.lmap(bs, z, s) == kIncompl))
              return "zone " + std::to_string(z) + " sector " +
                     std::to_string(s) + ": territory and " + station_name(bs) +
                     "'s map disagree";
        }
        return std::nullopt;
      });

  // Accuracy is claimed for operating stations only: broadcasts go to
  // operating stations, so a failed station's map goes stale with no
  // pending message until the takeover discards it.
  inv("msg-accuracy",
      [station_name](const SystemState& st) -> std::optional<std::string> {
        for (int bs = 0; bs < st.station_count(); ++bs) {
          if (!st.operating[bs]) continue;
          bool responsible_somewhere = false;
          for (int z = 1; z <= st.zone_count; ++z)
            if (st.responsible[z - 1] == bs) responsible_somewhere = true;
          if (!responsible_somewhere) continue;
          for (int z = 1; z <= st.zone_count; ++z) {
            if (!st.zone_mapped(bs, z)) continue;
            for (int s = 1; s <= st.sector_count; ++s)
              if (!st.msg_contains(bs, z, s) &&
                  st.terr(z, s) != st.lmap(bs, z, s))
                return station_name(bs) + " has no pending message for zone " +
                       std::to_string(z) + " sector " + std::to_string(s) +
                       " yet its map disagrees with the territory";
          }
        }
        return std::nullopt;
      });

  // The responsible(asgn_z(r)) = attached(r) alignment is stated for
  // active robots: a robot that fails mid-task keeps its stale assignment
  // until TaskFailure detaches it, and a takeover may move the zone's
  // responsibility meanwhile.
  inv("assignment-coherence",
      [robot_name](const SystemState& st) -> std::optional<std::string> {
        for (int r = 0; r < st.robot_count(); ++r) {
          bool has_z = st.assigned_zone[r] != kUnassigned;
          bool has_s = st.assigned_sector[r] != kUnassigned;
          if (has_z != has_s)
            return robot_name(r) + " has half an assignment";
          if (!has_z) continue;
          if (st.attached[r] == kDetached)
            return robot_name(r) + " assigned but detached";
          if (st.active[r] &&
              st.responsible[st.assigned_zone[r] - 1] != st.attached[r])
            return robot_name(r) + " assigned zone " +
                   std::to_string(st.assigned_zone[r]) +
                   " not coordinated by its station";
        }
        return std::nullopt;
      });

  inv("agent-universe",
      [n_robots, n_stations](const SystemState& st) -> std::optional<std::string> {
        if (st.robot_count() != n_robots || st.station_count() != n_stations)
          return std::string("declared agent sets changed size");
        if (st.active_count() < 1) return std::string("no active robot left");
        if (st.operating_count() < 1)
          return std::string("no operating station left");
        if (st.counter < 0) return std::string("negative counter");
        for (int r = 0; r < n_robots; ++r) {
          if (st.attached[r] != kDetached &&
              (st.attached[r] < 0 || st.attached[r] >= n_stations))
            return std::string("attachment out of range");
          if (st.assigned_zone[r] < 0 || st.assigned_zone[r] > st.zone_count ||
              st.assigned_sector[r] < 0 ||
              st.assigned_sector[r] > st.sector_count)
            return std::string("assignment out of range");
        }
        for (int bs = 0; bs < n_stations; ++bs)
          for (int z = 1; z <= st.zone_count; ++z) {
            bool first = st.lmap(bs, z, 1) == kZoneAbsent;
            for (int s = 2; s <= st.sector_count; ++s)
              if ((st.lmap(bs, z, s) == kZoneAbsent) != first)
                return std::string("ragged local map zone block");
          }
        return std::nullopt;
      });

  if (ctx->inject == InjectBug::constant_variant)
    m.variant = [](const SystemState&) { return 0LL; };
  else
    m.variant = [](const SystemState& st) { return variant_of(st); };

  m.finalize();
  return m;
}

// Per-edge safety checks: PR4 stability of sectors, zones and the goal,
// monotonically shrinking agent sets, and message-buffer hygiene.
struct EdgeCheck {
  std::string name;
  std::function<std::optional<std::string>(const SystemState&, const EventInstance&,
                                           const SystemState&)>
      check;
};

inline std::vector<EdgeCheck> edge_checks(const Scenario& scenario) {
  auto ctx = std::make_shared<const Scenario>(scenario);
  std::vector<EdgeCheck> out;

  out.push_back({"PR4-sector",
                 [](const SystemState& pre, const EventInstance&,
                    const SystemState& post) -> std::optional<std::string> {
                   for (int z = 1; z <= pre.zone_count; ++z)
                     for (int s = 1; s <= pre.sector_count; ++s)
                       if (pre.terr(z, s) == kCompl && post.terr(z, s) != kCompl)
                         return "zone " + std::to_string(z) + " sector " +
                                std::to_string(s) + " reverted to incompl";
                   return std::nullopt;
                 }});

  out.push_back({"PR4-zone",
                 [](const SystemState& pre, const EventInstance&,
                    const SystemState& post) -> std::optional<std::string> {
                   AbstractView a = abstract_view(pre), b = abstract_view(post);
                   for (int z = 1; z <= pre.zone_count; ++z)
                     if (a.zones[z - 1] == kCompl && b.zones[z - 1] != kCompl)
                       return "zone " + std::to_string(z) + " reverted";
                   return std::nullopt;
                 }});

  out.push_back({"PR4-goal",
                 [](const SystemState& pre, const EventInstance&,
                    const SystemState& post) -> std::optional<std::string> {
                   if (goal_reached(pre) && !goal_reached(post))
                     return std::string("goal reverted to incompl");
                   return std::nullopt;
                 }});

  out.push_back({"active-monotone",
                 [ctx](const SystemState& pre, const EventInstance&,
                       const SystemState& post) -> std::optional<std::string> {
                   for (int r = 0; r < pre.robot_count(); ++r)
                     if (post.active[r] && !pre.active[r])
                       return ctx->robots[r] + " rejoined active";
                   return std::nullopt;
                 }});

  out.push_back({"operating-monotone",
                 [ctx](const SystemState& pre, const EventInstance&,
                       const SystemState& post) -> std::optional<std::string> {
                   for (int bs = 0; bs < pre.station_count(); ++bs)
                     if (post.operating[bs] && !pre.operating[bs])
                       return ctx->stations[bs] + " rejoined operating";
                   return std::nullopt;
                 }});

  // Messages appear only on TaskSuccess broadcasts and disappear only via
  // UpdateMap (that one triple) or a takeover purge of the failed station.
  out.push_back(
      {"msg-monotone",
       [ctx](const SystemState& pre, const EventInstance& inst,
             const SystemState& post) -> std::optional<std::string> {
         std::vector<std::array<std::int32_t, 3>> removed, added;
         std::set_difference(pre.msg.begin(), pre.msg.end(), post.msg.begin(),
                             post.msg.end(), std::back_inserter(removed));
         std::set_difference(post.msg.begin(), post.msg.end(), pre.msg.begin(),
                             pre.msg.end(), std::back_inserter(added));
         if (!added.empty() && inst.event != "TaskSuccess")
           return inst.event + " added a message";
         if (removed.empty()) return std::nullopt;
         if (inst.event == "UpdateMap") {
           std::array<std::int32_t, 3> expect{as_int(inst.binding[0]),
                                              as_int(inst.binding[1]),
                                              as_int(inst.binding[2])};
           if (removed.size() == 1 && removed[0] == expect) return std::nullopt;
           return std::string("UpdateMap removed the wrong message(s)");
         }
         if (inst.event == "GetAdditionalResponsibility") {
           int bs_i = as_int(inst.binding[0]);
           for (const auto& t : removed)
             if (t[0] != bs_i)
               return "takeover purged a message addressed to " +
                      ctx->stations[t[0]];
           return std::nullopt;
         }
         return inst.event + " removed a message";
       }});

  return out;
}

// --- instance rendering and parsing ----------------------------------

inline std::string format_value(const Scenario& sc, Param kind, const Value& v) {
  switch (kind) {
    case Param::station: return sc.stations[as_int(v)];
    case Param::robot: return sc.robots[as_int(v)];
    case Param::zone:
    case Param::sector: return std::to_string(as_int(v));
    case Param::robot_set: {
      std::string out = "{";
      const auto& set = as_set(v);
      for (std::size_t i = 0; i < set.size(); ++i)
        out += (i ? "," : "") + sc.robots[set[i]];
      return out + "}";
    }
    case Param::zone_set: {
      std::string out = "{";
      const auto& set = as_set(v);
      for (std::size_t i = 0; i < set.size(); ++i)
        out += (i ? "," : "") + std::to_string(set[i]);
      return out + "}";
    }
  }
  return "?";
}

// Comma-joined binding, sets in braces: `B1,B2,{R1,R2}`.
inline std::string format_binding(const Scenario& sc, const std::string& event,
                                  const Binding& binding) {
  const EventSig& sig = event_signature(event);
  std::string out;
  for (std::size_t i = 0; i < binding.size(); ++i) {
    if (i) out += ",";
    out += format_value(sc, sig.params[i], binding[i]);
  }
  return out;
}

inline std::string format_instance(const Scenario& sc, const EventInstance& inst) {
  return inst.event + "(" + format_binding(sc, inst.event, inst.binding) + ")";
}

// Splits `B1,B2,{R1,R2}` at top-level commas.
inline std::vector<std::string> split_binding_text(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  int depth = 0;
  for (char c : text) {
    if (c == '{') ++depth;
    if (c == '}') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty() || !parts.empty()) parts.push_back(cur);
  return parts;
}

inline Value parse_value(const Scenario& sc, Param kind, const std::string& text) {
  auto fail = [&]() -> ParseError {
    return ParseError("bad binding value '" + text + "'");
  };
  switch (kind) {
    case Param::station: {
      int bs = sc.station_index(text);
      if (bs < 0) throw fail();
      return bs;
    }
    case Param::robot: {
      int rb = sc.robot_index(text);
      if (rb < 0) throw fail();
      return rb;
    }
    case Param::zone:
    case Param::sector:
      return static_cast<int>(detail::parse_long(text, "binding"));
    case Param::robot_set:
    case Param::zone_set: {
      if (text.size() < 2 || text.front() != '{' || text.back() != '}')
        throw fail();
      std::vector<int> set;
      std::string inner = text.substr(1, text.size() - 2);
      if (!inner.empty()) {
        std::istringstream is(inner);
        std::string item;
        while (std::getline(is, item, ',')) {
          if (kind == Param::robot_set) {
            int rb = sc.robot_index(item);
            if (rb < 0) throw fail();
            set.push_back(rb);
          } else {
            set.push_back(static_cast<int>(detail::parse_long(item, "binding")));
          }
        }
      }
      std::sort(set.begin(), set.end());
      set.erase(std::unique(set.begin(), set.end()), set.end());
      return set;
    }
  }
  throw fail();
}

inline EventInstance parse_instance(const Scenario& sc, const std::string& event,
                                    const std::string& binding_text) {
  const EventSig* sig = nullptr;
  for (const EventSig& s : event_signatures())
    if (s.name == event) sig = &s;
  if (!sig) throw ParseError("unknown event '" + event + "'");
  std::vector<std::string> parts = split_binding_text(binding_text);
  if (parts.size() != sig->params.size())
    throw ParseError("event " + event + " takes " +
                     std::to_string(sig->params.size()) + " parameters");
  EventInstance inst;
  inst.event = event;
  for (std::size_t i = 0; i < parts.size(); ++i)
    inst.binding.push_back(parse_value(sc, sig->params[i], parts[i]));
  return inst;
}

}  // namespace fleetmc
