#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

namespace fleetmc {

// Sector/zone cleanliness. Two values only.
enum : std::int8_t { kIncompl = 0, kCompl = 1 };

inline constexpr int kUnassigned = 0;       // asgn_z / asgn_s "no task"
inline constexpr std::int32_t kDetached = -1;  // robot not in dom(attached)
inline constexpr std::int8_t kZoneAbsent = -1; // zone outside a local map

// Complete state of the fully refined model. Zones and sectors are
// 1-based in bindings and file formats; agents are dense indices into the
// scenario's (lexicographically sorted) station and robot tables.
//
// All set- and map-valued fields use dense vectors or sorted vectors, so
// structural equality and the canonical encoding are order-independent.
struct SystemState {
  std::int32_t zone_count = 0;    // n
  std::int32_t sector_count = 0;  // k

  std::vector<std::int8_t> territory;   // (z-1)*k + (s-1) -> kIncompl/kCompl
  std::vector<std::int32_t> responsible;  // per zone: station index
  std::vector<std::int32_t> attached;     // per robot: station index or kDetached
  std::vector<std::int8_t> local_map;   // bs*(n*k) + cell -> state, kZoneAbsent
  std::vector<std::array<std::int32_t, 3>> msg;  // sorted (station, zone, sector)
  std::vector<std::int32_t> assigned_zone;    // per robot, kUnassigned = none
  std::vector<std::int32_t> assigned_sector;  // per robot, kUnassigned = none
  std::vector<std::int8_t> active;     // per robot: 0/1
  std::vector<std::int8_t> operating;  // per station: 0/1
  std::int64_t counter = 0;  // number of incompl sectors in the territory

  int robot_count() const { return static_cast<int>(attached.size()); }
  int station_count() const { return static_cast<int>(operating.size()); }

  int cell(int z, int s) const { return (z - 1) * sector_count + (s - 1); }

  std::int8_t terr(int z, int s) const { return territory[cell(z, s)]; }
  void set_terr(int z, int s, std::int8_t v) { territory[cell(z, s)] = v; }

  bool zone_mapped(int bs, int z) const {
    return local_map[bs * zone_count * sector_count + cell(z, 1)] != kZoneAbsent;
  }
  std::int8_t lmap(int bs, int z, int s) const {
    return local_map[bs * zone_count * sector_count + cell(z, s)];
  }
  void set_lmap(int bs, int z, int s, std::int8_t v) {
    local_map[bs * zone_count * sector_count + cell(z, s)] = v;
  }
  void clear_station_map(int bs) {
    int block = zone_count * sector_count;
    for (int i = 0; i < block; ++i) local_map[bs * block + i] = kZoneAbsent;
  }

  bool msg_contains(int bs, int z, int s) const {
    std::array<std::int32_t, 3> key{bs, z, s};
    return std::binary_search(msg.begin(), msg.end(), key);
  }
  bool msg_addressed_to(int bs) const {
    for (const auto& t : msg)
      if (t[0] == bs) return true;
    return false;
  }
  void msg_insert(int bs, int z, int s) {
    std::array<std::int32_t, 3> key{bs, z, s};
    auto it = std::lower_bound(msg.begin(), msg.end(), key);
    if (it == msg.end() || *it != key) msg.insert(it, key);
  }
  void msg_erase(int bs, int z, int s) {
    std::array<std::int32_t, 3> key{bs, z, s};
    auto it = std::lower_bound(msg.begin(), msg.end(), key);
    if (it != msg.end() && *it == key) msg.erase(it);
  }
  void msg_purge_station(int bs) {
    msg.erase(std::remove_if(msg.begin(), msg.end(),
                             [bs](const auto& t) { return t[0] == bs; }),
              msg.end());
  }

  int active_count() const {
    int c = 0;
    for (std::int8_t a : active) c += a;
    return c;
  }
  int operating_count() const {
    int c = 0;
    for (std::int8_t o : operating) c += o;
    return c;
  }
  int attached_count() const {
    int c = 0;
    for (std::int32_t a : attached) c += (a != kDetached);
    return c;
  }

  bool operator==(const SystemState&) const = default;
  auto operator<=>(const SystemState&) const = default;
};

// Derived abstract views: per-zone status and the global goal.
struct AbstractView {
  std::vector<std::int8_t> zones;  // zone j-1: kCompl iff all its sectors are
  std::int8_t goal = kIncompl;     // kCompl iff all zones are
};

inline AbstractView abstract_view(const SystemState& st) {
  AbstractView v;
  v.zones.assign(st.zone_count, kCompl);
  for (int z = 1; z <= st.zone_count; ++z)
    for (int s = 1; s <= st.sector_count; ++s)
      if (st.terr(z, s) == kIncompl) {
        v.zones[z - 1] = kIncompl;
        break;
      }
  v.goal = kCompl;
  for (std::int8_t zs : v.zones)
    if (zs == kIncompl) {
      v.goal = kIncompl;
      break;
    }
  return v;
}

inline bool goal_reached(const SystemState& st) {
  for (std::int8_t t : st.territory)
    if (t == kIncompl) return false;
  return true;
}

// counter + card(dom(attached)): strictly decreased by TaskSuccess and
// TaskFailure, never increased by any event.
inline long long variant_of(const SystemState& st) {
  return st.counter + st.attached_count();
}

enum class AgentKind { station, robot };

// Whether an agent may work toward cleaning zone z in this state.
inline bool eligible(const SystemState& st, AgentKind kind, int agent, int z) {
  if (kind == AgentKind::station)
    return st.operating[agent] && st.responsible[z - 1] == agent;
  return st.active[agent] && st.attached[agent] != kDetached &&
         st.responsible[z - 1] == st.attached[agent];
}

// Canonical, injective encoding of the full state. Equal states produce
// equal strings and vice versa; digests are hashes of this string.
inline std::string encode(const SystemState& st) {
  std::ostringstream os;
  os << "n:" << st.zone_count << ";k:" << st.sector_count << ";t:";
  for (std::int8_t t : st.territory) os << (t == kCompl ? '1' : '0');
  os << ";r:";
  for (std::size_t i = 0; i < st.responsible.size(); ++i)
    os << (i ? "," : "") << st.responsible[i];
  os << ";a:";
  for (std::size_t i = 0; i < st.attached.size(); ++i)
    os << (i ? "," : "") << st.attached[i];
  os << ";l:";
  for (std::int8_t v : st.local_map)
    os << (v == kZoneAbsent ? '-' : (v == kCompl ? '1' : '0'));
  os << ";m:";
  for (const auto& t : st.msg) os << '(' << t[0] << '.' << t[1] << '.' << t[2] << ')';
  os << ";z:";
  for (std::size_t i = 0; i < st.assigned_zone.size(); ++i)
    os << (i ? "," : "") << st.assigned_zone[i];
  os << ";s:";
  for (std::size_t i = 0; i < st.assigned_sector.size(); ++i)
    os << (i ? "," : "") << st.assigned_sector[i];
  os << ";x:";
  for (std::int8_t a : st.active) os << (a ? '1' : '0');
  os << ";o:";
  for (std::int8_t o : st.operating) os << (o ? '1' : '0');
  os << ";c:" << st.counter;
  return os.str();
}

}  // namespace fleetmc
