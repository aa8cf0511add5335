#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fleetmc/digest.hpp"
#include "fleetmc/kernel.hpp"
#include "fleetmc/machine.hpp"

namespace fleetmc {

// goalReachability needs the complete graph; bounded explorations cannot
// certify anything about states they never saw.
struct PartialGraph : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GraphNode {
  std::uint64_t hash = 0;
  std::uint32_t bucket = 0;  // disambiguates genuine hash collisions
  std::string encoding;      // canonical full-state encoding
  long long variant = 0;
  int depth = 0;
  int enabled_count = -1;  // -1 until expanded
  bool goal = false;
  bool deadlock = false;
};

struct GraphEdge {
  std::int32_t pre = 0;
  std::int32_t post = 0;
  std::uint16_t event = 0;     // index into StateGraph::event_names
  std::string binding;         // rendered binding text
};

// The reachable portion of the transition system, nodes in BFS discovery
// order. Node 0 is the initial state.
struct StateGraph {
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;
  std::vector<std::string> event_names;
  bool partial = false;

  std::string digest(std::size_t node) const {
    return digest_hex(nodes[node].hash, nodes[node].bucket);
  }
};

struct InvariantViolationRecord {
  std::string digest;
  std::string name;
  std::string witness;
};

struct EdgeViolationRecord {
  std::string pre_digest;
  std::string event;
  std::string binding;
  std::string post_digest;
  std::string detail;
};

// Listing cap per category; full totals are always reported.
inline constexpr std::size_t kMaxListedViolations = 100;

struct ExplorationReport {
  std::size_t state_count = 0;
  std::size_t edge_count = 0;
  bool partial = false;
  std::string bound_hit = "none";
  std::size_t goal_state_count = 0;

  std::vector<InvariantViolationRecord> invariant_violations;
  std::vector<EdgeViolationRecord> variant_violations;
  std::vector<std::string> deadlocks;
  std::vector<std::string> unreachable_to_goal;
  std::vector<EdgeViolationRecord> stability_violations;

  std::size_t invariant_violation_count = 0;
  std::size_t variant_violation_count = 0;
  std::size_t deadlock_count = 0;
  std::size_t unreachable_to_goal_count = 0;
  std::size_t stability_violation_count = 0;

  bool pass() const {
    return invariant_violation_count == 0 && variant_violation_count == 0 &&
           deadlock_count == 0 && unreachable_to_goal_count == 0 &&
           stability_violation_count == 0;
  }
};

struct ExploreOptions {
  std::size_t max_states = 1000000;
  std::size_t max_depth = 1000000;
  int workers = 1;
  // Override for collision handling tests; production path hashes the
  // canonical encoding.
  std::function<std::uint64_t(const std::string&)> hash =
      [](const std::string& s) { return fnv1a64(s); };
};

struct ExploreResult {
  StateGraph graph;
  ExplorationReport report;
};

// All node indices from which no goal state is reachable. Empty result
// certifies that a scheduler path to the goal exists from every reachable
// state. Throws PartialGraph on bounded graphs.
inline std::vector<int> goal_unreachable(const StateGraph& g) {
  if (g.partial) throw PartialGraph("goal reachability needs a complete graph");
  std::vector<std::vector<int>> rev(g.nodes.size());
  for (const GraphEdge& e : g.edges) rev[e.post].push_back(e.pre);
  std::vector<char> reach(g.nodes.size(), 0);
  std::deque<int> frontier;
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    if (g.nodes[i].goal) {
      reach[i] = 1;
      frontier.push_back(static_cast<int>(i));
    }
  while (!frontier.empty()) {
    int v = frontier.front();
    frontier.pop_front();
    for (int p : rev[v])
      if (!reach[p]) {
        reach[p] = 1;
        frontier.push_back(p);
      }
  }
  std::vector<int> out;
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    if (!reach[i]) out.push_back(static_cast<int>(i));
  return out;
}

namespace detail {

// Work computed for one expanded state; merged single-threaded so reports
// are identical for any worker count.
struct Expansion {
  std::vector<EventInstance> instances;
  std::vector<SystemState> posts;
  std::vector<std::string> post_encodings;
};

inline Expansion expand_state(const Machine<SystemState>& m,
                              const SystemState& state) {
  Expansion ex;
  ex.instances = enabled(m, state);
  ex.posts.reserve(ex.instances.size());
  ex.post_encodings.reserve(ex.instances.size());
  for (const EventInstance& inst : ex.instances) {
    ex.posts.push_back(m.event(inst.event).action(state, inst.binding));
    ex.post_encodings.push_back(encode(ex.posts.back()));
  }
  return ex;
}

}  // namespace detail

// Breadth-first enumeration of the reachable state graph with per-state
// invariant checking and per-edge variant and stability checking.
// Deterministic for a given scenario regardless of worker count.
inline ExploreResult explore_machine(const Machine<SystemState>& m,
                                     const SystemState& initial,
                                     const std::vector<EdgeCheck>& checks,
                                     const Scenario& sc,
                                     const ExploreOptions& opt) {
  ExploreResult res;
  StateGraph& g = res.graph;
  ExplorationReport& rep = res.report;

  for (const EventDef<SystemState>& ev : m.events) g.event_names.push_back(ev.name);
  auto event_index = [&g](const std::string& name) -> std::uint16_t {
    for (std::size_t i = 0; i < g.event_names.size(); ++i)
      if (g.event_names[i] == name) return static_cast<std::uint16_t>(i);
    return 0;
  };

  std::unordered_map<std::uint64_t, std::vector<int>> buckets;

  auto check_state = [&](int id, const SystemState& st) {
    for (const InvariantViolation& v : check_invariants(m, st)) {
      ++rep.invariant_violation_count;
      if (rep.invariant_violations.size() < kMaxListedViolations)
        rep.invariant_violations.push_back({g.digest(id), v.name, v.witness});
    }
  };

  // Inserts (or finds) a state; full-encoding comparison resolves hash
  // collisions. Returns (id, created).
  auto intern = [&](const std::string& enc, long long var, bool goal,
                    int depth) -> std::pair<int, bool> {
    std::uint64_t h = opt.hash(enc);
    std::vector<int>& bucket = buckets[h];
    for (int id : bucket)
      if (g.nodes[id].encoding == enc) return {id, false};
    GraphNode node;
    node.hash = h;
    node.bucket = static_cast<std::uint32_t>(bucket.size());
    node.encoding = enc;
    node.variant = var;
    node.goal = goal;
    node.depth = depth;
    int id = static_cast<int>(g.nodes.size());
    g.nodes.push_back(std::move(node));
    bucket.push_back(id);
    return {id, true};
  };

  std::string init_enc = encode(initial);
  auto [init_id, init_new] =
      intern(init_enc, m.variant(initial), goal_reached(initial), 0);
  (void)init_new;
  check_state(init_id, initial);

  // Frontier keeps the full state values; nodes keep only the encoding.
  std::deque<std::pair<int, SystemState>> frontier;
  frontier.emplace_back(init_id, initial);

  int workers = opt.workers;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw > 0 && workers > static_cast<int>(hw)) workers = static_cast<int>(hw);
  if (workers < 1) workers = 1;
  // Expansions are buffered per batch and merged in frontier order, so
  // any worker count produces the single-worker report byte for byte.
  const std::size_t batch_cap = workers > 1 ? static_cast<std::size_t>(workers) * 64 : 1;

  std::vector<std::pair<int, SystemState>> depth_limited;
  bool stop = false;
  while (!frontier.empty() && !stop) {
    std::vector<std::pair<int, SystemState>> batch;
    while (!frontier.empty() && batch.size() < batch_cap) {
      auto item = std::move(frontier.front());
      frontier.pop_front();
      if (static_cast<std::size_t>(g.nodes[item.first].depth) >= opt.max_depth)
        depth_limited.push_back(std::move(item));
      else
        batch.push_back(std::move(item));
    }
    if (batch.empty()) continue;

    std::vector<detail::Expansion> expansions(batch.size());
    if (workers <= 1 || batch.size() < 2) {
      for (std::size_t i = 0; i < batch.size(); ++i)
        expansions[i] = detail::expand_state(m, batch[i].second);
    } else {
      std::vector<std::thread> pool;
      std::size_t chunk = (batch.size() + workers - 1) / workers;
      for (int w = 0; w < workers; ++w) {
        std::size_t lo = w * chunk;
        std::size_t hi = std::min(batch.size(), lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi]() {
          for (std::size_t i = lo; i < hi; ++i)
            expansions[i] = detail::expand_state(m, batch[i].second);
        });
      }
      for (std::thread& t : pool) t.join();
    }

    for (std::size_t i = 0; i < batch.size() && !stop; ++i) {
      int pre_id = batch[i].first;
      const SystemState& pre = batch[i].second;
      detail::Expansion& ex = expansions[i];
      g.nodes[pre_id].enabled_count = static_cast<int>(ex.instances.size());
      if (ex.instances.empty() && !g.nodes[pre_id].goal) {
        g.nodes[pre_id].deadlock = true;
        ++rep.deadlock_count;
        if (rep.deadlocks.size() < kMaxListedViolations)
          rep.deadlocks.push_back(g.digest(pre_id));
      }

      for (std::size_t j = 0; j < ex.instances.size(); ++j) {
        const EventInstance& inst = ex.instances[j];
        const SystemState& post = ex.posts[j];

        auto [post_id, created] =
            intern(ex.post_encodings[j], m.variant(post), goal_reached(post),
                   g.nodes[pre_id].depth + 1);
        if (created) {
          check_state(post_id, post);
          frontier.emplace_back(post_id, post);
        }

        g.edges.push_back(GraphEdge{pre_id, post_id, event_index(inst.event),
                                    format_binding(sc, inst.event, inst.binding)});

        const EventDef<SystemState>& ev = m.event(inst.event);
        VariantDelta delta = variant_delta(m, pre, inst, post);
        std::string variant_problem;
        if (delta == VariantDelta::increased)
          variant_problem = "variant increased";
        else if (ev.status == EventStatus::convergent &&
                 delta != VariantDelta::decreased)
          variant_problem = "convergent event did not decrease the variant";
        if (!variant_problem.empty()) {
          ++rep.variant_violation_count;
          if (rep.variant_violations.size() < kMaxListedViolations)
            rep.variant_violations.push_back(
                {g.digest(pre_id), inst.event,
                 format_binding(sc, inst.event, inst.binding), g.digest(post_id),
                 variant_problem});
        }

        for (const EdgeCheck& ck : checks)
          if (std::optional<std::string> w = ck.check(pre, inst, post)) {
            ++rep.stability_violation_count;
            if (rep.stability_violations.size() < kMaxListedViolations)
              rep.stability_violations.push_back(
                  {g.digest(pre_id), inst.event,
                   format_binding(sc, inst.event, inst.binding),
                   g.digest(post_id), ck.name + ": " + *w});
          }

        if (g.nodes.size() >= opt.max_states &&
            (i + 1 < batch.size() || j + 1 < ex.instances.size() ||
             !frontier.empty())) {
          rep.partial = true;
          rep.bound_hit = "max-states";
          stop = true;
          break;
        }
      }
    }
  }

  if (!stop) {
    for (auto& [id, st] : depth_limited)
      if (!enabled(m, st).empty()) {
        rep.partial = true;
        rep.bound_hit = "max-depth";
        break;
      }
  }

  g.partial = rep.partial;
  rep.state_count = g.nodes.size();
  rep.edge_count = g.edges.size();
  for (const GraphNode& node : g.nodes) rep.goal_state_count += node.goal;

  if (!rep.partial) {
    for (int id : goal_unreachable(g)) {
      ++rep.unreachable_to_goal_count;
      if (rep.unreachable_to_goal.size() < kMaxListedViolations)
        rep.unreachable_to_goal.push_back(g.digest(id));
    }
  }
  return res;
}

// Convenience wrapper: build everything from the scenario.
inline ExploreResult explore_scenario(const Scenario& sc) {
  ExploreOptions opt;
  opt.max_states = sc.max_states;
  opt.max_depth = sc.max_depth;
  opt.workers = sc.workers;
  Machine<SystemState> m = build_machine(sc);
  return explore_machine(m, initial_state(sc), edge_checks(sc), sc, opt);
}

}  // namespace fleetmc
