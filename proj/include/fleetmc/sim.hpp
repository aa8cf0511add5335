#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "fleetmc/digest.hpp"
#include "fleetmc/kernel.hpp"
#include "fleetmc/machine.hpp"

namespace fleetmc {

// Reproducible pseudo-randomness. mt19937_64 is fully specified by the
// standard, so traces are identical across platforms and releases.
// Selection rule: index = next() mod choices; probability rolls compare
// (next() >> 11) * 2^-53 against the entry's probability.
struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  std::uint64_t next() { return eng(); }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// One executed step of a run.
struct TraceRecord {
  int step = 0;  // 1-based
  EventInstance inst;
  std::string pre_digest;
  std::string post_digest;
  long long variant_before = 0;
  long long variant_after = 0;
  bool invariants_ok = true;
};

enum class EndReason { goal, quiescent, step_limit };

inline const char* to_string(EndReason r) {
  switch (r) {
    case EndReason::goal: return "goal";
    case EndReason::quiescent: return "quiescent";
    case EndReason::step_limit: return "step-limit";
  }
  return "?";
}

struct Trace {
  std::vector<TraceRecord> records;
  EndReason end = EndReason::step_limit;
  std::string final_digest;

  bool completed() const { return end == EndReason::goal; }
  int steps() const { return static_cast<int>(records.size()); }
};

struct RunOptions {
  std::uint64_t seed = 1;
  SchedulerPolicy policy = SchedulerPolicy::uniform;
  int max_steps = 1000;
  int fairness_bound = 0;  // 0 = candidate-instance count of the machine
};

namespace detail {

inline bool is_failure_event(const std::string& name) {
  return name == "RobotFailure" || name == "BaseStationFailure";
}

inline bool is_recovery_event(const std::string& name) {
  return name == "TaskFailure" || name == "ReassignNewBStoRBs" ||
         name == "SendRobotsToBS" || name == "GetAdditionalResponsibility";
}

inline EventInstance fault_instance(const FaultEntry& e) {
  if (e.kind == AgentKind::robot)
    return EventInstance{"RobotFailure", {e.agent}};
  return EventInstance{"BaseStationFailure", {e.agent}};
}

inline int instance_index(const std::vector<EventInstance>& en,
                          const EventInstance& inst) {
  for (std::size_t i = 0; i < en.size(); ++i)
    if (en[i] == inst) return static_cast<int>(i);
  return -1;
}

}  // namespace detail

// Total candidate-binding count over all events: the default weak
// fairness bound F. Domains are state-independent, so this is a run
// constant.
inline long long candidate_instance_count(const Machine<SystemState>& m,
                                          const SystemState& st) {
  long long total = 0;
  for (const EventDef<SystemState>& ev : m.events) {
    long long prod = 1;
    for (const auto& dom : ev.param_domains)
      prod *= static_cast<long long>(dom(st).size());
    total += prod;
  }
  return total;
}

// One seeded run. Repeatedly selects an enabled instance per the policy,
// fires it, and records the step. Terminates on goal, quiescence or the
// step budget. Weak fairness: an instance continuously enabled for more
// than F steps is selected next (canonically first such instance on ties).
inline Trace run_trace(const Scenario& sc, const Machine<SystemState>& m,
                       const RunOptions& opt) {
  validate_scenario(sc);
  SystemState state = initial_state(sc);
  Rng rng(opt.seed);
  const long long fairness =
      opt.fairness_bound > 0 ? opt.fairness_bound
                             : candidate_instance_count(m, state);

  Trace trace;
  std::map<EventInstance, long long> ages;

  for (int step = 1; step <= opt.max_steps; ++step) {
    if (goal_reached(state)) {
      trace.end = EndReason::goal;
      trace.final_digest = digest_hex(fnv1a64(encode(state)));
      return trace;
    }
    std::vector<EventInstance> en = enabled(m, state);
    if (en.empty()) {
      trace.end = EndReason::quiescent;
      trace.final_digest = digest_hex(fnv1a64(encode(state)));
      return trace;
    }

    std::map<EventInstance, long long> next_ages;
    for (const EventInstance& inst : en) {
      auto it = ages.find(inst);
      next_ages[inst] = it == ages.end() ? 1 : it->second + 1;
    }

    int choice = -1;
    // Fairness first: it overrides the policy.
    long long best_age = fairness;
    for (std::size_t i = 0; i < en.size(); ++i) {
      long long age = next_ages[en[i]];
      if (age > best_age) {
        best_age = age;
        choice = static_cast<int>(i);
      }
    }

    if (choice < 0) {
      switch (opt.policy) {
        case SchedulerPolicy::uniform:
          choice = static_cast<int>(rng.below(en.size()));
          break;
        case SchedulerPolicy::failure_eager: {
          // Scheduled faults fire exactly at their step; probability
          // entries roll every step; otherwise pick among normal events.
          for (const FaultEntry& e : sc.faults.entries) {
            if (e.is_prob || e.step != step) continue;
            int idx = detail::instance_index(en, detail::fault_instance(e));
            if (idx >= 0) {
              choice = idx;
              break;
            }
          }
          if (choice < 0)
            for (const FaultEntry& e : sc.faults.entries) {
              if (!e.is_prob) continue;
              bool roll = rng.unit() < e.prob;
              if (!roll) continue;
              int idx = detail::instance_index(en, detail::fault_instance(e));
              if (idx >= 0) {
                choice = idx;
                break;
              }
            }
          if (choice < 0) {
            std::vector<int> normal;
            for (std::size_t i = 0; i < en.size(); ++i)
              if (!detail::is_failure_event(en[i].event))
                normal.push_back(static_cast<int>(i));
            if (normal.empty())
              choice = static_cast<int>(rng.below(en.size()));
            else
              choice = normal[rng.below(normal.size())];
          }
          break;
        }
        case SchedulerPolicy::recovery_eager: {
          std::vector<int> recovery;
          for (std::size_t i = 0; i < en.size(); ++i)
            if (detail::is_recovery_event(en[i].event))
              recovery.push_back(static_cast<int>(i));
          if (recovery.empty())
            choice = static_cast<int>(rng.below(en.size()));
          else
            choice = recovery[rng.below(recovery.size())];
          break;
        }
      }
    }

    const EventInstance& inst = en[choice];
    SystemState post = fire(m, state, inst);

    TraceRecord rec;
    rec.step = step;
    rec.inst = inst;
    rec.pre_digest = digest_hex(fnv1a64(encode(state)));
    rec.post_digest = digest_hex(fnv1a64(encode(post)));
    rec.variant_before = m.variant(state);
    rec.variant_after = m.variant(post);
    rec.invariants_ok = check_invariants(m, post).empty();
    trace.records.push_back(std::move(rec));

    next_ages.erase(inst);
    ages = std::move(next_ages);
    state = std::move(post);
  }

  if (goal_reached(state)) trace.end = EndReason::goal;
  else trace.end = EndReason::step_limit;
  trace.final_digest = digest_hex(fnv1a64(encode(state)));
  return trace;
}

struct BatchSummary {
  std::size_t runs = 0;
  std::size_t completed = 0;  // traces that ended with goal = compl
  double mean_steps = 0.0;
  std::map<std::string, std::size_t> event_histogram;
};

// Runs one trace per seed and aggregates. Independent runs may execute in
// parallel; results are merged in seed order, so the summary is identical
// for any worker count.
inline BatchSummary run_batch(const Scenario& sc, const Machine<SystemState>& m,
                              const std::vector<std::uint64_t>& seeds,
                              const RunOptions& base, int workers = 1) {
  std::vector<Trace> traces(seeds.size());
  auto run_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      RunOptions opt = base;
      opt.seed = seeds[i];
      traces[i] = run_trace(sc, m, opt);
    }
  };
  unsigned hw = std::thread::hardware_concurrency();
  if (hw > 0 && workers > static_cast<int>(hw)) workers = static_cast<int>(hw);
  if (workers <= 1 || seeds.size() < 2) {
    run_range(0, seeds.size());
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (seeds.size() + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      std::size_t lo = w * chunk;
      std::size_t hi = std::min(seeds.size(), lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back([&run_range, lo, hi]() { run_range(lo, hi); });
    }
    for (std::thread& t : pool) t.join();
  }

  BatchSummary sum;
  sum.runs = seeds.size();
  std::size_t total_steps = 0;
  for (const Trace& t : traces) {
    sum.completed += t.completed();
    total_steps += t.records.size();
    for (const TraceRecord& r : t.records) ++sum.event_histogram[r.inst.event];
  }
  sum.mean_steps = sum.runs ? static_cast<double>(total_steps) /
                                  static_cast<double>(sum.runs)
                            : 0.0;
  return sum;
}

}  // namespace fleetmc
