#pragma once

#include <ostream>
#include <string>

#include "fleetmc/explore.hpp"
#include "fleetmc/refine.hpp"

namespace fleetmc {

// Machine-readable first: fixed key-value lines, then one line per
// violation, then a human summary as comments. No timestamps or host
// data, so identical inputs produce byte-identical documents.

struct ReportContext {
  std::string scenario_path;
  const Scenario* scenario = nullptr;
  int workers = 1;
};

inline const char* explore_verdict(const ExplorationReport& rep) {
  if (!rep.pass()) return "FAIL";
  if (rep.partial) return "PARTIAL";
  return "PASS";
}

inline void write_explore_report(std::ostream& os, const ReportContext& ctx,
                                 const StateGraph& g,
                                 const ExplorationReport& rep) {
  os << "format-version 1\n";
  os << "mode explore\n";
  os << "scenario " << ctx.scenario_path << "\n";
  os << "guard-variant " << to_string(ctx.scenario->guard_variant) << "\n";
  os << "inject-bug " << to_string(ctx.scenario->inject) << "\n";
  os << "workers " << ctx.workers << "\n";
  os << "partial " << (rep.partial ? "true" : "false") << "\n";
  os << "bound-hit " << rep.bound_hit << "\n";
  os << "state-count " << rep.state_count << "\n";
  os << "edge-count " << rep.edge_count << "\n";
  os << "goal-state-count " << rep.goal_state_count << "\n";
  if (!g.nodes.empty()) os << "initial-digest " << g.digest(0) << "\n";
  os << "goal-analysis " << (rep.partial ? "skipped-partial" : "complete") << "\n";
  os << "invariant-violation-count " << rep.invariant_violation_count << "\n";
  os << "variant-violation-count " << rep.variant_violation_count << "\n";
  os << "deadlock-count " << rep.deadlock_count << "\n";
  os << "unreachable-to-goal-count " << rep.unreachable_to_goal_count << "\n";
  os << "stability-violation-count " << rep.stability_violation_count << "\n";
  os << "verdict " << explore_verdict(rep) << "\n";

  for (const auto& v : rep.invariant_violations)
    os << "invariant-violation " << v.digest << " " << v.name << " " << v.witness
       << "\n";
  for (const auto& v : rep.variant_violations)
    os << "variant-violation " << v.pre_digest << " " << v.event << " "
       << v.binding << " " << v.post_digest << " " << v.detail << "\n";
  for (const auto& d : rep.deadlocks) os << "deadlock " << d << "\n";
  for (const auto& d : rep.unreachable_to_goal)
    os << "unreachable-to-goal " << d << "\n";
  for (const auto& v : rep.stability_violations)
    os << "stability-violation " << v.pre_digest << " " << v.event << " "
       << v.binding << " " << v.post_digest << " " << v.detail << "\n";

  bool capped =
      rep.invariant_violations.size() < rep.invariant_violation_count ||
      rep.variant_violations.size() < rep.variant_violation_count ||
      rep.deadlocks.size() < rep.deadlock_count ||
      rep.unreachable_to_goal.size() < rep.unreachable_to_goal_count ||
      rep.stability_violations.size() < rep.stability_violation_count;
  if (capped)
    os << "# listings capped at " << kMaxListedViolations
       << " entries per category; counts above are exact\n";
  os << "# explored " << rep.state_count << " states and " << rep.edge_count
     << " edges";
  if (rep.partial) os << " (partial: hit " << rep.bound_hit << ")";
  os << "\n# verdict: " << explore_verdict(rep) << "\n";
}

inline void write_check_report(std::ostream& os, const ReportContext& ctx,
                               const std::string& trace_path,
                               const RefinementResult& res) {
  os << "format-version 1\n";
  os << "mode check\n";
  os << "scenario " << ctx.scenario_path << "\n";
  os << "trace " << trace_path << "\n";
  os << "steps " << res.steps.size() << "\n";
  std::size_t m2 = 0, m1 = 0, m0 = 0;
  for (const RefineStep& s : res.steps) {
    m2 += !s.m2_stutter;
    m1 += !s.m1_stutter;
    m0 += !s.m0_stutter;
  }
  os << "m2-events " << m2 << "\n";
  os << "m1-events " << m1 << "\n";
  os << "m0-events " << m0 << "\n";
  os << "refinement-violation-count " << res.violations.size() << "\n";
  os << "verdict " << (res.ok() ? "PASS" : "FAIL") << "\n";
  for (const RefineViolation& v : res.violations)
    os << "refinement-violation " << v.step << " " << v.level << " " << v.detail
       << "\n";
  os << "# replayed " << res.steps.size() << " steps: "
     << (res.ok() ? "every step projects to a valid abstract step or stutter"
                  : "refinement violated")
     << "\n";
}

}  // namespace fleetmc
