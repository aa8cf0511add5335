#pragma once

#include <string>
#include <vector>

#include "fleetmc/machine.hpp"
#include "fleetmc/trace_io.hpp"

namespace fleetmc {

// Per-step projection verdicts against the abstract machines:
//   M2 — territory level (Body cleans one previously non-cleaned sector)
//   M1 — zones level
//   M0 — goal level
// A step either projects to a valid abstract step or to a stutter.
struct RefineStep {
  int step = 0;
  bool m2_stutter = true;
  bool m1_stutter = true;
  bool m0_stutter = true;
};

struct RefineViolation {
  int step = 0;
  std::string level;  // M2 / M1 / M0
  std::string detail;
};

struct RefinementResult {
  std::vector<RefineStep> steps;
  std::vector<RefineViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks a concrete state sequence against the abstract machines. Only
// TaskSuccess may change the M2 projection, and only by cleaning exactly
// the one previously non-cleaned sector named in its binding; every other
// event must stutter at every level, and no projection may ever revert
// (PR4). The zone and goal views are derived, so the gluing invariants
// hold by construction; what is verified here is that every projected
// step is a legal abstract step.
inline RefinementResult check_refinement_states(
    const std::vector<SystemState>& states,
    const std::vector<EventInstance>& insts) {
  RefinementResult res;
  if (states.size() != insts.size() + 1)
    throw std::invalid_argument("need one more state than instances");

  for (std::size_t i = 0; i < insts.size(); ++i) {
    const SystemState& pre = states[i];
    const SystemState& post = states[i + 1];
    const EventInstance& inst = insts[i];
    RefineStep step;
    step.step = static_cast<int>(i) + 1;
    auto violate = [&](const char* level, const std::string& detail) {
      res.violations.push_back({step.step, level, detail});
    };

    // M2: sector-level diffs.
    std::vector<std::pair<int, int>> changed;
    for (int z = 1; z <= pre.zone_count; ++z)
      for (int s = 1; s <= pre.sector_count; ++s)
        if (pre.terr(z, s) != post.terr(z, s)) changed.emplace_back(z, s);
    for (auto& [z, s] : changed)
      if (pre.terr(z, s) == kCompl)
        violate("M2", "zone " + std::to_string(z) + " sector " +
                          std::to_string(s) + " reverted to incompl");

    if (inst.event == "TaskSuccess") {
      int z = as_int(inst.binding[2]);
      int s = as_int(inst.binding[3]);
      step.m2_stutter = false;
      if (changed.size() != 1 || changed[0] != std::make_pair(z, s))
        violate("M2", "TaskSuccess must clean exactly zone " +
                          std::to_string(z) + " sector " + std::to_string(s));
      else if (pre.terr(z, s) != kIncompl)
        violate("M2", "TaskSuccess fired on an already cleaned sector");
    } else if (!changed.empty()) {
      step.m2_stutter = false;
      violate("M2", inst.event + " must stutter but changed the territory");
    }

    // M1: zone view must be monotone and change at most one zone.
    AbstractView a = abstract_view(pre);
    AbstractView b = abstract_view(post);
    int zones_changed = 0;
    for (int z = 1; z <= pre.zone_count; ++z) {
      if (a.zones[z - 1] == b.zones[z - 1]) continue;
      ++zones_changed;
      if (a.zones[z - 1] == kCompl)
        violate("M1", "zone " + std::to_string(z) + " reverted to incompl");
    }
    if (zones_changed > 0) {
      step.m1_stutter = false;
      if (inst.event != "TaskSuccess")
        violate("M1", inst.event + " must stutter at the zones level");
      if (zones_changed > 1)
        violate("M1", "more than one zone changed in a single step");
    }

    // M0: the goal may only move incompl -> compl.
    if (a.goal != b.goal) {
      step.m0_stutter = false;
      if (a.goal == kCompl) violate("M0", "goal reverted to incompl");
      if (inst.event != "TaskSuccess")
        violate("M0", inst.event + " must stutter at the goal level");
    }

    res.steps.push_back(step);
  }
  return res;
}

struct ReplayedTrace {
  std::vector<SystemState> states;  // records.size() + 1 entries
  std::vector<EventInstance> insts;
};

// Rebuilds the concrete state sequence by firing the recorded events from
// the scenario's initial state, verifying every recorded digest, variant
// and invariant flag along the way. Throws TraceMismatch when the trace
// does not replay, ParseError when a record is unintelligible.
inline ReplayedTrace replay_trace(const Scenario& sc,
                                  const Machine<SystemState>& m,
                                  const std::vector<RawTraceRecord>& records) {
  ReplayedTrace out;
  SystemState state = initial_state(sc);
  out.states.push_back(state);

  for (std::size_t i = 0; i < records.size(); ++i) {
    const RawTraceRecord& r = records[i];
    std::string where = "step " + std::to_string(r.step);
    EventInstance inst = parse_instance(sc, r.event, r.binding);

    if (digest_hex(fnv1a64(encode(state))) != r.pre_digest)
      throw TraceMismatch(where + ": pre-state digest does not replay");
    if (m.variant(state) != r.variant_before)
      throw TraceMismatch(where + ": variantBefore does not replay");

    SystemState post;
    try {
      post = fire(m, state, inst);
    } catch (const GuardViolation& e) {
      throw TraceMismatch(where + ": " + e.what());
    }
    if (digest_hex(fnv1a64(encode(post))) != r.post_digest)
      throw TraceMismatch(where + ": post-state digest does not replay");
    if (m.variant(post) != r.variant_after)
      throw TraceMismatch(where + ": variantAfter does not replay");
    if (check_invariants(m, post).empty() != r.invariants_ok)
      throw TraceMismatch(where + ": invariantsOk flag does not replay");

    out.insts.push_back(std::move(inst));
    out.states.push_back(post);
    state = std::move(post);
  }
  return out;
}

// Replay + projection check: the `check` mode of the CLI.
inline RefinementResult check_refinement(const Scenario& sc,
                                         const Machine<SystemState>& m,
                                         const std::vector<RawTraceRecord>& records) {
  ReplayedTrace replayed = replay_trace(sc, m, records);
  return check_refinement_states(replayed.states, replayed.insts);
}

}  // namespace fleetmc
