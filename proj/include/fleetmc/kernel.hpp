#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fleetmc {

// A parameter value in an event binding: either a scalar (zone, sector,
// agent index) or a set of scalars (robot group, zone group). Set values
// are kept sorted so bindings compare canonically.
using Value = std::variant<int, std::vector<int>>;
using Binding = std::vector<Value>;

inline int as_int(const Value& v) { return std::get<int>(v); }
inline const std::vector<int>& as_set(const Value& v) {
  return std::get<std::vector<int>>(v);
}

// An event name plus a concrete parameter binding: the unit of transition.
struct EventInstance {
  std::string event;
  Binding binding;

  bool operator==(const EventInstance& o) const {
    return event == o.event && binding == o.binding;
  }
};

inline bool operator<(const EventInstance& a, const EventInstance& b) {
  if (a.event != b.event) return a.event < b.event;
  return a.binding < b.binding;
}

inline bool operator!=(const EventInstance& a, const EventInstance& b) {
  return !(a == b);
}

// Convergent events must strictly decrease the machine variant,
// anticipated events must not increase it, ordinary events carry no
// variant obligation.
enum class EventStatus { anticipated, convergent, ordinary };

inline const char* to_string(EventStatus s) {
  switch (s) {
    case EventStatus::anticipated: return "anticipated";
    case EventStatus::convergent: return "convergent";
    case EventStatus::ordinary: return "ordinary";
  }
  return "?";
}

// Raised when an action is about to run on a state where its guard does
// not hold. Signals a scheduler or checker bug, never normal operation.
struct GuardViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One guarded event: finite parameter domains (enumerated from the
// current state), a guard predicate, and a total deterministic action.
template <typename State>
struct EventDef {
  std::string name;
  EventStatus status = EventStatus::ordinary;
  std::vector<std::function<std::vector<Value>(const State&)>> param_domains;
  std::function<bool(const State&, const Binding&)> guard;
  std::function<State(const State&, const Binding&)> action;
};

// A named state predicate. Returns nullopt when the invariant holds and a
// human-readable witness (offending indices/agents) when it does not.
template <typename State>
struct NamedPredicate {
  std::string name;
  std::function<std::optional<std::string>(const State&)> check;
};

struct InvariantViolation {
  std::string name;
  std::string witness;
};

template <typename State>
struct Machine {
  std::vector<EventDef<State>> events;
  std::vector<NamedPredicate<State>> invariants;
  std::function<long long(const State&)> variant = [](const State&) {
    return 0LL;
  };

  // Sorts events by name so enabled-instance enumeration is canonical.
  void finalize() {
    std::sort(events.begin(), events.end(),
              [](const EventDef<State>& a, const EventDef<State>& b) {
                return a.name < b.name;
              });
    for (std::size_t i = 1; i < events.size(); ++i)
      if (events[i - 1].name == events[i].name)
        throw std::logic_error("duplicate event name: " + events[i].name);
  }

  const EventDef<State>* find_event(std::string_view name) const {
    auto it = std::lower_bound(
        events.begin(), events.end(), name,
        [](const EventDef<State>& e, std::string_view n) { return e.name < n; });
    if (it == events.end() || it->name != name) return nullptr;
    return &*it;
  }

  const EventDef<State>& event(std::string_view name) const {
    const EventDef<State>* e = find_event(name);
    if (!e) throw std::out_of_range("no such event: " + std::string(name));
    return *e;
  }
};

// All candidate bindings of one event on a state, in lexicographic order.
// Domains are sorted before the cross product so the order is canonical
// regardless of how the model enumerates them.
template <typename State>
std::vector<Binding> candidate_bindings(const EventDef<State>& ev,
                                        const State& state) {
  std::vector<std::vector<Value>> domains;
  domains.reserve(ev.param_domains.size());
  std::size_t total = 1;
  for (const auto& dom : ev.param_domains) {
    domains.push_back(dom(state));
    auto& d = domains.back();
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    total *= d.size();
    if (d.empty()) return {};
  }
  std::vector<Binding> out;
  out.reserve(total);
  for (std::size_t t = 0; t < total; ++t) {
    Binding b(domains.size());
    std::size_t rem = t;
    for (std::size_t i = domains.size(); i-- > 0;) {
      b[i] = domains[i][rem % domains[i].size()];
      rem /= domains[i].size();
    }
    out.push_back(std::move(b));
  }
  return out;
}

// Exactly the instances whose guard holds, duplicate-free, ordered
// lexicographically by (event name, binding) so runs are reproducible.
template <typename State>
std::vector<EventInstance> enabled(const Machine<State>& m, const State& state) {
  std::vector<EventInstance> out;
  for (const EventDef<State>& ev : m.events)
    for (Binding& b : candidate_bindings(ev, state))
      if (ev.guard(state, b)) out.push_back(EventInstance{ev.name, std::move(b)});
  return out;
}

// Applies the event action. The input state is left untouched; transitions
// are value-to-value. Throws GuardViolation if the instance is not enabled.
template <typename State>
State fire(const Machine<State>& m, const State& state, const EventInstance& inst) {
  const EventDef<State>* ev = m.find_event(inst.event);
  if (!ev) throw GuardViolation("unknown event: " + inst.event);
  if (inst.binding.size() != ev->param_domains.size())
    throw GuardViolation(inst.event + ": binding arity mismatch");
  if (!ev->guard(state, inst.binding))
    throw GuardViolation(inst.event + ": guard does not hold");
  return ev->action(state, inst.binding);
}

// Names of all violated invariants, with witnesses. Empty means the state
// satisfies every registered invariant.
template <typename State>
std::vector<InvariantViolation> check_invariants(const Machine<State>& m,
                                                 const State& state) {
  std::vector<InvariantViolation> out;
  for (const NamedPredicate<State>& inv : m.invariants)
    if (std::optional<std::string> w = inv.check(state))
      out.push_back(InvariantViolation{inv.name, *w});
  return out;
}

enum class VariantDelta { decreased, unchanged, increased };

inline const char* to_string(VariantDelta d) {
  switch (d) {
    case VariantDelta::decreased: return "decreased";
    case VariantDelta::unchanged: return "unchanged";
    case VariantDelta::increased: return "increased";
  }
  return "?";
}

// Compares the machine variant across one transition. Callers must pass
// post = fire(m, pre, inst).
template <typename State>
VariantDelta variant_delta(const Machine<State>& m, const State& pre,
                           [[maybe_unused]] const EventInstance& inst,
                           const State& post) {
  long long before = m.variant(pre);
  long long after = m.variant(post);
  if (after < before) return VariantDelta::decreased;
  if (after > before) return VariantDelta::increased;
  return VariantDelta::unchanged;
}

}  // namespace fleetmc
