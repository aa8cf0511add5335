#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fleetmc/machine.hpp"
#include "fleetmc/sim.hpp"

namespace fleetmc {

// A trace file makes a replay-inconsistent claim: a digest, variant or
// invariant flag that replaying the events does not reproduce, or an
// event that is not enabled where the trace fires it. CLI exit code 2.
struct TraceMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One trace line as read from disk; agent names still unresolved.
struct RawTraceRecord {
  long step = 0;
  std::string event;
  std::string binding;
  std::string pre_digest;
  std::string post_digest;
  long long variant_before = 0;
  long long variant_after = 0;
  bool invariants_ok = true;
};

// Line format, fields space-separated in fixed order:
//   step event binding preDigest postDigest variantBefore variantAfter ok
// First line is `format-version 1`; `#` lines are comments.
inline void write_trace(std::ostream& os, const Scenario& sc, const Trace& trace) {
  os << "format-version 1\n";
  for (const TraceRecord& r : trace.records) {
    os << r.step << ' ' << r.inst.event << ' '
       << format_binding(sc, r.inst.event, r.inst.binding) << ' ' << r.pre_digest
       << ' ' << r.post_digest << ' ' << r.variant_before << ' '
       << r.variant_after << ' ' << (r.invariants_ok ? "ok" : "violated")
       << '\n';
  }
}

inline std::vector<RawTraceRecord> read_trace(std::istream& in) {
  std::vector<RawTraceRecord> out;
  std::string raw;
  int lineno = 0;
  bool version_seen = false;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string where = "trace line " + std::to_string(lineno);
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (!version_seen) {
      if (tok.size() != 2 || tok[0] != "format-version" || tok[1] != "1")
        throw ParseError(where + ": trace must start with format-version 1");
      version_seen = true;
      continue;
    }
    if (tok.size() != 8)
      throw ParseError(where + ": expected 8 fields, got " +
                       std::to_string(tok.size()));
    RawTraceRecord r;
    r.step = detail::parse_long(tok[0], where);
    r.event = tok[1];
    r.binding = tok[2];
    r.pre_digest = tok[3];
    r.post_digest = tok[4];
    r.variant_before = detail::parse_long(tok[5], where);
    r.variant_after = detail::parse_long(tok[6], where);
    if (tok[7] == "ok") r.invariants_ok = true;
    else if (tok[7] == "violated") r.invariants_ok = false;
    else throw ParseError(where + ": last field must be ok or violated");
    out.push_back(std::move(r));
  }
  if (!version_seen)
    throw ParseError("empty trace: format-version missing");
  return out;
}

}  // namespace fleetmc
