// Command-line front end: scenario parsing, mode dispatch and report
// emission with stable formats and exit codes.
//
//   fleetmc simulate --scenario F [--seed S] [--trace-out F2] ...
//   fleetmc explore  --scenario F [--max-states N] [--report-out F3] ...
//   fleetmc check    --scenario F --trace F2
//
// Exit codes: 0 pass/completed, 1 property violation found, 2 malformed
// input, 3 invalid scenario.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fleetmc/explore.hpp"
#include "fleetmc/refine.hpp"
#include "fleetmc/report_io.hpp"
#include "fleetmc/sim.hpp"
#include "fleetmc/trace_io.hpp"

namespace {

fleetmc::Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw fleetmc::ParseError("cannot open scenario file: " + path);
  return fleetmc::parse_scenario(in);
}

int run_simulate(const std::string& scenario_path,
                 std::optional<std::uint64_t> seed,
                 std::optional<std::string> policy,
                 std::optional<int> max_steps,
                 const std::string& trace_out) {
  fleetmc::Scenario sc = load_scenario(scenario_path);
  fleetmc::RunOptions opt;
  opt.seed = seed ? *seed : sc.seeds.front();
  opt.policy = sc.policy;
  opt.max_steps = max_steps ? *max_steps : sc.max_steps;
  opt.fairness_bound = sc.fairness_bound;
  if (policy) {
    if (*policy == "uniform") opt.policy = fleetmc::SchedulerPolicy::uniform;
    else if (*policy == "failure-eager")
      opt.policy = fleetmc::SchedulerPolicy::failure_eager;
    else if (*policy == "recovery-eager")
      opt.policy = fleetmc::SchedulerPolicy::recovery_eager;
    else throw fleetmc::ParseError("unknown policy: " + *policy);
  }
  if (opt.max_steps < 1) throw fleetmc::ScenarioInvalid("max-steps must be >= 1");

  fleetmc::Machine<fleetmc::SystemState> m = fleetmc::build_machine(sc);
  fleetmc::Trace trace = fleetmc::run_trace(sc, m, opt);

  std::ostringstream body;
  fleetmc::write_trace(body, sc, trace);
  body << "# end-reason " << fleetmc::to_string(trace.end) << "\n";
  body << "# steps " << trace.steps() << "\n";
  body << "# completed " << (trace.completed() ? "true" : "false") << "\n";
  body << "# final-digest " << trace.final_digest << "\n";

  bool violation = trace.end == fleetmc::EndReason::quiescent && !trace.completed();
  for (const fleetmc::TraceRecord& r : trace.records)
    if (!r.invariants_ok) violation = true;

  if (trace_out.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream out(trace_out);
    if (!out) throw fleetmc::ParseError("cannot write trace file: " + trace_out);
    out << body.str();
    std::cout << "# trace written to " << trace_out << "\n";
    std::cout << "# end-reason " << fleetmc::to_string(trace.end) << ", steps "
              << trace.steps() << ", completed "
              << (trace.completed() ? "true" : "false") << "\n";
  }
  if (violation) {
    std::cout << "# property violation observed during simulation\n";
    return 1;
  }
  return 0;
}

int run_explore(const std::string& scenario_path,
                std::optional<std::size_t> max_states,
                std::optional<std::size_t> max_depth, std::optional<int> workers,
                const std::string& report_out) {
  fleetmc::Scenario sc = load_scenario(scenario_path);
  if (max_states) sc.max_states = *max_states;
  if (max_depth) sc.max_depth = *max_depth;
  if (workers) sc.workers = *workers;
  fleetmc::validate_scenario(sc);

  fleetmc::ExploreResult res = fleetmc::explore_scenario(sc);

  fleetmc::ReportContext ctx;
  ctx.scenario_path = scenario_path;
  ctx.scenario = &sc;
  ctx.workers = sc.workers;

  std::ostringstream body;
  fleetmc::write_explore_report(body, ctx, res.graph, res.report);
  if (report_out.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream out(report_out);
    if (!out) throw fleetmc::ParseError("cannot write report file: " + report_out);
    out << body.str();
    // Violations still go to standard output so failures are visible
    // without opening the report.
    std::istringstream lines(body.str());
    for (std::string line; std::getline(lines, line);)
      if (line.rfind("invariant-violation ", 0) == 0 ||
          line.rfind("variant-violation ", 0) == 0 ||
          line.rfind("deadlock ", 0) == 0 ||
          line.rfind("unreachable-to-goal ", 0) == 0 ||
          line.rfind("stability-violation ", 0) == 0)
        std::cout << line << "\n";
    std::cout << "# report written to " << report_out << " (verdict "
              << fleetmc::explore_verdict(res.report) << ")\n";
  }
  return res.report.pass() ? 0 : 1;
}

int run_check(const std::string& scenario_path, const std::string& trace_path) {
  fleetmc::Scenario sc = load_scenario(scenario_path);
  std::ifstream tin(trace_path);
  if (!tin) throw fleetmc::ParseError("cannot open trace file: " + trace_path);
  std::vector<fleetmc::RawTraceRecord> records = fleetmc::read_trace(tin);

  fleetmc::Machine<fleetmc::SystemState> m = fleetmc::build_machine(sc);
  fleetmc::RefinementResult res = fleetmc::check_refinement(sc, m, records);

  fleetmc::ReportContext ctx;
  ctx.scenario_path = scenario_path;
  ctx.scenario = &sc;
  fleetmc::write_check_report(std::cout, ctx, trace_path, res);
  return res.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"guarded-event model of a fault tolerant multi-robot cleaning "
               "fleet: simulator, exhaustive checker, refinement checker"};
  app.require_subcommand(1);

  std::string scenario_path, trace_out, report_out, trace_path, policy;
  std::uint64_t seed = 0;
  std::size_t max_states = 0, max_depth = 0;
  int max_steps = 0, workers = 0;

  CLI::App* sim = app.add_subcommand("simulate", "run one seeded trace");
  sim->add_option("--scenario", scenario_path, "scenario file")->required();
  CLI::Option* seed_opt = sim->add_option("--seed", seed, "scheduler seed");
  CLI::Option* policy_opt = sim->add_option("--policy", policy,
                                            "uniform|failure-eager|recovery-eager");
  CLI::Option* steps_opt = sim->add_option("--max-steps", max_steps, "step budget");
  sim->add_option("--trace-out", trace_out, "write the trace here");

  CLI::App* exp = app.add_subcommand("explore", "exhaustive reachability check");
  exp->add_option("--scenario", scenario_path, "scenario file")->required();
  CLI::Option* states_opt = exp->add_option("--max-states", max_states,
                                            "state bound (partial beyond)");
  CLI::Option* depth_opt = exp->add_option("--max-depth", max_depth, "depth bound");
  CLI::Option* workers_opt = exp->add_option("--workers", workers,
                                             "expansion workers (default 1)");
  exp->add_option("--report-out", report_out, "write the report here");

  CLI::App* chk = app.add_subcommand("check", "replay a trace and check refinement");
  chk->add_option("--scenario", scenario_path, "scenario file")->required();
  chk->add_option("--trace", trace_path, "trace file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed())
      return run_simulate(
          scenario_path,
          seed_opt->count() ? std::optional<std::uint64_t>(seed) : std::nullopt,
          policy_opt->count() ? std::optional<std::string>(policy) : std::nullopt,
          steps_opt->count() ? std::optional<int>(max_steps) : std::nullopt,
          trace_out);
    if (exp->parsed())
      return run_explore(
          scenario_path,
          states_opt->count() ? std::optional<std::size_t>(max_states)
                              : std::nullopt,
          depth_opt->count() ? std::optional<std::size_t>(max_depth) : std::nullopt,
          workers_opt->count() ? std::optional<int>(workers) : std::nullopt,
          report_out);
    if (chk->parsed()) return run_check(scenario_path, trace_path);
  } catch (const fleetmc::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const fleetmc::TraceMismatch& e) {
    std::cerr << "trace does not replay: " << e.what() << "\n";
    return 2;
  } catch (const fleetmc::ScenarioInvalid& e) {
    std::cerr << "invalid scenario: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
