#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "fleetmc/machine.hpp"

using namespace fleetmc;

namespace {

// Index helpers for the two_zone fixture (ids sort as B1,B2 / R1,R2).
constexpr int B1 = 0, B2 = 1, R1 = 0, R2 = 1;

bool contains_event(const std::vector<InvariantViolation>& vs,
                    const std::string& name) {
  for (const auto& v : vs)
    if (v.name == name) return true;
  return false;
}

}  // namespace

TEST_CASE("initial state matches the declared allocation") {
  Scenario sc = fixtures::two_zone();
  SystemState st = fixtures::sigma0();

  CHECK(st.zone_count == 2);
  CHECK(st.sector_count == 1);
  CHECK(st.counter == 2);
  CHECK(st.terr(1, 1) == kIncompl);
  CHECK(st.terr(2, 1) == kIncompl);
  CHECK(st.responsible[0] == B1);
  CHECK(st.responsible[1] == B2);
  CHECK(st.attached[R1] == B1);
  CHECK(st.attached[R2] == B2);
  for (int bs : {B1, B2})
    for (int z : {1, 2}) {
      CHECK(st.zone_mapped(bs, z));
      CHECK(st.lmap(bs, z, 1) == kIncompl);
    }
  CHECK(st.msg.empty());
  CHECK(st.active_count() == 2);
  CHECK(st.operating_count() == 2);

  Machine<SystemState> m = build_machine(sc);
  CHECK(check_invariants(m, st).empty());
}

TEST_CASE("one-zone scenario counter is n*k") {
  Scenario sc = fixtures::smoke();
  CHECK(initial_state(sc).counter == 1);
}

TEST_CASE("initial_state rejects broken allocations") {
  Scenario sc = fixtures::two_zone();
  sc.attached[R1] = 7;  // undeclared station
  CHECK_THROWS_AS(initial_state(sc), ScenarioInvalid);

  Scenario sc2 = fixtures::two_zone();
  sc2.responsible[1] = -1;  // zone without a station
  CHECK_THROWS_AS(initial_state(sc2), ScenarioInvalid);
}

TEST_CASE("NewTask assigns an idle robot to an uncleaned sector") {
  Scenario sc = fixtures::two_zone();
  Machine<SystemState> m = build_machine(sc);
  SystemState st = fixtures::sigma0();

  EventInstance nt{"NewTask", {B1, R1, 1, 1}};
  auto en = enabled(m, st);
  CHECK(std::find(en.begin(), en.end(), nt) != en.end());

  SystemState st1 = fire(m, st, nt);
  CHECK(st1.assigned_zone[R1] == 1);
  CHECK(st1.assigned_sector[R1] == 1);
  CHECK(st1.territory == st.territory);
  CHECK(st1.msg.empty());
  CHECK(variant_delta(m, st, nt, st1) == VariantDelta::unchanged);

  // not enabled twice: the robot already holds a task
  auto en1 = enabled(m, st1);
  CHECK(std::find(en1.begin(), en1.end(), nt) == en1.end());
}

TEST_CASE("PR5: a sector claimed by one robot is not offered to another") {
  Scenario sc = fixtures::two_zone();
  Machine<SystemState> m = build_machine(sc);
  SystemState st = fixtures::sigma0();
  st.attached[R2] = B1;  // both robots at B1

  SystemState st1 = fire(m, st, {"NewTask", {B1, R1, 1, 1}});
  const auto& nt = m.event("NewTask");
  CHECK_FALSE(nt.guard(st1, {B1, R2, 1, 1}));
}

TEST_CASE("TaskSuccess cleans, updates the map, broadcasts and counts down") {
  Scenario sc = fixtures::two_zone();
  Machine<SystemState> m = build_machine(sc);
  SystemState st1 = fire(m, fixtures::sigma0(), {"NewTask", {B1, R1, 1, 1}});

  CHECK(m.variant(st1) == 4);  // counter 2 + two attached robots
  SystemState st2 = fire(m, st1, {"TaskSuccess", {B1, R1, 1, 1}});
  CHECK(st2.counter == 1);
  CHECK(st2.terr(1, 1) == kCompl);
  CHECK(st2.lmap(B1, 1, 1) == kCompl);
  CHECK(st2.assigned_zone[R1] == kUnassigned);
  REQUIRE(st2.msg.size() == 1);
  CHECK(st2.msg_contains(B2, 1, 1));
  CHECK(m.variant(st2) == 3);

  AbstractView v = abstract_view(st2);
  CHECK(v.zones[0] == kCompl);
  CHECK(v.zones[1] == kIncompl);
  CHECK(v.goal == kIncompl);

  // with everything clean no TaskSuccess instance is enabled
  SystemState done = st2;
  done.set_terr(2, 1, kCompl);
  done.set_lmap(B2, 2, 1, kCompl);
  done.counter = 0;
  for (const EventInstance& inst : enabled(m, done))
    CHECK(inst.event != "TaskSuccess");
  CHECK_THROWS_AS(fire(m, done, EventInstance{"TaskSuccess", {B2, R2, 2, 1}}),
                  GuardViolation);
}

TEST_CASE("UpdateMap drains one message and synchronises the map") {
  Scenario sc = fixtures::two_zone();
  Machine<SystemState> m = build_machine(sc);
  SystemState st = fire(m, fixtures::sigma0(), {"NewTask", {B1, R1, 1, 1}});
  st = fire(m, st, {"TaskSuccess", {B1, R1, 1, 1}});

  SystemState st2 = fire(m, st, {"UpdateMap", {B2, 1, 1}});
  CHECK(st2.msg.empty());
  CHECK(st2.lmap(B2, 1, 1) == kCompl);
  CHECK(check_invariants(m, st2).empty());

  // empty buffer leaves UpdateMap disabled
  for (const EventInstance& inst : enabled(m, st2))
    CHECK(inst.event != "UpdateMap");

  // with no message pending for B2 its map equals the territory
  for (int z = 1; z <= 2; ++z)
    CHECK(st2.lmap(B2, z, 1) == st2.terr(z, 1));
}

TEST_CASE("TaskFailure detaches a failed assigned robot") {
  Scenario sc = fixtures::two_zone();
  Machine<SystemState> m = build_machine(sc);
  SystemState st1 = fire(m, fixtures::sigma0(), {"NewTask", {B1, R1, 1, 1}});

  // active robots cannot be "detected"
  const auto& tf = m.event("TaskFailure");
  CHECK_FALSE(tf.guard(st1, {B1, R1}));

  SystemState failed = st1;
  failed.active[R1] = 0;  // R1 died mid-task
  REQUIRE(tf.guard(failed, {B1, R1}));
  SystemState post = fire(m, failed, {"TaskFailure", {B1, R1}});
  CHECK(post.attached[R1] == kDetached);
  CHECK(post.assigned_zone[R1] == kUnassigned);
  CHECK(post.terr(1, 1) == kIncompl);  // the sector is assignable again

  // variant: card(dom(attached)) drops 2 -> 1
  CHECK(m.variant(failed) == 4);
  CHECK(m.variant(post) == 3);
  CHECK(variant_delta(m, failed, EventInstance{"TaskFailure", {B1, R1}}, post) ==
        VariantDelta::decreased);
}

TEST_CASE("RobotFailure needs budget and spares the last active robot") {
  Scenario sc = fixtures::two_zone();
  SystemState st = initial_state(sc);

  // faults disabled: no budget, nothing enabled
  Machine<SystemState> m0 = build_machine(sc);
  CHECK_FALSE(m0.event("RobotFailure").guard(st, {R1}));

  sc.faults.robot_budget = 1;
  Machine<SystemState> m1 = build_machine(sc);
  REQUIRE(m1.event("RobotFailure").guard(st, {R1}));
  SystemState post = fire(m1, st, {"RobotFailure", {R1}});
  CHECK(post.active[R1] == 0);
  CHECK(post.territory == st.territory);
  CHECK(post.attached == st.attached);

  // last active robot cannot fail even with budget left
  sc.faults.robot_budget = 2;  // would be invalid in a file; guard still holds the line
  CHECK_FALSE(build_machine(sc).event("RobotFailure").guard(post, {R2}));
}

TEST_CASE("BaseStationFailure spares the last operating station") {
  Scenario sc = fixtures::two_zone();
  sc.faults.station_budget = 1;
  Machine<SystemState> m = build_machine(sc);
  SystemState st = initial_state(sc);

  SystemState post = fire(m, st, {"BaseStationFailure", {B1}});
  CHECK(post.operating[B1] == 0);
  CHECK(post.operating[B2] == 1);
  CHECK(post.responsible == st.responsible);  // takeover is a separate event
  CHECK_FALSE(m.event("BaseStationFailure").guard(post, {B2}));
}

TEST_CASE("GetAdditionalResponsibility transfers zones, robots and purges") {
  Scenario sc = fixtures::two_zone();
  sc.faults.station_budget = 1;
  Machine<SystemState> m = build_machine(sc);
  SystemState st = fire(m, initial_state(sc), {"BaseStationFailure", {B1}});

  std::vector<int> zs{1};
  std::vector<int> rbs{R1};
  EventInstance ga{"GetAdditionalResponsibility", {B1, B2, zs, rbs}};
  auto en = enabled(m, st);
  REQUIRE(std::find(en.begin(), en.end(), ga) != en.end());

  SystemState post = fire(m, st, ga);
  CHECK(post.responsible[0] == B2);
  CHECK(post.responsible[1] == B2);
  CHECK(post.attached[R1] == B2);
  CHECK_FALSE(post.zone_mapped(B1, 1));
  CHECK_FALSE(post.zone_mapped(B1, 2));
  CHECK(check_invariants(m, post).empty());  // PR6-own-zone holds after transfer

  // wrong zone or robot set is not the takeover instance
  CHECK_FALSE(m.event("GetAdditionalResponsibility")
                  .guard(st, {B1, B2, std::vector<int>{2}, rbs}));
  CHECK_FALSE(m.event("GetAdditionalResponsibility")
                  .guard(st, {B1, B2, zs, std::vector<int>{}}));
}

TEST_CASE("takeover waits until the heir's map is fully accurate") {
  Scenario sc = fixtures::two_zone();
  sc.faults.station_budget = 1;
  Machine<SystemState> m = build_machine(sc);
  SystemState st = initial_state(sc);
  st = fire(m, st, {"NewTask", {B2, R2, 2, 1}});
  st = fire(m, st, {"TaskSuccess", {B2, R2, 2, 1}});  // enqueues msg for B1
  st = fire(m, st, {"BaseStationFailure", {B2}});

  EventInstance ga{"GetAdditionalResponsibility",
                   {B2, B1, std::vector<int>{2}, std::vector<int>{R2}}};
  CHECK_FALSE(m.event("GetAdditionalResponsibility").guard(st, ga.binding));

  SystemState drained = fire(m, st, {"UpdateMap", {B1, 2, 1}});
  CHECK(m.event("GetAdditionalResponsibility").guard(drained, ga.binding));
}

TEST_CASE("ReassignNewBStoRBs rescues a station with no active robots") {
  Scenario sc = fixtures::two_zone();
  sc.faults.robot_budget = 1;
  Machine<SystemState> m = build_machine(sc);
  SystemState st = fire(m, initial_state(sc), {"RobotFailure", {R2}});

  EventInstance ra{"ReassignNewBStoRBs", {B1, B2, std::vector<int>{R1}}};
  auto en = enabled(m, st);
  REQUIRE(std::find(en.begin(), en.end(), ra) != en.end());
  SystemState post = fire(m, st, ra);
  CHECK(post.attached[R1] == B2);
  CHECK(post.attached[R2] == B2);  // unchanged, still attached though failed
  CHECK(m.variant(post) == m.variant(st));  // override, no domain change

  // not enabled while the destination still has an active robot
  SystemState healthy = initial_state(sc);
  CHECK_FALSE(m.event("ReassignNewBStoRBs").guard(healthy, ra.binding));
}

TEST_CASE("pr8-literal reads the guard as 'has a failed attached robot'") {
  Scenario sc = fixtures::two_zone();
  sc.faults.robot_budget = 1;
  sc.guard_variant = GuardVariant::pr8_literal;
  Machine<SystemState> m = build_machine(sc);

  // R2 failed but still attached: literal guard holds
  SystemState st = fire(m, initial_state(sc), {"RobotFailure", {R2}});
  EventInstance ra{"ReassignNewBStoRBs", {B1, B2, std::vector<int>{R1}}};
  CHECK(m.event("ReassignNewBStoRBs").guard(st, ra.binding));

  // detach the failed robot: literal guard now fails where strict holds
  SystemState assigned = fire(m, initial_state(sc), {"NewTask", {B2, R2, 2, 1}});
  assigned = fire(m, assigned, {"RobotFailure", {R2}});
  assigned = fire(m, assigned, {"TaskFailure", {B2, R2}});
  CHECK_FALSE(m.event("ReassignNewBStoRBs").guard(assigned, ra.binding));
  Scenario strict = sc;
  strict.guard_variant = GuardVariant::pr8_strict;
  CHECK(build_machine(strict).event("ReassignNewBStoRBs").guard(assigned, ra.binding));
}

TEST_CASE("SendRobotsToBS donates idle robots once the donor is done") {
  Scenario sc = fixtures::two_zone();
  Machine<SystemState> m = build_machine(sc);
  SystemState st = fixtures::sigma0();

  EventInstance send{"SendRobotsToBS", {B1, B2, std::vector<int>{R1}}};
  CHECK_FALSE(m.event("SendRobotsToBS").guard(st, send.binding));  // zone 1 dirty

  st = fire(m, st, {"NewTask", {B1, R1, 1, 1}});
  st = fire(m, st, {"TaskSuccess", {B1, R1, 1, 1}});
  REQUIRE(m.event("SendRobotsToBS").guard(st, send.binding));
  SystemState post = fire(m, st, send);
  CHECK(post.attached[R1] == B2);
  CHECK(post.assigned_zone[R1] == kUnassigned);  // arrives unassigned (PR5 safe)
}

TEST_CASE("named invariants flag corrupted states with witnesses") {
  Scenario sc = fixtures::two_zone();
  Machine<SystemState> m = build_machine(sc);

  SystemState bad_counter = fixtures::sigma0();
  bad_counter.counter = 5;
  auto v1 = check_invariants(m, bad_counter);
  REQUIRE(v1.size() == 1);
  CHECK(v1[0].name == "counter-consistency");

  SystemState bad_map = fixtures::sigma0();
  bad_map.set_lmap(B1, 1, 1, kCompl);  // territory still incompl
  auto v2 = check_invariants(m, bad_map);
  CHECK(contains_event(v2, "PR6-global-local"));

  SystemState bad_pr5 = fixtures::sigma0();
  bad_pr5.attached[R2] = B1;
  bad_pr5.assigned_zone[R1] = bad_pr5.assigned_zone[R2] = 1;
  bad_pr5.assigned_sector[R1] = bad_pr5.assigned_sector[R2] = 1;
  CHECK(contains_event(check_invariants(m, bad_pr5), "PR5"));

  SystemState bad_msg = fixtures::sigma0();
  bad_msg.set_terr(1, 1, kCompl);
  bad_msg.counter = 1;
  bad_msg.set_lmap(B1, 1, 1, kCompl);
  // B2 was never told and no message is pending: accuracy broken
  CHECK(contains_event(check_invariants(m, bad_msg), "msg-accuracy"));

  SystemState bad_universe = fixtures::sigma0();
  bad_universe.active[R1] = bad_universe.active[R2] = 0;
  CHECK(contains_event(check_invariants(m, bad_universe), "agent-universe"));
}

TEST_CASE("a failed robot keeps its stale assignment without tripping coherence") {
  Scenario sc = fixtures::two_zone();
  sc.faults.robot_budget = 1;
  sc.faults.station_budget = 1;
  Machine<SystemState> m = build_machine(sc);

  SystemState st = initial_state(sc);
  st = fire(m, st, {"NewTask", {B2, R2, 2, 1}});
  st = fire(m, st, {"RobotFailure", {R2}});
  st = fire(m, st, {"BaseStationFailure", {B2}});
  st = fire(m, st, {"GetAdditionalResponsibility",
                    {B2, B1, std::vector<int>{2}, std::vector<int>{}}});

  // zone 2 now belongs to B1 while inactive R2 still claims (2,1)
  CHECK(st.responsible[1] == B1);
  CHECK(st.attached[R2] == B2);
  CHECK(st.assigned_zone[R2] == 2);
  CHECK(check_invariants(m, st).empty());

  // detection clears the stale claim and frees the sector
  SystemState post = fire(m, st, {"TaskFailure", {B2, R2}});
  CHECK(post.attached[R2] == kDetached);
  CHECK(m.event("NewTask").guard(post, {B1, R1, 2, 1}));
}

TEST_CASE("abstract view and goal") {
  SystemState st = fixtures::sigma0();
  AbstractView v0 = abstract_view(st);
  CHECK(v0.zones == std::vector<std::int8_t>{kIncompl, kIncompl});
  CHECK(v0.goal == kIncompl);
  CHECK_FALSE(goal_reached(st));

  st.set_terr(1, 1, kCompl);
  st.set_terr(2, 1, kCompl);
  st.counter = 0;
  CHECK(abstract_view(st).goal == kCompl);
  CHECK(goal_reached(st));
}

TEST_CASE("partially cleaned zone stays incompl in the zones view") {
  Scenario sc = fixtures::two_zone();
  sc.sectors = 2;
  SystemState st = initial_state(sc);
  st.set_terr(1, 1, kCompl);
  st.counter -= 1;
  AbstractView v = abstract_view(st);
  CHECK(v.zones[0] == kIncompl);
}

TEST_CASE("eligibility follows responsibility, attachment and health") {
  SystemState st = fixtures::sigma0();
  CHECK(eligible(st, AgentKind::station, B1, 1));
  CHECK_FALSE(eligible(st, AgentKind::station, B1, 2));
  CHECK(eligible(st, AgentKind::robot, R1, 1));
  CHECK_FALSE(eligible(st, AgentKind::robot, R1, 2));

  st.active[R1] = 0;
  CHECK_FALSE(eligible(st, AgentKind::robot, R1, 1));
  st.operating[B1] = 0;
  CHECK_FALSE(eligible(st, AgentKind::station, B1, 1));
}

TEST_CASE("variant is counter plus attached robots") {
  SystemState st = fixtures::sigma0();
  CHECK(variant_of(st) == 4);
  st.attached[R1] = kDetached;
  st.attached[R2] = kDetached;
  st.set_terr(1, 1, kCompl);
  st.set_terr(2, 1, kCompl);
  st.counter = 0;
  CHECK(variant_of(st) == 0);
}

TEST_CASE("robots frozen under a failed coordinator until takeover") {
  Scenario sc = fixtures::two_zone();
  sc.faults.station_budget = 1;
  Machine<SystemState> m = build_machine(sc);
  SystemState st = fire(m, initial_state(sc), {"NewTask", {B1, R1, 1, 1}});
  st = fire(m, st, {"BaseStationFailure", {B1}});

  CHECK_FALSE(m.event("TaskSuccess").guard(st, {B1, R1, 1, 1}));
  CHECK_FALSE(m.event("NewTask").guard(st, {B1, R1, 1, 1}));
}
