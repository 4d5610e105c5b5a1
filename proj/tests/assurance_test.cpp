// Copyright 2026 The SAFLA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "safla/assurance.hpp"
#include "safla/simnet.hpp"
#include "support.hpp"

using namespace safla;

namespace {

ScenarioSpec star_spec(int hosts, int intents, uint64_t seed) {
  ScenarioSpec spec;
  spec.topology.kind = TopologySpec::Kind::kStar;
  spec.topology.hosts = hosts;
  spec.intent_count = intents;
  spec.seed = seed;
  return spec;
}

ScenarioSpec mesh_spec(int rows, int cols, int intents, uint64_t seed) {
  ScenarioSpec spec;
  spec.topology.kind = TopologySpec::Kind::kMesh;
  spec.topology.rows = rows;
  spec.topology.cols = cols;
  spec.intent_count = intents;
  spec.seed = seed;
  return spec;
}

std::set<EndpointTuple> declared_tuples(const IntentRepository& repo) {
  std::set<EndpointTuple> out;
  for (const auto& [id, intent] : repo.intents()) out.insert(to_tuple(intent));
  return out;
}

void check_bijection(const ConsistencyReport& report) {
  std::set<std::string> tuple_texts, ids;
  for (const auto& [tuple, id] : report.matched) {
    CHECK(tuple_texts.insert(tuple.to_string()).second);
    CHECK(ids.insert(id).second);
  }
}

}  // namespace

TEST_CASE("consistency: identity is consistent") {
  Scenario scenario = build_scenario(star_spec(6, 4, 11));
  ConsistencyReport report =
      consistency_check(declared_tuples(scenario.intents), scenario.intents);
  CHECK(report.consistent);
  CHECK(report.matched.size() == 4);
  CHECK(report.extraneous.empty());
  CHECK(report.missing.empty());
  check_bijection(report);
}

TEST_CASE("consistency: empty G lists every intent as missing") {
  Scenario scenario = build_scenario(star_spec(12, 10, 11));
  ConsistencyReport report = consistency_check({}, scenario.intents);
  CHECK(!report.consistent);
  CHECK(report.missing.size() == 10);
  CHECK(std::is_sorted(report.missing.begin(), report.missing.end()));
}

TEST_CASE("consistency: ANY slots match only ANY slots") {
  IntentRepository repo;
  repo.upsert(Intent{"i1", "h1", "h2", Proto::kAny, std::nullopt, 100});
  // a /32-scoped extraction of the same endpoints is not the declared intent
  std::set<EndpointTuple> g = {
      EndpointTuple{"h1", "h2", Proto::kTcp, uint16_t{80}}};
  ConsistencyReport report = consistency_check(g, repo);
  CHECK(!report.consistent);
  CHECK(report.extraneous.size() == 1);
  CHECK(report.missing == std::vector<std::string>{"i1"});
}

TEST_CASE("consistency: hijack shows up as extraneous plus missing") {
  Scenario scenario = build_scenario(star_spec(11, 9, 23));
  inject_hijack(scenario.net, scenario.intents, 100.0 / 9.0, 23);
  ExtractionResult extraction =
      extract(scenario.net.export_flow_tables(), scenario.net.graph());
  ConsistencyReport report =
      consistency_check(extraction.tuples, scenario.intents);
  CHECK(!report.consistent);
  REQUIRE(report.extraneous.size() == 1);
  // the diverted flow is extracted toward the hijack host
  CHECK(report.extraneous[0].dst_host == scenario.net.hijack_host());
  REQUIRE(report.missing.size() == 1);
  // and the victim's own tuple is no longer extracted
  const Intent* victim = scenario.intents.find(report.missing[0]);
  REQUIRE(victim != nullptr);
  CHECK(report.extraneous[0].src_host == victim->src_host);
}

TEST_CASE("compile: adjacent access switches get one entry each") {
  Scenario scenario = build_scenario(mesh_spec(1, 2, 0, 3));
  // h01 on s00_00, h02 on s00_01
  Intent intent{"i1", "h01", "h02", Proto::kTcp, uint16_t{443}, 100};
  auto deployment = compile_intent(intent, scenario.net.graph());
  REQUIRE(deployment.has_value());
  CHECK(deployment->path == std::vector<std::string>{"s00_00", "s00_01"});
  REQUIRE(deployment->entries.size() == 2);
  // egress of the first hop crosses the inter-switch link
  const auto& [sw1, e1] = deployment->entries[0];
  CHECK(sw1 == "s00_00");
  CHECK(scenario.net.graph().neighbor_of(sw1, *e1.output_port()) ==
        std::string("s00_01"));
  const auto& [sw2, e2] = deployment->entries[1];
  CHECK(scenario.net.graph().neighbor_of(sw2, *e2.output_port()) ==
        std::string("h02"));
  CHECK(e1.priority == 100);
  CHECK(e1.match.src_ip.len == 32);
  CHECK(e1.match.dst_ip.len == 32);
}

TEST_CASE("compile: disconnected endpoints yield no deployment") {
  Scenario scenario = build_scenario(mesh_spec(1, 3, 0, 3));
  SimNetwork& net = scenario.net;
  net.apply_state_event(StateEvent::node_down("s00_01"));  // cut the middle
  Intent intent{"i1", "h01", "h02", Proto::kTcp, uint16_t{443}, 100};
  CHECK(!compile_intent(intent, net.graph()).has_value());
  CHECK_THROWS_AS(compile_intent(Intent{"i2", "hx", "h02", Proto::kTcp,
                                        uint16_t{443}, 100},
                                 net.graph()),
                  UnknownHostError);
}

TEST_CASE("compile then extract round-trips on an empty network") {
  Scenario scenario = build_scenario(mesh_spec(3, 3, 0, 3));
  SimNetwork& net = scenario.net;
  Intent intent{"i1", "h01", "h05", Proto::kUdp, uint16_t{53}, 100};
  auto deployment = compile_intent(intent, net.graph());
  REQUIRE(deployment.has_value());
  for (const auto& [sw, entry] : deployment->entries) net.install(sw, entry);

  ExtractionResult extraction =
      extract(net.export_flow_tables(), net.graph());
  CHECK(extraction.tuples == std::set<EndpointTuple>{to_tuple(intent)});
}

TEST_CASE("plan: hijack purge restores delivery") {
  Scenario scenario = build_scenario(star_spec(11, 9, 7));
  SimNetwork& net = scenario.net;
  auto injected = inject_hijack(net, scenario.intents, 100.0, 7);
  CHECK(survival_rate(net, scenario.intents) == doctest::Approx(0.0));

  ExtractionResult extraction =
      extract(net.export_flow_tables(), net.graph());
  ConsistencyReport report =
      consistency_check(extraction.tuples, scenario.intents);
  RemediationPlan plan =
      plan_remediation(report, scenario.intents, net.graph(), extraction);
  CHECK(plan.purges.size() == 9);
  CHECK(plan.reinstalls.size() == 9);
  CHECK(plan.infeasible.empty());
  apply_plan(net, plan);

  CHECK(survival_rate(net, scenario.intents) == doctest::Approx(1.0));
  // every injected entry is gone from the final tables
  for (const auto& [sw, entry] : injected) {
    auto it = net.tables().find(sw);
    REQUIRE(it != net.tables().end());
    for (const FlowEntry& live : it->second) {
      CHECK(!(live.match == entry.match && live.priority == entry.priority));
    }
  }
}

TEST_CASE("plan: node failure reroutes over the surviving mesh") {
  Scenario scenario = build_scenario(mesh_spec(4, 4, 6, 19));
  SimNetwork& net = scenario.net;
  fail_nodes(net, 75.0, 19);  // 4 switches go down

  ExtractionResult extraction =
      extract(net.export_flow_tables(), net.graph());
  ConsistencyReport report =
      consistency_check(extraction.tuples, scenario.intents);
  RemediationPlan plan =
      plan_remediation(report, scenario.intents, net.graph(), extraction);
  CHECK(report.extraneous.empty());  // failures break chains, they do not forge them
  apply_plan(net, plan);

  // every reinstalled path avoids Down nodes by construction; verify against
  // the BFS oracle that reinstall happened exactly for the feasible ones
  for (const ReinstallAction& r : plan.reinstalls) {
    for (const std::string& sw : r.deployment.path)
      CHECK(net.graph().node_at(sw).status == Status::kUp);
    CHECK(testsupport::oracle_feasible(net, *scenario.intents.find(r.intent_id)));
  }
  for (const auto& [id, reason] : plan.infeasible) {
    CHECK(!testsupport::oracle_feasible(net, *scenario.intents.find(id)));
    CHECK(reason == InfeasibleReason::kNoPath);
  }
  CHECK(survival_rate(net, scenario.intents) ==
        doctest::Approx(testsupport::oracle_feasible_fraction(
            net, scenario.intents)));
}

TEST_CASE("plan: isolated endpoints are infeasible, not fatal") {
  Scenario scenario = build_scenario(mesh_spec(1, 3, 1, 4));
  SimNetwork& net = scenario.net;
  net.apply_state_event(StateEvent::node_down("s00_01"));
  CycleReport cycle = assurance_cycle(net, scenario.intents, net.graph());
  CHECK(cycle.plan.reinstalls.empty());
  REQUIRE(cycle.plan.infeasible.size() == 1);
  CHECK(cycle.plan.infeasible[0].second == InfeasibleReason::kNoPath);
  CHECK(!cycle.applied);  // nothing purgable, nothing installable
}

TEST_CASE("cycle: consistent network is a fixpoint") {
  Scenario scenario = build_scenario(star_spec(8, 5, 2));
  CycleReport cycle =
      assurance_cycle(scenario.net, scenario.intents, scenario.net.graph());
  CHECK(cycle.report.consistent);
  CHECK(cycle.plan.empty());
  CHECK(!cycle.applied);
  CHECK(cycle.post_check.consistent);
  CHECK(cycle.elapsed_s > 0.0);
}

TEST_CASE("cycle: star hijack recovers for every intensity") {
  for (int k = 1; k <= 9; ++k) {
    Scenario scenario = build_scenario(star_spec(11, 9, 31));
    SimNetwork& net = scenario.net;
    inject_hijack(net, scenario.intents, k * 100.0 / 9.0, 31 + k);
    CHECK(survival_rate(net, scenario.intents) ==
          doctest::Approx((9.0 - k) / 9.0));
    CycleReport cycle = assurance_cycle(net, scenario.intents, net.graph());
    CHECK(cycle.applied);
    CHECK(cycle.post_check.consistent);
    CHECK(survival_rate(net, scenario.intents) == doctest::Approx(1.0));
  }
}

TEST_CASE("cycle: degraded mesh converges to the feasible set") {
  Scenario scenario = build_scenario(mesh_spec(10, 10, 10, 40));
  SimNetwork& net = scenario.net;
  fail_nodes(net, 40.0, 40);
  CycleReport cycle = assurance_cycle(net, scenario.intents, net.graph());

  // missing after remediation is exactly the infeasible set
  std::vector<std::string> infeasible_ids;
  for (const auto& [id, reason] : cycle.plan.infeasible)
    infeasible_ids.push_back(id);
  std::sort(infeasible_ids.begin(), infeasible_ids.end());
  CHECK(cycle.post_check.missing == infeasible_ids);
  CHECK(cycle.post_check.extraneous.empty());
  CHECK(survival_rate(net, scenario.intents) ==
        doctest::Approx(
            testsupport::oracle_feasible_fraction(net, scenario.intents)));
}

TEST_CASE("property: purge safety") {
  // No purge selector ever targets a key whose extracted flow matches a
  // declared intent, and applying a full plan never un-delivers an intent
  // that was delivered before (checked separately as monotone non-harm).
  for (uint64_t seed = 0; seed < 15; ++seed) {
    Scenario scenario = build_scenario(star_spec(11, 9, seed));
    SimNetwork& net = scenario.net;
    inject_hijack(net, scenario.intents, 50.0, seed);

    ExtractionResult extraction =
        extract(net.export_flow_tables(), net.graph());
    ConsistencyReport report =
        consistency_check(extraction.tuples, scenario.intents);
    RemediationPlan plan =
        plan_remediation(report, scenario.intents, net.graph(), extraction);

    std::set<EndpointTuple> declared = declared_tuples(scenario.intents);
    std::set<std::string> matched_keys;
    for (const ExtractedIntent& g : extraction.intents)
      if (g.valid && declared.count(g.to_tuple()))
        matched_keys.insert(g.key.to_string());
    for (const PurgeSelector& p : plan.purges)
      CHECK(!matched_keys.count(p.key.to_string()));
  }
}

TEST_CASE("property: cycles are idempotent on static topology") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Scenario scenario = build_scenario(mesh_spec(5, 5, 8, seed));
    SimNetwork& net = scenario.net;
    inject_hijack(net, scenario.intents, 40.0, seed);
    fail_nodes(net, 80.0, seed);

    CycleReport first = assurance_cycle(net, scenario.intents, net.graph());
    CycleReport second = assurance_cycle(net, scenario.intents, net.graph());
    CHECK(second.plan.purges.empty());
    CHECK(second.plan.reinstalls.empty());
    CHECK(!second.applied);
    // infeasible intents stay reported, nothing else changes
    CHECK(second.report.missing == first.post_check.missing);
    CycleReport third = assurance_cycle(net, scenario.intents, net.graph());
    CHECK(third.plan.infeasible.size() == second.plan.infeasible.size());
  }
}

TEST_CASE("property: remediation never harms satisfied intents") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Scenario scenario = build_scenario(mesh_spec(5, 5, 8, 100 + seed));
    SimNetwork& net = scenario.net;
    inject_hijack(net, scenario.intents, 30.0, seed);
    fail_nodes(net, 70.0, seed);

    std::set<std::string> before =
        testsupport::oracle_satisfied_set(net, scenario.intents);
    assurance_cycle(net, scenario.intents, net.graph());
    std::set<std::string> after =
        testsupport::oracle_satisfied_set(net, scenario.intents);
    CHECK(std::includes(after.begin(), after.end(), before.begin(),
                        before.end()));
  }
}

TEST_CASE("property: convergence in one cycle after faults stop") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Scenario scenario = build_scenario(mesh_spec(6, 6, 9, 200 + seed));
    SimNetwork& net = scenario.net;
    inject_hijack(net, scenario.intents, 60.0, seed);
    fail_nodes(net, 75.0, seed);

    CycleReport cycle = assurance_cycle(net, scenario.intents, net.graph());
    std::vector<std::string> infeasible_ids;
    for (const auto& [id, reason] : cycle.plan.infeasible)
      infeasible_ids.push_back(id);
    std::sort(infeasible_ids.begin(), infeasible_ids.end());
    CHECK(cycle.post_check.extraneous.empty());
    CHECK(cycle.post_check.missing == infeasible_ids);
    for (const std::string& id : cycle.post_check.missing)
      CHECK(!testsupport::oracle_feasible(net, *scenario.intents.find(id)));
  }
}

TEST_CASE("apply errors carry the partial application record") {
  Scenario scenario = build_scenario(star_spec(4, 2, 5));
  RemediationPlan plan;
  plan.purges.push_back(PurgeSelector{"s1", AddrKey{}});
  plan.purges.push_back(PurgeSelector{"s_missing", AddrKey{}});
  try {
    apply_plan(scenario.net, plan);
    FAIL("expected ApplyError");
  } catch (const ApplyError& e) {
    REQUIRE(e.applied().size() == 1);
    CHECK(e.applied()[0].find("s1") != std::string::npos);
  }
}
