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

#include "safla/flow_model.hpp"
#include "support.hpp"

using namespace safla;

namespace {

// Switch-facing entry mirroring the running example: TCP from a single
// source toward a /24 on port 443, rewrite VLAN and destination MAC, forward
// to port 6, copy to controller.
std::string example_document() {
  return R"([
    {"switch_id": "s1",
     "entries": [
       {"match": {"src_ip": "192.168.1.10", "dst_ip": "10.0.0.0/24",
                  "proto": "tcp", "dst_port": 443},
        "priority": 1500,
        "actions": [{"kind": "set_vlan", "arg": 200},
                    {"kind": "set_dst_mac", "arg": "de:ad:be:ef:00:01"},
                    {"kind": "output", "arg": 6},
                    {"kind": "to_controller"}],
        "counters": 3450,
        "timeout": 600}
     ]}
  ])";
}

}  // namespace

TEST_CASE("example entry parses losslessly") {
  auto tables = parse_flow_tables(example_document());
  REQUIRE(tables.size() == 1);
  CHECK(tables[0].switch_id == "s1");
  REQUIRE(tables[0].entries.size() == 1);
  const FlowEntry& e = tables[0].entries[0];
  CHECK(e.match.src_ip == IpPrefix::parse("192.168.1.10/32", "t"));
  CHECK(e.match.dst_ip == IpPrefix::parse("10.0.0.0/24", "t"));
  CHECK(e.match.proto == Proto::kTcp);
  CHECK(e.match.dst_port == uint16_t{443});
  CHECK(!e.match.src_port.has_value());
  CHECK(e.priority == 1500);
  CHECK(e.counters == 3450);
  CHECK(e.timeout == int64_t{600});
  CHECK(e.entry_index == 0);
  REQUIRE(e.actions.size() == 4);
  CHECK(e.actions[0] == Action::set_vlan(200));
  CHECK(e.actions[1] ==
        Action::set_dst_mac(MacAddr::parse("de:ad:be:ef:00:01", "t")));
  CHECK(e.actions[2] == Action::output(6));
  CHECK(e.actions[3] == Action::to_controller());

  // serialize . parse is the identity on the canonical form
  std::string canonical = serialize_flow_tables(tables);
  CHECK(parse_flow_tables(canonical) == tables);
  CHECK(serialize_flow_tables(parse_flow_tables(canonical)) == canonical);
}

TEST_CASE("empty document yields no tables") {
  CHECK(parse_flow_tables("[]").empty());
}

TEST_CASE("mask length 33 is rejected with its path") {
  std::string doc = R"([{"switch_id":"s1","entries":[
    {"match":{"src_ip":"10.0.0.1/33"},"priority":1,"actions":[{"kind":"drop"}],
     "counters":0,"timeout":null}]}])";
  CHECK_THROWS_WITH_AS(parse_flow_tables(doc),
                       "/0/entries/0/match/src_ip: mask length out of range "
                       "[0,32]",
                       ValueError);
}

TEST_CASE("unknown fields are rejected") {
  std::string doc = R"([{"switch_id":"s1","entries":[
    {"match":{"src_ipp":"10.0.0.1"},"priority":1,"actions":[],"counters":0,
     "timeout":null}]}])";
  CHECK_THROWS_AS(parse_flow_tables(doc), SchemaError);
  std::string doc2 = R"([{"switch_id":"s1","entries":[],"extra":1}])";
  CHECK_THROWS_AS(parse_flow_tables(doc2), SchemaError);
}

TEST_CASE("ports outside [1,65535] are rejected") {
  std::string doc = R"([{"switch_id":"s1","entries":[
    {"match":{"dst_port":0},"priority":1,"actions":[],"counters":0,
     "timeout":null}]}])";
  CHECK_THROWS_AS(parse_flow_tables(doc), ValueError);
  std::string doc2 = R"([{"switch_id":"s1","entries":[
    {"match":{"dst_port":70000},"priority":1,"actions":[],"counters":0,
     "timeout":null}]}])";
  CHECK_THROWS_AS(parse_flow_tables(doc2), ValueError);
}

TEST_CASE("action invariants") {
  std::string two_outputs = R"([{"switch_id":"s1","entries":[
    {"match":{},"priority":1,
     "actions":[{"kind":"output","arg":1},{"kind":"output","arg":2}],
     "counters":0,"timeout":null}]}])";
  CHECK_THROWS_AS(parse_flow_tables(two_outputs), ValueError);
  std::string drop_and_output = R"([{"switch_id":"s1","entries":[
    {"match":{},"priority":1,
     "actions":[{"kind":"drop"},{"kind":"output","arg":2}],
     "counters":0,"timeout":null}]}])";
  CHECK_THROWS_AS(parse_flow_tables(drop_and_output), ValueError);
}

TEST_CASE("classify_entry") {
  auto tables = parse_flow_tables(example_document());
  CHECK(classify_entry(tables[0].entries[0]) == EntryClass::kForwarding);

  FlowEntry drop;
  drop.actions = {Action::drop()};
  CHECK(classify_entry(drop) == EntryClass::kFunctional);

  FlowEntry punt;
  punt.actions = {Action::to_controller()};
  CHECK(classify_entry(punt) == EntryClass::kFunctional);

  FlowEntry rewrite;
  rewrite.actions = {Action::set_vlan(5)};
  CHECK(classify_entry(rewrite) == EntryClass::kFunctional);
}

TEST_CASE("higher priority wins") {
  FlowTable t;
  t.switch_id = "s1";
  FlowEntry low;
  low.match.dst_ip = IpPrefix::parse("10.0.0.0/8", "t");
  low.priority = 100;
  low.actions = {Action::output(1)};
  low.entry_index = 0;
  FlowEntry high = low;
  high.priority = 1500;
  high.actions = {Action::output(2)};
  high.entry_index = 1;
  t.entries = {low, high};

  Packet p = testsupport::base_packet();
  p.dst_ip = parse_ipv4("10.1.2.3", "t");
  const FlowEntry* hit = match_packet(t, p, 0.0);
  REQUIRE(hit != nullptr);
  CHECK(hit->priority == 1500);
}

TEST_CASE("empty table matches nothing") {
  FlowTable t;
  t.switch_id = "s1";
  CHECK(match_packet(t, testsupport::base_packet(), 0.0) == nullptr);
}

TEST_CASE("equal priority breaks ties by entry index") {
  FlowTable t;
  t.switch_id = "s1";
  for (int i = 0; i < 4; ++i) {
    FlowEntry e;
    e.priority = 10;
    e.actions = {Action::output(static_cast<uint32_t>(i + 1))};
    e.entry_index = i;
    t.entries.push_back(e);
  }
  // Only indices 0 and 3 match.
  Packet p = testsupport::base_packet();
  t.entries[1].match.proto = Proto::kUdp;
  t.entries[2].match.proto = Proto::kUdp;
  p.proto = Proto::kTcp;

  const FlowEntry* hit = match_packet(t, p, 0.0);
  REQUIRE(hit != nullptr);
  CHECK(hit->entry_index == 0);
  CHECK(hit == testsupport::oracle_match(t, p, 0.0));
}

TEST_CASE("expired entries are never returned") {
  FlowTable t;
  t.switch_id = "s1";
  FlowEntry e;
  e.priority = 10;
  e.actions = {Action::output(1)};
  e.timeout = 50;
  t.entries = {e};
  Packet p = testsupport::base_packet();
  CHECK(match_packet(t, p, 49.0) != nullptr);
  CHECK(match_packet(t, p, 50.0) == nullptr);  // horizon reached
  CHECK(match_packet(t, p, 51.0) == nullptr);
}

TEST_CASE("round-trip holds over randomized tables") {
  for (uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    std::vector<FlowTable> tables;
    size_t count = rng.below(3);
    for (size_t i = 0; i < count; ++i)
      tables.push_back(
          testsupport::random_table("s" + std::to_string(i), rng));
    std::string bytes = serialize_flow_tables(tables);
    auto reparsed = parse_flow_tables(bytes);
    CHECK(reparsed == tables);
    CHECK(serialize_flow_tables(reparsed) == bytes);
  }
}

TEST_CASE("match agrees with the brute-force oracle on 10^4 cases") {
  size_t matched = 0;
  for (uint64_t seed = 0; seed < 10000; ++seed) {
    Rng rng(Rng::derive(42, seed));
    FlowTable t = testsupport::random_table("s1", rng);
    Packet p = testsupport::random_packet(rng);
    double now = static_cast<double>(rng.below(100));
    const FlowEntry* expected = testsupport::oracle_match(t, p, now);
    const FlowEntry* got = match_packet(t, p, now);
    REQUIRE(got == expected);
    if (got != nullptr) ++matched;
  }
  // The generator must actually exercise hits, not just misses.
  CHECK(matched > 1000);
}

TEST_CASE("classification partitions every table") {
  for (uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    FlowTable t = testsupport::random_table("s1", rng);
    for (const FlowEntry& e : t.entries) {
      bool forwarding = classify_entry(e) == EntryClass::kForwarding;
      bool functional = classify_entry(e) == EntryClass::kFunctional;
      CHECK(forwarding != functional);
      CHECK(forwarding == e.output_port().has_value());
    }
  }
}
