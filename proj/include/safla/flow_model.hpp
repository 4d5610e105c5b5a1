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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "safla/json_util.hpp"

namespace safla {

// ---------------------------------------------------------------------------
// Field primitives
// ---------------------------------------------------------------------------

/// IPv4 prefix in address/mask-length form. The all-match prefix is 0.0.0.0/0.
struct IpPrefix {
  uint32_t addr = 0;  // host byte order, masked to `len` bits
  int len = 0;        // [0, 32]

  static IpPrefix any() { return {0, 0}; }
  static IpPrefix host(uint32_t address) { return {address, 32}; }

  /// Parses "a.b.c.d/len" or "a.b.c.d" (mask length defaults to 32). Host
  /// bits beyond the mask are cleared.
  static IpPrefix parse(const std::string& text, const std::string& path);

  bool contains(uint32_t ip) const {
    if (len == 0) return true;
    uint32_t mask = len == 32 ? 0xffffffffu : ~(0xffffffffu >> len);
    return (ip & mask) == addr;
  }
  bool is_any() const { return len == 0 && addr == 0; }
  std::string to_string() const;

  friend auto operator<=>(const IpPrefix&, const IpPrefix&) = default;
};

/// Parses a concrete dotted-quad IPv4 address.
uint32_t parse_ipv4(const std::string& text, const std::string& path);
std::string ipv4_to_string(uint32_t addr);

/// 48-bit MAC address.
struct MacAddr {
  uint64_t bits = 0;  // lower 48 bits

  static MacAddr parse(const std::string& text, const std::string& path);
  std::string to_string() const;

  friend auto operator<=>(const MacAddr&, const MacAddr&) = default;
};

enum class Proto { kTcp, kUdp, kIcmp, kAny };

std::string proto_to_string(Proto p);
Proto proto_from_string(const std::string& s, const std::string& path);

// ---------------------------------------------------------------------------
// Flow entries
// ---------------------------------------------------------------------------

/// Match side of a flow entry. Optional fields and /0 prefixes mean "match
/// every packet value"; in the JSON form those fields are simply absent.
struct MatchFields {
  IpPrefix src_ip = IpPrefix::any();
  IpPrefix dst_ip = IpPrefix::any();
  Proto proto = Proto::kAny;
  std::optional<uint16_t> src_port;
  std::optional<uint16_t> dst_port;
  std::optional<uint32_t> in_port;
  std::optional<uint16_t> vlan_id;
  std::optional<MacAddr> src_mac;
  std::optional<MacAddr> dst_mac;
  std::optional<uint16_t> eth_type;

  friend bool operator==(const MatchFields&, const MatchFields&) = default;
};

enum class ActionKind { kOutput, kDrop, kToController, kSetVlan, kSetDstMac };

struct Action {
  ActionKind kind = ActionKind::kDrop;
  uint32_t port = 0;   // kOutput
  uint16_t vlan = 0;   // kSetVlan
  MacAddr mac;         // kSetDstMac

  static Action output(uint32_t port) {
    Action a;
    a.kind = ActionKind::kOutput;
    a.port = port;
    return a;
  }
  static Action drop() { return Action{}; }
  static Action to_controller() {
    Action a;
    a.kind = ActionKind::kToController;
    return a;
  }
  static Action set_vlan(uint16_t vlan) {
    Action a;
    a.kind = ActionKind::kSetVlan;
    a.vlan = vlan;
    return a;
  }
  static Action set_dst_mac(MacAddr mac) {
    Action a;
    a.kind = ActionKind::kSetDstMac;
    a.mac = mac;
    return a;
  }

  friend bool operator==(const Action&, const Action&) = default;
};

/// One rule of a switch configuration. `entry_index` is the entry's position
/// in the exported table and is assigned by the parser, not the document.
struct FlowEntry {
  MatchFields match;
  uint32_t priority = 0;
  std::vector<Action> actions;
  uint64_t counters = 0;
  std::optional<int64_t> timeout;  // absolute expiry horizon, seconds
  int entry_index = 0;

  /// The Output port, if any action forwards.
  std::optional<uint32_t> output_port() const;

  friend bool operator==(const FlowEntry&, const FlowEntry&) = default;
};

struct FlowTable {
  std::string switch_id;
  std::vector<FlowEntry> entries;

  friend bool operator==(const FlowTable&, const FlowTable&) = default;
};

/// A concrete probe unit: every field holds a single value.
struct Packet {
  uint32_t src_ip = 0;
  uint32_t dst_ip = 0;
  Proto proto = Proto::kTcp;  // never kAny
  uint16_t src_port = 0;
  uint16_t dst_port = 0;
  uint32_t in_port = 0;
  uint16_t vlan_id = 0;
  MacAddr src_mac;
  MacAddr dst_mac;
};

enum class EntryClass { kForwarding, kFunctional };

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Parses a flow-table document (JSON array of {switch_id, entries}).
/// Unknown fields are rejected; parse(serialize(T)) == T.
std::vector<FlowTable> parse_flow_tables(const std::string& document);

/// Canonical serialization: match fields that mean ANY are omitted, field
/// order is fixed, timeout is always present (null when unset).
std::string serialize_flow_tables(const std::vector<FlowTable>& tables);

Json flow_entry_to_json(const FlowEntry& entry);
Json flow_tables_to_json(const std::vector<FlowTable>& tables);
std::vector<FlowTable> flow_tables_from_json(const Json& doc);

/// Forwarding iff the actions contain an Output; everything else (drop-only,
/// controller-only, rewrite-only) is Functional.
EntryClass classify_entry(const FlowEntry& entry);

/// True when `match` admits `packet`. Packets are IPv4 probes, so an
/// eth_type constraint matches only 0x0800.
bool match_admits(const MatchFields& match, const Packet& packet);

/// The matching non-expired entry of maximal priority; equal priorities are
/// broken by smallest entry_index. Returns nullptr when nothing matches. The
/// pointer aliases `table` and is invalidated by table mutation.
const FlowEntry* match_packet(const FlowTable& table, const Packet& packet,
                              double now);
const FlowEntry* match_packet(const std::vector<FlowEntry>& entries,
                              const Packet& packet, double now);

}  // namespace safla
