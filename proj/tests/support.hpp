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

// Test-only oracles and generators. Everything here recomputes expectations
// by independent means (bit-by-bit prefix checks, filter-then-sort
// selection, plain BFS) so the library cannot agree with itself by accident.

#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "safla/flow_model.hpp"
#include "safla/intent_store.hpp"
#include "safla/network_graph.hpp"
#include "safla/rng.hpp"
#include "safla/simnet.hpp"

namespace testsupport {

using namespace safla;

// ---------------------------------------------------------------------------
// Brute-force match oracle
// ---------------------------------------------------------------------------

inline bool oracle_prefix_contains(const IpPrefix& prefix, uint32_t ip) {
  for (int bit = 0; bit < prefix.len; ++bit) {
    uint32_t mask = 1u << (31 - bit);
    if ((prefix.addr & mask) != (ip & mask)) return false;
  }
  return true;
}

inline bool oracle_admits(const MatchFields& m, const Packet& p) {
  if (!oracle_prefix_contains(m.src_ip, p.src_ip)) return false;
  if (!oracle_prefix_contains(m.dst_ip, p.dst_ip)) return false;
  if (m.proto != Proto::kAny && m.proto != p.proto) return false;
  if (m.src_port.has_value() && m.src_port.value() != p.src_port) return false;
  if (m.dst_port.has_value() && m.dst_port.value() != p.dst_port) return false;
  if (m.in_port.has_value() && m.in_port.value() != p.in_port) return false;
  if (m.vlan_id.has_value() && m.vlan_id.value() != p.vlan_id) return false;
  if (m.src_mac.has_value() && !(m.src_mac.value() == p.src_mac)) return false;
  if (m.dst_mac.has_value() && !(m.dst_mac.value() == p.dst_mac)) return false;
  if (m.eth_type.has_value() && m.eth_type.value() != 0x0800) return false;
  return true;
}

/// Filter-then-sort route: collect all live matching entries, sort by
/// (priority desc, index asc), take the front.
inline const FlowEntry* oracle_match(const FlowTable& t, const Packet& p,
                                     double now) {
  std::vector<const FlowEntry*> live;
  for (const FlowEntry& e : t.entries) {
    if (e.timeout.has_value() && now >= static_cast<double>(e.timeout.value()))
      continue;
    if (oracle_admits(e.match, p)) live.push_back(&e);
  }
  std::stable_sort(live.begin(), live.end(),
                   [](const FlowEntry* x, const FlowEntry* y) {
                     if (x->priority != y->priority)
                       return x->priority > y->priority;
                     return x->entry_index < y->entry_index;
                   });
  return live.empty() ? nullptr : live.front();
}

// ---------------------------------------------------------------------------
// Randomized inputs
// ---------------------------------------------------------------------------

// Small pools keep collision probability high enough that matches actually
// happen.
inline uint32_t pool_ip(Rng& rng) {
  static const char* kPool[] = {"10.0.0.1", "10.0.0.2", "10.0.1.1",
                                "192.168.1.10", "172.16.0.5"};
  return parse_ipv4(kPool[rng.below(5)], "pool");
}

inline uint16_t pool_port(Rng& rng) {
  static const uint16_t kPool[] = {80, 443, 8080, 22};
  return kPool[rng.below(4)];
}

inline Packet base_packet() {
  Packet p;
  p.src_ip = parse_ipv4("10.0.0.1", "t");
  p.dst_ip = parse_ipv4("10.0.0.2", "t");
  p.proto = Proto::kTcp;
  p.src_port = 40000;
  p.dst_port = 80;
  p.in_port = 1;
  p.vlan_id = 0;
  p.src_mac = MacAddr{0x020000000001ULL};
  p.dst_mac = MacAddr{0x020000000002ULL};
  return p;
}

inline Packet random_packet(Rng& rng) {
  Packet p;
  p.src_ip = pool_ip(rng);
  p.dst_ip = pool_ip(rng);
  p.proto = rng.below(3) == 0   ? Proto::kTcp
            : rng.below(2) == 0 ? Proto::kUdp
                                : Proto::kIcmp;
  p.src_port = pool_port(rng);
  p.dst_port = pool_port(rng);
  p.in_port = static_cast<uint32_t>(rng.below(4) + 1);
  p.vlan_id = static_cast<uint16_t>(rng.below(3) * 100);
  p.src_mac = MacAddr{0x020000000000ULL + rng.below(4)};
  p.dst_mac = MacAddr{0x020000000000ULL + rng.below(4)};
  return p;
}

inline FlowEntry random_entry(Rng& rng, int index) {
  FlowEntry e;
  if (rng.below(2)) {
    e.match.src_ip = IpPrefix{pool_ip(rng), static_cast<int>(rng.below(33))};
    uint32_t mask = e.match.src_ip.len == 0
                        ? 0
                        : (e.match.src_ip.len == 32
                               ? 0xffffffffu
                               : ~(0xffffffffu >> e.match.src_ip.len));
    e.match.src_ip.addr &= mask;
  }
  if (rng.below(2)) {
    e.match.dst_ip = IpPrefix{pool_ip(rng), static_cast<int>(rng.below(33))};
    uint32_t mask = e.match.dst_ip.len == 0
                        ? 0
                        : (e.match.dst_ip.len == 32
                               ? 0xffffffffu
                               : ~(0xffffffffu >> e.match.dst_ip.len));
    e.match.dst_ip.addr &= mask;
  }
  if (rng.below(3) == 0) e.match.proto = Proto::kTcp;
  if (rng.below(3) == 0) e.match.src_port = pool_port(rng);
  if (rng.below(3) == 0) e.match.dst_port = pool_port(rng);
  if (rng.below(4) == 0) e.match.in_port = static_cast<uint32_t>(rng.below(4) + 1);
  if (rng.below(4) == 0) e.match.vlan_id = static_cast<uint16_t>(rng.below(3) * 100);
  if (rng.below(5) == 0) e.match.src_mac = MacAddr{0x020000000000ULL + rng.below(4)};
  if (rng.below(5) == 0) e.match.dst_mac = MacAddr{0x020000000000ULL + rng.below(4)};
  if (rng.below(5) == 0) e.match.eth_type = rng.below(2) ? 0x0800 : 0x86dd;

  e.priority = static_cast<uint32_t>(rng.below(5) * 100);  // force ties
  switch (rng.below(4)) {
    case 0:
      e.actions = {Action::drop()};
      break;
    case 1:
      e.actions = {Action::to_controller()};
      break;
    case 2:
      e.actions = {Action::set_vlan(static_cast<uint16_t>(rng.below(4096))),
                   Action::output(static_cast<uint32_t>(rng.below(8) + 1))};
      break;
    default:
      e.actions = {Action::output(static_cast<uint32_t>(rng.below(8) + 1))};
      break;
  }
  e.counters = rng.below(10000);
  if (rng.below(4) == 0) e.timeout = static_cast<int64_t>(rng.below(100));
  e.entry_index = index;
  return e;
}

inline FlowTable random_table(const std::string& switch_id, Rng& rng) {
  FlowTable t;
  t.switch_id = switch_id;
  size_t count = rng.below(13);
  for (size_t i = 0; i < count; ++i)
    t.entries.push_back(random_entry(rng, static_cast<int>(i)));
  return t;
}

// ---------------------------------------------------------------------------
// Topology oracles
// ---------------------------------------------------------------------------

/// Plain BFS hop distance over Up nodes and Up links, hosts never transited.
/// nullopt when disconnected.
inline std::optional<size_t> oracle_bfs_hops(const NetworkGraph& g,
                                             const std::string& a,
                                             const std::string& b) {
  if (g.node_at(a).status != Status::kUp) return std::nullopt;
  if (g.node_at(b).status != Status::kUp) return std::nullopt;
  if (a == b) return 0;
  std::map<std::string, size_t> dist;
  std::deque<std::string> queue;
  dist[a] = 0;
  queue.push_back(a);
  while (!queue.empty()) {
    std::string cur = queue.front();
    queue.pop_front();
    if (cur != a && g.node_at(cur).kind == NodeKind::kHost) continue;
    for (const LinkRecord* l : g.links_of(cur)) {
      if (l->status != Status::kUp) continue;
      std::string peer = l->a.node == cur ? l->b.node : l->a.node;
      if (g.node_at(peer).status != Status::kUp) continue;
      if (dist.count(peer)) continue;
      dist[peer] = dist[cur] + 1;
      if (peer == b) return dist[peer];
      queue.push_back(peer);
    }
  }
  return std::nullopt;
}

/// Independent reachability oracle: per-switch highest-priority next hop for
/// the probe, composed along topology links. Ignores rewrites.
inline bool oracle_reaches(const SimNetwork& net, const Packet& probe,
                           const std::string& ingress,
                           const std::string& dst_host) {
  const NetworkGraph& g = net.graph();
  std::set<std::string> seen;
  std::string cur = ingress;
  while (!seen.count(cur)) {
    seen.insert(cur);
    auto it = net.tables().find(cur);
    if (it == net.tables().end()) return false;
    const FlowEntry* best = nullptr;
    for (const FlowEntry& e : it->second) {
      if (e.timeout.has_value() &&
          net.clock() >= static_cast<double>(e.timeout.value()))
        continue;
      if (!oracle_admits(e.match, probe)) continue;
      if (best == nullptr || e.priority > best->priority ||
          (e.priority == best->priority && e.entry_index < best->entry_index))
        best = &e;
    }
    if (best == nullptr) return false;
    auto out = best->output_port();
    if (!out) return false;
    auto peer = g.neighbor_of(cur, *out);
    if (!peer) return false;
    if (g.node_at(*peer).kind == NodeKind::kHost) return *peer == dst_host;
    cur = *peer;
  }
  return false;  // loop
}

/// Per-intent feasibility: a path exists between the access switches on the
/// current (possibly degraded) graph.
inline bool oracle_feasible(const SimNetwork& net, const Intent& intent) {
  try {
    std::string sa = net.graph().access_switch(intent.src_host);
    std::string sb = net.graph().access_switch(intent.dst_host);
    return oracle_bfs_hops(net.graph(), sa, sb).has_value();
  } catch (const Error&) {
    return false;
  }
}

inline double oracle_feasible_fraction(const SimNetwork& net,
                                       const IntentRepository& intents) {
  if (intents.size() == 0) return 1.0;
  size_t feasible = 0;
  for (const auto& [id, intent] : intents.intents())
    if (oracle_feasible(net, intent)) ++feasible;
  return static_cast<double>(feasible) / static_cast<double>(intents.size());
}

/// Set of intent ids whose probe currently reaches its destination,
/// according to the independent reachability oracle.
inline std::set<std::string> oracle_satisfied_set(
    const SimNetwork& net, const IntentRepository& intents) {
  std::set<std::string> out;
  for (const auto& [id, intent] : intents.intents()) {
    try {
      std::string ingress = net.graph().access_switch(intent.src_host);
      Packet p = probe_packet(net.graph(), intent);
      if (auto port = net.graph().port_toward(ingress, intent.src_host))
        p.in_port = *port;
      if (oracle_reaches(net, p, ingress, intent.dst_host)) out.insert(id);
    } catch (const Error&) {
    }
  }
  return out;
}

}  // namespace testsupport
