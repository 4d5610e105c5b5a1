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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "safla/json_util.hpp"

namespace safla {

enum class NodeKind { kSwitch, kHost };
enum class Status { kUp, kDown };

struct NodeRecord {
  std::string id;
  NodeKind kind = NodeKind::kSwitch;
  std::map<std::string, std::string> attrs;  // hosts carry "ip"
  Status status = Status::kUp;

  friend bool operator==(const NodeRecord&, const NodeRecord&) = default;
};

struct PortRef {
  std::string node;
  uint32_t port = 0;

  friend auto operator<=>(const PortRef&, const PortRef&) = default;
};

struct LinkRecord {
  PortRef a;
  PortRef b;
  Status status = Status::kUp;

  friend bool operator==(const LinkRecord&, const LinkRecord&) = default;
};

enum class EventKind { kNodeUp, kNodeDown, kLinkUp, kLinkDown, kAttrSet };

struct StateEvent {
  EventKind kind = EventKind::kNodeUp;
  std::string node;  // node events and attr_set
  PortRef a, b;      // link events
  std::string key, value;  // attr_set payload

  static StateEvent node_up(std::string id);
  static StateEvent node_down(std::string id);
  static StateEvent link_up(PortRef a, PortRef b);
  static StateEvent link_down(PortRef a, PortRef b);
  static StateEvent attr_set(std::string id, std::string key,
                             std::string value);
};

/// Snapshot of the network state: nodes, links, and attributes. Snapshots
/// are immutable values; apply_event produces the successor with revision+1.
/// Connectivity queries consider only Up nodes and Up links, and never route
/// through hosts.
class NetworkGraph {
 public:
  NetworkGraph() = default;

  static NetworkGraph from_json(const Json& doc);
  Json to_json() const;

  const std::map<std::string, NodeRecord>& nodes() const { return nodes_; }
  const std::vector<LinkRecord>& links() const { return links_; }
  uint64_t revision() const { return revision_; }

  const NodeRecord* find_node(const std::string& id) const;
  /// Node lookup that throws UnknownTargetError when absent.
  const NodeRecord& node_at(const std::string& id) const;

  bool has_link(const PortRef& a, const PortRef& b) const;

  /// All links touching `node`, regardless of status.
  std::vector<const LinkRecord*> links_of(const std::string& node) const;

  /// The node on the far end of the Up link at (node, port); nullopt when no
  /// link is present or the link or the peer node is Down.
  std::optional<std::string> neighbor_of(const std::string& node,
                                         uint32_t port) const;

  /// The switch-side port of the Up link at (node, port), peer status
  /// ignored. Used when wiring egress actions toward a known peer.
  std::optional<uint32_t> port_toward(const std::string& node,
                                      const std::string& peer) const;

  /// Hop-count shortest path over Up nodes and Up links. Interior nodes are
  /// always switches; among equal-length paths the lexicographically
  /// smallest node-id sequence wins. nullopt when disconnected.
  std::optional<std::vector<std::string>> path_between(
      const std::string& a, const std::string& b) const;

  /// The unique Up switch attached to `host` over an Up link.
  std::string access_switch(const std::string& host) const;

  /// The unique host whose ip attribute is covered by `prefix`, if exactly
  /// one exists.
  std::optional<std::string> host_by_ip_prefix(uint32_t addr, int len) const;

 private:
  friend NetworkGraph apply_event(const NetworkGraph&, const StateEvent&);

  void add_node(NodeRecord record, const std::string& path);
  void add_link(LinkRecord record, const std::string& path);
  void check_link_invariants(const LinkRecord& record,
                             const std::string& path) const;
  LinkRecord* find_link_mut(const PortRef& a, const PortRef& b);

  std::map<std::string, NodeRecord> nodes_;
  std::vector<LinkRecord> links_;
  std::map<PortRef, size_t> port_to_link_;
  uint64_t revision_ = 0;
};

/// Builds the graph from a topology document; revision starts at 0.
NetworkGraph build_network_graph(const std::string& document);

/// Returns the successor snapshot. NodeDown also marks incident links Down.
NetworkGraph apply_event(const NetworkGraph& graph, const StateEvent& event);

std::vector<StateEvent> parse_event_stream(const std::string& document);
Json event_to_json(const StateEvent& event);

}  // namespace safla
