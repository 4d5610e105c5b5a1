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

#include <map>
#include <tuple>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "safla/endpoint_tuple.hpp"
#include "safla/flow_model.hpp"
#include "safla/network_graph.hpp"

namespace safla {

/// Address identity of a flow entry: the fields by which entries cluster
/// within a switch and link across switches. Two entries describe the same
/// deployed flow iff their AddrKeys are equal.
struct AddrKey {
  IpPrefix src = IpPrefix::any();
  IpPrefix dst = IpPrefix::any();
  Proto proto = Proto::kAny;
  std::optional<uint16_t> dst_port;

  static AddrKey of(const MatchFields& match) {
    return AddrKey{match.src_ip, match.dst_ip, match.proto, match.dst_port};
  }

  /// Canonical text form, unique per key.
  std::string to_string() const {
    std::string out = src.to_string() + ">" + dst.to_string() + " " +
                      proto_to_string(proto) + " ";
    out += dst_port ? std::to_string(*dst_port) : "*";
    return out;
  }

  friend bool operator==(const AddrKey&, const AddrKey&) = default;
  friend bool operator<(const AddrKey& x, const AddrKey& y) {
    auto rank = [](const AddrKey& k) {
      return std::tuple(k.src, k.dst, k.proto,
                        k.dst_port ? static_cast<int>(*k.dst_port) : -1);
    };
    return rank(x) < rank(y);
  }
};

/// The forwarding entries of one switch that share an AddrKey. The egress
/// port comes from the highest-priority entry (ties to the smallest
/// entry_index), mirroring what the data plane would do.
struct EntryGroup {
  std::string switch_id;
  AddrKey key;
  std::vector<FlowEntry> entries;  // non-empty, sorted by (priority desc, index)
  uint32_t egress_port = 0;
};

/// Groups across switches that share an AddrKey; one deployed flow.
struct Chain {
  AddrKey key;
  std::map<std::string, EntryGroup> groups;  // by switch id, at most one each
};

enum class RejectReason {
  kBrokenLink,
  kNoIngress,
  kNoEgress,
  kCycle,
  kUnknownHost
};

std::string reject_reason_to_string(RejectReason r);

/// One chain ordered against the topology: the path its entries actually
/// realize, from the source host's access switch to the host the traffic is
/// delivered to. Invalid results carry the reason instead of throwing;
/// rejects feed the consistency diagnostics.
struct ExtractedIntent {
  AddrKey key;
  std::vector<std::string> path;  // switch ids, in traversal order
  std::string src_host;
  std::string dst_host;
  bool valid = false;
  std::optional<RejectReason> reject_reason;
  std::vector<std::string> chain_switches;  // every switch holding this key

  EndpointTuple to_tuple() const {
    return EndpointTuple{src_host, dst_host, key.proto, key.dst_port};
  }
  Json to_json() const;
};

struct ClusterResult {
  std::vector<EntryGroup> groups;  // sorted by (switch_id, key)
  std::vector<std::pair<std::string, FlowEntry>> functional;  // excluded
};

struct ExtractionResult {
  std::set<EndpointTuple> tuples;  // set G
  std::vector<ExtractedIntent> intents;  // valid and rejected, by key order
  std::vector<std::pair<std::string, FlowEntry>> functional;

  /// Valid extracted intents that produced `tuple` (usually exactly one).
  std::vector<const ExtractedIntent*> intents_for(
      const EndpointTuple& tuple) const;
};

/// Partitions each table's Forwarding entries by AddrKey. Functional
/// entries are excluded from grouping and reported alongside.
ClusterResult cluster_entries(const std::vector<FlowTable>& tables);

/// Links groups across switches: one Chain per distinct AddrKey.
std::vector<Chain> link_groups(const std::vector<EntryGroup>& groups);

/// Orders a chain into a path by egress-port traversal from the source
/// host's access switch, validating every hop against the graph.
ExtractedIntent aggregate(const Chain& chain, const NetworkGraph& graph);

/// The full bottom-up pipeline over a set of flow tables.
ExtractionResult extract(const std::vector<FlowTable>& tables,
                         const NetworkGraph& graph);

}  // namespace safla
