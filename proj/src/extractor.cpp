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

#include "safla/extractor.hpp"

#include <algorithm>
#include <set>

namespace safla {

std::string reject_reason_to_string(RejectReason r) {
  switch (r) {
    case RejectReason::kBrokenLink:
      return "broken_link";
    case RejectReason::kNoIngress:
      return "no_ingress";
    case RejectReason::kNoEgress:
      return "no_egress";
    case RejectReason::kCycle:
      return "cycle";
    case RejectReason::kUnknownHost:
      return "unknown_host";
  }
  return "unknown_host";
}

Json ExtractedIntent::to_json() const {
  Json j = Json::object();
  j["key"] = key.to_string();
  j["valid"] = valid;
  if (valid) {
    j["tuple"] = to_tuple().to_json();
  } else {
    j["reason"] = reject_reason_to_string(*reject_reason);
  }
  j["path"] = path;
  j["switches"] = chain_switches;
  return j;
}

std::vector<const ExtractedIntent*> ExtractionResult::intents_for(
    const EndpointTuple& tuple) const {
  std::vector<const ExtractedIntent*> out;
  for (const ExtractedIntent& g : intents)
    if (g.valid && g.to_tuple() == tuple) out.push_back(&g);
  return out;
}

ClusterResult cluster_entries(const std::vector<FlowTable>& tables) {
  ClusterResult result;
  // Keyed map keeps the output independent of table and entry order.
  std::map<std::pair<std::string, AddrKey>, EntryGroup> groups;
  for (const FlowTable& table : tables) {
    for (const FlowEntry& entry : table.entries) {
      if (classify_entry(entry) == EntryClass::kFunctional) {
        result.functional.emplace_back(table.switch_id, entry);
        continue;
      }
      AddrKey key = AddrKey::of(entry.match);
      EntryGroup& group = groups[{table.switch_id, key}];
      group.switch_id = table.switch_id;
      group.key = key;
      group.entries.push_back(entry);
    }
  }
  for (auto& [ignored, group] : groups) {
    std::sort(group.entries.begin(), group.entries.end(),
              [](const FlowEntry& x, const FlowEntry& y) {
                if (x.priority != y.priority) return x.priority > y.priority;
                return x.entry_index < y.entry_index;
              });
    // Forwarding entries always carry an Output action.
    group.egress_port = *group.entries.front().output_port();
    result.groups.push_back(std::move(group));
  }
  std::sort(result.functional.begin(), result.functional.end(),
            [](const auto& x, const auto& y) {
              if (x.first != y.first) return x.first < y.first;
              return x.second.entry_index < y.second.entry_index;
            });
  return result;
}

std::vector<Chain> link_groups(const std::vector<EntryGroup>& groups) {
  std::map<AddrKey, Chain> chains;
  for (const EntryGroup& group : groups) {
    Chain& chain = chains[group.key];
    chain.key = group.key;
    chain.groups[group.switch_id] = group;
  }
  std::vector<Chain> out;
  out.reserve(chains.size());
  for (auto& [ignored, chain] : chains) out.push_back(std::move(chain));
  return out;
}

ExtractedIntent aggregate(const Chain& chain, const NetworkGraph& graph) {
  ExtractedIntent result;
  result.key = chain.key;
  for (const auto& [sw, ignored] : chain.groups)
    result.chain_switches.push_back(sw);

  auto reject = [&result](RejectReason reason) {
    result.valid = false;
    result.reject_reason = reason;
    return result;
  };

  std::optional<std::string> src =
      graph.host_by_ip_prefix(chain.key.src.addr, chain.key.src.len);
  if (!src) return reject(RejectReason::kUnknownHost);
  result.src_host = *src;

  std::string start;
  try {
    start = graph.access_switch(*src);
  } catch (const Error&) {
    return reject(RejectReason::kNoIngress);
  }
  if (!chain.groups.count(start)) return reject(RejectReason::kNoIngress);

  std::set<std::string> visited;
  std::string cur = start;
  const size_t switch_count = [&graph] {
    size_t n = 0;
    for (const auto& [id, node] : graph.nodes())
      if (node.kind == NodeKind::kSwitch) ++n;
    return n;
  }();

  while (true) {
    if (visited.count(cur)) return reject(RejectReason::kCycle);
    visited.insert(cur);
    result.path.push_back(cur);
    if (result.path.size() > switch_count)
      return reject(RejectReason::kCycle);

    auto git = chain.groups.find(cur);
    if (git == chain.groups.end())
      return reject(RejectReason::kNoEgress);  // flow dead-ends mid-path

    std::optional<std::string> next =
        graph.neighbor_of(cur, git->second.egress_port);
    if (!next) return reject(RejectReason::kBrokenLink);

    const NodeRecord& node = graph.node_at(*next);
    if (node.kind == NodeKind::kHost) {
      // Traffic is handed to a host: that host is where this flow actually
      // delivers, whatever the key's destination prefix says.
      result.dst_host = *next;
      result.valid = true;
      return result;
    }
    cur = *next;
  }
}

ExtractionResult extract(const std::vector<FlowTable>& tables,
                         const NetworkGraph& graph) {
  ExtractionResult result;
  ClusterResult clustered = cluster_entries(tables);
  result.functional = std::move(clustered.functional);
  for (const Chain& chain : link_groups(clustered.groups)) {
    ExtractedIntent intent = aggregate(chain, graph);
    if (intent.valid) result.tuples.insert(intent.to_tuple());
    result.intents.push_back(std::move(intent));
  }
  return result;
}

}  // namespace safla
