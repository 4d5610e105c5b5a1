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

#include "safla/assurance.hpp"

#include <algorithm>
#include <chrono>
#include <map>

#include "safla/log.hpp"

namespace safla {

namespace {

uint32_t host_ip(const NetworkGraph& graph, const std::string& host) {
  const NodeRecord* n = graph.find_node(host);
  if (n == nullptr || n->kind != NodeKind::kHost)
    throw UnknownHostError("unknown host '" + host + "'");
  auto it = n->attrs.find("ip");
  if (it == n->attrs.end())
    throw UnknownHostError("host '" + host + "' has no ip attribute");
  return parse_ipv4(it->second, "attrs/ip");
}

}  // namespace

std::string infeasible_reason_to_string(InfeasibleReason r) {
  return r == InfeasibleReason::kNoPath ? "no_path" : "unknown_host";
}

Json ConsistencyReport::to_json() const {
  Json j = Json::object();
  j["consistent"] = consistent;
  Json jm = Json::array();
  for (const auto& [tuple, id] : matched) {
    Json row = Json::object();
    row["tuple"] = tuple.to_json();
    row["intent_id"] = id;
    jm.push_back(std::move(row));
  }
  j["matched"] = std::move(jm);
  Json je = Json::array();
  for (const EndpointTuple& t : extraneous) je.push_back(t.to_json());
  j["extraneous"] = std::move(je);
  j["missing"] = missing;
  return j;
}

Json RemediationPlan::to_json() const {
  Json j = Json::object();
  Json jp = Json::array();
  for (const PurgeSelector& p : purges) {
    Json row = Json::object();
    row["switch"] = p.switch_id;
    row["key"] = p.key.to_string();
    jp.push_back(std::move(row));
  }
  j["purges"] = std::move(jp);
  Json jr = Json::array();
  for (const ReinstallAction& r : reinstalls) {
    Json row = Json::object();
    row["intent_id"] = r.intent_id;
    row["path"] = r.deployment.path;
    Json entries = Json::array();
    for (const auto& [sw, entry] : r.deployment.entries) {
      Json e = Json::object();
      e["switch"] = sw;
      e["entry"] = flow_entry_to_json(entry);
      entries.push_back(std::move(e));
    }
    row["entries"] = std::move(entries);
    jr.push_back(std::move(row));
  }
  j["reinstalls"] = std::move(jr);
  Json ji = Json::array();
  for (const auto& [id, reason] : infeasible) {
    Json row = Json::object();
    row["intent_id"] = id;
    row["reason"] = infeasible_reason_to_string(reason);
    ji.push_back(std::move(row));
  }
  j["infeasible"] = std::move(ji);
  return j;
}

Json CycleReport::to_json() const {
  Json j = Json::object();
  j["report"] = report.to_json();
  j["plan"] = plan.to_json();
  j["applied"] = applied;
  j["post_check"] = post_check.to_json();
  j["elapsed_s"] = elapsed_s;
  return j;
}

ConsistencyReport consistency_check(const std::set<EndpointTuple>& extracted,
                                    const IntentRepository& intents) {
  ConsistencyReport report;
  // Tuple -> declared intent ids. Repositories that pass the load
  // diagnostics have at most one id per tuple; with duplicates the smallest
  // id wins the match and the others surface as missing.
  std::map<EndpointTuple, std::vector<std::string>> declared;
  for (const auto& [id, intent] : intents.intents())
    declared[to_tuple(intent)].push_back(id);

  std::set<std::string> matched_ids;
  for (const EndpointTuple& tuple : extracted) {
    auto it = declared.find(tuple);
    if (it != declared.end()) {
      report.matched.emplace_back(tuple, it->second.front());
      matched_ids.insert(it->second.front());
    } else {
      report.extraneous.push_back(tuple);
    }
  }
  for (const auto& [id, intent] : intents.intents())
    if (!matched_ids.count(id)) report.missing.push_back(id);

  report.consistent = report.extraneous.empty() && report.missing.empty();
  return report;
}

std::optional<Deployment> compile_intent(const Intent& intent,
                                         const NetworkGraph& graph) {
  uint32_t src_ip = host_ip(graph, intent.src_host);
  uint32_t dst_ip = host_ip(graph, intent.dst_host);

  std::string src_switch, dst_switch;
  try {
    src_switch = graph.access_switch(intent.src_host);
    dst_switch = graph.access_switch(intent.dst_host);
  } catch (const UnattachedHostError&) {
    return std::nullopt;  // endpoint currently unreachable
  }

  auto path = graph.path_between(src_switch, dst_switch);
  if (!path) return std::nullopt;

  MatchFields match;
  match.src_ip = IpPrefix::host(src_ip);
  match.dst_ip = IpPrefix::host(dst_ip);
  match.proto = intent.proto;
  match.dst_port = intent.dst_port;

  Deployment deployment;
  deployment.path = *path;
  for (size_t i = 0; i < path->size(); ++i) {
    std::optional<uint32_t> egress;
    if (i + 1 < path->size()) {
      egress = graph.port_toward((*path)[i], (*path)[i + 1]);
    } else {
      egress = graph.port_toward((*path)[i], intent.dst_host);
    }
    if (!egress) return std::nullopt;  // link dropped mid-computation
    FlowEntry entry;
    entry.match = match;
    entry.priority = static_cast<uint32_t>(intent.priority_class);
    entry.actions = {Action::output(*egress)};
    deployment.entries.emplace_back((*path)[i], std::move(entry));
  }
  return deployment;
}

RemediationPlan plan_remediation(const ConsistencyReport& report,
                                 const IntentRepository& intents,
                                 const NetworkGraph& graph,
                                 const ExtractionResult& extraction) {
  RemediationPlan plan;

  std::set<PurgeSelector> purges;
  for (const EndpointTuple& tuple : report.extraneous) {
    for (const ExtractedIntent* g : extraction.intents_for(tuple)) {
      for (const std::string& sw : g->chain_switches)
        purges.insert(PurgeSelector{sw, g->key});
    }
  }

  for (const std::string& id : report.missing) {
    const Intent* intent = intents.find(id);
    if (intent == nullptr) continue;  // report predates a repository edit
    try {
      std::optional<Deployment> deployment = compile_intent(*intent, graph);
      if (deployment) {
        // Leftover entries under this key (a broken previous deployment, or
        // higher-priority flows injected against it) would shadow or
        // blackhole the fresh install; clear the key wherever it appears.
        AddrKey key = AddrKey::of(deployment->entries.front().second.match);
        for (const ExtractedIntent& g : extraction.intents) {
          if (!(g.key == key)) continue;
          for (const std::string& sw : g.chain_switches)
            purges.insert(PurgeSelector{sw, key});
        }
        plan.reinstalls.push_back(ReinstallAction{id, std::move(*deployment)});
      } else {
        plan.infeasible.emplace_back(id, InfeasibleReason::kNoPath);
      }
    } catch (const UnknownHostError&) {
      plan.infeasible.emplace_back(id, InfeasibleReason::kUnknownHost);
    }
  }
  plan.purges.assign(purges.begin(), purges.end());
  return plan;
}

void apply_plan(NetworkHandle& net, const RemediationPlan& plan) {
  std::vector<std::string> done;
  try {
    // Purges first, so a reinstalled entry can never be shadowed by flows
    // it was meant to displace.
    for (const PurgeSelector& p : plan.purges) {
      net.remove(p.switch_id, p.key);
      done.push_back("purge " + p.switch_id + " " + p.key.to_string());
    }
    for (const ReinstallAction& r : plan.reinstalls) {
      for (const auto& [sw, entry] : r.deployment.entries) {
        net.install(sw, entry);
        done.push_back("install " + r.intent_id + "@" + sw);
      }
    }
  } catch (const Error& e) {
    throw ApplyError(std::string("plan application failed: ") + e.what(),
                     std::move(done));
  }
}

CycleReport assurance_cycle(NetworkHandle& net, const IntentRepository& intents,
                            const NetworkGraph& graph) {
  const auto started = std::chrono::steady_clock::now();
  double modeled = 0.0;

  CycleReport cycle;
  std::vector<FlowTable> tables = net.export_flow_tables();
  modeled += net.export_latency_s();
  ExtractionResult extraction = extract(tables, graph);
  cycle.report = consistency_check(extraction.tuples, intents);
  cycle.plan = plan_remediation(cycle.report, intents, graph, extraction);

  if (!cycle.plan.purges.empty() || !cycle.plan.reinstalls.empty()) {
    apply_plan(net, cycle.plan);
    cycle.applied = true;
    std::vector<FlowTable> after = net.export_flow_tables();
    modeled += net.export_latency_s();
    cycle.post_check =
        consistency_check(extract(after, graph).tuples, intents);
  } else {
    cycle.post_check = cycle.report;
  }

  log::info("cycle: matched=" + std::to_string(cycle.report.matched.size()) +
            " extraneous=" + std::to_string(cycle.report.extraneous.size()) +
            " missing=" + std::to_string(cycle.report.missing.size()) +
            " applied=" + std::string(cycle.applied ? "yes" : "no"));

  cycle.elapsed_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count() +
      modeled;
  return cycle;
}

}  // namespace safla
