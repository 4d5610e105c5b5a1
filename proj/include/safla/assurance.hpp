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

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "safla/extractor.hpp"
#include "safla/intent_store.hpp"
#include "safla/network_graph.hpp"

namespace safla {

/// Result of matching the extracted tuples (set G) against the declared
/// intents (set I). Consistent iff the match is a perfect one-to-one cover
/// of both sides.
struct ConsistencyReport {
  std::vector<std::pair<EndpointTuple, std::string>> matched;
  std::vector<EndpointTuple> extraneous;  // in G, not declared
  std::vector<std::string> missing;       // declared, not extracted
  bool consistent = false;

  Json to_json() const;
};

/// Compiled realization of one intent: the path between the endpoint access
/// switches and the flow entry for each switch on it.
struct Deployment {
  std::vector<std::string> path;
  std::vector<std::pair<std::string, FlowEntry>> entries;
};

struct PurgeSelector {
  std::string switch_id;
  AddrKey key;

  friend bool operator==(const PurgeSelector&, const PurgeSelector&) = default;
  friend bool operator<(const PurgeSelector& x, const PurgeSelector& y) {
    if (x.switch_id != y.switch_id) return x.switch_id < y.switch_id;
    return x.key < y.key;
  }
};

struct ReinstallAction {
  std::string intent_id;
  Deployment deployment;
};

enum class InfeasibleReason { kNoPath, kUnknownHost };

std::string infeasible_reason_to_string(InfeasibleReason r);

struct RemediationPlan {
  std::vector<PurgeSelector> purges;
  std::vector<ReinstallAction> reinstalls;
  std::vector<std::pair<std::string, InfeasibleReason>> infeasible;

  bool empty() const {
    return purges.empty() && reinstalls.empty() && infeasible.empty();
  }
  Json to_json() const;
};

/// Configuration surface the assurance loop drives. The simulator implements
/// it; a controller shim could equally.
class NetworkHandle {
 public:
  virtual ~NetworkHandle() = default;

  /// Flow tables of every reachable (Up) switch.
  virtual std::vector<FlowTable> export_flow_tables() = 0;
  /// Installs an entry; an existing entry with identical match and priority
  /// is replaced in place.
  virtual void install(const std::string& switch_id,
                       const FlowEntry& entry) = 0;
  /// Removes every entry whose AddrKey equals `key`.
  virtual void remove(const std::string& switch_id, const AddrKey& key) = 0;

  /// Modeled wall-clock cost of one export_flow_tables call, seconds. Added
  /// to reported cycle times so that timing studies reflect the per-switch
  /// export cost a real controller pays, which an in-memory network has no
  /// intrinsic equivalent of.
  virtual double export_latency_s() const { return 0.0; }
};

struct CycleReport {
  ConsistencyReport report;
  RemediationPlan plan;
  bool applied = false;
  ConsistencyReport post_check;
  double elapsed_s = 0.0;

  Json to_json() const;
};

/// Exact-equality match of G against I; ANY slots match only ANY slots.
/// All three result lists are ordered by canonical text.
ConsistencyReport consistency_check(const std::set<EndpointTuple>& extracted,
                                    const IntentRepository& intents);

/// Shortest-path compilation of an intent onto the current graph; nullopt
/// when the endpoints are attached but disconnected. Throws
/// UnknownHostError when an endpoint is missing or lacks an address.
std::optional<Deployment> compile_intent(const Intent& intent,
                                         const NetworkGraph& graph);

/// Purges every switch holding entries under the keys that produced the
/// extraneous tuples; recompiles and reinstalls the missing intents.
/// `extraction` supplies the key and switch provenance of each extraneous
/// tuple, which the tuples alone do not determine.
RemediationPlan plan_remediation(const ConsistencyReport& report,
                                 const IntentRepository& intents,
                                 const NetworkGraph& graph,
                                 const ExtractionResult& extraction);

/// Purges before reinstalls. Throws ApplyError carrying the actions already
/// applied when the handle rejects one.
void apply_plan(NetworkHandle& net, const RemediationPlan& plan);

/// One full assurance pass: extract, check, plan, apply, re-check. With an
/// empty plan nothing is applied and post_check repeats the first report.
CycleReport assurance_cycle(NetworkHandle& net, const IntentRepository& intents,
                            const NetworkGraph& graph);

}  // namespace safla
