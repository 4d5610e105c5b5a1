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

#include "safla/assurance.hpp"
#include "safla/extractor.hpp"
#include "safla/flow_model.hpp"
#include "safla/intent_store.hpp"
#include "safla/network_graph.hpp"

namespace safla {

enum class Outcome { kDelivered, kDropped, kNoMatch, kLoop, kDeadEnd };

std::string outcome_to_string(Outcome o);

struct ForwardingHop {
  std::string switch_id;
  std::optional<int> entry_index;  // nullopt when nothing matched
};

struct ForwardingTrace {
  std::vector<ForwardingHop> hops;  // bounded by the switch count
  Outcome outcome = Outcome::kNoMatch;
  std::string delivered_to;  // kDelivered
  std::string stopped_at;    // kNoMatch / kDeadEnd / kLoop / kDropped
  Packet final_packet;       // rewrites applied en route

  Json to_json() const;
};

struct TopologySpec {
  enum class Kind { kMesh, kStar, kCustom };
  Kind kind = Kind::kMesh;
  int rows = 1, cols = 1;  // kMesh
  int hosts = 2;           // kStar
  Json custom_doc;         // kCustom: a topology document

  std::string name() const;
};

struct FaultSpec {
  enum class Kind { kHijack, kNodeFail };
  Kind kind = Kind::kHijack;
  double percent = 0.0;  // hijack intensity / topology completeness
  int at_step = 0;
};

struct ScenarioSpec {
  TopologySpec topology;
  std::optional<int> intent_count;        // generated when set
  std::vector<Intent> explicit_intents;   // used otherwise
  std::vector<FaultSpec> faults;
  uint64_t seed = 0;

  static ScenarioSpec from_json(const Json& doc);
  static ScenarioSpec parse(const std::string& document);
  Json to_json() const;
};

class SimNetwork;
struct Scenario;
Scenario build_scenario(const ScenarioSpec& spec);
std::vector<std::pair<std::string, FlowEntry>> inject_hijack(
    SimNetwork& net, const IntentRepository& intents, double intensity,
    uint64_t seed);
std::vector<std::string> fail_nodes(SimNetwork& net, double completeness,
                                    uint64_t seed);
double baseline_primary_backup(const SimNetwork& net,
                               const IntentRepository& intents);

/// Deterministic in-memory SDN data plane: a network graph plus one flow
/// table per switch, mutated only through this interface so every run is
/// replayable from its event log.
class SimNetwork : public NetworkHandle {
 public:
  SimNetwork() = default;

  // NetworkHandle. export covers Up switches only: a dead switch cannot be
  // asked for its configuration.
  std::vector<FlowTable> export_flow_tables() override;
  void install(const std::string& switch_id, const FlowEntry& entry) override;
  void remove(const std::string& switch_id, const AddrKey& key) override;
  double export_latency_s() const override;

  const NetworkGraph& graph() const { return graph_; }
  double clock() const { return clock_; }
  uint64_t rng_seed() const { return rng_seed_; }

  void advance_clock(double seconds) { clock_ += seconds; }

  /// Routes a state event through the graph and logs it.
  void apply_state_event(const StateEvent& event);

  /// Per-switch export cost model (seconds); see
  /// NetworkHandle::export_latency_s.
  void set_export_latency_per_switch(double seconds) {
    export_latency_per_switch_ = seconds;
  }

  const std::vector<Json>& event_log() const { return event_log_; }
  std::string event_log_jsonl() const;
  void log_event(Json event);

  /// Full switch table map, Down switches included (state serialization).
  std::vector<FlowTable> all_tables() const;
  const std::map<std::string, std::vector<FlowEntry>>& tables() const {
    return tables_;
  }

  Json state_to_json() const;
  static SimNetwork from_state_json(const Json& doc);

  // Scenario metadata recorded at build time.
  const std::string& hijack_host() const { return hijack_host_; }
  const std::vector<std::string>& protected_switches() const {
    return protected_switches_;
  }

  friend Scenario build_scenario(const ScenarioSpec& spec);
  friend double baseline_primary_backup(const SimNetwork& net,
                                        const IntentRepository& intents);

 private:
  struct BaselineRoutes {
    std::vector<std::string> primary;
    std::optional<std::vector<std::string>> backup;  // node-disjoint
  };

  std::vector<FlowEntry>& table_of(const std::string& switch_id);

  NetworkGraph graph_;
  std::map<std::string, std::vector<FlowEntry>> tables_;
  double clock_ = 0.0;
  uint64_t rng_seed_ = 0;
  double export_latency_per_switch_ = 0.002;
  std::string hijack_host_;
  std::vector<std::string> protected_switches_;
  std::map<std::string, BaselineRoutes> baseline_;
  std::vector<Json> event_log_;
};

/// `build_scenario` generates the topology, draws the intent set from the
/// seed (unless given explicitly), and compiles + installs every intent. In
/// generated topologies the highest-numbered host is reserved as the hijack
/// target and never participates in intents.
struct Scenario {
  SimNetwork net;
  IntentRepository intents;
};

/// Topology documents used by build_scenario, exposed for direct use.
/// Mesh hosts sit on the first and last columns (2*rows of them).
Json mesh_topology(int rows, int cols);
Json star_topology(int hosts);

/// Single-packet forwarding oracle. Applies per-hop matching, rewrites, and
/// link traversal until delivery, drop, no-match, dead end, or a revisited
/// switch. `ingress` must be an Up switch.
ForwardingTrace forward_packet(const SimNetwork& net, const Packet& packet,
                               const std::string& ingress);

/// Installs, for ceil(intensity% * |intents|) seeded victims, entries that
/// match the victim's flow but deliver to the hijack host at strictly higher
/// priority. Returns the injected entries.
std::vector<std::pair<std::string, FlowEntry>> inject_hijack(
    SimNetwork& net, const IntentRepository& intents, double intensity,
    uint64_t seed);

/// Marks floor((100-completeness)% * |switches|) seeded switches Down,
/// never picking an access switch of an intent endpoint. Returns the downed
/// switch ids.
std::vector<std::string> fail_nodes(SimNetwork& net, double completeness,
                                    uint64_t seed);

/// The canonical probe packet for an intent. ANY slots take fixed defaults:
/// proto tcp, dst_port 80 (src_port 40000, vlan 0).
Packet probe_packet(const NetworkGraph& graph, const Intent& intent);

/// Fraction of intents whose probe is delivered to the declared destination.
double survival_rate(const SimNetwork& net, const IntentRepository& intents);

/// Reference recovery strategy: an intent survives iff its compile-time
/// primary path or its precomputed node-disjoint backup is fully Up. No
/// re-extraction, no purging.
double baseline_primary_backup(const SimNetwork& net,
                               const IntentRepository& intents);

}  // namespace safla
