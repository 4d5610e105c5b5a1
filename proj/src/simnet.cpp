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

#include "safla/simnet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "safla/log.hpp"
#include "safla/rng.hpp"

namespace safla {

namespace {

constexpr uint16_t kProbeDstPortDefault = 80;
constexpr uint16_t kProbeSrcPort = 40000;
constexpr uint32_t kHijackPriorityBoost = 1000;

std::string pad2(int v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02d", v);
  return buf;
}

std::string mesh_switch_id(int r, int c) {
  return "s" + pad2(r) + "_" + pad2(c);
}

std::string host_id(int index) { return "h" + pad2(index); }

std::string host_ip_text(int index) {
  return "10.0." + std::to_string(index >> 8) + "." +
         std::to_string(index & 0xff);
}

MacAddr host_mac(int index) {
  return MacAddr{0x020000000000ULL | static_cast<uint64_t>(index)};
}

uint32_t node_ip(const NetworkGraph& graph, const std::string& host) {
  const NodeRecord& n = graph.node_at(host);
  auto it = n.attrs.find("ip");
  if (it == n.attrs.end())
    throw UnknownHostError("host '" + host + "' has no ip attribute");
  return parse_ipv4(it->second, "attrs/ip");
}

int host_index_of(const std::string& host) {
  // "hNN" -> NN; non-generated ids fall back to a stable hash-free default.
  if (host.size() > 1 && host[0] == 'h') {
    try {
      return std::stoi(host.substr(1));
    } catch (const std::exception&) {
    }
  }
  return 1;
}

}  // namespace

std::string outcome_to_string(Outcome o) {
  switch (o) {
    case Outcome::kDelivered:
      return "delivered";
    case Outcome::kDropped:
      return "dropped";
    case Outcome::kNoMatch:
      return "no_match";
    case Outcome::kLoop:
      return "loop";
    case Outcome::kDeadEnd:
      return "dead_end";
  }
  return "no_match";
}

Json ForwardingTrace::to_json() const {
  Json j = Json::object();
  Json hops_json = Json::array();
  for (const ForwardingHop& h : hops) {
    Json row = Json::object();
    row["switch"] = h.switch_id;
    row["entry_index"] = h.entry_index ? Json(*h.entry_index) : Json(nullptr);
    hops_json.push_back(std::move(row));
  }
  j["hops"] = std::move(hops_json);
  j["outcome"] = outcome_to_string(outcome);
  if (outcome == Outcome::kDelivered) j["delivered_to"] = delivered_to;
  if (!stopped_at.empty()) j["stopped_at"] = stopped_at;
  return j;
}

// ---------------------------------------------------------------------------
// Scenario specs
// ---------------------------------------------------------------------------

std::string TopologySpec::name() const {
  switch (kind) {
    case Kind::kMesh:
      return "mesh" + std::to_string(rows) + "x" + std::to_string(cols);
    case Kind::kStar:
      return "star" + std::to_string(hosts);
    case Kind::kCustom:
      return "custom";
  }
  return "custom";
}

ScenarioSpec ScenarioSpec::from_json(const Json& doc) {
  jsonutil::require_object(doc, "/");
  jsonutil::reject_unknown_keys(doc, "/",
                                {"topology", "intents", "faults", "seed"});
  ScenarioSpec spec;

  const Json* topo = jsonutil::find(doc, "topology");
  if (topo == nullptr) throw SchemaError("/topology", "missing field");
  jsonutil::require_object(*topo, "/topology");
  std::string kind = jsonutil::get_string(*topo, "kind", "/topology");
  if (kind == "mesh") {
    jsonutil::reject_unknown_keys(*topo, "/topology", {"kind", "rows", "cols"});
    spec.topology.kind = TopologySpec::Kind::kMesh;
    spec.topology.rows =
        static_cast<int>(jsonutil::get_int(*topo, "rows", "/topology"));
    spec.topology.cols =
        static_cast<int>(jsonutil::get_int(*topo, "cols", "/topology"));
    if (spec.topology.rows < 1 || spec.topology.cols < 1)
      throw SpecError("mesh dimensions must be >= 1");
  } else if (kind == "star") {
    jsonutil::reject_unknown_keys(*topo, "/topology", {"kind", "hosts"});
    spec.topology.kind = TopologySpec::Kind::kStar;
    spec.topology.hosts =
        static_cast<int>(jsonutil::get_int(*topo, "hosts", "/topology"));
    if (spec.topology.hosts < 1) throw SpecError("star needs >= 1 host");
  } else if (kind == "custom") {
    jsonutil::reject_unknown_keys(*topo, "/topology", {"kind", "doc"});
    spec.topology.kind = TopologySpec::Kind::kCustom;
    const Json* custom = jsonutil::find(*topo, "doc");
    if (custom == nullptr) throw SchemaError("/topology/doc", "missing field");
    spec.topology.custom_doc = *custom;
  } else {
    throw ValueError("/topology/kind", "unknown topology kind '" + kind + "'");
  }

  const Json* intents = jsonutil::find(doc, "intents");
  if (intents == nullptr) throw SchemaError("/intents", "missing field");
  if (intents->is_number_integer()) {
    int n = intents->get<int>();
    if (n < 0) throw SpecError("intent count must be >= 0");
    spec.intent_count = n;
  } else if (intents->is_array()) {
    for (size_t i = 0; i < intents->size(); ++i)
      spec.explicit_intents.push_back(intent_from_json(
          (*intents)[i], "/intents/" + std::to_string(i)));
  } else {
    throw SchemaError("/intents", "expected an integer or an array");
  }

  if (const Json* faults = jsonutil::find(doc, "faults")) {
    jsonutil::require_array(*faults, "/faults");
    for (size_t i = 0; i < faults->size(); ++i) {
      const std::string path = "/faults/" + std::to_string(i);
      const Json& jf = (*faults)[i];
      jsonutil::require_object(jf, path);
      std::string fkind = jsonutil::get_string(jf, "kind", path);
      FaultSpec fault;
      if (fkind == "hijack") {
        jsonutil::reject_unknown_keys(jf, path, {"kind", "intensity", "at"});
        fault.kind = FaultSpec::Kind::kHijack;
        const Json* v = jsonutil::find(jf, "intensity");
        if (v == nullptr || !v->is_number())
          throw SchemaError(path + "/intensity", "missing or non-numeric");
        fault.percent = v->get<double>();
      } else if (fkind == "node_fail") {
        jsonutil::reject_unknown_keys(jf, path, {"kind", "completeness", "at"});
        fault.kind = FaultSpec::Kind::kNodeFail;
        const Json* v = jsonutil::find(jf, "completeness");
        if (v == nullptr || !v->is_number())
          throw SchemaError(path + "/completeness", "missing or non-numeric");
        fault.percent = v->get<double>();
      } else {
        throw ValueError(path + "/kind", "unknown fault kind '" + fkind + "'");
      }
      if (fault.percent < 0.0 || fault.percent > 100.0)
        throw SpecError("fault percentage out of [0,100]");
      fault.at_step =
          static_cast<int>(jsonutil::get_int_or(jf, "at", path, 0));
      spec.faults.push_back(fault);
    }
  }

  int64_t seed = jsonutil::get_int_or(doc, "seed", "/", 0);
  spec.seed = static_cast<uint64_t>(seed);
  return spec;
}

ScenarioSpec ScenarioSpec::parse(const std::string& document) {
  return from_json(jsonutil::parse_document(document));
}

Json ScenarioSpec::to_json() const {
  Json j = Json::object();
  Json topo = Json::object();
  switch (topology.kind) {
    case TopologySpec::Kind::kMesh:
      topo["kind"] = "mesh";
      topo["rows"] = topology.rows;
      topo["cols"] = topology.cols;
      break;
    case TopologySpec::Kind::kStar:
      topo["kind"] = "star";
      topo["hosts"] = topology.hosts;
      break;
    case TopologySpec::Kind::kCustom:
      topo["kind"] = "custom";
      topo["doc"] = topology.custom_doc;
      break;
  }
  j["topology"] = std::move(topo);
  if (intent_count) {
    j["intents"] = *intent_count;
  } else {
    Json arr = Json::array();
    for (const Intent& i : explicit_intents) arr.push_back(intent_to_json(i));
    j["intents"] = std::move(arr);
  }
  Json faults_json = Json::array();
  for (const FaultSpec& f : faults) {
    Json row = Json::object();
    if (f.kind == FaultSpec::Kind::kHijack) {
      row["kind"] = "hijack";
      row["intensity"] = f.percent;
    } else {
      row["kind"] = "node_fail";
      row["completeness"] = f.percent;
    }
    row["at"] = f.at_step;
    faults_json.push_back(std::move(row));
  }
  j["faults"] = std::move(faults_json);
  j["seed"] = seed;
  return j;
}

// ---------------------------------------------------------------------------
// Topology generators
// ---------------------------------------------------------------------------

Json mesh_topology(int rows, int cols) {
  Json nodes = Json::array();
  Json links = Json::array();
  auto add_link = [&links](const std::string& na, uint32_t pa,
                           const std::string& nb, uint32_t pb) {
    Json l = Json::object();
    l["a"] = Json{{"node", na}, {"port", pa}};
    l["b"] = Json{{"node", nb}, {"port", pb}};
    l["status"] = "up";
    links.push_back(std::move(l));
  };

  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      Json n = Json::object();
      n["id"] = mesh_switch_id(r, c);
      n["kind"] = "switch";
      n["attrs"] = Json::object();
      n["status"] = "up";
      nodes.push_back(std::move(n));
    }
  }
  // 4-neighbor grid: east on ports 4<->3, south on ports 2<->1.
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c + 1 < cols; ++c)
      add_link(mesh_switch_id(r, c), 4, mesh_switch_id(r, c + 1), 3);
  for (int r = 0; r + 1 < rows; ++r)
    for (int c = 0; c < cols; ++c)
      add_link(mesh_switch_id(r, c), 2, mesh_switch_id(r + 1, c), 1);

  // Hosts at the polar ends: one per first-column switch, one per
  // last-column switch.
  std::map<std::string, uint32_t> host_port_counter;
  auto add_host = [&](int index, const std::string& sw) {
    Json n = Json::object();
    n["id"] = host_id(index);
    n["kind"] = "host";
    n["attrs"] = Json{{"ip", host_ip_text(index)}};
    n["status"] = "up";
    nodes.push_back(std::move(n));
    uint32_t port = 101 + host_port_counter[sw]++;
    add_link(sw, port, host_id(index), 1);
  };
  for (int r = 0; r < rows; ++r) add_host(r + 1, mesh_switch_id(r, 0));
  for (int r = 0; r < rows; ++r)
    add_host(rows + r + 1, mesh_switch_id(r, cols - 1));

  Json doc = Json::object();
  doc["nodes"] = std::move(nodes);
  doc["links"] = std::move(links);
  return doc;
}

Json star_topology(int hosts) {
  Json nodes = Json::array();
  Json links = Json::array();
  Json sw = Json::object();
  sw["id"] = "s1";
  sw["kind"] = "switch";
  sw["attrs"] = Json::object();
  sw["status"] = "up";
  nodes.push_back(std::move(sw));
  for (int i = 1; i <= hosts; ++i) {
    Json n = Json::object();
    n["id"] = host_id(i);
    n["kind"] = "host";
    n["attrs"] = Json{{"ip", host_ip_text(i)}};
    n["status"] = "up";
    nodes.push_back(std::move(n));
    Json l = Json::object();
    l["a"] = Json{{"node", "s1"}, {"port", static_cast<uint32_t>(i)}};
    l["b"] = Json{{"node", host_id(i)}, {"port", 1}};
    l["status"] = "up";
    links.push_back(std::move(l));
  }
  Json doc = Json::object();
  doc["nodes"] = std::move(nodes);
  doc["links"] = std::move(links);
  return doc;
}

// ---------------------------------------------------------------------------
// SimNetwork
// ---------------------------------------------------------------------------

std::vector<FlowEntry>& SimNetwork::table_of(const std::string& switch_id) {
  const NodeRecord* n = graph_.find_node(switch_id);
  if (n == nullptr || n->kind != NodeKind::kSwitch)
    throw UnknownTargetError("unknown switch '" + switch_id + "'");
  if (n->status != Status::kUp)
    throw UnknownTargetError("switch '" + switch_id + "' is down");
  return tables_[switch_id];
}

std::vector<FlowTable> SimNetwork::export_flow_tables() {
  std::vector<FlowTable> out;
  for (const auto& [id, node] : graph_.nodes()) {
    if (node.kind != NodeKind::kSwitch || node.status != Status::kUp) continue;
    FlowTable t;
    t.switch_id = id;
    auto it = tables_.find(id);
    if (it != tables_.end()) t.entries = it->second;
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<FlowTable> SimNetwork::all_tables() const {
  std::vector<FlowTable> out;
  for (const auto& [id, entries] : tables_) {
    FlowTable t;
    t.switch_id = id;
    t.entries = entries;
    out.push_back(std::move(t));
  }
  return out;
}

void SimNetwork::install(const std::string& switch_id, const FlowEntry& entry) {
  std::vector<FlowEntry>& table = table_of(switch_id);
  for (FlowEntry& existing : table) {
    if (existing.match == entry.match && existing.priority == entry.priority) {
      // Same identity: replace in place, counters reset.
      int index = existing.entry_index;
      existing = entry;
      existing.entry_index = index;
      existing.counters = 0;
      log_event(Json{{"clock", clock_},
                     {"event", "replace"},
                     {"switch", switch_id},
                     {"key", AddrKey::of(entry.match).to_string()},
                     {"priority", entry.priority}});
      return;
    }
  }
  FlowEntry added = entry;
  added.entry_index = static_cast<int>(table.size());
  table.push_back(std::move(added));
  log_event(Json{{"clock", clock_},
                 {"event", "install"},
                 {"switch", switch_id},
                 {"key", AddrKey::of(entry.match).to_string()},
                 {"priority", entry.priority}});
}

void SimNetwork::remove(const std::string& switch_id, const AddrKey& key) {
  std::vector<FlowEntry>& table = table_of(switch_id);
  size_t before = table.size();
  table.erase(std::remove_if(table.begin(), table.end(),
                             [&key](const FlowEntry& e) {
                               return AddrKey::of(e.match) == key;
                             }),
              table.end());
  for (size_t i = 0; i < table.size(); ++i)
    table[i].entry_index = static_cast<int>(i);
  log_event(Json{{"clock", clock_},
                 {"event", "remove"},
                 {"switch", switch_id},
                 {"key", key.to_string()},
                 {"removed", before - table.size()}});
}

double SimNetwork::export_latency_s() const {
  size_t up = 0;
  for (const auto& [id, node] : graph_.nodes())
    if (node.kind == NodeKind::kSwitch && node.status == Status::kUp) ++up;
  return export_latency_per_switch_ * static_cast<double>(up);
}

void SimNetwork::apply_state_event(const StateEvent& event) {
  graph_ = apply_event(graph_, event);
  Json logged = event_to_json(event);
  logged["clock"] = clock_;
  logged["revision"] = graph_.revision();
  log_event(std::move(logged));
}

void SimNetwork::log_event(Json event) {
  event_log_.push_back(std::move(event));
}

std::string SimNetwork::event_log_jsonl() const {
  std::string out;
  for (const Json& e : event_log_) out += e.dump() + "\n";
  return out;
}

Json SimNetwork::state_to_json() const {
  Json j = Json::object();
  j["topology"] = graph_.to_json();
  j["tables"] = flow_tables_to_json(all_tables());
  j["clock"] = clock_;
  j["rng_seed"] = rng_seed_;
  j["hijack_host"] = hijack_host_;
  j["protected_switches"] = protected_switches_;
  Json baseline = Json::object();
  for (const auto& [id, routes] : baseline_) {
    Json row = Json::object();
    row["primary"] = routes.primary;
    row["backup"] = routes.backup ? Json(*routes.backup) : Json(nullptr);
    baseline[id] = std::move(row);
  }
  j["baseline"] = std::move(baseline);
  return j;
}

SimNetwork SimNetwork::from_state_json(const Json& doc) {
  jsonutil::require_object(doc, "/");
  jsonutil::reject_unknown_keys(doc, "/",
                                {"topology", "tables", "clock", "rng_seed",
                                 "hijack_host", "protected_switches",
                                 "baseline"});
  SimNetwork net;
  const Json* topo = jsonutil::find(doc, "topology");
  if (topo == nullptr) throw SchemaError("/topology", "missing field");
  net.graph_ = NetworkGraph::from_json(*topo);
  const Json* tables = jsonutil::find(doc, "tables");
  if (tables == nullptr) throw SchemaError("/tables", "missing field");
  for (FlowTable& t : flow_tables_from_json(*tables)) {
    if (net.graph_.find_node(t.switch_id) == nullptr)
      throw SchemaError("/tables", "table for unknown switch '" +
                                       t.switch_id + "'");
    net.tables_[t.switch_id] = std::move(t.entries);
  }
  if (const Json* v = jsonutil::find(doc, "clock")) {
    if (!v->is_number()) throw SchemaError("/clock", "expected a number");
    net.clock_ = v->get<double>();
  }
  net.rng_seed_ =
      static_cast<uint64_t>(jsonutil::get_int_or(doc, "rng_seed", "/", 0));
  net.hijack_host_ = jsonutil::get_string_or(doc, "hijack_host", "/", "");
  if (const Json* v = jsonutil::find(doc, "protected_switches")) {
    jsonutil::require_array(*v, "/protected_switches");
    for (const Json& s : *v) net.protected_switches_.push_back(s.get<std::string>());
  }
  if (const Json* v = jsonutil::find(doc, "baseline")) {
    jsonutil::require_object(*v, "/baseline");
    for (const auto& item : v->items()) {
      BaselineRoutes routes;
      const Json& row = item.value();
      routes.primary = row.at("primary").get<std::vector<std::string>>();
      if (!row.at("backup").is_null())
        routes.backup = row.at("backup").get<std::vector<std::string>>();
      net.baseline_[item.key()] = std::move(routes);
    }
  }
  return net;
}

// ---------------------------------------------------------------------------
// Scenario construction
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> all_hosts_sorted(const NetworkGraph& graph) {
  std::vector<std::string> hosts;
  for (const auto& [id, node] : graph.nodes())
    if (node.kind == NodeKind::kHost) hosts.push_back(id);
  return hosts;  // map iteration is already sorted
}

IntentRepository generate_intents(const std::vector<std::string>& usable,
                                  int count, uint64_t seed) {
  if (usable.size() < 2 && count > 0)
    throw SpecError("not enough hosts to draw intents from");
  size_t max_pairs = usable.size() * (usable.size() - 1);
  if (static_cast<size_t>(count) > max_pairs)
    throw SpecError("intent count " + std::to_string(count) +
                    " exceeds distinct host pairs " +
                    std::to_string(max_pairs));
  Rng rng(Rng::derive(seed, 1));
  IntentRepository repo;
  std::set<std::pair<std::string, std::string>> used;
  for (int n = 0; n < count; ++n) {
    std::string src, dst;
    do {
      size_t si = static_cast<size_t>(rng.below(usable.size()));
      size_t di = static_cast<size_t>(rng.below(usable.size() - 1));
      if (di >= si) ++di;
      src = usable[si];
      dst = usable[di];
    } while (used.count({src, dst}));
    used.insert({src, dst});
    Intent intent;
    char idbuf[16];
    std::snprintf(idbuf, sizeof(idbuf), "i%03d", n + 1);
    intent.id = idbuf;
    intent.src_host = src;
    intent.dst_host = dst;
    intent.proto = Proto::kTcp;
    intent.dst_port = static_cast<uint16_t>(rng.between(1024, 9999));
    intent.priority_class = kDefaultPriorityClass;
    repo.upsert(std::move(intent));
  }
  return repo;
}

}  // namespace

Scenario build_scenario(const ScenarioSpec& spec) {
  Scenario scenario;
  SimNetwork& net = scenario.net;
  net.rng_seed_ = spec.seed;

  Json topo_doc;
  bool generated = true;
  switch (spec.topology.kind) {
    case TopologySpec::Kind::kMesh:
      topo_doc = mesh_topology(spec.topology.rows, spec.topology.cols);
      break;
    case TopologySpec::Kind::kStar:
      topo_doc = star_topology(spec.topology.hosts);
      break;
    case TopologySpec::Kind::kCustom:
      topo_doc = spec.topology.custom_doc;
      generated = false;
      break;
  }
  net.graph_ = NetworkGraph::from_json(topo_doc);
  for (const auto& [id, node] : net.graph_.nodes())
    if (node.kind == NodeKind::kSwitch) net.tables_[id];

  std::vector<std::string> hosts = all_hosts_sorted(net.graph_);

  if (spec.intent_count) {
    // The highest-numbered host never takes part in intents; hijack
    // injection delivers to it. Topologies with fewer than three hosts keep
    // every host usable, or no intents could be drawn at all.
    std::vector<std::string> usable = hosts;
    if (generated && usable.size() >= 3) {
      net.hijack_host_ = usable.back();
      usable.pop_back();
    }
    scenario.intents =
        generate_intents(usable, *spec.intent_count, spec.seed);
  } else {
    for (const Intent& intent : spec.explicit_intents) {
      if (scenario.intents.find(intent.id) != nullptr)
        throw DuplicateIdError("duplicate intent id '" + intent.id + "'");
      scenario.intents.upsert(intent);
    }
  }

  size_t switches = 0, host_count = 0;
  for (const auto& [id, node] : net.graph_.nodes())
    node.kind == NodeKind::kSwitch ? ++switches : ++host_count;
  net.log_event(Json{{"clock", net.clock_},
                     {"event", "build"},
                     {"topology", spec.topology.name()},
                     {"seed", spec.seed},
                     {"switches", switches},
                     {"hosts", host_count},
                     {"intents", scenario.intents.size()}});

  // Compile and install every intent; remember primary/backup routes for
  // the reference recovery strategy.
  for (const auto& [id, intent] : scenario.intents.intents()) {
    std::optional<Deployment> deployment =
        compile_intent(intent, net.graph_);
    if (!deployment)
      throw SpecError("intent '" + id + "' is unsatisfiable on this topology");
    for (const auto& [sw, entry] : deployment->entries) net.install(sw, entry);

    SimNetwork::BaselineRoutes routes;
    routes.primary = deployment->path;
    if (deployment->path.size() > 2) {
      // Node-disjoint alternative: recompute with the interior removed.
      NetworkGraph degraded = net.graph_;
      for (size_t i = 1; i + 1 < deployment->path.size(); ++i)
        degraded = apply_event(degraded,
                               StateEvent::node_down(deployment->path[i]));
      auto backup = degraded.path_between(deployment->path.front(),
                                          deployment->path.back());
      if (backup) routes.backup = *backup;
    }
    net.baseline_[id] = std::move(routes);
  }

  std::set<std::string> protected_set;
  for (const auto& [id, intent] : scenario.intents.intents()) {
    protected_set.insert(net.graph_.access_switch(intent.src_host));
    protected_set.insert(net.graph_.access_switch(intent.dst_host));
  }
  net.protected_switches_.assign(protected_set.begin(), protected_set.end());
  return scenario;
}

// ---------------------------------------------------------------------------
// Forwarding oracle
// ---------------------------------------------------------------------------

ForwardingTrace forward_packet(const SimNetwork& net, const Packet& packet,
                               const std::string& ingress) {
  const NetworkGraph& graph = net.graph();
  const NodeRecord& in_node = graph.node_at(ingress);
  if (in_node.kind != NodeKind::kSwitch)
    throw UnknownTargetError("ingress '" + ingress + "' is not a switch");
  if (in_node.status != Status::kUp)
    throw UnknownTargetError("ingress switch '" + ingress + "' is down");

  ForwardingTrace trace;
  Packet p = packet;
  std::set<std::string> visited;
  std::string cur = ingress;

  while (true) {
    if (visited.count(cur)) {
      trace.outcome = Outcome::kLoop;
      trace.stopped_at = cur;
      break;
    }
    visited.insert(cur);

    static const std::vector<FlowEntry> kEmpty;
    auto it = net.tables().find(cur);
    const std::vector<FlowEntry>& entries =
        it == net.tables().end() ? kEmpty : it->second;
    const FlowEntry* entry = match_packet(entries, p, net.clock());

    ForwardingHop hop;
    hop.switch_id = cur;
    if (entry != nullptr) hop.entry_index = entry->entry_index;
    trace.hops.push_back(hop);

    if (entry == nullptr) {
      trace.outcome = Outcome::kNoMatch;
      trace.stopped_at = cur;
      break;
    }

    bool moved = false, terminal = false;
    for (const Action& action : entry->actions) {
      switch (action.kind) {
        case ActionKind::kSetVlan:
          p.vlan_id = action.vlan;
          break;
        case ActionKind::kSetDstMac:
          p.dst_mac = action.mac;
          break;
        case ActionKind::kDrop:
          trace.outcome = Outcome::kDropped;
          trace.stopped_at = cur;
          terminal = true;
          break;
        case ActionKind::kToController:
          break;  // control-plane copy; no data-plane effect
        case ActionKind::kOutput: {
          auto peer = graph.neighbor_of(cur, action.port);
          if (!peer) {
            trace.outcome = Outcome::kDeadEnd;
            trace.stopped_at = cur;
            terminal = true;
            break;
          }
          const NodeRecord& peer_node = graph.node_at(*peer);
          if (peer_node.kind == NodeKind::kHost) {
            trace.outcome = Outcome::kDelivered;
            trace.delivered_to = *peer;
            terminal = true;
            break;
          }
          // Entering the peer switch: the receive port becomes in_port.
          for (const LinkRecord* l : graph.links_of(cur)) {
            if (l->status != Status::kUp) continue;
            if (l->a.node == cur && l->a.port == action.port)
              p.in_port = l->b.port;
            else if (l->b.node == cur && l->b.port == action.port)
              p.in_port = l->a.port;
          }
          cur = *peer;
          moved = true;
          break;
        }
      }
      if (terminal || moved) break;
    }
    if (terminal) break;
    if (!moved) {
      // No forwarding action fired: the packet goes nowhere.
      trace.outcome = Outcome::kDropped;
      trace.stopped_at = cur;
      break;
    }
  }
  trace.final_packet = p;
  return trace;
}

// ---------------------------------------------------------------------------
// Fault injection
// ---------------------------------------------------------------------------

namespace {

std::string pick_hijack_host(const SimNetwork& net,
                             const IntentRepository& intents) {
  if (!net.hijack_host().empty()) return net.hijack_host();
  std::set<std::string> endpoints;
  for (const auto& [id, intent] : intents.intents()) {
    endpoints.insert(intent.src_host);
    endpoints.insert(intent.dst_host);
  }
  std::vector<std::string> hosts = all_hosts_sorted(net.graph());
  for (auto it = hosts.rbegin(); it != hosts.rend(); ++it)
    if (!endpoints.count(*it)) return *it;
  throw SpecError("no host available as hijack target");
}

}  // namespace

std::vector<std::pair<std::string, FlowEntry>> inject_hijack(
    SimNetwork& net, const IntentRepository& intents, double intensity,
    uint64_t seed) {
  if (intensity < 0.0 || intensity > 100.0)
    throw SpecError("intensity out of [0,100]");
  const size_t total = intents.size();
  std::vector<std::pair<std::string, FlowEntry>> injected;
  if (total == 0) return injected;

  size_t victims = static_cast<size_t>(
      std::ceil(intensity / 100.0 * static_cast<double>(total) - 1e-9));
  if (victims > total) victims = total;
  if (victims == 0) return injected;

  std::vector<std::string> ids;
  for (const auto& [id, intent] : intents.intents()) ids.push_back(id);
  Rng rng(Rng::derive(seed, 2));
  std::vector<size_t> picks = rng.sample_indices(ids.size(), victims);
  std::sort(picks.begin(), picks.end());

  const std::string hijack_host = pick_hijack_host(net, intents);
  const std::string hijack_switch = net.graph().access_switch(hijack_host);

  for (size_t pick : picks) {
    const Intent& victim = *intents.find(ids[pick]);
    MatchFields match;
    match.src_ip = IpPrefix::host(node_ip(net.graph(), victim.src_host));
    match.dst_ip = IpPrefix::host(node_ip(net.graph(), victim.dst_host));
    match.proto = victim.proto;
    match.dst_port = victim.dst_port;
    const AddrKey key = AddrKey::of(match);
    const uint32_t priority =
        static_cast<uint32_t>(victim.priority_class) + kHijackPriorityBoost;

    std::string src_switch = net.graph().access_switch(victim.src_host);
    auto path = net.graph().path_between(src_switch, hijack_switch);
    if (!path) {
      log::warn("hijack target unreachable from " + src_switch + "; skipping " +
                victim.id);
      continue;
    }

    for (size_t i = 0; i < path->size(); ++i) {
      std::optional<uint32_t> egress =
          i + 1 < path->size()
              ? net.graph().port_toward((*path)[i], (*path)[i + 1])
              : net.graph().port_toward((*path)[i], hijack_host);
      if (!egress) throw SpecError("hijack path lost a link mid-injection");
      FlowEntry entry;
      entry.match = match;
      entry.priority = priority;
      entry.actions = {Action::output(*egress)};

      // The injected rule must strictly outrank whatever the victim has
      // installed at this switch, otherwise it would not divert anything.
      // An identical entry from an earlier injection is a replace, not a
      // violation.
      auto tit = net.tables().find((*path)[i]);
      if (tit != net.tables().end()) {
        for (const FlowEntry& existing : tit->second) {
          if (AddrKey::of(existing.match) == key &&
              existing.priority >= priority &&
              !(existing.match == entry.match &&
                existing.priority == entry.priority))
            throw SpecError("hijack entry does not dominate victim at " +
                            (*path)[i]);
        }
      }
      net.install((*path)[i], entry);
      injected.emplace_back((*path)[i], entry);
    }
    net.log_event(Json{{"clock", net.clock()},
                       {"event", "hijack"},
                       {"victim", victim.id},
                       {"to", hijack_host},
                       {"switches", *path}});
  }
  return injected;
}

std::vector<std::string> fail_nodes(SimNetwork& net, double completeness,
                                    uint64_t seed) {
  if (completeness < 0.0 || completeness > 100.0)
    throw SpecError("completeness out of [0,100]");

  std::vector<std::string> switches;
  for (const auto& [id, node] : net.graph().nodes())
    if (node.kind == NodeKind::kSwitch && node.status == Status::kUp)
      switches.push_back(id);

  size_t count = static_cast<size_t>(std::floor(
      (100.0 - completeness) / 100.0 * static_cast<double>(switches.size()) +
      1e-9));

  std::set<std::string> protected_set(net.protected_switches().begin(),
                                      net.protected_switches().end());
  std::vector<std::string> candidates;
  for (const std::string& id : switches)
    if (!protected_set.count(id)) candidates.push_back(id);
  if (count > candidates.size()) count = candidates.size();

  Rng rng(Rng::derive(seed, 3));
  std::vector<size_t> picks = rng.sample_indices(candidates.size(), count);
  std::sort(picks.begin(), picks.end());

  std::vector<std::string> downed;
  for (size_t pick : picks) {
    net.apply_state_event(StateEvent::node_down(candidates[pick]));
    downed.push_back(candidates[pick]);
  }
  return downed;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

Packet probe_packet(const NetworkGraph& graph, const Intent& intent) {
  Packet p;
  p.src_ip = node_ip(graph, intent.src_host);
  p.dst_ip = node_ip(graph, intent.dst_host);
  p.proto = intent.proto == Proto::kAny ? Proto::kTcp : intent.proto;
  p.src_port = kProbeSrcPort;
  p.dst_port = intent.dst_port.value_or(kProbeDstPortDefault);
  p.vlan_id = 0;
  p.src_mac = host_mac(host_index_of(intent.src_host));
  p.dst_mac = host_mac(host_index_of(intent.dst_host));
  return p;
}

double survival_rate(const SimNetwork& net, const IntentRepository& intents) {
  if (intents.size() == 0) return 1.0;
  size_t delivered = 0;
  for (const auto& [id, intent] : intents.intents()) {
    try {
      std::string ingress = net.graph().access_switch(intent.src_host);
      Packet p = probe_packet(net.graph(), intent);
      // The probe enters on the host attachment port.
      if (auto port = net.graph().port_toward(ingress, intent.src_host))
        p.in_port = *port;
      ForwardingTrace trace = forward_packet(net, p, ingress);
      if (trace.outcome == Outcome::kDelivered &&
          trace.delivered_to == intent.dst_host)
        ++delivered;
    } catch (const Error&) {
      // cut-off source or an intent naming hosts this network lacks
    }
  }
  return static_cast<double>(delivered) / static_cast<double>(intents.size());
}

double baseline_primary_backup(const SimNetwork& net,
                               const IntentRepository& intents) {
  if (intents.size() == 0) return 1.0;
  const NetworkGraph& graph = net.graph();

  auto path_fully_up = [&graph](const std::vector<std::string>& path,
                                const std::string& src_host,
                                const std::string& dst_host) {
    if (path.empty()) return false;
    try {
      if (graph.access_switch(src_host) != path.front()) return false;
      if (graph.access_switch(dst_host) != path.back()) return false;
    } catch (const Error&) {
      return false;
    }
    for (const std::string& sw : path) {
      const NodeRecord* n = graph.find_node(sw);
      if (n == nullptr || n->status != Status::kUp) return false;
    }
    for (size_t i = 0; i + 1 < path.size(); ++i)
      if (!graph.port_toward(path[i], path[i + 1])) return false;
    return true;
  };

  size_t survived = 0;
  for (const auto& [id, intent] : intents.intents()) {
    auto it = net.baseline_.find(id);
    if (it == net.baseline_.end()) continue;  // never deployed
    const SimNetwork::BaselineRoutes& routes = it->second;
    if (path_fully_up(routes.primary, intent.src_host, intent.dst_host) ||
        (routes.backup &&
         path_fully_up(*routes.backup, intent.src_host, intent.dst_host)))
      ++survived;
  }
  return static_cast<double>(survived) / static_cast<double>(intents.size());
}

}  // namespace safla
