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

#include "safla/network_graph.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include "safla/flow_model.hpp"

namespace safla {

namespace {

std::string kind_to_string(NodeKind k) {
  return k == NodeKind::kSwitch ? "switch" : "host";
}

NodeKind kind_from_string(const std::string& s, const std::string& path) {
  if (s == "switch") return NodeKind::kSwitch;
  if (s == "host") return NodeKind::kHost;
  throw ValueError(path, "unknown node kind '" + s + "'");
}

std::string status_to_string(Status s) {
  return s == Status::kUp ? "up" : "down";
}

Status status_from_string(const std::string& s, const std::string& path) {
  if (s == "up") return Status::kUp;
  if (s == "down") return Status::kDown;
  throw ValueError(path, "unknown status '" + s + "'");
}

PortRef portref_from_json(const Json& j, const std::string& path) {
  jsonutil::require_object(j, path);
  jsonutil::reject_unknown_keys(j, path, {"node", "port"});
  PortRef ref;
  ref.node = jsonutil::get_string(j, "node", path);
  int64_t port = jsonutil::get_int(j, "port", path);
  if (port < 0 || port > 0xffffffffLL)
    throw ValueError(path + "/port", "port id out of range");
  ref.port = static_cast<uint32_t>(port);
  return ref;
}

Json portref_to_json(const PortRef& ref) {
  Json j = Json::object();
  j["node"] = ref.node;
  j["port"] = ref.port;
  return j;
}

}  // namespace

StateEvent StateEvent::node_up(std::string id) {
  StateEvent e;
  e.kind = EventKind::kNodeUp;
  e.node = std::move(id);
  return e;
}

StateEvent StateEvent::node_down(std::string id) {
  StateEvent e;
  e.kind = EventKind::kNodeDown;
  e.node = std::move(id);
  return e;
}

StateEvent StateEvent::link_up(PortRef a, PortRef b) {
  StateEvent e;
  e.kind = EventKind::kLinkUp;
  e.a = std::move(a);
  e.b = std::move(b);
  return e;
}

StateEvent StateEvent::link_down(PortRef a, PortRef b) {
  StateEvent e;
  e.kind = EventKind::kLinkDown;
  e.a = std::move(a);
  e.b = std::move(b);
  return e;
}

StateEvent StateEvent::attr_set(std::string id, std::string key,
                                std::string value) {
  StateEvent e;
  e.kind = EventKind::kAttrSet;
  e.node = std::move(id);
  e.key = std::move(key);
  e.value = std::move(value);
  return e;
}

const NodeRecord* NetworkGraph::find_node(const std::string& id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

const NodeRecord& NetworkGraph::node_at(const std::string& id) const {
  const NodeRecord* n = find_node(id);
  if (n == nullptr) throw UnknownTargetError("unknown node '" + id + "'");
  return *n;
}

bool NetworkGraph::has_link(const PortRef& a, const PortRef& b) const {
  auto it = port_to_link_.find(a);
  if (it == port_to_link_.end()) return false;
  const LinkRecord& l = links_[it->second];
  return (l.a == a && l.b == b) || (l.a == b && l.b == a);
}

std::vector<const LinkRecord*> NetworkGraph::links_of(
    const std::string& node) const {
  std::vector<const LinkRecord*> out;
  for (const LinkRecord& l : links_)
    if (l.a.node == node || l.b.node == node) out.push_back(&l);
  return out;
}

std::optional<std::string> NetworkGraph::neighbor_of(const std::string& node,
                                                     uint32_t port) const {
  node_at(node);
  auto it = port_to_link_.find(PortRef{node, port});
  if (it == port_to_link_.end()) return std::nullopt;
  const LinkRecord& l = links_[it->second];
  if (l.status != Status::kUp) return std::nullopt;
  const std::string& peer = l.a.node == node ? l.b.node : l.a.node;
  if (node_at(peer).status != Status::kUp) return std::nullopt;
  return peer;
}

std::optional<uint32_t> NetworkGraph::port_toward(
    const std::string& node, const std::string& peer) const {
  for (const LinkRecord& l : links_) {
    if (l.status != Status::kUp) continue;
    if (l.a.node == node && l.b.node == peer) return l.a.port;
    if (l.b.node == node && l.a.node == peer) return l.b.port;
  }
  return std::nullopt;
}

std::optional<std::vector<std::string>> NetworkGraph::path_between(
    const std::string& a, const std::string& b) const {
  const NodeRecord& na = node_at(a);
  const NodeRecord& nb = node_at(b);
  if (na.status != Status::kUp || nb.status != Status::kUp)
    return std::nullopt;
  if (a == b) return std::vector<std::string>{a};

  auto usable_neighbors = [&](const std::string& id) {
    std::vector<std::string> out;
    for (const LinkRecord* l : links_of(id)) {
      if (l->status != Status::kUp) continue;
      const std::string& peer = l->a.node == id ? l->b.node : l->a.node;
      if (node_at(peer).status != Status::kUp) continue;
      out.push_back(peer);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };

  // Hosts do not forward, so BFS expands only from switches (and from the
  // endpoints themselves).
  auto expandable = [&](const std::string& id) {
    return id == a || id == b || node_at(id).kind == NodeKind::kSwitch;
  };

  // Distance-to-b first, then a greedy walk from a picking the smallest
  // neighbor id on a shortest path; this yields the lexicographically
  // smallest shortest node sequence.
  std::map<std::string, size_t> dist;
  std::deque<std::string> queue;
  dist[b] = 0;
  queue.push_back(b);
  while (!queue.empty()) {
    std::string cur = queue.front();
    queue.pop_front();
    if (!expandable(cur)) continue;
    for (const std::string& peer : usable_neighbors(cur)) {
      if (dist.count(peer)) continue;
      dist[peer] = dist[cur] + 1;
      queue.push_back(peer);
    }
  }
  auto it = dist.find(a);
  if (it == dist.end()) return std::nullopt;

  std::vector<std::string> path{a};
  std::string cur = a;
  size_t remaining = it->second;
  while (cur != b) {
    std::string next;
    for (const std::string& peer : usable_neighbors(cur)) {
      if (!expandable(peer)) continue;
      auto pd = dist.find(peer);
      if (pd == dist.end() || pd->second != remaining - 1) continue;
      if (next.empty() || peer < next) next = peer;
    }
    path.push_back(next);
    cur = next;
    --remaining;
  }
  return path;
}

std::string NetworkGraph::access_switch(const std::string& host) const {
  const NodeRecord& n = node_at(host);
  if (n.kind != NodeKind::kHost)
    throw NotAHostError("'" + host + "' is not a host");
  std::vector<std::string> attachments;
  for (const LinkRecord* l : links_of(host)) {
    if (l->status != Status::kUp) continue;
    const std::string& peer = l->a.node == host ? l->b.node : l->a.node;
    const NodeRecord& pn = node_at(peer);
    if (pn.kind != NodeKind::kSwitch || pn.status != Status::kUp) continue;
    attachments.push_back(peer);
  }
  if (attachments.size() != 1)
    throw UnattachedHostError("host '" + host + "' has " +
                              std::to_string(attachments.size()) +
                              " up attachments, expected exactly 1");
  return attachments.front();
}

std::optional<std::string> NetworkGraph::host_by_ip_prefix(uint32_t addr,
                                                           int len) const {
  IpPrefix prefix{addr, len};
  std::optional<std::string> found;
  for (const auto& [id, n] : nodes_) {
    if (n.kind != NodeKind::kHost) continue;
    auto it = n.attrs.find("ip");
    if (it == n.attrs.end()) continue;
    uint32_t ip;
    try {
      ip = parse_ipv4(it->second, "attrs/ip");
    } catch (const ValueError&) {
      continue;
    }
    if (!prefix.contains(ip)) continue;
    if (found) return std::nullopt;  // ambiguous
    found = id;
  }
  return found;
}

void NetworkGraph::add_node(NodeRecord record, const std::string& path) {
  if (record.kind == NodeKind::kHost && !record.attrs.count("ip"))
    throw SchemaError(path, "host node lacks an ip attribute");
  auto [it, inserted] = nodes_.emplace(record.id, std::move(record));
  if (!inserted) throw SchemaError(path, "duplicate node id '" + it->first + "'");
}

void NetworkGraph::check_link_invariants(const LinkRecord& record,
                                         const std::string& path) const {
  if (record.a.node == record.b.node)
    throw ValueError(path, "self-link on node '" + record.a.node + "'");
  for (const PortRef* ref : {&record.a, &record.b}) {
    if (!nodes_.count(ref->node))
      throw DanglingLinkError(path + ": link references unknown node '" +
                              ref->node + "'");
    if (port_to_link_.count(*ref))
      throw ValueError(path, "port (" + ref->node + "," +
                                 std::to_string(ref->port) +
                                 ") already linked");
  }
}

void NetworkGraph::add_link(LinkRecord record, const std::string& path) {
  check_link_invariants(record, path);
  port_to_link_[record.a] = links_.size();
  port_to_link_[record.b] = links_.size();
  links_.push_back(std::move(record));
}

LinkRecord* NetworkGraph::find_link_mut(const PortRef& a, const PortRef& b) {
  auto it = port_to_link_.find(a);
  if (it == port_to_link_.end()) return nullptr;
  LinkRecord& l = links_[it->second];
  if ((l.a == a && l.b == b) || (l.a == b && l.b == a)) return &l;
  return nullptr;
}

NetworkGraph NetworkGraph::from_json(const Json& doc) {
  jsonutil::require_object(doc, "/");
  jsonutil::reject_unknown_keys(doc, "/", {"nodes", "links"});
  NetworkGraph g;

  const Json* nodes = jsonutil::find(doc, "nodes");
  if (nodes == nullptr) throw SchemaError("/nodes", "missing field");
  jsonutil::require_array(*nodes, "/nodes");
  for (size_t i = 0; i < nodes->size(); ++i) {
    const std::string path = "/nodes/" + std::to_string(i);
    const Json& jn = (*nodes)[i];
    jsonutil::require_object(jn, path);
    jsonutil::reject_unknown_keys(jn, path, {"id", "kind", "attrs", "status"});
    NodeRecord n;
    n.id = jsonutil::get_string(jn, "id", path);
    n.kind = kind_from_string(jsonutil::get_string(jn, "kind", path),
                              path + "/kind");
    if (const Json* attrs = jsonutil::find(jn, "attrs")) {
      jsonutil::require_object(*attrs, path + "/attrs");
      for (const auto& item : attrs->items()) {
        if (!item.value().is_string())
          throw SchemaError(path + "/attrs/" + item.key(),
                            "expected a string");
        n.attrs[item.key()] = item.value().get<std::string>();
      }
    }
    n.status = status_from_string(
        jsonutil::get_string_or(jn, "status", path, "up"), path + "/status");
    g.add_node(std::move(n), path);
  }

  const Json* links = jsonutil::find(doc, "links");
  if (links == nullptr) throw SchemaError("/links", "missing field");
  jsonutil::require_array(*links, "/links");
  for (size_t i = 0; i < links->size(); ++i) {
    const std::string path = "/links/" + std::to_string(i);
    const Json& jl = (*links)[i];
    jsonutil::require_object(jl, path);
    jsonutil::reject_unknown_keys(jl, path, {"a", "b", "status"});
    LinkRecord l;
    const Json* a = jsonutil::find(jl, "a");
    const Json* b = jsonutil::find(jl, "b");
    if (a == nullptr) throw SchemaError(path + "/a", "missing field");
    if (b == nullptr) throw SchemaError(path + "/b", "missing field");
    l.a = portref_from_json(*a, path + "/a");
    l.b = portref_from_json(*b, path + "/b");
    l.status = status_from_string(
        jsonutil::get_string_or(jl, "status", path, "up"), path + "/status");
    g.add_link(std::move(l), path);
  }
  return g;
}

Json NetworkGraph::to_json() const {
  Json doc = Json::object();
  Json nodes = Json::array();
  for (const auto& [id, n] : nodes_) {
    Json jn = Json::object();
    jn["id"] = n.id;
    jn["kind"] = kind_to_string(n.kind);
    Json attrs = Json::object();
    for (const auto& [k, v] : n.attrs) attrs[k] = v;
    jn["attrs"] = std::move(attrs);
    jn["status"] = status_to_string(n.status);
    nodes.push_back(std::move(jn));
  }
  doc["nodes"] = std::move(nodes);
  Json links = Json::array();
  for (const LinkRecord& l : links_) {
    Json jl = Json::object();
    jl["a"] = portref_to_json(l.a);
    jl["b"] = portref_to_json(l.b);
    jl["status"] = status_to_string(l.status);
    links.push_back(std::move(jl));
  }
  doc["links"] = std::move(links);
  return doc;
}

NetworkGraph build_network_graph(const std::string& document) {
  return NetworkGraph::from_json(jsonutil::parse_document(document));
}

NetworkGraph apply_event(const NetworkGraph& graph, const StateEvent& event) {
  NetworkGraph g = graph;
  switch (event.kind) {
    case EventKind::kNodeUp:
    case EventKind::kNodeDown: {
      auto it = g.nodes_.find(event.node);
      if (it == g.nodes_.end())
        throw UnknownTargetError("unknown node '" + event.node + "'");
      it->second.status =
          event.kind == EventKind::kNodeUp ? Status::kUp : Status::kDown;
      if (event.kind == EventKind::kNodeDown) {
        for (LinkRecord& l : g.links_)
          if (l.a.node == event.node || l.b.node == event.node)
            l.status = Status::kDown;
      }
      break;
    }
    case EventKind::kLinkUp:
    case EventKind::kLinkDown: {
      LinkRecord* l = g.find_link_mut(event.a, event.b);
      if (l == nullptr)
        throw UnknownTargetError("unknown link (" + event.a.node + "," +
                                 std::to_string(event.a.port) + ")-(" +
                                 event.b.node + "," +
                                 std::to_string(event.b.port) + ")");
      l->status =
          event.kind == EventKind::kLinkUp ? Status::kUp : Status::kDown;
      break;
    }
    case EventKind::kAttrSet: {
      auto it = g.nodes_.find(event.node);
      if (it == g.nodes_.end())
        throw UnknownTargetError("unknown node '" + event.node + "'");
      it->second.attrs[event.key] = event.value;
      break;
    }
  }
  ++g.revision_;
  return g;
}

Json event_to_json(const StateEvent& e) {
  Json j = Json::object();
  switch (e.kind) {
    case EventKind::kNodeUp:
      j["kind"] = "node_up";
      j["node"] = e.node;
      break;
    case EventKind::kNodeDown:
      j["kind"] = "node_down";
      j["node"] = e.node;
      break;
    case EventKind::kLinkUp:
    case EventKind::kLinkDown:
      j["kind"] = e.kind == EventKind::kLinkUp ? "link_up" : "link_down";
      j["a"] = portref_to_json(e.a);
      j["b"] = portref_to_json(e.b);
      break;
    case EventKind::kAttrSet:
      j["kind"] = "attr_set";
      j["node"] = e.node;
      j["key"] = e.key;
      j["value"] = e.value;
      break;
  }
  return j;
}

std::vector<StateEvent> parse_event_stream(const std::string& document) {
  Json doc = jsonutil::parse_document(document);
  jsonutil::require_array(doc, "/");
  std::vector<StateEvent> events;
  for (size_t i = 0; i < doc.size(); ++i) {
    const std::string path = "/" + std::to_string(i);
    const Json& je = doc[i];
    jsonutil::require_object(je, path);
    std::string kind = jsonutil::get_string(je, "kind", path);
    StateEvent e;
    if (kind == "node_up" || kind == "node_down") {
      jsonutil::reject_unknown_keys(je, path, {"kind", "node"});
      e = kind == "node_up"
              ? StateEvent::node_up(jsonutil::get_string(je, "node", path))
              : StateEvent::node_down(jsonutil::get_string(je, "node", path));
    } else if (kind == "link_up" || kind == "link_down") {
      jsonutil::reject_unknown_keys(je, path, {"kind", "a", "b"});
      const Json* a = jsonutil::find(je, "a");
      const Json* b = jsonutil::find(je, "b");
      if (a == nullptr) throw SchemaError(path + "/a", "missing field");
      if (b == nullptr) throw SchemaError(path + "/b", "missing field");
      PortRef ra = portref_from_json(*a, path + "/a");
      PortRef rb = portref_from_json(*b, path + "/b");
      e = kind == "link_up" ? StateEvent::link_up(ra, rb)
                            : StateEvent::link_down(ra, rb);
    } else if (kind == "attr_set") {
      jsonutil::reject_unknown_keys(je, path, {"kind", "node", "key", "value"});
      e = StateEvent::attr_set(jsonutil::get_string(je, "node", path),
                               jsonutil::get_string(je, "key", path),
                               jsonutil::get_string(je, "value", path));
    } else {
      throw ValueError(path + "/kind", "unknown event kind '" + kind + "'");
    }
    events.push_back(std::move(e));
  }
  return events;
}

}  // namespace safla
