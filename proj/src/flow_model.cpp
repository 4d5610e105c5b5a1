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

#include "safla/flow_model.hpp"

#include <cstdio>
#include <cstring>

namespace safla {

namespace {

constexpr uint16_t kEthTypeIpv4 = 0x0800;

bool split_once(const std::string& s, char sep, std::string& left,
                std::string& right) {
  auto pos = s.find(sep);
  if (pos == std::string::npos) return false;
  left = s.substr(0, pos);
  right = s.substr(pos + 1);
  return true;
}

}  // namespace

uint32_t parse_ipv4(const std::string& text, const std::string& path) {
  unsigned a, b, c, d;
  char tail;
  int n = std::sscanf(text.c_str(), "%u.%u.%u.%u%c", &a, &b, &c, &d, &tail);
  if (n != 4 || a > 255 || b > 255 || c > 255 || d > 255)
    throw ValueError(path, "invalid IPv4 address '" + text + "'");
  return (a << 24) | (b << 16) | (c << 8) | d;
}

std::string ipv4_to_string(uint32_t addr) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u", (addr >> 24) & 0xff,
                (addr >> 16) & 0xff, (addr >> 8) & 0xff, addr & 0xff);
  return buf;
}

IpPrefix IpPrefix::parse(const std::string& text, const std::string& path) {
  std::string addr_part = text;
  int len = 32;
  std::string left, right;
  if (split_once(text, '/', left, right)) {
    addr_part = left;
    try {
      size_t used = 0;
      len = std::stoi(right, &used);
      if (used != right.size()) throw std::invalid_argument(right);
    } catch (const std::exception&) {
      throw ValueError(path, "invalid mask length '" + right + "'");
    }
    if (len < 0 || len > 32)
      throw ValueError(path, "mask length out of range [0,32]");
  }
  uint32_t addr = parse_ipv4(addr_part, path);
  uint32_t mask = len == 0 ? 0 : (len == 32 ? 0xffffffffu : ~(0xffffffffu >> len));
  return IpPrefix{addr & mask, len};
}

std::string IpPrefix::to_string() const {
  return ipv4_to_string(addr) + "/" + std::to_string(len);
}

MacAddr MacAddr::parse(const std::string& text, const std::string& path) {
  unsigned b[6];
  char tail;
  int n = std::sscanf(text.c_str(), "%2x:%2x:%2x:%2x:%2x:%2x%c", &b[0], &b[1],
                      &b[2], &b[3], &b[4], &b[5], &tail);
  if (n != 6 || text.size() != 17)
    throw ValueError(path, "invalid MAC address '" + text + "'");
  uint64_t bits = 0;
  for (int i = 0; i < 6; ++i) bits = (bits << 8) | b[i];
  return MacAddr{bits};
}

std::string MacAddr::to_string() const {
  char buf[18];
  std::snprintf(buf, sizeof(buf), "%02x:%02x:%02x:%02x:%02x:%02x",
                unsigned(bits >> 40) & 0xff, unsigned(bits >> 32) & 0xff,
                unsigned(bits >> 24) & 0xff, unsigned(bits >> 16) & 0xff,
                unsigned(bits >> 8) & 0xff, unsigned(bits) & 0xff);
  return buf;
}

std::string proto_to_string(Proto p) {
  switch (p) {
    case Proto::kTcp:
      return "tcp";
    case Proto::kUdp:
      return "udp";
    case Proto::kIcmp:
      return "icmp";
    case Proto::kAny:
      return "any";
  }
  return "any";
}

Proto proto_from_string(const std::string& s, const std::string& path) {
  if (s == "tcp") return Proto::kTcp;
  if (s == "udp") return Proto::kUdp;
  if (s == "icmp") return Proto::kIcmp;
  if (s == "any") return Proto::kAny;
  throw ValueError(path, "unknown protocol '" + s + "'");
}

std::optional<uint32_t> FlowEntry::output_port() const {
  for (const Action& a : actions)
    if (a.kind == ActionKind::kOutput) return a.port;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

Json match_to_json(const MatchFields& m) {
  Json j = Json::object();
  if (!m.src_ip.is_any()) j["src_ip"] = m.src_ip.to_string();
  if (!m.dst_ip.is_any()) j["dst_ip"] = m.dst_ip.to_string();
  if (m.proto != Proto::kAny) j["proto"] = proto_to_string(m.proto);
  if (m.src_port) j["src_port"] = *m.src_port;
  if (m.dst_port) j["dst_port"] = *m.dst_port;
  if (m.in_port) j["in_port"] = *m.in_port;
  if (m.vlan_id) j["vlan_id"] = *m.vlan_id;
  if (m.src_mac) j["src_mac"] = m.src_mac->to_string();
  if (m.dst_mac) j["dst_mac"] = m.dst_mac->to_string();
  if (m.eth_type) j["eth_type"] = *m.eth_type;
  return j;
}

MatchFields match_from_json(const Json& j, const std::string& path) {
  jsonutil::require_object(j, path);
  jsonutil::reject_unknown_keys(
      j, path,
      {"src_ip", "dst_ip", "proto", "src_port", "dst_port", "in_port",
       "vlan_id", "src_mac", "dst_mac", "eth_type"});
  MatchFields m;
  if (const Json* v = jsonutil::find(j, "src_ip")) {
    if (!v->is_string()) throw SchemaError(path + "/src_ip", "expected a string");
    m.src_ip = IpPrefix::parse(v->get<std::string>(), path + "/src_ip");
  }
  if (const Json* v = jsonutil::find(j, "dst_ip")) {
    if (!v->is_string()) throw SchemaError(path + "/dst_ip", "expected a string");
    m.dst_ip = IpPrefix::parse(v->get<std::string>(), path + "/dst_ip");
  }
  if (jsonutil::find(j, "proto") != nullptr) {
    std::string s = jsonutil::get_string(j, "proto", path);
    m.proto = proto_from_string(s, path + "/proto");
  }
  if (jsonutil::find(j, "src_port") != nullptr)
    m.src_port = jsonutil::get_port(j, "src_port", path);
  if (jsonutil::find(j, "dst_port") != nullptr)
    m.dst_port = jsonutil::get_port(j, "dst_port", path);
  if (jsonutil::find(j, "in_port") != nullptr) {
    int64_t v = jsonutil::get_int(j, "in_port", path);
    if (v < 0 || v > 0xffffffffLL)
      throw ValueError(path + "/in_port", "port id out of range");
    m.in_port = static_cast<uint32_t>(v);
  }
  if (jsonutil::find(j, "vlan_id") != nullptr) {
    int64_t v = jsonutil::get_int(j, "vlan_id", path);
    if (v < 0 || v > 0xffff)
      throw ValueError(path + "/vlan_id", "vlan id out of range");
    m.vlan_id = static_cast<uint16_t>(v);
  }
  if (const Json* v = jsonutil::find(j, "src_mac")) {
    if (!v->is_string())
      throw SchemaError(path + "/src_mac", "expected a string");
    m.src_mac = MacAddr::parse(v->get<std::string>(), path + "/src_mac");
  }
  if (const Json* v = jsonutil::find(j, "dst_mac")) {
    if (!v->is_string())
      throw SchemaError(path + "/dst_mac", "expected a string");
    m.dst_mac = MacAddr::parse(v->get<std::string>(), path + "/dst_mac");
  }
  if (jsonutil::find(j, "eth_type") != nullptr) {
    int64_t v = jsonutil::get_int(j, "eth_type", path);
    if (v < 0 || v > 0xffff)
      throw ValueError(path + "/eth_type", "eth_type out of range");
    m.eth_type = static_cast<uint16_t>(v);
  }
  return m;
}

Json action_to_json(const Action& a) {
  Json j = Json::object();
  switch (a.kind) {
    case ActionKind::kOutput:
      j["kind"] = "output";
      j["arg"] = a.port;
      break;
    case ActionKind::kDrop:
      j["kind"] = "drop";
      break;
    case ActionKind::kToController:
      j["kind"] = "to_controller";
      break;
    case ActionKind::kSetVlan:
      j["kind"] = "set_vlan";
      j["arg"] = a.vlan;
      break;
    case ActionKind::kSetDstMac:
      j["kind"] = "set_dst_mac";
      j["arg"] = a.mac.to_string();
      break;
  }
  return j;
}

Action action_from_json(const Json& j, const std::string& path) {
  jsonutil::require_object(j, path);
  jsonutil::reject_unknown_keys(j, path, {"kind", "arg"});
  std::string kind = jsonutil::get_string(j, "kind", path);
  if (kind == "drop") return Action::drop();
  if (kind == "to_controller") return Action::to_controller();
  if (kind == "output") {
    int64_t v = jsonutil::get_int(j, "arg", path);
    if (v < 0 || v > 0xffffffffLL)
      throw ValueError(path + "/arg", "port id out of range");
    return Action::output(static_cast<uint32_t>(v));
  }
  if (kind == "set_vlan") {
    int64_t v = jsonutil::get_int(j, "arg", path);
    if (v < 0 || v > 0xffff)
      throw ValueError(path + "/arg", "vlan id out of range");
    return Action::set_vlan(static_cast<uint16_t>(v));
  }
  if (kind == "set_dst_mac") {
    std::string s = jsonutil::get_string(j, "arg", path);
    return Action::set_dst_mac(MacAddr::parse(s, path + "/arg"));
  }
  throw ValueError(path + "/kind", "unknown action kind '" + kind + "'");
}

void validate_actions(const std::vector<Action>& actions,
                      const std::string& path) {
  int outputs = 0, drops = 0;
  for (const Action& a : actions) {
    if (a.kind == ActionKind::kOutput) ++outputs;
    if (a.kind == ActionKind::kDrop) ++drops;
  }
  if (outputs > 1) throw ValueError(path, "more than one output action");
  if (drops > 1) throw ValueError(path, "more than one drop action");
  if (outputs > 0 && drops > 0)
    throw ValueError(path, "drop and output are mutually exclusive");
}

FlowEntry entry_from_json(const Json& j, const std::string& path, int index) {
  jsonutil::require_object(j, path);
  jsonutil::reject_unknown_keys(
      j, path, {"match", "priority", "actions", "counters", "timeout"});
  FlowEntry e;
  const Json* match = jsonutil::find(j, "match");
  if (match == nullptr) throw SchemaError(path + "/match", "missing field");
  e.match = match_from_json(*match, path + "/match");

  int64_t priority = jsonutil::get_int(j, "priority", path);
  if (priority < 0) throw ValueError(path + "/priority", "must be >= 0");
  e.priority = static_cast<uint32_t>(priority);

  const Json* actions = jsonutil::find(j, "actions");
  if (actions == nullptr) throw SchemaError(path + "/actions", "missing field");
  jsonutil::require_array(*actions, path + "/actions");
  for (size_t i = 0; i < actions->size(); ++i)
    e.actions.push_back(action_from_json(
        (*actions)[i], path + "/actions/" + std::to_string(i)));
  validate_actions(e.actions, path + "/actions");

  int64_t counters = jsonutil::get_int_or(j, "counters", path, 0);
  if (counters < 0) throw ValueError(path + "/counters", "must be >= 0");
  e.counters = static_cast<uint64_t>(counters);

  if (jsonutil::find(j, "timeout") != nullptr)
    e.timeout = jsonutil::get_int(j, "timeout", path);

  e.entry_index = index;
  return e;
}

}  // namespace

Json flow_entry_to_json(const FlowEntry& e) {
  Json j = Json::object();
  j["match"] = match_to_json(e.match);
  j["priority"] = e.priority;
  Json actions = Json::array();
  for (const Action& a : e.actions) actions.push_back(action_to_json(a));
  j["actions"] = std::move(actions);
  j["counters"] = e.counters;
  j["timeout"] = e.timeout ? Json(*e.timeout) : Json(nullptr);
  return j;
}

Json flow_tables_to_json(const std::vector<FlowTable>& tables) {
  Json doc = Json::array();
  for (const FlowTable& t : tables) {
    Json jt = Json::object();
    jt["switch_id"] = t.switch_id;
    Json entries = Json::array();
    for (const FlowEntry& e : t.entries) entries.push_back(flow_entry_to_json(e));
    jt["entries"] = std::move(entries);
    doc.push_back(std::move(jt));
  }
  return doc;
}

std::vector<FlowTable> flow_tables_from_json(const Json& doc) {
  jsonutil::require_array(doc, "/");
  std::vector<FlowTable> tables;
  for (size_t ti = 0; ti < doc.size(); ++ti) {
    const std::string path = "/" + std::to_string(ti);
    const Json& jt = doc[ti];
    jsonutil::require_object(jt, path);
    jsonutil::reject_unknown_keys(jt, path, {"switch_id", "entries"});
    FlowTable t;
    t.switch_id = jsonutil::get_string(jt, "switch_id", path);
    const Json* entries = jsonutil::find(jt, "entries");
    if (entries == nullptr)
      throw SchemaError(path + "/entries", "missing field");
    jsonutil::require_array(*entries, path + "/entries");
    for (size_t ei = 0; ei < entries->size(); ++ei)
      t.entries.push_back(entry_from_json(
          (*entries)[ei], path + "/entries/" + std::to_string(ei),
          static_cast<int>(ei)));
    tables.push_back(std::move(t));
  }
  return tables;
}

std::vector<FlowTable> parse_flow_tables(const std::string& document) {
  return flow_tables_from_json(jsonutil::parse_document(document));
}

std::string serialize_flow_tables(const std::vector<FlowTable>& tables) {
  return flow_tables_to_json(tables).dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Matching
// ---------------------------------------------------------------------------

EntryClass classify_entry(const FlowEntry& entry) {
  return entry.output_port() ? EntryClass::kForwarding
                             : EntryClass::kFunctional;
}

bool match_admits(const MatchFields& m, const Packet& p) {
  if (!m.src_ip.contains(p.src_ip)) return false;
  if (!m.dst_ip.contains(p.dst_ip)) return false;
  if (m.proto != Proto::kAny && m.proto != p.proto) return false;
  if (m.src_port && *m.src_port != p.src_port) return false;
  if (m.dst_port && *m.dst_port != p.dst_port) return false;
  if (m.in_port && *m.in_port != p.in_port) return false;
  if (m.vlan_id && *m.vlan_id != p.vlan_id) return false;
  if (m.src_mac && *m.src_mac != p.src_mac) return false;
  if (m.dst_mac && *m.dst_mac != p.dst_mac) return false;
  if (m.eth_type && *m.eth_type != kEthTypeIpv4) return false;
  return true;
}

const FlowEntry* match_packet(const std::vector<FlowEntry>& entries,
                              const Packet& packet, double now) {
  const FlowEntry* best = nullptr;
  for (const FlowEntry& e : entries) {
    if (e.timeout && now >= static_cast<double>(*e.timeout)) continue;
    if (!match_admits(e.match, packet)) continue;
    if (best == nullptr || e.priority > best->priority ||
        (e.priority == best->priority && e.entry_index < best->entry_index))
      best = &e;
  }
  return best;
}

const FlowEntry* match_packet(const FlowTable& table, const Packet& packet,
                              double now) {
  return match_packet(table.entries, packet, now);
}

}  // namespace safla
