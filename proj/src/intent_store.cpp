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

#include "safla/intent_store.hpp"

#include <map>

namespace safla {

EndpointTuple to_tuple(const Intent& intent) {
  return EndpointTuple{intent.src_host, intent.dst_host, intent.proto,
                       intent.dst_port};
}

const Intent* IntentRepository::find(const std::string& id) const {
  auto it = intents_.find(id);
  return it == intents_.end() ? nullptr : &it->second;
}

void IntentRepository::upsert(Intent intent) {
  intents_[intent.id] = std::move(intent);
  ++revision_;
}

void IntentRepository::remove(const std::string& id) {
  auto it = intents_.find(id);
  if (it == intents_.end())
    throw UnknownIdError("unknown intent id '" + id + "'");
  intents_.erase(it);
  ++revision_;
}

Json intent_to_json(const Intent& i) {
  Json j = Json::object();
  j["id"] = i.id;
  j["src_host"] = i.src_host;
  j["dst_host"] = i.dst_host;
  j["proto"] = proto_to_string(i.proto);
  j["dst_port"] = i.dst_port ? Json(*i.dst_port) : Json(nullptr);
  j["priority_class"] = i.priority_class;
  return j;
}

Intent intent_from_json(const Json& j, const std::string& path) {
  jsonutil::require_object(j, path);
  jsonutil::reject_unknown_keys(
      j, path,
      {"id", "src_host", "dst_host", "proto", "dst_port", "priority_class"});
  Intent i;
  i.id = jsonutil::get_string(j, "id", path);
  i.src_host = jsonutil::get_string(j, "src_host", path);
  i.dst_host = jsonutil::get_string(j, "dst_host", path);
  if (i.src_host == i.dst_host)
    throw ValueError(path, "src_host and dst_host must differ");
  i.proto = proto_from_string(
      jsonutil::get_string_or(j, "proto", path, "any"), path + "/proto");
  if (jsonutil::find(j, "dst_port") != nullptr)
    i.dst_port = jsonutil::get_port(j, "dst_port", path);
  int64_t pc = jsonutil::get_int_or(j, "priority_class", path,
                                    kDefaultPriorityClass);
  if (pc < 0) throw ValueError(path + "/priority_class", "must be >= 0");
  i.priority_class = static_cast<int>(pc);
  return i;
}

IntentRepository load_repository(const std::string& document,
                                 LoadDiagnostics* diagnostics) {
  Json doc = jsonutil::parse_document(document);
  jsonutil::require_array(doc, "/");
  IntentRepository repo;
  for (size_t i = 0; i < doc.size(); ++i) {
    const std::string path = "/" + std::to_string(i);
    Intent intent = intent_from_json(doc[i], path);
    if (repo.find(intent.id) != nullptr)
      throw DuplicateIdError(path + ": duplicate intent id '" + intent.id +
                             "'");
    repo.upsert(std::move(intent));
  }
  if (diagnostics != nullptr) {
    std::map<EndpointTuple, std::string> seen;
    for (const auto& [id, intent] : repo.intents()) {
      auto [it, inserted] = seen.emplace(to_tuple(intent), id);
      if (!inserted)
        diagnostics->duplicate_semantics.emplace_back(it->second, id);
    }
  }
  return repo;
}

std::string save_repository(const IntentRepository& repo) {
  Json doc = Json::array();
  // intents() iterates the id-keyed map, so output is sorted by id.
  for (const auto& [id, intent] : repo.intents())
    doc.push_back(intent_to_json(intent));
  return doc.dump(2) + "\n";
}

}  // namespace safla
