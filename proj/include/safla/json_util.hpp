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
#include <initializer_list>
#include <string>

#include <json.hpp>

#include "safla/errors.hpp"

namespace safla {

// All documents are parsed and emitted as ordered JSON so that the canonical
// serialized form is byte-stable.
using Json = nlohmann::ordered_json;

namespace jsonutil {

inline Json parse_document(const std::string& bytes) {
  Json doc = Json::parse(bytes, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw SchemaError("/", "not valid JSON");
  return doc;
}

inline void require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
}

inline void require_array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
}

/// Rejects keys outside `allowed` so that typos and foreign documents fail
/// loudly instead of being silently ignored.
inline void reject_unknown_keys(const Json& obj, const std::string& path,
                                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) throw SchemaError(path + "/" + item.key(), "unknown field");
  }
}

inline const Json* find(const Json& obj, const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

inline std::string get_string(const Json& obj, const std::string& key,
                              const std::string& path) {
  const Json* v = find(obj, key);
  if (v == nullptr) throw SchemaError(path + "/" + key, "missing field");
  if (!v->is_string()) throw SchemaError(path + "/" + key, "expected a string");
  return v->get<std::string>();
}

inline int64_t get_int(const Json& obj, const std::string& key,
                       const std::string& path) {
  const Json* v = find(obj, key);
  if (v == nullptr) throw SchemaError(path + "/" + key, "missing field");
  if (!v->is_number_integer())
    throw SchemaError(path + "/" + key, "expected an integer");
  return v->get<int64_t>();
}

inline int64_t get_int_or(const Json& obj, const std::string& key,
                          const std::string& path, int64_t fallback) {
  if (find(obj, key) == nullptr) return fallback;
  return get_int(obj, key, path);
}

inline std::string get_string_or(const Json& obj, const std::string& key,
                                 const std::string& path,
                                 const std::string& fallback) {
  if (find(obj, key) == nullptr) return fallback;
  return get_string(obj, key, path);
}

inline uint16_t get_port(const Json& obj, const std::string& key,
                         const std::string& path) {
  int64_t v = get_int(obj, key, path);
  if (v < 1 || v > 65535)
    throw ValueError(path + "/" + key, "port out of range [1,65535]");
  return static_cast<uint16_t>(v);
}

}  // namespace jsonutil
}  // namespace safla
