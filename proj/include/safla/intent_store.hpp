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

#include "safla/endpoint_tuple.hpp"

namespace safla {

constexpr int kDefaultPriorityClass = 100;

/// A declared connectivity intent: src may reach dst, optionally scoped to a
/// protocol and destination port.
struct Intent {
  std::string id;
  std::string src_host;
  std::string dst_host;
  Proto proto = Proto::kAny;
  std::optional<uint16_t> dst_port;
  int priority_class = kDefaultPriorityClass;

  friend bool operator==(const Intent&, const Intent&) = default;
};

/// Projection used by the consistency check.
EndpointTuple to_tuple(const Intent& intent);

class IntentRepository {
 public:
  IntentRepository() = default;

  const std::map<std::string, Intent>& intents() const { return intents_; }
  uint64_t revision() const { return revision_; }
  size_t size() const { return intents_.size(); }

  const Intent* find(const std::string& id) const;

  /// Inserts or replaces by id; bumps the revision.
  void upsert(Intent intent);
  /// Removes by id; throws UnknownIdError when absent.
  void remove(const std::string& id);

 private:
  std::map<std::string, Intent> intents_;
  uint64_t revision_ = 0;
};

struct LoadDiagnostics {
  /// Pairs of intent ids whose endpoint tuples coincide. Such repositories
  /// cannot satisfy a one-to-one consistency match, so they are surfaced
  /// here rather than silently merged.
  std::vector<std::pair<std::string, std::string>> duplicate_semantics;
};

/// Loads a repository document (JSON array). Duplicate ids are an error;
/// duplicate-semantics pairs land in `diagnostics` when non-null.
IntentRepository load_repository(const std::string& document,
                                 LoadDiagnostics* diagnostics = nullptr);

/// Canonical serialization: sorted by id, stable field order;
/// load(save(r)) == r and save is byte-stable.
std::string save_repository(const IntentRepository& repo);

Json intent_to_json(const Intent& intent);
Intent intent_from_json(const Json& j, const std::string& path);

}  // namespace safla
