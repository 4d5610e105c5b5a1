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
#include <string>

#include "safla/flow_model.hpp"

namespace safla {

/// Endpoint-level view of one connectivity intent: who talks to whom, over
/// which protocol and destination port. ANY slots compare equal only to ANY.
struct EndpointTuple {
  std::string src_host;
  std::string dst_host;
  Proto proto = Proto::kAny;
  std::optional<uint16_t> dst_port;

  std::string to_string() const {
    std::string out = src_host + ">" + dst_host + " " + proto_to_string(proto);
    out += " ";
    out += dst_port ? std::to_string(*dst_port) : "*";
    return out;
  }

  Json to_json() const {
    Json j = Json::object();
    j["src_host"] = src_host;
    j["dst_host"] = dst_host;
    j["proto"] = proto_to_string(proto);
    j["dst_port"] = dst_port ? Json(*dst_port) : Json(nullptr);
    return j;
  }

  friend bool operator==(const EndpointTuple&, const EndpointTuple&) = default;
  friend bool operator<(const EndpointTuple& x, const EndpointTuple& y) {
    return x.to_string() < y.to_string();
  }
};

}  // namespace safla
