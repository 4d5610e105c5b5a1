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

#include <stdexcept>
#include <string>
#include <vector>

namespace safla {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A document does not conform to its schema (missing key, wrong type,
/// unknown key). The message always names the JSON path of the offender.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// A well-typed field holds a value outside its legal range.
class ValueError : public Error {
 public:
  ValueError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class DanglingLinkError : public Error {
 public:
  using Error::Error;
};

class UnknownTargetError : public Error {
 public:
  using Error::Error;
};

class NotAHostError : public Error {
 public:
  using Error::Error;
};

class UnattachedHostError : public Error {
 public:
  using Error::Error;
};

class DuplicateIdError : public Error {
 public:
  using Error::Error;
};

class UnknownIdError : public Error {
 public:
  using Error::Error;
};

class UnknownHostError : public Error {
 public:
  using Error::Error;
};

class SpecError : public Error {
 public:
  using Error::Error;
};

/// A remediation plan could not be applied in full. `applied` records the
/// actions that had already taken effect when the failure occurred.
class ApplyError : public Error {
 public:
  ApplyError(const std::string& what, std::vector<std::string> applied)
      : Error(what), applied_(std::move(applied)) {}
  const std::vector<std::string>& applied() const { return applied_; }

 private:
  std::vector<std::string> applied_;
};

}  // namespace safla
