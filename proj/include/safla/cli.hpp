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

namespace safla::cli {

/// Entry point behind the `safla` binary. Exit codes: 0 success (for
/// `check`: consistent), 2 `check` found an inconsistency, 1 any other
/// failure.
int run(int argc, const char* const* argv);

}  // namespace safla::cli
