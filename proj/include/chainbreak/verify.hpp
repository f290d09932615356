// Copyright 2026 The chainbreak Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

namespace chainbreak {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runs the built-in invariant checks of every module (exact algebra,
/// closed-form theory identities, statistics sanity, seeding, deterministic
/// break times, reproducibility). Takes well under a few seconds.
std::vector<CheckResult> run_invariant_suite();

}  // namespace chainbreak
