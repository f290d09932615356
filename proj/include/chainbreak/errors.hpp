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

#include <stdexcept>
#include <string>

namespace chainbreak {

// Values mirror cb_status in chainbreak.h; keep the two in sync.
enum class Errc : int {
  kOk = 0,
  kInvalidDimension = 1,
  kInvalidThreshold = 2,
  kNoDriving = 3,
  kInvalidArgument = 4,
  kOutOfRange = 5,
  kStability = 6,
  kExpectedCount = 7,
  kSchemaVersion = 8,
  kMalformedJson = 9,
  kMissingField = 10,
  kIo = 11,
  kExperimentAborted = 12,
  kInternal = 13,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, Errc code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace chainbreak
