// Copyright 2026 The ageoi Authors
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

#ifndef AGEOI_TYPES_H_
#define AGEOI_TYPES_H_

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace ageoi {

// Road segments are dense integers 0..N-1.
using SegmentId = std::uint32_t;
using StationId = std::uint32_t;
using EvId = std::string;
using Tick = std::int64_t;
using Meters = double;

// Internal marker for "no directed path". Public distance queries return
// std::optional instead of exposing this value.
inline constexpr Meters kUnreachable = std::numeric_limits<Meters>::infinity();

inline bool IsReachable(Meters d) { return d != kUnreachable; }

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad files, bad parameters, violated preconditions.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class NoReachableStation : public Error {
 public:
  using Error::Error;
};

class InfeasibleContinuation : public Error {
 public:
  using Error::Error;
};

class DegenerateChannelColumn : public Error {
 public:
  using Error::Error;
};

class UnreachableMass : public Error {
 public:
  using Error::Error;
};

}  // namespace ageoi

#endif  // AGEOI_TYPES_H_
