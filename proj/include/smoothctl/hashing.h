// Copyright 2026 The Smoothctl Authors.
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

#ifndef SMOOTHCTL_HASHING_H_
#define SMOOTHCTL_HASHING_H_

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

namespace smoothctl {

// Lowercase hex SHA-256.
std::string Sha256Hex(std::string_view data);

// SHA-256 over length-prefixed parts, so ("ab", "c") and ("a", "bc") differ.
std::string ContentHash(std::initializer_list<std::string_view> parts);

// First 8 bytes of a hex digest as an integer; used to derive per-key
// random bits that do not depend on call order.
uint64_t HashPrefix64(std::string_view hex_digest);

}  // namespace smoothctl

#endif  // SMOOTHCTL_HASHING_H_
