// Copyright 2026 The trust-audit Authors
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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trust {

/// 32-byte SHA-256 digest; used for content hashes, commitments and roots.
using Digest = std::array<std::uint8_t, 32>;

std::string to_hex(std::span<const std::uint8_t> bytes);
inline std::string to_hex(const Digest& d) { return to_hex(std::span<const std::uint8_t>(d)); }

/// Parses exactly 64 hex characters (either case). Throws InvalidArgument.
Digest digest_from_hex(std::string_view hex);

Digest sha256(std::span<const std::uint8_t> bytes);
Digest sha256(std::string_view text);

/// Incremental hasher over OpenSSL EVP.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  Sha256& update(std::span<const std::uint8_t> bytes);
  Sha256& update(std::string_view text);
  Sha256& update(std::uint8_t byte);
  Sha256& update_u64(std::uint64_t value);  // big-endian
  Digest finish();

 private:
  void* ctx_;
};

/// First 8 bytes of a digest as a big-endian integer.
std::uint64_t digest_prefix_u64(const Digest& d);

}  // namespace trust
