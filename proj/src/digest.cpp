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

#include "trust/digest.hpp"

#include <openssl/evp.h>

#include "trust/errors.hpp"

namespace trust {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kCycle: return "CycleError";
    case ErrorCode::kUnknownNode: return "UnknownNode";
    case ErrorCode::kMissingVerdict: return "MissingVerdict";
    case ErrorCode::kNothingToRepair: return "NothingToRepair";
    case ErrorCode::kRegeneratorFailure: return "RegeneratorFailure";
    case ErrorCode::kDepthOutOfRange: return "DepthOutOfRange";
    case ErrorCode::kEpsilonTooLarge: return "EpsilonTooLarge";
    case ErrorCode::kE1Violated: return "E1Violated";
    case ErrorCode::kThetaOutOfDomain: return "ThetaOutOfDomain";
    case ErrorCode::kInsufficientSeats: return "InsufficientSeats";
    case ErrorCode::kWrongPhase: return "WrongPhase";
    case ErrorCode::kNotInCommittee: return "NotInCommittee";
    case ErrorCode::kDuplicateCommit: return "DuplicateCommit";
    case ErrorCode::kHashMismatch: return "HashMismatch";
    case ErrorCode::kNoCommitment: return "NoCommitment";
    case ErrorCode::kAlreadyFinalized: return "AlreadyFinalized";
    case ErrorCode::kSegmentsPending: return "SegmentsPending";
    case ErrorCode::kNotFinalized: return "NotFinalized";
    case ErrorCode::kAlreadySettled: return "AlreadySettled";
    case ErrorCode::kEmptyList: return "EmptyList";
    case ErrorCode::kEmptyGrid: return "EmptyGrid";
    case ErrorCode::kConfigParse: return "ConfigParseError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

namespace {
int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

Digest digest_from_hex(std::string_view hex) {
  if (hex.size() != 64) {
    throw InvalidArgument("digest must be 64 hex characters, got " +
                          std::to_string(hex.size()));
  }
  Digest d{};
  for (std::size_t i = 0; i < d.size(); ++i) {
    const int hi = hex_value(hex[2 * i]);
    const int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw InvalidArgument("invalid hex digit in digest");
    d[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return d;
}

Sha256::Sha256() : ctx_(EVP_MD_CTX_new()) {
  EVP_DigestInit_ex(static_cast<EVP_MD_CTX*>(ctx_), EVP_sha256(), nullptr);
}

Sha256::~Sha256() { EVP_MD_CTX_free(static_cast<EVP_MD_CTX*>(ctx_)); }

Sha256& Sha256::update(std::span<const std::uint8_t> bytes) {
  EVP_DigestUpdate(static_cast<EVP_MD_CTX*>(ctx_), bytes.data(), bytes.size());
  return *this;
}

Sha256& Sha256::update(std::string_view text) {
  EVP_DigestUpdate(static_cast<EVP_MD_CTX*>(ctx_), text.data(), text.size());
  return *this;
}

Sha256& Sha256::update(std::uint8_t byte) {
  EVP_DigestUpdate(static_cast<EVP_MD_CTX*>(ctx_), &byte, 1);
  return *this;
}

Sha256& Sha256::update_u64(std::uint64_t value) {
  std::array<std::uint8_t, 8> buf{};
  for (int i = 7; i >= 0; --i) {
    buf[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(value & 0xff);
    value >>= 8;
  }
  return update(std::span<const std::uint8_t>(buf));
}

Digest Sha256::finish() {
  Digest d{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(static_cast<EVP_MD_CTX*>(ctx_), d.data(), &len);
  return d;
}

Digest sha256(std::span<const std::uint8_t> bytes) {
  Sha256 h;
  h.update(bytes);
  return h.finish();
}

Digest sha256(std::string_view text) {
  Sha256 h;
  h.update(text);
  return h.finish();
}

std::uint64_t digest_prefix_u64(const Digest& d) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) v = (v << 8) | d[i];
  return v;
}

}  // namespace trust
