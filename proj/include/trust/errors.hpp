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

#include <stdexcept>
#include <string>
#include <string_view>

namespace trust {

enum class ErrorCode {
  kCycle,
  kUnknownNode,
  kMissingVerdict,
  kNothingToRepair,
  kRegeneratorFailure,
  kDepthOutOfRange,
  kEpsilonTooLarge,
  kE1Violated,
  kThetaOutOfDomain,
  kInsufficientSeats,
  kWrongPhase,
  kNotInCommittee,
  kDuplicateCommit,
  kHashMismatch,
  kNoCommitment,
  kAlreadyFinalized,
  kSegmentsPending,
  kNotFinalized,
  kAlreadySettled,
  kEmptyList,
  kEmptyGrid,
  kConfigParse,
  kInvalidArgument,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// One exception type per error kind so call sites can catch precisely.
template <ErrorCode C>
class CodedError : public Error {
 public:
  explicit CodedError(const std::string& what) : Error(C, what) {}
};

using CycleError = CodedError<ErrorCode::kCycle>;
using UnknownNode = CodedError<ErrorCode::kUnknownNode>;
using MissingVerdict = CodedError<ErrorCode::kMissingVerdict>;
using NothingToRepair = CodedError<ErrorCode::kNothingToRepair>;
using RegeneratorFailure = CodedError<ErrorCode::kRegeneratorFailure>;
using DepthOutOfRange = CodedError<ErrorCode::kDepthOutOfRange>;
using EpsilonTooLarge = CodedError<ErrorCode::kEpsilonTooLarge>;
using E1Violated = CodedError<ErrorCode::kE1Violated>;
using ThetaOutOfDomain = CodedError<ErrorCode::kThetaOutOfDomain>;
using InsufficientSeats = CodedError<ErrorCode::kInsufficientSeats>;
using WrongPhase = CodedError<ErrorCode::kWrongPhase>;
using NotInCommittee = CodedError<ErrorCode::kNotInCommittee>;
using DuplicateCommit = CodedError<ErrorCode::kDuplicateCommit>;
using HashMismatch = CodedError<ErrorCode::kHashMismatch>;
using NoCommitment = CodedError<ErrorCode::kNoCommitment>;
using AlreadyFinalized = CodedError<ErrorCode::kAlreadyFinalized>;
using SegmentsPending = CodedError<ErrorCode::kSegmentsPending>;
using NotFinalized = CodedError<ErrorCode::kNotFinalized>;
using AlreadySettled = CodedError<ErrorCode::kAlreadySettled>;
using EmptyList = CodedError<ErrorCode::kEmptyList>;
using EmptyGrid = CodedError<ErrorCode::kEmptyGrid>;
using ConfigParseError = CodedError<ErrorCode::kConfigParse>;
using InvalidArgument = CodedError<ErrorCode::kInvalidArgument>;

}  // namespace trust
