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

#include <span>

#include "trust/digest.hpp"

namespace trust::ledger {

/// SHA-256(0x00 || digest)
Digest merkle_leaf(const Digest& d);
/// SHA-256(0x01 || left || right)
Digest merkle_node(const Digest& left, const Digest& right);

/// Root over ordered segment digests; an odd level repeats its last node.
/// Throws EmptyList.
Digest merkle_root(std::span<const Digest> segment_digests);

}  // namespace trust::ledger
