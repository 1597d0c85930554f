/*
 * Copyright 2026 The mlmaudit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MLMAUDIT_RNG_H_
#define MLMAUDIT_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace mlmaudit {

using Rng = std::mt19937_64;

// Stable 64-bit tag for a stream name (FNV-1a). Used only to derive seeds.
std::uint64_t StreamTag(std::string_view name);

// Derives an independent seed from a master seed and a path of stream
// coordinates, e.g. DeriveSeed(seed, {StreamTag("lime"), instance_id}).
// Each coordinate is folded in with a splitmix64 finalizer.
std::uint64_t DeriveSeed(std::uint64_t master,
                         std::initializer_list<std::uint64_t> path);

inline Rng MakeRng(std::uint64_t seed) { return Rng(seed); }

}  // namespace mlmaudit

#endif  // MLMAUDIT_RNG_H_
