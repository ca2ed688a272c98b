// SPDX-License-Identifier: Apache-2.0
//
// risdoa: gridless 2D direction finding with an impaired 1-bit RIS
// Copyright (C) 2026 The risdoa authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <random>

namespace risdoa {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; derives independent stream seeds from (master, counter).
constexpr std::uint64_t split_seed(std::uint64_t master, std::uint64_t counter) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stream tags keep the draws of different consumers of one trial seed apart.
enum class Stream : std::uint64_t {
  kCodes = 1,
  kImpairments = 2,
  kNoise = 3,
  kSources = 4,
  kSnr = 5,
  kShuffle = 6,
  kInit = 7,
};

constexpr std::uint64_t stream_seed(std::uint64_t seed, Stream s) {
  return split_seed(seed, static_cast<std::uint64_t>(s) << 32);
}

}  // namespace risdoa
