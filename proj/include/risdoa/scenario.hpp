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

#include "risdoa/ris_model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace risdoa {

// How source directions and amplitudes are drawn when not pinned.
struct SourcePolicy {
  int count = 2;
  Range elevation_deg{20.0, 80.0};
  Range azimuth_deg{-30.0, 30.0};
  double min_separation_deg = 10.0;

  void validate() const;
};

// Everything needed to regenerate a snapshot besides the per-trial seed.
struct Scenario {
  RisGeometry geometry{16, 16, 0.4, 0.4};
  int samples = 128;
  std::uint64_t code_seed = 1;
  ImpairmentRanges impairments;
  SourcePolicy source_policy;
  std::optional<SourceSet> fixed_sources;
  double snr_db = 20.0;
  std::uint64_t seed = 2024;

  CodeSchedule schedule() const;
  void validate() const;
};

// Uniform directions in the policy ranges (rejection on separation), unit-modulus
// amplitudes with uniform phase.
SourceSet draw_sources(const SourcePolicy& policy, std::uint64_t seed);

// The pinned sources if present, otherwise draw_sources(policy, seed).
SourceSet scenario_sources(const Scenario& scenario, std::uint64_t seed);

// Canonical key=value rendering; stable across runs and platforms.
std::string canonical_string(const Scenario& scenario);
// 64-bit FNV-1a of canonical_string, as 16 hex digits.
std::string scenario_hash(const Scenario& scenario);
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace risdoa
