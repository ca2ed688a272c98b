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

#include "risdoa/scenario.hpp"

#include "risdoa/rng.hpp"

#include <cstdio>
#include <random>
#include <sstream>

namespace risdoa {

void SourcePolicy::validate() const {
  if (count < 1) throw DomainError("source count must be at least 1");
  if (elevation_deg.lo > elevation_deg.hi || elevation_deg.lo < 0.0 || elevation_deg.hi > 180.0)
    throw DomainError("invalid elevation range");
  if (azimuth_deg.lo > azimuth_deg.hi || azimuth_deg.lo < -90.0 || azimuth_deg.hi > 90.0)
    throw DomainError("invalid azimuth range");
  if (min_separation_deg < 0.0) throw DomainError("min separation must be nonnegative");
}

CodeSchedule Scenario::schedule() const {
  return build_code_schedule(samples, geometry.elements(), code_seed);
}

void Scenario::validate() const {
  if (samples < 1) throw DomainError("samples must be positive");
  impairments.validate();
  source_policy.validate();
  if (fixed_sources) fixed_sources->validate();
}

SourceSet draw_sources(const SourcePolicy& policy, std::uint64_t seed) {
  policy.validate();
  Rng rng(stream_seed(seed, Stream::kSources));
  std::uniform_real_distribution<double> el(policy.elevation_deg.lo, policy.elevation_deg.hi);
  std::uniform_real_distribution<double> az(policy.azimuth_deg.lo, policy.azimuth_deg.hi);
  std::uniform_real_distribution<double> ph(0.0, kTwoPi);

  constexpr int kMaxAttempts = 10000;
  SourceSet set;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    set.directions.clear();
    for (int k = 0; k < policy.count; ++k) set.directions.push_back({el(rng), az(rng)});
    if (policy.count < 2 || set.min_separation_deg() >= policy.min_separation_deg) break;
    if (attempt + 1 == kMaxAttempts)
      throw DomainError("draw_sources: separation constraint cannot be met");
  }
  for (int k = 0; k < policy.count; ++k) set.amplitudes.push_back(std::polar(1.0, ph(rng)));
  return set;
}

SourceSet scenario_sources(const Scenario& scenario, std::uint64_t seed) {
  if (scenario.fixed_sources) return *scenario.fixed_sources;
  return draw_sources(scenario.source_policy, seed);
}

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string canonical_string(const Scenario& s) {
  std::ostringstream os;
  const auto& g = s.geometry;
  os << "geometry.rows=" << g.rows() << "\n"
     << "geometry.cols=" << g.cols() << "\n"
     << "geometry.row_spacing=" << num(g.row_spacing()) << "\n"
     << "geometry.col_spacing=" << num(g.col_spacing()) << "\n"
     << "signal.samples=" << s.samples << "\n"
     << "signal.code_seed=" << s.code_seed << "\n"
     << "signal.snr_db=" << num(s.snr_db) << "\n"
     << "signal.seed=" << s.seed << "\n";
  const auto& im = s.impairments;
  os << "impairments.coupling_amplitude=" << num(im.coupling_amplitude.lo) << ","
     << num(im.coupling_amplitude.hi) << "\n"
     << "impairments.mismatch_amplitude=" << num(im.mismatch_amplitude.lo) << ","
     << num(im.mismatch_amplitude.hi) << "\n"
     << "impairments.mismatch_phase=" << num(im.mismatch_phase.lo) << ","
     << num(im.mismatch_phase.hi) << "\n"
     << "impairments.neighbors=";
  for (const auto& [dm, dn] : im.coupling_neighbors) os << dm << ":" << dn << ";";
  os << "\n";
  const auto& p = s.source_policy;
  os << "sources.count=" << p.count << "\n"
     << "sources.elevation=" << num(p.elevation_deg.lo) << "," << num(p.elevation_deg.hi) << "\n"
     << "sources.azimuth=" << num(p.azimuth_deg.lo) << "," << num(p.azimuth_deg.hi) << "\n"
     << "sources.min_separation=" << num(p.min_separation_deg) << "\n";
  if (s.fixed_sources) {
    os << "sources.fixed=";
    for (int k = 0; k < s.fixed_sources->count(); ++k) {
      const auto& d = s.fixed_sources->directions[k];
      const auto& a = s.fixed_sources->amplitudes[k];
      os << num(d.elevation_deg) << ":" << num(d.azimuth_deg) << ":" << num(a.real()) << ":"
         << num(a.imag()) << ";";
    }
    os << "\n";
  }
  return os.str();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string scenario_hash(const Scenario& scenario) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_string(scenario))));
  return buf;
}

}  // namespace risdoa
