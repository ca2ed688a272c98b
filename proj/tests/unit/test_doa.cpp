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

#include "risdoa/doa.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

using namespace risdoa;

namespace {

CVector atom(int len, double d, double f) {
  CVector a(len);
  for (int l = 0; l < len; ++l) a(l) = std::polar(1.0, -2.0 * M_PI * l * d * f);
  return a;
}

CMatrix toeplitz_from(int len, double d, std::initializer_list<std::pair<double, double>> fc) {
  CMatrix t = CMatrix::Zero(len, len);
  for (const auto& [f, c] : fc) t += c * atom(len, d, f) * atom(len, d, f).adjoint();
  return t;
}

DecoupledSdpVars noiseless_solution(const RisGeometry& geom, const std::vector<Direction>& dirs) {
  const int m = geom.rows();
  const int n = geom.cols();
  SourceSet src;
  src.directions = dirs;
  for (std::size_t k = 0; k < dirs.size(); ++k) src.amplitudes.push_back(std::polar(1.0, 0.9 * k));
  const CodeSchedule sched = build_code_schedule(m * n, m * n, 17);
  const CVector z = noiseless_ideal(geom, sched, src);
  SolverConfig c;
  c.mode = SolveMode::kNoiseBall;
  c.primal_tol = 1e-8;
  c.dual_tol = 1e-8;
  return solve_danm(z, sched.codes.cast<cd>(), geom, c);
}

double max_angle_error(const std::vector<Direction>& truth, const std::vector<Direction>& est) {
  // Both lists sorted by elevation.
  double e = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k)
    e = std::max({e, std::abs(truth[k].elevation_deg - est[k].elevation_deg),
                  std::abs(truth[k].azimuth_deg - est[k].azimuth_deg)});
  return e;
}

}  // namespace

TEST_SUITE("doa") {

TEST_CASE("dc toeplitz gives frequency zero") {
  const auto f = toeplitz_to_freqs(CMatrix::Ones(6, 6), 1, 0.4);
  REQUIRE(f.size() == 1);
  CHECK(std::abs(f[0]) < 1e-12);
}

TEST_CASE("single and double frequency recovery") {
  const auto one = toeplitz_to_freqs(toeplitz_from(8, 0.4, {{0.5, 1.0}}), 1, 0.4);
  CHECK(std::abs(one[0] - 0.5) < 1e-9);
  const auto two = toeplitz_to_freqs(toeplitz_from(8, 0.4, {{0.3, 1.0}, {-0.6, 2.0}}), 2, 0.4);
  REQUIRE(two.size() == 2);
  CHECK(std::abs(two[0] + 0.6) < 1e-8);
  CHECK(std::abs(two[1] - 0.3) < 1e-8);
}

TEST_CASE("frequencies separated by two over L are exact") {
  const int len = 10;
  const double d = 0.5;  // unambiguous range [-1, 1)
  for (int t = 0; t < 10; ++t) {
    const double f1 = -0.9 + 0.1 * t;
    const double f2 = f1 + 2.0 / len + 0.01 * t;
    const auto f = toeplitz_to_freqs(toeplitz_from(len, d, {{f1, 1.0}, {f2, 0.5}}), 2, d);
    CHECK(std::abs(f[0] - f1) < 1e-8);
    CHECK(std::abs(f[1] - f2) < 1e-8);
  }
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(toeplitz_to_freqs(CMatrix::Ones(4, 4), 4, 0.4), DomainError);
  CHECK_THROWS_AS(toeplitz_to_freqs(CMatrix::Ones(4, 3), 1, 0.4), ContractError);
  CHECK_THROWS_AS(toeplitz_to_freqs(CMatrix::Ones(4, 4), 1, 0.0), DomainError);
  CHECK_THROWS_AS(toeplitz_to_freqs(CMatrix::Ones(4, 4), 2, 0.4), NumericalError);
}

TEST_CASE("polynomial roots of a known quadratic") {
  // (v - 2)(v + 3) = v^2 + v - 6
  CVector tail(2);
  tail << 1.0, -6.0;
  auto r = polynomial_roots(tail);
  std::sort(r.begin(), r.end(), [](cd a, cd b) { return a.real() < b.real(); });
  CHECK(std::abs(r[0] - cd(-3.0, 0.0)) < 1e-12);
  CHECK(std::abs(r[1] - cd(2.0, 0.0)) < 1e-12);
}

TEST_CASE("unit circle projection is the closest point") {
  for (const cd v : {cd(0.3, 0.4), cd(-2.0, 1.0), cd(0.0, -0.1), cd(5.0, 0.0)}) {
    const cd p = project_to_unit_circle(v);
    CHECK(std::abs(std::abs(p) - 1.0) < 1e-15);
    CHECK(std::abs(p - v) <= std::abs(std::abs(v) - 1.0) + 1e-15);
    for (int k = 0; k < 36; ++k)
      CHECK(std::abs(p - v) <= std::abs(std::polar(1.0, k * M_PI / 18.0) - v) + 1e-15);
  }
  CHECK(project_to_unit_circle(cd(0.0, 0.0)) == cd(1.0, 0.0));
}

TEST_CASE("pairing recovers the true assignment and is equivariant") {
  const double d = 0.4;
  const std::vector<double> fr = {-0.3, 0.5};
  const std::vector<double> fc = {0.6, -0.2};
  // True pairs: (fr0, fc1) and (fr1, fc0).
  const CMatrix x = atom(5, d, fr[0]) * atom(6, d, fc[1]).transpose() +
                    2.0 * atom(5, d, fr[1]) * atom(6, d, fc[0]).transpose();
  const FrequencyPairing p = pair_frequencies(fr, fc, x, d, d);
  REQUIRE(p.pairs.size() == 2);
  CHECK(p.pairs[0] == std::pair{0, 1});
  CHECK(p.pairs[1] == std::pair{1, 0});
  const FrequencyPairing q = pair_frequencies({fr[1], fr[0]}, fc, x, d, d);
  CHECK(q.pairs[0] == std::pair{0, 0});
  CHECK(q.pairs[1] == std::pair{1, 1});

  const FrequencyPairing single = pair_frequencies({0.1}, {0.2}, x, d, d);
  CHECK(single.pairs.size() == 1);
  CHECK_THROWS_AS(pair_frequencies({0.1}, {0.2, 0.3}, x, d, d), ContractError);
}

TEST_CASE("frequency to angle map") {
  Direction b = freqs_to_angles(0.0, 0.0);
  CHECK(b.elevation_deg == doctest::Approx(90.0));
  CHECK(b.azimuth_deg == doctest::Approx(0.0));
  Direction a = freqs_to_angles(0.5, 0.4330127019);
  CHECK(a.elevation_deg == doctest::Approx(60.0).epsilon(1e-9));
  CHECK(a.azimuth_deg == doctest::Approx(30.0).epsilon(1e-9));
  Direction edge = freqs_to_angles(0.5, std::sin(std::acos(0.5)));
  CHECK(edge.azimuth_deg == doctest::Approx(90.0));
  CHECK_THROWS_AS(freqs_to_angles(1.0, 0.0), DomainError);
}

TEST_CASE("angle map round trip on the open domain") {
  for (double el = 5.0; el < 180.0; el += 12.5)
    for (double az = -85.0; az < 90.0; az += 17.0) {
      const auto [fr, fc] = spatial_frequencies({el, az});
      const Direction back = freqs_to_angles(fr, fc);
      CHECK(std::abs(back.elevation_deg - el) < 1e-9);
      CHECK(std::abs(back.azimuth_deg - az) < 1e-7);
    }
}

TEST_CASE("model order from the eigenvalue profile") {
  const CMatrix t = toeplitz_from(8, 0.4, {{0.3, 1.0}, {-0.6, 2.0}});
  CHECK(estimate_model_order(t) == 2);
  CHECK(estimate_model_order(CMatrix::Zero(4, 4)) == 0);
}

TEST_CASE("noiseless end to end extraction") {
  const RisGeometry geom(8, 8, 0.4, 0.4);
  const std::vector<Direction> truth = {{40.0, -20.0}, {70.0, 25.0}};
  const DecoupledSdpVars v = noiseless_solution(geom, truth);
  const DoaEstimate est = estimate_doa(v, geom, 2);
  REQUIRE(est.directions.size() == 2);
  CHECK(max_angle_error(truth, est.directions) < 0.1);
  CHECK(est.row_order == 2);
  CHECK(est.col_order == 2);

  const DecoupledSdpVars w = noiseless_solution(geom, {truth[1], truth[0]});
  const DoaEstimate swapped = estimate_doa(w, geom, 2);
  CHECK(max_angle_error(truth, swapped.directions) < 0.1);
}

TEST_CASE("broadside single source") {
  const RisGeometry geom(4, 4, 0.4, 0.4);
  const DecoupledSdpVars v = noiseless_solution(geom, {{90.0, 0.0}});
  const DoaEstimate est = estimate_doa(v, geom, 1);
  CHECK(std::abs(est.directions[0].elevation_deg - 90.0) < 1e-3);
  CHECK(std::abs(est.directions[0].azimuth_deg) < 1e-3);
}

TEST_CASE("extraction from the bordered program") {
  const RisGeometry geom(4, 4, 0.4, 0.4);
  const std::vector<Direction> truth = {{50.0, 20.0}, {110.0, -30.0}};
  CVector x = steering_vector(geom, truth[0]) + 0.7 * steering_vector(geom, truth[1]);
  SolverConfig c;
  c.primal_tol = 1e-9;
  c.dual_tol = 1e-9;
  const FullSdpVars v = solve_full_anm_target(x, geom, c);
  const DoaEstimate est = estimate_doa(v, geom, 2);
  CHECK(max_angle_error(truth, est.directions) < 0.1);
}

TEST_CASE("fit selected extraction matches the plain one on clean data") {
  const RisGeometry geom(6, 6, 0.4, 0.4);
  const std::vector<Direction> truth = {{45.0, -10.0}, {75.0, 20.0}};
  SourceSet src;
  src.directions = truth;
  src.amplitudes = {1.0, std::polar(0.8, 2.0)};
  const CodeSchedule sched = build_code_schedule(30, 36, 2);
  const CMatrix g = sched.codes.cast<cd>();
  const CVector z = noiseless_ideal(geom, sched, src);
  SolverConfig c;
  c.mode = SolveMode::kNoiseBall;
  c.primal_tol = 1e-8;
  c.dual_tol = 1e-8;
  const DecoupledSdpVars v = solve_danm(z, g, geom, c);
  DoaOptions opt;
  opt.observation = &z;
  opt.measurement = &g;
  const DoaEstimate est = estimate_doa(v, geom, 2, opt);
  CHECK(max_angle_error(truth, est.directions) < 0.1);
  CHECK(est.fit_residual < 1e-3 * z.norm());
  CHECK(steering_fit_residual(z, g, geom, truth) < 1e-10 * z.norm());
}

}  // TEST_SUITE
