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

#include "risdoa/neural.hpp"
#include "risdoa/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

using namespace risdoa;

namespace {

// Layer chain evaluated with explicit loops.
RVector reference_forward(const MlpParams& p, const RVector& x) {
  std::vector<double> a(x.data(), x.data() + x.size());
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const auto& w = p.layers[l].weight;
    std::vector<double> z(static_cast<std::size_t>(w.rows()));
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      double s = p.layers[l].bias(i);
      for (Eigen::Index j = 0; j < w.cols(); ++j) s += w(i, j) * a[static_cast<std::size_t>(j)];
      z[static_cast<std::size_t>(i)] = (l + 1 < p.layers.size() && s < 0.0) ? 0.0 : s;
    }
    a = z;
  }
  return Eigen::Map<RVector>(a.data(), static_cast<Eigen::Index>(a.size()));
}

RVector random_vector(int n, Rng& rng) {
  std::normal_distribution<double> g;
  RVector v(n);
  for (int i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

double kink_margin(const MlpParams& p, const RVector& x) {
  RVector a = x;
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l + 1 < p.layers.size(); ++l) {
    const RVector z = p.layers[l].weight * a + p.layers[l].bias;
    margin = std::min(margin, z.cwiseAbs().minCoeff());
    a = z.cwiseMax(0.0);
  }
  return margin;
}

Scenario small_scenario() {
  Scenario s;
  s.geometry = RisGeometry(4, 4, 0.4, 0.4);
  s.samples = 16;
  return s;
}

}  // namespace

TEST_SUITE("neural") {

TEST_CASE("relu") {
  CHECK(relu(-1.0) == 0.0);
  CHECK(relu(2.0) == 2.0);
  CHECK(relu(0.0) == 0.0);
}

TEST_CASE("zero network gives zero output") {
  const MlpParams p = MlpParams::zeros_like(MlpParams::reconstructor(6, 10, 1));
  Rng rng(1);
  CHECK(forward(p, random_vector(6, rng)).isZero(0.0));
}

TEST_CASE("single identity layer is the identity map") {
  MlpParams p = MlpParams::create({5, 5}, 1);
  p.layers[0].weight = RMatrix::Identity(5, 5);
  p.layers[0].bias.setZero();
  RVector x(5);
  x << -1.0, 2.0, -3.0, 0.5, 0.0;
  CHECK(forward(p, x) == x);
}

TEST_CASE("forward agrees with a loop evaluation") {
  const MlpParams p = MlpParams::reconstructor(8, 12, 4);
  CHECK(p.layers.size() == 5);
  CHECK(p.input_width() == 8);
  CHECK(p.output_width() == 8);
  Rng rng(2);
  for (int t = 0; t < 5; ++t) {
    const RVector x = random_vector(8, rng);
    CHECK((forward(p, x) - reference_forward(p, x)).norm() < 1e-12);
  }
}

TEST_CASE("initialization stays within the fan in bound") {
  const MlpParams p = MlpParams::create({16, 9, 4}, 3);
  CHECK(p.layers[0].weight.cwiseAbs().maxCoeff() <= std::sqrt(1.0 / 16.0));
  CHECK(p.layers[1].weight.cwiseAbs().maxCoeff() <= std::sqrt(1.0 / 9.0));
  CHECK(p.parameter_count() == 16 * 9 + 9 + 9 * 4 + 4);
}

TEST_CASE("loss definition") {
  RVector z(2), y(2);
  z << 1.0, 0.0;
  y << 0.0, 0.0;
  CHECK(loss(z, y) == doctest::Approx(0.5));
  CHECK(loss(z, z) == 0.0);
  Rng rng(5);
  const RVector a = random_vector(10, rng);
  const RVector b = random_vector(10, rng);
  double s = 0.0;
  for (int i = 0; i < 10; ++i) s += (a(i) - b(i)) * (a(i) - b(i));
  CHECK(loss(a, b) == doctest::Approx(s / 10.0));
  CHECK_THROWS_AS(loss(a, RVector(3)), ContractError);
}

TEST_CASE("stack and unstack round trip") {
  CVector z(3);
  z << cd(1, 2), cd(-3, 0.5), cd(0, -1);
  const RVector v = stack_ri(z);
  CHECK(v.size() == 6);
  CHECK(v(0) == 1.0);
  CHECK(v(3) == 2.0);
  CHECK(unstack_ri(v) == z);
}

TEST_CASE("zero residual gives zero gradient") {
  const MlpParams p = MlpParams::reconstructor(6, 8, 9);
  Rng rng(3);
  const RVector x = random_vector(6, rng);
  const MlpGradients g = backward(p, x, forward(p, x));
  for (const auto& l : g.layers) {
    CHECK(l.weight.isZero(0.0));
    CHECK(l.bias.isZero(0.0));
  }
}

TEST_CASE("single linear layer gradient in closed form") {
  MlpParams p = MlpParams::create({4, 4}, 8);
  Rng rng(4);
  const RVector x = random_vector(4, rng);
  const RVector y = random_vector(4, rng);
  const RVector r = p.layers[0].weight * x + p.layers[0].bias - y;
  const MlpGradients g = backward(p, x, y);
  CHECK((g.layers[0].weight - (2.0 / 4.0) * r * x.transpose()).norm() < 1e-13);
  CHECK((g.layers[0].bias - (2.0 / 4.0) * r).norm() < 1e-13);
}

TEST_CASE("gradients match central differences at 100 random points") {
  const double h = 1e-5;
  int worst_point = -1;
  double worst = 0.0;
  for (int point = 0, seed = 0; point < 100; ++seed) {
    MlpParams p = MlpParams::reconstructor(6, 7, 100 + seed);
    Rng rng(200 + seed);
    const RVector x = random_vector(6, rng);
    const RVector y = random_vector(6, rng);
    // The stencil must not straddle a ReLU kink.
    if (kink_margin(p, x) < 1e-3) continue;
    ++point;
    const MlpGradients g = backward(p, x, y);
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
      auto probe = [&](double& slot, double analytic) {
        const double keep = slot;
        slot = keep + h;
        const double up = loss(forward(p, x), y);
        slot = keep - h;
        const double down = loss(forward(p, x), y);
        slot = keep;
        const double fd = (up - down) / (2.0 * h);
        const double rel = std::abs(fd - analytic) / std::max(1e-6, std::abs(fd) + std::abs(analytic));
        if (rel > worst) {
          worst = rel;
          worst_point = point;
        }
      };
      auto& layer = p.layers[l];
      for (Eigen::Index i = 0; i < layer.weight.size(); ++i)
        probe(layer.weight.data()[i], g.layers[l].weight.data()[i]);
      for (Eigen::Index i = 0; i < layer.bias.size(); ++i)
        probe(layer.bias.data()[i], g.layers[l].bias.data()[i]);
    }
  }
  INFO("worst point " << worst_point);
  CHECK(worst < 1e-4);
}

TEST_CASE("batch gradient is the mean of single gradients") {
  const MlpParams p = MlpParams::reconstructor(4, 5, 12);
  Rng rng(6);
  RMatrix xs(4, 3), ys(4, 3);
  for (int i = 0; i < 3; ++i) {
    xs.col(i) = random_vector(4, rng);
    ys.col(i) = random_vector(4, rng);
  }
  double mean_loss = 0.0;
  const MlpGradients gb = backward_batch(p, xs, ys, &mean_loss);
  double ref_loss = 0.0;
  MlpParams acc = MlpParams::zeros_like(p);
  for (int i = 0; i < 3; ++i) {
    ref_loss += loss(forward(p, xs.col(i)), ys.col(i)) / 3.0;
    const MlpGradients gi = backward(p, xs.col(i), ys.col(i));
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
      acc.layers[l].weight += gi.layers[l].weight / 3.0;
      acc.layers[l].bias += gi.layers[l].bias / 3.0;
    }
  }
  CHECK(mean_loss == doctest::Approx(ref_loss));
  for (std::size_t l = 0; l < p.layers.size(); ++l)
    CHECK((gb.layers[l].weight - acc.layers[l].weight).norm() < 1e-12);
}

TEST_CASE("adam with zero gradient leaves parameters and counts the step") {
  MlpParams p = MlpParams::create({2, 2}, 1);
  const MlpParams before = p;
  AdamState s = AdamState::create(p);
  adam_step(s, p, MlpParams::zeros_like(p));
  CHECK(s.step == 1);
  CHECK(p.layers[0].weight == before.layers[0].weight);
  CHECK(p.layers[0].bias == before.layers[0].bias);
}

TEST_CASE("adam matches the scalar bias corrected recurrence") {
  MlpParams p = MlpParams::create({1, 1}, 1);
  p.layers[0].weight(0, 0) = 0.3;
  p.layers[0].bias(0) = -0.2;
  AdamHyper hyp;
  hyp.learning_rate = 0.01;
  AdamState s = AdamState::create(p, hyp);
  MlpGradients g = MlpParams::zeros_like(p);
  g.layers[0].weight(0, 0) = 0.5;
  g.layers[0].bias(0) = -2.0;

  // Hand recurrence for the weight entry.
  double w = 0.3, m = 0.0, v = 0.0;
  for (int t = 1; t <= 2; ++t) {
    m = 0.9 * m + 0.1 * 0.5;
    v = 0.999 * v + 0.001 * 0.25;
    const double mh = m / (1.0 - std::pow(0.9, t));
    const double vh = v / (1.0 - std::pow(0.999, t));
    w -= 0.01 * mh / (std::sqrt(vh) + 1e-8);
    adam_step(s, p, g);
    CHECK(p.layers[0].weight(0, 0) == doctest::Approx(w).epsilon(1e-12));
    CHECK(s.first_moment.layers[0].weight(0, 0) == doctest::Approx(m).epsilon(1e-14));
    CHECK(s.second_moment.layers[0].weight(0, 0) == doctest::Approx(v).epsilon(1e-14));
  }
  // First step moves every parameter by about lr against the gradient sign.
  CHECK(w == doctest::Approx(0.3 - 0.02).epsilon(1e-6));
  CHECK(p.layers[0].bias(0) == doctest::Approx(-0.2 + 0.02).epsilon(1e-6));
}

TEST_CASE("dataset shape, ideal reduction and determinism") {
  Scenario s = small_scenario();
  Dataset d = generate_dataset(s, 5, {20.0, 50.0}, 3);
  CHECK(d.size() == 5);
  CHECK(d.width() == 32);
  CHECK(generate_dataset(s, 5, {20.0, 50.0}, 3).inputs == d.inputs);
  CHECK((d.inputs - d.targets).norm() > 0.0);

  s.impairments = ImpairmentRanges::ideal();
  const Dataset ideal = generate_dataset(s, 1, {20.0, 50.0}, 3);
  CHECK(ideal.inputs == ideal.targets);

  Scenario paper;
  CHECK(generate_dataset(paper, 1, {20.0, 50.0}, 1).width() == 256);
}

TEST_CASE("zero learning rate keeps parameters and loss constant") {
  const Dataset d = generate_dataset(small_scenario(), 16, {20.0, 50.0}, 3);
  TrainConfig c;
  c.learning_rate = 0.0;
  c.epochs = 4;
  c.batch_size = 16;
  const TrainResult r = train(c, d);
  const MlpParams init = MlpParams::reconstructor(32, 32, c.seed);
  for (std::size_t l = 0; l < init.layers.size(); ++l)
    CHECK(r.model.params.layers[l].weight == init.layers[l].weight);
  REQUIRE(r.loss_history.size() == 4);
  for (double v : r.loss_history) CHECK(v == r.loss_history[0]);
}

TEST_CASE("full batch training equals plain Adam on the whole set") {
  const Dataset d = generate_dataset(small_scenario(), 8, {20.0, 50.0}, 4);
  TrainConfig c;
  c.learning_rate = 1e-3;
  c.epochs = 3;
  c.batch_size = 8;
  c.hidden_width = 10;
  const TrainResult r = train(c, d);

  MlpParams p = MlpParams::reconstructor(32, 10, c.seed);
  const double scale = dataset_scale(d);
  AdamHyper h;
  h.learning_rate = 1e-3;
  AdamState s = AdamState::create(p, h);
  for (int e = 0; e < 3; ++e) {
    double ml = 0.0;
    const MlpGradients g = backward_batch(p, d.inputs / scale, d.targets / scale, &ml);
    CHECK(ml == doctest::Approx(r.loss_history[e]).epsilon(1e-10));
    adam_step(s, p, g);
  }
  for (std::size_t l = 0; l < p.layers.size(); ++l)
    CHECK((r.model.params.layers[l].weight - p.layers[l].weight).norm() < 1e-10);
}

TEST_CASE("training is deterministic and reduces the loss") {
  const Dataset d = generate_dataset(small_scenario(), 64, {20.0, 50.0}, 5);
  TrainConfig c;
  c.learning_rate = 1e-3;
  c.epochs = 30;
  c.batch_size = 16;
  const TrainResult a = train(c, d);
  const TrainResult b = train(c, d);
  for (std::size_t l = 0; l < a.model.params.layers.size(); ++l)
    CHECK(a.model.params.layers[l].weight == b.model.params.layers[l].weight);
  CHECK(a.loss_history.back() < 0.5 * a.loss_history.front());
  CHECK(a.model.epochs_trained == 30);
}

TEST_CASE("identity network reconstructs the input") {
  ReconstructionModel m;
  m.params = MlpParams::create({6, 6}, 1);
  m.params.layers[0].weight = RMatrix::Identity(6, 6);
  m.params.layers[0].bias.setZero();
  m.scale = 2.5;
  CVector z(3);
  z << cd(1, -1), cd(0.25, 3), cd(-2, 0);
  CHECK((reconstruct(m, z) - z).norm() < 1e-14);
  CHECK_THROWS_AS(reconstruct(m, CVector(4)), ContractError);
}

TEST_CASE("trained network moves held out inputs towards the ideal signal") {
  Scenario s;
  s.geometry = RisGeometry(4, 4, 0.4, 0.4);
  s.samples = 32;
  const Dataset d = generate_dataset(s, 1500, {20.0, 50.0}, 6);
  TrainConfig c;
  c.learning_rate = 1e-3;
  c.epochs = 60;
  c.batch_size = 32;
  c.hidden_width = 128;
  const TrainResult r = train(c, d);
  const Dataset held = generate_dataset(s, 200, {20.0, 50.0}, 99);
  const auto [after, before] = reconstruction_error(r.model, held);
  CHECK(after < before);
}

TEST_CASE("model file round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "risdoa_model_test";
  std::filesystem::create_directories(dir);
  ReconstructionModel m;
  m.params = MlpParams::reconstructor(8, 6, 3);
  m.scale = 1.75;
  m.epochs_trained = 12;
  m.residual_rms = 0.125;
  m.scenario_hash = "0123456789abcdef";
  const auto path = dir / "m.bin";
  save_model(m, path);
  CHECK(std::filesystem::exists(dir / "m.bin.json"));
  const ReconstructionModel back = load_model(path);
  CHECK(back.scale == m.scale);
  CHECK(back.epochs_trained == 12);
  CHECK(back.residual_rms == 0.125);
  CHECK(back.scenario_hash == m.scenario_hash);
  for (std::size_t l = 0; l < m.params.layers.size(); ++l) {
    CHECK(back.params.layers[l].weight == m.params.layers[l].weight);
    CHECK(back.params.layers[l].bias == m.params.layers[l].bias);
  }
  {
    std::ofstream bad(dir / "bad.bin", std::ios::binary);
    bad << "garbage!";
  }
  CHECK_THROWS(load_model(dir / "bad.bin"));
  std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
