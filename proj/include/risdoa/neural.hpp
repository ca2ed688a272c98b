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

#include "risdoa/common.hpp"
#include "risdoa/ris_model.hpp"
#include "risdoa/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace risdoa {

// Fully connected reconstruction network: affine + ReLU on every layer but the
// last, which is affine only so that negative real/imaginary parts survive.

inline constexpr int kReconstructorLayers = 5;

struct DenseLayer {
  RMatrix weight;  // out x in
  RVector bias;    // out
};

struct MlpParams {
  std::vector<DenseLayer> layers;

  // widths = {in, h1, ..., out}; weights and biases uniform in +-sqrt(1/fan_in).
  static MlpParams create(const std::vector<int>& widths, std::uint64_t seed);
  // Standard 5-layer reconstructor with constant hidden width.
  static MlpParams reconstructor(int width, int hidden_width, std::uint64_t seed);
  static MlpParams zeros_like(const MlpParams& shape);

  int input_width() const;
  int output_width() const;
  std::size_t parameter_count() const;
  bool all_finite() const;
  // Throws ContractError when adjacent layers do not chain.
  void validate() const;
  bool same_shape(const MlpParams& other) const;
};

using MlpGradients = MlpParams;

struct TrainingExample {
  RVector input;   // [Re(y_impaired); Im(y_impaired)]
  RVector target;  // [Re(y_ideal); Im(y_ideal)]
};

// Examples stored column-wise; column i of inputs pairs with column i of targets.
struct Dataset {
  RMatrix inputs;
  RMatrix targets;

  int size() const { return static_cast<int>(inputs.cols()); }
  int width() const { return static_cast<int>(inputs.rows()); }
  TrainingExample example(int i) const { return {inputs.col(i), targets.col(i)}; }
};

struct AdamHyper {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  MlpParams first_moment;
  MlpParams second_moment;
  long step = 0;
  AdamHyper hyper;

  static AdamState create(const MlpParams& shape, AdamHyper hyper = {});
};

struct TrainConfig {
  double learning_rate = 1e-4;
  int batch_size = 64;
  int epochs = 1000;
  Range snr_db{20.0, 50.0};
  int dataset_size = 2000;
  int hidden_width = 0;  // 0 -> same as the 2P input width
  std::uint64_t seed = 7;

  void validate() const;
};

// Parameters plus the dataset-wide amplitude scale the network was trained at.
struct ReconstructionModel {
  MlpParams params;
  double scale = 1.0;
  long epochs_trained = 0;
  double residual_rms = 0.0;  // held-out per-sample RMS of (reconstruction - ideal)
  std::string scenario_hash;
};

struct TrainResult {
  ReconstructionModel model;
  std::vector<double> loss_history;  // mean loss per epoch, normalized units
};

class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, int epoch) : std::runtime_error(what), epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

double relu(double x);

RVector stack_ri(const CVector& z);
CVector unstack_ri(const RVector& v);

RVector forward(const MlpParams& params, const RVector& input);
// Column-wise batch evaluation.
RMatrix forward_batch(const MlpParams& params, const RMatrix& inputs);

// (1 / 2P) * ||z - y||^2 where 2P is the vector length.
double loss(const RVector& z, const RVector& y);

// Gradient of loss(forward(params, input), target).
MlpGradients backward(const MlpParams& params, const RVector& input, const RVector& target);
// Gradient of the batch-mean loss; also returns the batch-mean loss.
MlpGradients backward_batch(const MlpParams& params, const RMatrix& inputs,
                            const RMatrix& targets, double* mean_loss = nullptr);

void adam_step(AdamState& state, MlpParams& params, const MlpGradients& gradients);

Dataset generate_dataset(const Scenario& scenario, int size, Range snr_db, std::uint64_t seed);

// Root-mean-square of all input entries, the normalization used by train().
double dataset_scale(const Dataset& data);

using EpochCallback = std::function<void(int epoch, double mean_loss)>;

// Mini-batch Adam. When `initial` is given its parameters and scale are reused and
// training continues from there.
TrainResult train(const TrainConfig& config, const Dataset& data,
                  const ReconstructionModel* initial = nullptr,
                  const EpochCallback& on_epoch = {});

CVector reconstruct(const ReconstructionModel& model, const CVector& snapshot);
CVector reconstruct(const ReconstructionModel& model, const Snapshot& snapshot);

// Mean l2 distances to the ideal target: {after reconstruction, before}.
std::pair<double, double> reconstruction_error(const ReconstructionModel& model,
                                               const Dataset& data);

// Versioned binary weights plus JSON metadata sidecar (<path>.json).
void save_model(const ReconstructionModel& model, const std::filesystem::path& path);
ReconstructionModel load_model(const std::filesystem::path& path);

}  // namespace risdoa
