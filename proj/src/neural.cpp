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

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>

namespace risdoa {

namespace {

constexpr char kModelMagic[8] = {'R', 'I', 'S', 'D', 'O', 'A', 'N', 'N'};
constexpr std::uint32_t kModelVersion = 1;

}  // namespace

MlpParams MlpParams::create(const std::vector<int>& widths, std::uint64_t seed) {
  if (widths.size() < 2) throw ContractError("MlpParams::create: need at least two widths");
  for (int w : widths)
    if (w < 1) throw ContractError("MlpParams::create: widths must be positive");
  Rng rng(stream_seed(seed, Stream::kInit));
  MlpParams p;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const double bound = std::sqrt(1.0 / widths[l]);
    std::uniform_real_distribution<double> u(-bound, bound);
    DenseLayer layer{RMatrix(widths[l + 1], widths[l]), RVector(widths[l + 1])};
    for (Eigen::Index j = 0; j < layer.weight.cols(); ++j)
      for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) layer.weight(i, j) = u(rng);
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias(i) = u(rng);
    p.layers.push_back(std::move(layer));
  }
  return p;
}

MlpParams MlpParams::reconstructor(int width, int hidden_width, std::uint64_t seed) {
  std::vector<int> widths(kReconstructorLayers + 1, hidden_width);
  widths.front() = width;
  widths.back() = width;
  return create(widths, seed);
}

MlpParams MlpParams::zeros_like(const MlpParams& shape) {
  MlpParams p;
  for (const auto& l : shape.layers)
    p.layers.push_back({RMatrix::Zero(l.weight.rows(), l.weight.cols()),
                        RVector::Zero(l.bias.size())});
  return p;
}

int MlpParams::input_width() const {
  return layers.empty() ? 0 : static_cast<int>(layers.front().weight.cols());
}

int MlpParams::output_width() const {
  return layers.empty() ? 0 : static_cast<int>(layers.back().weight.rows());
}

std::size_t MlpParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weight.size() + l.bias.size();
  return n;
}

bool MlpParams::all_finite() const {
  return std::all_of(layers.begin(), layers.end(), [](const DenseLayer& l) {
    return l.weight.allFinite() && l.bias.allFinite();
  });
}

void MlpParams::validate() const {
  if (layers.empty()) throw ContractError("MlpParams: no layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].bias.size() != layers[l].weight.rows())
      throw ContractError("MlpParams: bias size does not match layer output width");
    if (l > 0 && layers[l].weight.cols() != layers[l - 1].weight.rows())
      throw ContractError("MlpParams: layer widths do not chain");
  }
}

bool MlpParams::same_shape(const MlpParams& other) const {
  if (layers.size() != other.layers.size()) return false;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].weight.rows() != other.layers[l].weight.rows() ||
        layers[l].weight.cols() != other.layers[l].weight.cols() ||
        layers[l].bias.size() != other.layers[l].bias.size())
      return false;
  }
  return true;
}

AdamState AdamState::create(const MlpParams& shape, AdamHyper hyper) {
  return {MlpParams::zeros_like(shape), MlpParams::zeros_like(shape), 0, hyper};
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0)) throw DomainError("learning rate must be nonnegative");
  if (batch_size < 1 || epochs < 1 || dataset_size < 1)
    throw DomainError("batch size, epochs and dataset size must be positive");
  if (snr_db.lo > snr_db.hi) throw DomainError("empty SNR range");
  if (hidden_width < 0) throw DomainError("hidden width must be nonnegative");
}

double relu(double x) { return x > 0.0 ? x : 0.0; }

RVector stack_ri(const CVector& z) {
  RVector v(2 * z.size());
  v.head(z.size()) = z.real();
  v.tail(z.size()) = z.imag();
  return v;
}

CVector unstack_ri(const RVector& v) {
  if (v.size() % 2 != 0) throw ContractError("unstack_ri: odd length");
  const Eigen::Index p = v.size() / 2;
  CVector z(p);
  for (Eigen::Index i = 0; i < p; ++i) z(i) = cd(v(i), v(p + i));
  return z;
}

RMatrix forward_batch(const MlpParams& params, const RMatrix& inputs) {
  params.validate();
  if (inputs.rows() != params.input_width())
    throw ContractError("forward: input width " + std::to_string(inputs.rows()) +
                        " does not match network width " + std::to_string(params.input_width()));
  RMatrix a = inputs;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& layer = params.layers[l];
    RMatrix z = layer.weight * a;
    z.colwise() += layer.bias;
    if (l + 1 < params.layers.size()) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a;
}

RVector forward(const MlpParams& params, const RVector& input) {
  return forward_batch(params, input);
}

double loss(const RVector& z, const RVector& y) {
  if (z.size() != y.size()) throw ContractError("loss: length mismatch");
  if (z.size() == 0) return 0.0;
  return (z - y).squaredNorm() / static_cast<double>(z.size());
}

MlpGradients backward_batch(const MlpParams& params, const RMatrix& inputs,
                            const RMatrix& targets, double* mean_loss) {
  params.validate();
  if (inputs.rows() != params.input_width() || targets.rows() != params.output_width() ||
      inputs.cols() != targets.cols())
    throw ContractError("backward: input/target shapes do not match the network");

  const std::size_t depth = params.layers.size();
  // activations[0] is the input; pre[l] the pre-activation of layer l.
  std::vector<RMatrix> activations(depth + 1);
  std::vector<RMatrix> pre(depth);
  activations[0] = inputs;
  for (std::size_t l = 0; l < depth; ++l) {
    pre[l] = params.layers[l].weight * activations[l];
    pre[l].colwise() += params.layers[l].bias;
    activations[l + 1] = (l + 1 < depth) ? RMatrix(pre[l].cwiseMax(0.0)) : pre[l];
  }

  const double batch = static_cast<double>(inputs.cols());
  const double width = static_cast<double>(targets.rows());
  RMatrix residual = activations[depth] - targets;
  if (mean_loss) *mean_loss = residual.squaredNorm() / (width * batch);

  MlpGradients grads = MlpParams::zeros_like(params);
  RMatrix delta = residual * (2.0 / (width * batch));
  for (std::size_t l = depth; l-- > 0;) {
    grads.layers[l].weight.noalias() = delta * activations[l].transpose();
    grads.layers[l].bias = delta.rowwise().sum();
    if (l > 0) {
      RMatrix back = params.layers[l].weight.transpose() * delta;
      delta = back.cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  return grads;
}

MlpGradients backward(const MlpParams& params, const RVector& input, const RVector& target) {
  return backward_batch(params, input, target);
}

void adam_step(AdamState& state, MlpParams& params, const MlpGradients& gradients) {
  if (!params.same_shape(gradients) || !params.same_shape(state.first_moment) ||
      !params.same_shape(state.second_moment))
    throw ContractError("adam_step: parameter, gradient and moment shapes differ");
  const auto& h = state.hyper;
  ++state.step;
  const double c1 = 1.0 - std::pow(h.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(h.beta2, static_cast<double>(state.step));
  const double step = h.learning_rate / c1;
  const double root_c2 = std::sqrt(c2);

  auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
    m = h.beta1 * m + (1.0 - h.beta1) * grad;
    v = h.beta2 * v + (1.0 - h.beta2) * grad.cwiseAbs2();
    param.array() -= step * m.array() / (v.array().sqrt() / root_c2 + h.epsilon);
  };
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    update(params.layers[l].weight, gradients.layers[l].weight,
           state.first_moment.layers[l].weight, state.second_moment.layers[l].weight);
    update(params.layers[l].bias, gradients.layers[l].bias, state.first_moment.layers[l].bias,
           state.second_moment.layers[l].bias);
  }
}

Dataset generate_dataset(const Scenario& scenario, int size, Range snr_db, std::uint64_t seed) {
  if (size < 1) throw DomainError("generate_dataset: size must be positive");
  if (snr_db.lo > snr_db.hi) throw DomainError("generate_dataset: empty SNR range");
  scenario.validate();
  const auto& geom = scenario.geometry;
  const CodeSchedule schedule = scenario.schedule();
  const int width = 2 * scenario.samples;

  Dataset data{RMatrix(width, size), RMatrix(width, size)};
  for (int i = 0; i < size; ++i) {
    const std::uint64_t example_seed = split_seed(seed, static_cast<std::uint64_t>(i));
    const SourceSet sources = scenario_sources(scenario, example_seed);
    const ImpairmentModel impairments =
        sample_impairments(geom, scenario.impairments, example_seed);
    Rng snr_rng(stream_seed(example_seed, Stream::kSnr));
    const double snr = std::uniform_real_distribution<double>(snr_db.lo, snr_db.hi)(snr_rng);

    CVector impaired = noiseless_impaired(geom, schedule, impairments, sources);
    CVector ideal = noiseless_ideal(geom, schedule, sources);
    const double pn = noise_power_for_snr(impaired, snr);
    if (pn > 0.0) {
      const CVector w = draw_noise(scenario.samples, pn, example_seed);
      impaired += w;
      ideal += w;
    }
    data.inputs.col(i) = stack_ri(impaired);
    data.targets.col(i) = stack_ri(ideal);
  }
  return data;
}

double dataset_scale(const Dataset& data) {
  if (data.inputs.size() == 0) return 1.0;
  const double rms = std::sqrt(data.inputs.squaredNorm() / static_cast<double>(data.inputs.size()));
  return rms > 0.0 ? rms : 1.0;
}

TrainResult train(const TrainConfig& config, const Dataset& data,
                  const ReconstructionModel* initial, const EpochCallback& on_epoch) {
  config.validate();
  if (data.size() < 1) throw DomainError("train: empty dataset");
  if (data.targets.cols() != data.inputs.cols() || data.targets.rows() != data.inputs.rows())
    throw ContractError("train: inputs and targets differ in shape");

  TrainResult result;
  ReconstructionModel& model = result.model;
  if (initial) {
    model = *initial;
    if (model.params.input_width() != data.width())
      throw ContractError("train: initial model width does not match dataset");
  } else {
    const int hidden = config.hidden_width > 0 ? config.hidden_width : data.width();
    model.params = MlpParams::reconstructor(data.width(), hidden, config.seed);
    model.scale = dataset_scale(data);
  }

  const RMatrix inputs = data.inputs / model.scale;
  const RMatrix targets = data.targets / model.scale;

  AdamHyper hyper;
  hyper.learning_rate = config.learning_rate;
  AdamState adam = AdamState::create(model.params, hyper);

  Rng shuffle_rng(stream_seed(config.seed + static_cast<std::uint64_t>(model.epochs_trained),
                              Stream::kShuffle));
  std::vector<int> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  const int n = data.size();
  RMatrix batch_in(data.width(), config.batch_size);
  RMatrix batch_out(data.width(), config.batch_size);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    for (int start = 0; start < n; start += config.batch_size) {
      const int count = std::min(config.batch_size, n - start);
      batch_in.resize(data.width(), count);
      batch_out.resize(data.width(), count);
      for (int j = 0; j < count; ++j) {
        batch_in.col(j) = inputs.col(order[start + j]);
        batch_out.col(j) = targets.col(order[start + j]);
      }
      double batch_loss = 0.0;
      const MlpGradients grads = backward_batch(model.params, batch_in, batch_out, &batch_loss);
      if (!std::isfinite(batch_loss))
        throw TrainingError("training diverged: non-finite loss at epoch " +
                                std::to_string(model.epochs_trained + 1),
                            static_cast<int>(model.epochs_trained + 1));
      loss_sum += batch_loss * count;
      if (config.learning_rate > 0.0) adam_step(adam, model.params, grads);
    }
    ++model.epochs_trained;
    const double mean = loss_sum / n;
    result.loss_history.push_back(mean);
    if (on_epoch) on_epoch(static_cast<int>(model.epochs_trained), mean);
  }
  if (!model.params.all_finite())
    throw TrainingError("training produced non-finite parameters",
                        static_cast<int>(model.epochs_trained));
  return result;
}

CVector reconstruct(const ReconstructionModel& model, const CVector& snapshot) {
  if (2 * snapshot.size() != model.params.input_width())
    throw ContractError("reconstruct: snapshot length does not match the network width");
  const RVector out = forward(model.params, stack_ri(snapshot) / model.scale);
  return unstack_ri(out * model.scale);
}

CVector reconstruct(const ReconstructionModel& model, const Snapshot& snapshot) {
  return reconstruct(model, snapshot.samples);
}

std::pair<double, double> reconstruction_error(const ReconstructionModel& model,
                                               const Dataset& data) {
  if (data.size() == 0) return {0.0, 0.0};
  const RMatrix out = forward_batch(model.params, data.inputs / model.scale) * model.scale;
  double after = 0.0;
  double before = 0.0;
  for (int i = 0; i < data.size(); ++i) {
    after += (out.col(i) - data.targets.col(i)).norm();
    before += (data.inputs.col(i) - data.targets.col(i)).norm();
  }
  return {after / data.size(), before / data.size()};
}

void save_model(const ReconstructionModel& model, const std::filesystem::path& path) {
  model.params.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file " + path.string());
  auto put_u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); };
  out.write(kModelMagic, sizeof kModelMagic);
  put_u32(kModelVersion);
  put_u32(static_cast<std::uint32_t>(model.params.layers.size()));
  for (const auto& l : model.params.layers) {
    put_u32(static_cast<std::uint32_t>(l.weight.rows()));
    put_u32(static_cast<std::uint32_t>(l.weight.cols()));
  }
  out.write(reinterpret_cast<const char*>(&model.scale), sizeof model.scale);
  for (const auto& l : model.params.layers) {
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w = l.weight;
    out.write(reinterpret_cast<const char*>(w.data()),
              static_cast<std::streamsize>(w.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(l.bias.data()),
              static_cast<std::streamsize>(l.bias.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("failed writing model file " + path.string());

  nlohmann::json meta;
  meta["format"] = "risdoa-mlp";
  meta["version"] = kModelVersion;
  std::vector<int> widths{model.params.input_width()};
  for (const auto& l : model.params.layers) widths.push_back(static_cast<int>(l.weight.rows()));
  meta["widths"] = widths;
  meta["scale"] = model.scale;
  meta["epochs_trained"] = model.epochs_trained;
  meta["residual_rms"] = model.residual_rms;
  meta["scenario_hash"] = model.scenario_hash;
  std::ofstream js(path.string() + ".json");
  js << meta.dump(2) << "\n";
}

ReconstructionModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kModelMagic, sizeof magic) != 0)
    throw std::runtime_error("not a risdoa model file: " + path.string());
  auto get_u32 = [&] {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
  };
  if (get_u32() != kModelVersion) throw std::runtime_error("unsupported model file version");
  const std::uint32_t depth = get_u32();
  if (!in || depth == 0 || depth > 64) throw std::runtime_error("corrupt model header");
  std::vector<std::pair<std::uint32_t, std::uint32_t>> dims(depth);
  for (auto& d : dims) {
    d.first = get_u32();
    d.second = get_u32();
  }
  ReconstructionModel model;
  in.read(reinterpret_cast<char*>(&model.scale), sizeof model.scale);
  for (const auto& [rows, cols] : dims) {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w(rows, cols);
    RVector b(rows);
    in.read(reinterpret_cast<char*>(w.data()), static_cast<std::streamsize>(w.size() * 8));
    in.read(reinterpret_cast<char*>(b.data()), static_cast<std::streamsize>(b.size() * 8));
    model.params.layers.push_back({RMatrix(w), b});
  }
  if (!in) throw std::runtime_error("truncated model file " + path.string());
  model.params.validate();

  std::ifstream js(path.string() + ".json");
  if (js) {
    const auto meta = nlohmann::json::parse(js);
    model.epochs_trained = meta.value("epochs_trained", 0L);
    model.residual_rms = meta.value("residual_rms", 0.0);
    model.scenario_hash = meta.value("scenario_hash", std::string{});
  }
  return model;
}

}  // namespace risdoa
