// Copyright 2026 The tsnn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Loss, gradients and the training loop.
//
// Loss for target class c over output values z (non-spiking outputs count as
// z_max):
//
//   L = ln z_c + ln sum_{i != c} 1/z_i  +  k * sum_j max(0, 1 - sum_i w_ji)
//
// The softmax variant sums over every output, including c. The penalty runs
// over every weight row: one per dense neuron, one per conv kernel.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tsnn/coding.hpp"
#include "tsnn/network.hpp"

namespace tsnn {

enum class LossVariant { kPaper, kSoftmax };

const char* to_string(LossVariant v);
LossVariant parse_loss_variant(std::string_view s);

struct LossConfig {
  double k = 1.0;
  double z_max = kDefaultZMax;
  LossVariant variant = LossVariant::kPaper;

  void validate() const;
};

// Output term of the loss. When grad is non-null it receives dL/dz for every
// output (zero for non-spiking outputs). Throws DomainError on z < 1.
template <typename Scalar>
Scalar output_loss(const Eigen::Ref<const VectorX<Scalar>>& z, int c,
                   const LossConfig& config, VectorX<Scalar>* grad = nullptr) {
  const int n = static_cast<int>(z.size());
  if (c < 0 || c >= n) throw DomainError("target class out of range");
  const bool softmax = config.variant == LossVariant::kSoftmax;
  if (!softmax && n < 2) throw DomainError("loss needs at least two classes");
  const Scalar z_max = Scalar(config.z_max);
  VectorX<Scalar> zz(n);
  for (int i = 0; i < n; ++i) {
    if (isnan(z[i]) || z[i] < Scalar(1)) throw DomainError("loss: output z below 1");
    zz[i] = is_spike(z[i]) ? Scalar(z[i]) : z_max;
  }
  Scalar s = 0;
  for (int i = 0; i < n; ++i) {
    if (softmax || i != c) s += Scalar(1) / zz[i];
  }
  if (grad) {
    grad->setZero(n);
    for (int i = 0; i < n; ++i) {
      if (!is_spike(z[i])) continue;
      Scalar g = 0;
      if (i == c) g += Scalar(1) / zz[i];
      if (softmax || i != c) g -= Scalar(1) / (zz[i] * zz[i] * s);
      (*grad)[i] = g;
    }
  }
  return log(zz[c]) + log(s);
}

// k * sum over weight rows of max(0, 1 - row sum). When grad is non-null, -k
// is added to every weight of a row whose sum is below 1.
template <typename Scalar>
Scalar weight_penalty(const BasicNetwork<Scalar>& net, double k,
                      Gradients<Scalar>* grad = nullptr) {
  Scalar total = 0;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& w = net.layers[l].weights;
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      const Scalar sum = w.row(r).sum();
      if (sum < Scalar(1)) {
        total += Scalar(1) - sum;
        if (grad && k != 0) grad->weights[l].row(r).array() -= Scalar(k);
      }
    }
  }
  return Scalar(k) * total;
}

// Full loss for one sample: output term plus weight penalty.
double loss(const Eigen::Ref<const Eigen::VectorXd>& z_out, int c, const Network& net,
            const LossConfig& config);

struct BackwardResult {
  double loss = 0;
  int predicted = 0;
  Gradients<double> grads;
};

// Forward + backward for one sample; gradients include the penalty term.
BackwardResult backward(const Network& net, const InputSpikes& input, int c,
                        const LossConfig& config);

struct GradientEntry {
  int layer = 0;
  int row = 0;
  int col = 0;
  double analytic = 0;
  double numeric = 0;
  double rel_error = 0;
  bool skipped = false;  // +-h changes a causal set, a spike or a penalty kink
};

struct GradientReport {
  std::vector<GradientEntry> entries;  // active parameters only
  std::size_t checked = 0;
  std::size_t skipped = 0;
  double max_rel_error = 0;
};

// Compares backward() with central differences on every weight that sits on
// an active synapse (a causal input of some spiking neuron). Both sides are
// evaluated in quad precision where the compiler provides it, the analytic
// one through the same templated backward pass used for training.
GradientReport grad_check(const Network& net, const InputSpikes& sample, int c,
                          const LossConfig& config, double h = 1e-6);

// |a - f| / max(|a|, |f|, 1e-12).
double relative_error(double a, double f);

enum class OptimizerKind { kSgd, kAdam };

const char* to_string(OptimizerKind v);
OptimizerKind parse_optimizer(std::string_view s);

// Uniform weights with mean row_sum * scale / fan_in and half-width
// spread * mean, per layer.
struct InitSpec {
  double row_sum = 2.0;
  double spread = 1.0;
  std::vector<double> layer_scale;  // per weighted layer; missing entries = 1

  void validate() const;
};

void init_weights(Network& net, const InitSpec& spec, std::uint64_t seed);

// Mean of the init distribution for each layer (0 for pooling layers).
std::vector<double> init_means(const Network& net, const InitSpec& spec);

struct TrainConfig {
  int epochs = 20;
  int batch_size = 16;
  double lr_initial = 1e-2;
  double lr_final = 1e-5;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  std::uint64_t seed = 1;
  InitSpec init;
  LossConfig loss;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  // When set, each layer's step is multiplied by its initial mean weight
  // (see InitSpec), so one learning rate suits layers of any fan-in.
  bool relative_lr = true;
  // Gradient added to each output-layer weight from a present input when the
  // target output stays silent; 0 disables. Silent outputs get no loss
  // gradient otherwise and can stay silent for good.
  double silent_push = 0;
  // Each sample's gradient is scaled down to this L2 norm before it enters the
  // batch average; 0 disables.
  double clip_norm = 0;

  void validate() const;
  static TrainConfig take_from(KeyValues& kv);
};

// Exponential decay from lr_initial at epoch 0 to lr_final at the last epoch.
double learning_rate(const TrainConfig& config, int epoch);

struct Sample {
  InputSpikes input;
  int label = 0;
};

struct EpochStats {
  int epoch = 0;
  double learning_rate = 0;
  double loss = 0;      // mean over samples, penalty included
  double accuracy = 0;  // on the training samples as they were visited
  std::size_t clamped = 0;
};

using EpochCallback = std::function<void(const EpochStats&)>;

// Mini-batch training in place. Weights are used as they are; call
// init_weights() first for a fresh network. Throws DivergenceError on a
// non-finite loss.
std::vector<EpochStats> fit(Network& net, std::span<const Sample> data,
                            const TrainConfig& config,
                            const EpochCallback& on_epoch = {});

double accuracy(const Network& net, std::span<const Sample> data);

}  // namespace tsnn
