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

#include "tsnn/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "quad.hpp"

#ifdef TSNN_HAVE_QUADMATH
#include <quadmath.h>
#endif

namespace tsnn {

#ifdef TSNN_HAVE_QUADMATH
__float128 log(__float128 x) { return logq(x); }
#endif

const char* to_string(LossVariant v) {
  return v == LossVariant::kPaper ? "paper" : "softmax";
}

LossVariant parse_loss_variant(std::string_view s) {
  if (s == "paper") return LossVariant::kPaper;
  if (s == "softmax") return LossVariant::kSoftmax;
  throw ConfigError("loss_variant must be paper or softmax");
}

const char* to_string(OptimizerKind v) {
  return v == OptimizerKind::kSgd ? "sgd" : "adam";
}

OptimizerKind parse_optimizer(std::string_view s) {
  if (s == "sgd") return OptimizerKind::kSgd;
  if (s == "adam") return OptimizerKind::kAdam;
  throw ConfigError("optimizer must be sgd or adam");
}

void LossConfig::validate() const {
  if (!(k >= 0) || !std::isfinite(k)) throw ConfigError("loss k must be >= 0");
  if (!(z_max >= 1) || !std::isfinite(z_max)) throw ConfigError("z_max must be finite and >= 1");
}

double loss(const Eigen::Ref<const Eigen::VectorXd>& z_out, int c, const Network& net,
            const LossConfig& config) {
  config.validate();
  return output_loss<double>(z_out, c, config) + weight_penalty(net, config.k);
}

BackwardResult backward(const Network& net, const InputSpikes& input, int c,
                        const LossConfig& config) {
  config.validate();
  NetworkTrace<double> trace;
  forward_trace<double>(net, input.z, trace);
  Eigen::VectorXd grad_out;
  BackwardResult r;
  r.loss = output_loss<double>(trace.output(), c, config, &grad_out);
  r.predicted = classify(trace.output(), config.z_max);
  r.grads = Gradients<double>::zeros_like(net);
  backward_network<double>(net, input.z, trace, grad_out, r.grads);
  r.loss += weight_penalty(net, config.k, &r.grads);
  return r;
}

constexpr double kRelativeErrorFloor = 1e-12;

double relative_error(double a, double f) {
  return std::abs(a - f) / std::max({std::abs(a), std::abs(f), kRelativeErrorFloor});
}

namespace {

// Everything that makes the loss piecewise: causal sets, which neurons
// spike, and max-pool winners.
template <typename Scalar>
std::vector<int> structure_signature(const BasicNetwork<Scalar>& net,
                                     const NetworkTrace<Scalar>& trace) {
  std::vector<int> sig;
  std::vector<int> members;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    const auto& t = trace.layers[l];
    for (Eigen::Index j = 0; j < t.z_out.size(); ++j) sig.push_back(is_spike(t.z_out[j]));
    if (layer.kind == LayerKind::kMaxPool) {
      sig.insert(sig.end(), t.winner.begin(), t.winner.end());
      continue;
    }
    if (!layer.has_weights()) continue;
    const int per_field = layer.kind == LayerKind::kDense ? layer.out.size()
                                                          : layer.out.channels;
    for (int j = 0; j < layer.out.size(); ++j) {
      const auto field = static_cast<std::size_t>(j / per_field);
      const int begin = t.field_offset[field];
      const int m = t.causal_size[static_cast<std::size_t>(j)];
      members.assign(t.field_col.begin() + begin, t.field_col.begin() + begin + m);
      std::sort(members.begin(), members.end());
      sig.push_back(m);
      sig.insert(sig.end(), members.begin(), members.end());
    }
  }
  return sig;
}

using internal::Extended;

struct ExtendedEval {
  Extended loss = 0;
  std::vector<int> signature;
};

ExtendedEval evaluate_extended(const BasicNetwork<Extended>& net,
                               const VectorX<Extended>& z_in, int c,
                               const LossConfig& config) {
  NetworkTrace<Extended> trace;
  forward_trace<Extended>(net, z_in, trace);
  ExtendedEval e;
  e.loss = output_loss<Extended>(trace.output(), c, config) +
           weight_penalty<Extended>(net, config.k);
  e.signature = structure_signature(net, trace);
  return e;
}

}  // namespace

GradientReport grad_check(const Network& net, const InputSpikes& sample, int c,
                          const LossConfig& config, double h) {
  if (!(h > 0)) throw DomainError("grad_check: h must be positive");
  config.validate();
  GradientReport report;

  NetworkTrace<double> trace;
  forward_trace<double>(net, sample.z, trace);

  auto ext = net.cast<Extended>();
  const VectorX<Extended> z_ext = sample.z.cast<Extended>();
  const auto base = evaluate_extended(ext, z_ext, c, config);
  const bool base_agrees = base.signature == structure_signature(net, trace);

  // The analytic side runs the same templated backward pass at the reference
  // precision; in double, gradients that cancel to zero keep ~1e-16 residue.
  NetworkTrace<Extended> ext_trace;
  forward_trace<Extended>(ext, z_ext, ext_trace);
  VectorX<Extended> ext_grad_out;
  output_loss<Extended>(ext_trace.output(), c, config, &ext_grad_out);
  auto analytic = Gradients<Extended>::zeros_like(ext);
  backward_network<Extended>(ext, z_ext, ext_trace, ext_grad_out, analytic);
  weight_penalty<Extended>(ext, config.k, &analytic);

  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    if (!layer.has_weights()) continue;
    const auto& t = trace.layers[l];
    const int per_field = layer.kind == LayerKind::kDense ? layer.out.size()
                                                          : layer.out.channels;
    MatrixX<char> active = MatrixX<char>::Zero(layer.weights.rows(), layer.weights.cols());
    for (int j = 0; j < layer.out.size(); ++j) {
      if (!is_spike(t.z_out[j])) continue;
      const int row = layer.kind == LayerKind::kDense ? j : j % layer.out.channels;
      const int begin = t.field_offset[static_cast<std::size_t>(j / per_field)];
      const int m = t.causal_size[static_cast<std::size_t>(j)];
      for (int q = 0; q < m; ++q) {
        active(row, t.field_col[static_cast<std::size_t>(begin + q)]) = 1;
      }
    }

    auto& w = ext.layers[l].weights;
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index col = 0; col < w.cols(); ++col) {
        if (!active(r, col)) continue;
        GradientEntry e;
        e.layer = static_cast<int>(l);
        e.row = static_cast<int>(r);
        e.col = static_cast<int>(col);
        const Extended a = analytic.weights[l](r, col);
        e.analytic = static_cast<double>(a);

        const Extended w0 = w(r, col);
        const Extended row_sum = w.row(r).sum();
        w(r, col) = w0 + Extended(h);
        const auto plus = evaluate_extended(ext, z_ext, c, config);
        w(r, col) = w0 - Extended(h);
        const auto minus = evaluate_extended(ext, z_ext, c, config);
        w(r, col) = w0;

        const bool crosses_kink = config.k != 0 && row_sum - Extended(h) <= Extended(1) &&
                                  row_sum + Extended(h) >= Extended(1);
        e.skipped = !base_agrees || crosses_kink || plus.signature != base.signature ||
                    minus.signature != base.signature;
        const Extended f = (plus.loss - minus.loss) / (2 * Extended(h));
        e.numeric = static_cast<double>(f);
        if (e.skipped) {
          ++report.skipped;
        } else {
          ++report.checked;
          const Extended scale = std::max({abs(a), abs(f), Extended(kRelativeErrorFloor)});
          e.rel_error = static_cast<double>(abs(a - f) / scale);
          report.max_rel_error = std::max(report.max_rel_error, e.rel_error);
        }
        report.entries.push_back(e);
      }
    }
  }
  return report;
}

void InitSpec::validate() const {
  if (!(row_sum > 0) || !std::isfinite(row_sum)) throw ConfigError("init row_sum must be > 0");
  if (!(spread >= 0) || !std::isfinite(spread)) throw ConfigError("init spread must be >= 0");
  for (double s : layer_scale) {
    if (!(s > 0) || !std::isfinite(s)) throw ConfigError("init layer scales must be > 0");
  }
}

std::vector<double> init_means(const Network& net, const InitSpec& spec) {
  std::vector<double> means;
  std::size_t weighted = 0;
  for (const auto& layer : net.layers) {
    if (!layer.has_weights()) {
      means.push_back(0);
      continue;
    }
    const double scale =
        weighted < spec.layer_scale.size() ? spec.layer_scale[weighted] : 1.0;
    ++weighted;
    means.push_back(spec.row_sum * scale / static_cast<double>(layer.weights.cols()));
  }
  return means;
}

void init_weights(Network& net, const InitSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  const auto means = init_means(net, spec);
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    auto& layer = net.layers[l];
    if (!layer.has_weights()) continue;
    const double mean = means[l];
    std::uniform_real_distribution<double> dist(mean * (1 - spec.spread),
                                                mean * (1 + spec.spread));
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i) {
      layer.weights.data()[i] = dist(rng);
    }
  }
}

void TrainConfig::validate() const {
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(lr_initial > 0) || !(lr_final > 0)) throw ConfigError("learning rates must be > 0");
  if (!(adam_beta1 >= 0 && adam_beta1 < 1) || !(adam_beta2 >= 0 && adam_beta2 < 1) ||
      !(adam_epsilon > 0)) {
    throw ConfigError("adam parameters out of range");
  }
  if (!(silent_push >= 0)) throw ConfigError("silent_push must be >= 0");
  if (!(clip_norm >= 0)) throw ConfigError("clip_norm must be >= 0");
  init.validate();
  loss.validate();
}

TrainConfig TrainConfig::take_from(KeyValues& kv) {
  TrainConfig c;
  c.epochs = static_cast<int>(kv.take_int("epochs", c.epochs));
  c.batch_size = static_cast<int>(kv.take_int("batch_size", c.batch_size));
  c.lr_initial = kv.take_double("lr_initial", c.lr_initial);
  c.lr_final = kv.take_double("lr_final", c.lr_final);
  c.optimizer = parse_optimizer(kv.take_string("optimizer", to_string(c.optimizer)));
  c.init.row_sum = kv.take_double("init_row_sum", c.init.row_sum);
  c.init.spread = kv.take_double("init_spread", c.init.spread);
  c.init.layer_scale = kv.take_doubles("init_layer_scale", c.init.layer_scale);
  c.loss.k = kv.take_double("loss_k", c.loss.k);
  c.loss.z_max = kv.take_double("z_max", c.loss.z_max);
  c.loss.variant =
      parse_loss_variant(kv.take_string("loss_variant", to_string(c.loss.variant)));
  c.adam_beta1 = kv.take_double("adam_beta1", c.adam_beta1);
  c.adam_beta2 = kv.take_double("adam_beta2", c.adam_beta2);
  c.adam_epsilon = kv.take_double("adam_epsilon", c.adam_epsilon);
  c.relative_lr = kv.take_bool("relative_lr", c.relative_lr);
  c.silent_push = kv.take_double("silent_push", c.silent_push);
  c.clip_norm = kv.take_double("clip_norm", c.clip_norm);
  c.validate();
  return c;
}

double learning_rate(const TrainConfig& config, int epoch) {
  if (config.epochs <= 1) return config.lr_initial;
  const double frac = static_cast<double>(epoch) / (config.epochs - 1);
  return config.lr_initial * std::pow(config.lr_final / config.lr_initial, frac);
}

double accuracy(const Network& net, std::span<const Sample> data) {
  if (data.empty()) return 0;
  std::size_t correct = 0;
  for (const auto& s : data) {
    if (classify(forward_network<double>(net, s.input.z), net.z_max) == s.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

namespace {

void push_silent_target(const Network& net, const Sample& s, const NetworkTrace<double>& trace,
                        double push, Gradients<double>& grads) {
  const std::size_t last = net.layers.size() - 1;
  if (net.layers[last].kind != LayerKind::kDense) return;
  if (is_spike(trace.output()[s.label])) return;
  const Eigen::VectorXd& z_in = last == 0 ? s.input.z : trace.layers[last - 1].z_out;
  auto row = grads.weights[last].row(s.label);
  for (Eigen::Index i = 0; i < z_in.size(); ++i) {
    if (is_spike(z_in[i])) row[i] -= push;
  }
}

}  // namespace

std::vector<EpochStats> fit(Network& net, std::span<const Sample> data,
                            const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  net.validate();
  if (data.empty()) throw ConfigError("fit: empty dataset");
  for (const auto& s : data) {
    if (s.input.shape != net.input) throw ShapeError("fit: sample shape does not match network");
    if (s.label < 0 || s.label >= net.num_classes()) throw DomainError("fit: label out of range");
  }

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  auto m = Gradients<double>::zeros_like(net);
  auto v = Gradients<double>::zeros_like(net);
  long long step = 0;
  std::vector<double> lr_scale(net.layers.size(), 1.0);
  if (config.relative_lr) lr_scale = init_means(net, config.init);
  NetworkTrace<double> trace;
  Eigen::VectorXd grad_out;
  auto sample_grads = Gradients<double>::zeros_like(net);
  std::vector<EpochStats> history;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    EpochStats stats;
    stats.epoch = epoch;
    stats.learning_rate = learning_rate(config, epoch);
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0;
    std::size_t correct = 0;

    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      auto grads = Gradients<double>::zeros_like(net);
      const double penalty = weight_penalty(net, config.loss.k);
      for (std::size_t q = start; q < end; ++q) {
        const Sample& s = data[order[q]];
        forward_trace<double>(net, s.input.z, trace);
        const double l = output_loss<double>(trace.output(), s.label, config.loss, &grad_out) +
                         penalty;
        if (!std::isfinite(l)) {
          throw DivergenceError("loss is not finite at epoch " + std::to_string(epoch) +
                                ", sample " + std::to_string(order[q]));
        }
        loss_sum += l;
        if (classify(trace.output(), config.loss.z_max) == s.label) ++correct;
        if (config.clip_norm > 0) {
          sample_grads.set_zero();
          backward_network<double>(net, s.input.z, trace, grad_out, sample_grads);
          if (config.silent_push > 0) {
            push_silent_target(net, s, trace, config.silent_push, sample_grads);
          }
          double sq = 0;
          for (const auto& g : sample_grads.weights) sq += g.squaredNorm();
          const double f = std::sqrt(sq) > config.clip_norm ? config.clip_norm / std::sqrt(sq) : 1;
          for (std::size_t l = 0; l < grads.weights.size(); ++l) {
            grads.weights[l] += f * sample_grads.weights[l];
          }
          grads.clamped += sample_grads.clamped;
        } else {
          backward_network<double>(net, s.input.z, trace, grad_out, grads);
          if (config.silent_push > 0) push_silent_target(net, s, trace, config.silent_push, grads);
        }
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      for (auto& g : grads.weights) g *= inv;
      weight_penalty(net, config.loss.k, &grads);
      stats.clamped += grads.clamped;

      ++step;
      for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const double lr = stats.learning_rate * lr_scale[l];
        auto& w = net.layers[l].weights;
        if (w.size() == 0) continue;
        const auto& g = grads.weights[l];
        if (!g.allFinite()) {
          throw DivergenceError("gradient is not finite at epoch " + std::to_string(epoch));
        }
        if (config.optimizer == OptimizerKind::kSgd) {
          w -= lr * g;
          continue;
        }
        const double b1 = config.adam_beta1;
        const double b2 = config.adam_beta2;
        m.weights[l] = b1 * m.weights[l] + (1 - b1) * g;
        v.weights[l] = b2 * v.weights[l] + (1 - b2) * g.cwiseProduct(g);
        const double c1 = 1 - std::pow(b1, static_cast<double>(step));
        const double c2 = 1 - std::pow(b2, static_cast<double>(step));
        w.array() -= lr * (m.weights[l].array() / c1) /
                     ((v.weights[l].array() / c2).sqrt() + config.adam_epsilon);
      }
    }
    stats.loss = loss_sum / static_cast<double>(data.size());
    stats.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
    history.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  return history;
}

}  // namespace tsnn
