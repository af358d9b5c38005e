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


#include <cmath>
#include <random>

#include "doctest.h"
#include "tsnn/oracle.hpp"
#include "tsnn/training.hpp"

using namespace tsnn;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

Network single_neuron(double w) {
  Network net;
  net.input = {1, 1, 1};
  net.add_dense(1);
  net.layers[0].weights(0, 0) = w;
  return net;
}

// Class 0 spikes early on inputs 0-3, class 1 on inputs 4-7.
std::vector<Sample> toy_task(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> early(0.0, 0.5), late(1.5, 2.0);
  std::vector<Sample> out;
  for (int k = 0; k < n; ++k) {
    const int label = k % 2;
    Eigen::VectorXd t(8);
    for (int i = 0; i < 8; ++i) t[i] = (i / 4 == label) ? early(rng) : late(rng);
    out.push_back({InputSpikes::from_times({1, 8, 1}, t), label});
  }
  return out;
}

}  // namespace

TEST_CASE("paper loss excludes the target from the denominator") {
  LossConfig c;
  CHECK(output_loss<double>(vec({2, 4}), 0, c) == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
  c.variant = LossVariant::kSoftmax;
  CHECK(output_loss<double>(vec({2, 4}), 0, c) ==
        doctest::Approx(std::log(2.0) + std::log(0.75)).epsilon(1e-15));
}

TEST_CASE("loss gradients match the closed forms") {
  LossConfig c;
  Eigen::VectorXd g;
  const auto z = vec({2, 4, 5});
  output_loss<double>(z, 1, c, &g);
  const double s = 1 / 2.0 + 1 / 5.0;
  CHECK(g[1] == doctest::Approx(1 / 4.0));
  CHECK(g[0] == doctest::Approx(-1 / (4.0 * s)));
  CHECK(g[2] == doctest::Approx(-1 / (25.0 * s)));
}

TEST_CASE("silent outputs rank as z_max and carry no gradient") {
  LossConfig c;
  Eigen::VectorXd g;
  const double l = output_loss<double>(vec({kNoSpike, 3}), 1, c, &g);
  CHECK(l == doctest::Approx(std::log(3.0) - std::log(1e30)));
  CHECK(g[0] == 0);
}

TEST_CASE("loss rejects bad arguments") {
  LossConfig c;
  CHECK_THROWS_AS(output_loss<double>(vec({0.5, 2}), 0, c), DomainError);
  CHECK_THROWS_AS(output_loss<double>(vec({2, 3}), 2, c), DomainError);
  CHECK_THROWS_AS(output_loss<double>(vec({2}), 0, c), DomainError);
  c.k = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("weight-sum penalty") {
  Network net;
  net.input = {1, 2, 1};
  net.add_dense(1);
  net.layers[0].weights << 0.3, 0.2;
  CHECK(weight_penalty(net, 2.0) == doctest::Approx(1.0));
  Gradients<double> g = Gradients<double>::zeros_like(net);
  weight_penalty(net, 2.0, &g);
  CHECK(g.weights[0](0, 0) == -2.0);
  CHECK(g.weights[0](0, 1) == -2.0);

  net.layers[0].weights << 0.6, 0.4;
  CHECK(weight_penalty(net, 2.0) == 0.0);
  net.layers[0].weights << 0.6, 0.39;
  CHECK(weight_penalty(net, 2.0) > 0.0);
}

TEST_CASE("derivative of the output time with respect to a weight") {
  const auto net = single_neuron(2);
  NetworkTrace<double> trace;
  const Eigen::VectorXd z = vec({1});
  forward_trace<double>(net, z, trace);
  auto g = Gradients<double>::zeros_like(net);
  backward_network<double>(net, z, trace, vec({1}), g);
  CHECK(g.weights[0](0, 0) == doctest::Approx(-1.0).epsilon(1e-12));

  const double h = 1e-6;
  const double fd = (solve_neuron(z, vec({2 + h})).z_out - solve_neuron(z, vec({2 - h})).z_out) /
                    (2 * h);
  CHECK(fd == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("a neuron that cannot fire only receives the penalty gradient") {
  Network net;
  net.input = {1, 2, 1};
  net.add_dense(2);
  net.layers[0].weights << 0.3, 0.2, 1.5, 0.5;
  Eigen::VectorXd t(2);
  t << 0, 0.1;
  LossConfig c;
  c.k = 1;
  const auto r = backward(net, InputSpikes::from_times({1, 2, 1}, t), 1, c);
  CHECK(r.grads.weights[0](0, 0) == -1.0);
  CHECK(r.grads.weights[0](0, 1) == -1.0);
}

TEST_CASE("gradient check on a single neuron") {
  const auto net = single_neuron(2);
  Network two = net;
  two.add_dense(2);
  two.layers[1].weights << 1.5, 3.0;
  Eigen::VectorXd t(1);
  t << 0.3;
  const auto r = grad_check(two, InputSpikes::from_times({1, 1, 1}, t), 0, LossConfig{});
  CHECK(r.checked == 3);
  CHECK(r.max_rel_error <= 1e-6);
}

TEST_CASE("gradient check on random networks") {
  GradientOracleConfig c;
  c.networks = 25;
  c.seed = 17;
  const auto s = check_gradient_oracle(c);
  CHECK(s.checked > 100);
  CHECK(s.failures == 0);
  CHECK(s.max_rel_error <= 1e-4);
}

TEST_CASE("double-precision backward agrees with the reference analytic gradient") {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 30; ++k) {
    const auto net = random_small_network(rng);
    const auto in = random_input(net.input, rng);
    const auto r = grad_check(net, in, 0, LossConfig{});
    const auto d = backward(net, in, 0, LossConfig{});
    double scale = 0;
    for (const auto& e : r.entries) scale = std::max(scale, std::abs(e.analytic));
    for (const auto& e : r.entries) {
      CHECK(std::abs(d.grads.weights[static_cast<std::size_t>(e.layer)](e.row, e.col) -
                     e.analytic) <= 1e-12 * (1 + scale));
    }
  }
}

TEST_CASE("all-absent input gives an empty gradient report") {
  std::mt19937_64 rng(2);
  const auto net = random_small_network(rng);
  const auto r = grad_check(net, InputSpikes::absent(net.input), 0, LossConfig{});
  CHECK(r.checked == 0);
  CHECK(r.entries.empty());
}

TEST_CASE("a parameter on a causal-set boundary is skipped") {
  // Candidate spike lands exactly on the second input, so any change to the
  // first weight moves the second input in or out of the causal set.
  Network net;
  net.input = {1, 2, 1};
  net.add_dense(2);
  Eigen::VectorXd t(2);
  t << 0, std::log(2.0);
  net.layers[0].weights << 2, 0.5, 2.5, 0.1;
  const auto r = grad_check(net, InputSpikes::from_times({1, 2, 1}, t), 0, LossConfig{});
  CHECK(r.skipped >= 1);
}

TEST_CASE("learning-rate schedule") {
  TrainConfig c;
  c.epochs = 100;
  c.lr_initial = 1e-2;
  c.lr_final = 1e-5;
  CHECK(learning_rate(c, 0) == 1e-2);
  CHECK(std::abs(learning_rate(c, 99) - 1e-5) <= 1e-12);
  CHECK(learning_rate(c, 50) < learning_rate(c, 49));
}

TEST_CASE("zero epochs leave the weights unchanged") {
  Network net;
  net.input = {1, 8, 1};
  net.add_dense(2);
  init_weights(net, {}, 3);
  const auto before = net.layers[0].weights;
  TrainConfig c;
  c.epochs = 0;
  const auto data = toy_task(10, 1);
  CHECK(fit(net, data, c).empty());
  CHECK(net.layers[0].weights == before);
}

TEST_CASE("toy two-class task reaches full training accuracy") {
  const auto data = toy_task(40, 5);
  for (auto variant : {LossVariant::kPaper, LossVariant::kSoftmax}) {
    Network net;
    net.input = {1, 8, 1};
    net.add_dense(8).add_dense(2);
    TrainConfig c;
    c.epochs = 200;
    c.batch_size = 8;
    c.loss.variant = variant;
    init_weights(net, c.init, 11);
    int reached = -1;
    fit(net, data, c, [&](const EpochStats& s) {
      if (reached < 0 && accuracy(net, data) == 1.0) reached = s.epoch;
    });
    INFO("variant " << to_string(variant));
    CHECK(reached >= 0);
    CHECK(accuracy(net, data) == 1.0);
  }
}

TEST_CASE("training is deterministic under a fixed seed") {
  const auto data = toy_task(24, 6);
  auto run = [&] {
    Network net;
    net.input = {1, 8, 1};
    net.add_dense(6).add_dense(2);
    TrainConfig c;
    c.epochs = 5;
    c.batch_size = 5;
    c.seed = 77;
    init_weights(net, c.init, 77);
    const auto h = fit(net, data, c);
    return std::make_pair(net, h.back().loss);
  };
  const auto a = run();
  const auto b = run();
  CHECK(a.first.layers[0].weights == b.first.layers[0].weights);
  CHECK(a.first.layers[1].weights == b.first.layers[1].weights);
  CHECK(a.second == b.second);
}

TEST_CASE("silent target push makes a dead output fire") {
  Network net;
  net.input = {1, 8, 1};
  net.add_dense(2);
  net.layers[0].weights.setConstant(0.05);
  const auto data = toy_task(16, 8);
  TrainConfig c;
  c.epochs = 30;
  c.batch_size = 4;
  c.silent_push = 1;
  c.lr_final = c.lr_initial;
  c.loss.k = 0;
  fit(net, data, c);
  const auto z = forward_network<double>(net, data[0].input.z);
  CHECK(is_spike(z[0]));
}

TEST_CASE("clipped samples bound the step size") {
  std::mt19937_64 rng(41);
  Network net;
  net.input = {1, 8, 1};
  net.add_dense(6).add_dense(2);
  init_weights(net, {}, rng());
  const auto data = toy_task(16, 8);
  const Network before = net;
  TrainConfig c;
  c.epochs = 1;
  c.batch_size = 4;
  c.optimizer = OptimizerKind::kSgd;
  c.relative_lr = false;
  c.lr_initial = c.lr_final = 1;
  c.loss.k = 0;
  c.clip_norm = 1e-3;
  fit(net, data, c);
  double moved = 0;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    moved += (net.layers[l].weights - before.layers[l].weights).squaredNorm();
  }
  CHECK(moved > 0);
  CHECK(std::sqrt(moved) <= 4 * 1e-3 * (1 + 1e-12));
  c.clip_norm = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("train config parsing") {
  auto kv = KeyValues::parse(
      "epochs = 3\nbatch_size = 2\noptimizer = sgd\nloss_variant = softmax\n"
      "init_layer_scale = 1, 2\nsilent_push = 0.5\nclip_norm = 2\n");
  const auto c = TrainConfig::take_from(kv);
  kv.reject_unused();
  CHECK(c.epochs == 3);
  CHECK(c.optimizer == OptimizerKind::kSgd);
  CHECK(c.loss.variant == LossVariant::kSoftmax);
  CHECK(c.init.layer_scale == std::vector<double>{1, 2});
  CHECK(c.silent_push == 0.5);
  CHECK(c.clip_norm == 2);
  auto bad = KeyValues::parse("epochs = -1\n");
  CHECK_THROWS_AS(TrainConfig::take_from(bad), ConfigError);
}
