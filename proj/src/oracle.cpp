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


#include "tsnn/oracle.hpp"

#include <cmath>

#include "tsnn/neuron.hpp"
#include "tsnn/training.hpp"

namespace tsnn {

void NeuronOracleConfig::validate() const {
  if (neurons < 0) throw ConfigError("oracle: neuron count must be >= 0");
  if (max_inputs < 1) throw ConfigError("oracle: max_inputs must be >= 1");
  if (!(w_lo <= w_hi) || !(t_hi >= 0)) throw ConfigError("oracle: bad sampling ranges");
  if (!(dt > 0) || !(tolerance > 0)) throw ConfigError("oracle: dt and tolerance must be > 0");
}

NeuronOracleSummary check_neuron_oracle(const NeuronOracleConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<int> count(1, config.max_inputs);
  std::uniform_real_distribution<double> weight(config.w_lo, config.w_hi);
  std::uniform_real_distribution<double> time(0.0, config.t_hi);
  OdeSimConfig sim;
  sim.dt = config.dt;

  NeuronOracleSummary s;
  for (int k = 0; k < config.neurons; ++k) {
    NeuronOracleCase c;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      c.times.push_back(time(rng));
      c.weights.push_back(weight(rng));
    }
    Eigen::VectorXd z(n), w(n);
    for (int i = 0; i < n; ++i) {
      z[i] = std::exp(c.times[static_cast<std::size_t>(i)]);
      w[i] = c.weights[static_cast<std::size_t>(i)];
    }
    const auto r = solve_neuron(z, w);
    c.closed_form = r.fired() ? std::log(r.z_out) : kNoSpike;
    c.simulated = simulate_ode(c.times, c.weights, sim);
    ++s.checked;

    const bool a = is_spike(c.closed_form);
    const bool b = is_spike(c.simulated);
    bool ok = a == b;
    if (!a && !b) ++s.both_silent;
    if (a && b) {
      const double err = std::abs(c.closed_form - c.simulated);
      s.max_abs_error = std::max(s.max_abs_error, err);
      ok = err <= config.tolerance;
    }
    if (!ok) {
      ++s.failures;
      if (s.failed.size() < 10) s.failed.push_back(std::move(c));
    }
  }
  return s;
}

void GradientOracleConfig::validate() const {
  if (networks < 0) throw ConfigError("oracle: network count must be >= 0");
  if (!(h > 0) || !(tolerance > 0)) throw ConfigError("oracle: h and tolerance must be > 0");
}

Network random_small_network(std::mt19937_64& rng) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  Network net;
  switch (pick(0, 2)) {
    case 0:
      net.input = {1, pick(3, 10), 1};
      net.add_dense(pick(2, 16));
      if (pick(0, 1)) net.add_dense(pick(2, 16));
      net.add_dense(pick(2, 6));
      break;
    case 1:
      net.input = {5, 5, pick(1, 2)};
      net.add_conv(3, 1, 2).add_dense(pick(2, 8)).add_dense(pick(2, 5));
      break;
    default:
      net.input = {4, 4, 1};
      net.add_conv(3, 1, 1).add_pool(pick(0, 1) ? LayerKind::kMaxPool : LayerKind::kAvgPool);
      net.add_dense(pick(2, 4));
      break;
  }
  InitSpec init;
  init.row_sum = 2.5;
  init.spread = 1.5;
  init_weights(net, init, rng());
  return net;
}

InputSpikes random_input(const Shape& shape, std::mt19937_64& rng, double t_hi,
                         double p_absent) {
  std::uniform_real_distribution<double> time(0.0, t_hi);
  std::bernoulli_distribution absent(p_absent);
  Eigen::VectorXd t(shape.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const double v = time(rng);
    t[i] = absent(rng) ? kNoSpike : v;
  }
  return InputSpikes::from_times(shape, std::move(t));
}

GradientOracleSummary check_gradient_oracle(const GradientOracleConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  GradientOracleSummary s;
  for (int k = 0; k < config.networks; ++k) {
    const Network net = random_small_network(rng);
    const InputSpikes input = random_input(net.input, rng);
    const int c = std::uniform_int_distribution<int>(0, net.num_classes() - 1)(rng);
    LossConfig loss;
    loss.variant = k % 2 == 0 ? LossVariant::kPaper : LossVariant::kSoftmax;
    const auto report = grad_check(net, input, c, loss, config.h);
    ++s.networks;
    s.checked += report.checked;
    s.skipped += report.skipped;
    s.max_rel_error = std::max(s.max_rel_error, report.max_rel_error);
    for (const auto& e : report.entries) {
      if (!e.skipped && e.rel_error > config.tolerance) ++s.failures;
    }
  }
  return s;
}

}  // namespace tsnn
