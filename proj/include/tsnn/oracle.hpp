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


// Self-checks shared by the CLI and the test suite: the closed-form neuron
// against a time-stepped simulation, and analytic gradients against finite
// differences on random small networks.

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "tsnn/coding.hpp"
#include "tsnn/network.hpp"

namespace tsnn {

struct NeuronOracleConfig {
  int neurons = 1000;
  int max_inputs = 8;
  double w_lo = -1;
  double w_hi = 2;
  double t_hi = 2;  // input times are uniform in [0, t_hi]
  double dt = 1e-4;
  double tolerance = 1e-3;  // seconds
  std::uint64_t seed = 1;

  void validate() const;
};

struct NeuronOracleCase {
  std::vector<double> times;
  std::vector<double> weights;
  double closed_form = kNoSpike;  // spike time, or +infinity
  double simulated = kNoSpike;
};

struct NeuronOracleSummary {
  int checked = 0;
  int both_silent = 0;
  int failures = 0;
  double max_abs_error = 0;  // over neurons that fire in both
  std::vector<NeuronOracleCase> failed;  // first few failures

  bool passed() const { return failures == 0; }
};

NeuronOracleSummary check_neuron_oracle(const NeuronOracleConfig& config);

struct GradientOracleConfig {
  int networks = 100;
  double h = 1e-6;
  double tolerance = 1e-4;
  std::uint64_t seed = 1;

  void validate() const;
};

struct GradientOracleSummary {
  int networks = 0;
  std::size_t checked = 0;
  std::size_t skipped = 0;
  std::size_t failures = 0;
  double max_rel_error = 0;

  bool passed() const { return failures == 0 && checked > 0; }
};

GradientOracleSummary check_gradient_oracle(const GradientOracleConfig& config);

// Small random network with at most three weighted or pooling layers and at
// most 16 neurons per layer, initialized so that most neurons fire.
Network random_small_network(std::mt19937_64& rng);

// Input for net.input with times uniform in [0, t_hi]; each neuron is absent
// with probability p_absent.
InputSpikes random_input(const Shape& shape, std::mt19937_64& rng, double t_hi = 2,
                         double p_absent = 0.2);

}  // namespace tsnn
