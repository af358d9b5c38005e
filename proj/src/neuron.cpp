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

#include "tsnn/neuron.hpp"

#include <cmath>
#include <numeric>

namespace tsnn {

void OdeSimConfig::validate() const {
  if (!(tau > 0) || !(theta > 0) || !(dt > 0)) {
    throw DomainError("OdeSimConfig: tau, theta and dt must be positive");
  }
  if (!std::isfinite(t_max)) throw DomainError("OdeSimConfig: t_max must be finite");
}

double simulate_ode(std::span<const double> input_times,
                    std::span<const double> weights, const OdeSimConfig& config) {
  config.validate();
  if (input_times.size() != weights.size()) {
    throw ShapeError("simulate_ode: times and weights differ in length");
  }
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < input_times.size(); ++i) {
    if (std::isfinite(input_times[i])) order.push_back(i);
  }
  if (order.empty()) return kNoSpike;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return input_times[a] < input_times[b];
  });

  const double tau = config.tau;
  const double decay = std::exp(-config.dt / tau);
  double t = input_times[order.front()];
  double v = 0.0;
  double current = 0.0;  // synaptic current at time t
  std::size_t next = 0;

  // Inputs arriving exactly at the start are active from t onwards.
  while (next < order.size() && input_times[order[next]] <= t) {
    current += weights[order[next]];
    ++next;
  }

  while (t < config.t_max) {
    const double t_end = t + config.dt;
    double v_end = v + current * tau * (1.0 - decay);
    double current_end = current * decay;
    while (next < order.size() && input_times[order[next]] <= t_end) {
      const std::size_t i = order[next];
      const double since = t_end - input_times[i];
      v_end += weights[i] * tau * (1.0 - std::exp(-since / tau));
      current_end += weights[i] * std::exp(-since / tau);
      ++next;
    }
    if (v_end >= config.theta) {
      const double frac = (config.theta - v) / (v_end - v);
      return t + config.dt * std::clamp(frac, 0.0, 1.0);
    }
    t = t_end;
    v = v_end;
    current = current_end;
  }
  return kNoSpike;
}

}  // namespace tsnn
