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


// Random streams and models shared by the unit and acceptance tests.

#pragma once

#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "tsnn/model_io.hpp"
#include "tsnn/oracle.hpp"
#include "tsnn/runtime.hpp"
#include "tsnn/training.hpp"

namespace tsnn::testing {

// DVS stream on a width x height sensor with timestamps on a coarse grid in
// [0, t_k], so that same-timestamp groups occur.
inline EventStream random_dvs_stream(std::mt19937_64& rng, int width, int height, int events,
                                     double t_k = 1.0) {
  std::uniform_real_distribution<double> t(0, t_k);
  std::vector<DvsEvent> ev;
  for (int i = 0; i < events; ++i) {
    ev.push_back({std::round(t(rng) * 200) / 200, static_cast<int>(rng() % width),
                  static_cast<int>(rng() % height), rng() % 5 == 0 ? -1 : 1});
  }
  return EventStream::dvs(width, height, PolarityConvention::kPlusMinusOne, std::move(ev));
}

// LiDAR stream inside a cube of side `extent` meters centred off the origin.
inline EventStream random_lidar_stream(std::mt19937_64& rng, int events, double extent,
                                       double t_max = 1.0) {
  std::uniform_real_distribution<double> pos(0, extent), t(0, t_max);
  std::vector<LidarEvent> ev;
  for (int i = 0; i < events; ++i) {
    ev.push_back({std::round(t(rng) * 100) / 100, pos(rng), pos(rng), pos(rng), 0.5});
  }
  return EventStream::lidar(std::move(ev));
}

// Three weighted layers on a DVS input with the linear or constant threshold.
inline Model random_dvs_model(std::mt19937_64& rng, int width, int height, bool linear) {
  Model m;
  m.encoder.sensor = SensorKind::kDvs;
  m.encoder.t0 = 0;
  m.encoder.t_k = 1;
  m.encoder.t_norm = 4;
  if (linear) {
    m.encoder.threshold_kind = ThresholdKind::kLinear;
    m.encoder.beta_rate = 4;
  } else {
    m.encoder.alpha = 2;
  }
  m.normalization = m.encoder.normalization();
  m.net.input = {height, width, 1};
  m.net.add_conv(3, 4, 2).add_dense(12).add_dense(4);
  InitSpec init;
  init.spread = 1.5;
  init.layer_scale = {linear ? 1.5 : 4, 2, 2};
  init_weights(m.net, init, rng());
  return m;
}

inline Model random_lidar_model(std::mt19937_64& rng) {
  Model m;
  m.encoder.sensor = SensorKind::kLidar;
  m.encoder.alpha = 1e7;  // flying times of a few tens of ns become ~0.1-0.5 s
  m.encoder.beta = 0.1;
  m.encoder.t0 = 0;
  m.encoder.t_k = 2;
  m.encoder.t_norm = 4;
  m.encoder.voxel.dims = {4, 4, 4};
  m.encoder.voxel.step = {1, 1, 1};
  m.encoder.voxel.value = VoxelValue::kFlyingTime;
  m.normalization = m.encoder.normalization();
  m.net.input = {4, 4, 4};
  m.net.add_dense(10).add_dense(8).add_dense(3);
  InitSpec init;
  init.spread = 1.5;
  init.layer_scale = {3, 2, 2};
  init_weights(m.net, init, rng());
  return m;
}

// Small random network with non-default encoder settings.
inline Model random_model(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Model m;
  m.net = random_small_network(rng);
  m.net.preset = "random-" + std::to_string(seed);
  m.encoder.t0 = 0.25;
  m.encoder.t_k = 1.5 + static_cast<double>(seed);
  m.encoder.threshold_kind = ThresholdKind::kLinear;
  m.encoder.beta_rate = 3;
  m.normalization = m.encoder.normalization();
  return m;
}

inline bool bit_equal(const Network& a, const Network& b) {
  if (a.layers.size() != b.layers.size() || a.preset != b.preset || !(a.input == b.input)) {
    return false;
  }
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    const auto& x = a.layers[l];
    const auto& y = b.layers[l];
    if (x.kind != y.kind || x.in != y.in || x.out != y.out || x.kernel != y.kernel ||
        x.stride != y.stride || x.weights.rows() != y.weights.rows() ||
        x.weights.cols() != y.weights.cols()) {
      return false;
    }
    if (x.weights.size() != 0 &&
        std::memcmp(x.weights.data(), y.weights.data(),
                    sizeof(double) * static_cast<std::size_t>(x.weights.size())) != 0) {
      return false;
    }
  }
  return true;
}

}  // namespace tsnn::testing
