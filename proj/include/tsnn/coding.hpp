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

// Temporal coding: maps preprocessed event data and arrival times to input
// spike times t_i, carried into the network as z_i = exp(t_i).
//
// LiDAR:  t_i = max(beta, A_i) + alpha * D_i for every occupied voxel.
// DVS:    t_i is the first candidate time t (the pixel's event timestamps and
//         t_k) at which I + cumulative polarity >= threshold(t), where the
//         threshold is either the constant alpha or beta_rate * (t_k - t).

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsnn/common.hpp"
#include "tsnn/config.hpp"
#include "tsnn/events.hpp"
#include "tsnn/preprocess.hpp"

namespace tsnn {

struct LidarEncoderConfig {
  double alpha = 0;  // seconds per unit of D
  double beta = 0;   // delay floor, seconds

  void validate() const;
};

enum class ThresholdKind { kConstant, kLinear };

struct DvsEncoderConfig {
  ThresholdKind threshold_kind = ThresholdKind::kConstant;
  double alpha = 1;      // constant threshold, event counts
  double beta_rate = 0;  // linear threshold slope, event counts per second
  double t0 = 0;
  double t_k = 1;

  void validate() const;
  double threshold(double t) const {
    return threshold_kind == ThresholdKind::kConstant ? alpha
                                                      : beta_rate * (t_k - t);
  }
};

// Affine map from sensor seconds to network time: t' = (t - offset) * scale.
struct NormalizationMap {
  double offset = 0;
  double scale = 1;

  // Maps [t0, t_k] onto [0, t_norm].
  static NormalizationMap to_range(double t0, double t_k, double t_norm);

  double to_network(double t) const { return (t - offset) * scale; }
  double to_sensor(double t) const { return t / scale + offset; }
  friend bool operator==(const NormalizationMap&, const NormalizationMap&) = default;
};

// Spike times per input neuron; absent neurons hold +infinity in both times
// and z.
struct InputSpikes {
  Shape shape;
  Eigen::VectorXd times;
  Eigen::VectorXd z;

  static InputSpikes absent(Shape shape);
  static InputSpikes from_times(Shape shape, Eigen::VectorXd times);

  bool present(int i) const { return is_spike(times[i]); }
  int count_present() const;
  // Earliest present spike, or +infinity.
  double first_time() const;
};

InputSpikes encode_lidar(const VoxelGrid& grid, const LidarEncoderConfig& config);

// Throws KindError for non-DVS streams. `initial` may be empty (zeros).
InputSpikes encode_dvs(const EventStream& stream, const DvsEncoderConfig& config,
                       const Eigen::MatrixXi& initial = {});

// Synchronous baseline: t_i = alpha * D_i where D_i > 0, absent elsewhere.
InputSpikes encode_frame_static(const Eigen::Ref<const Eigen::VectorXd>& values,
                                Shape shape, double alpha);

// Applies the map to every present spike time and recomputes z.
InputSpikes normalize(const InputSpikes& spikes, const NormalizationMap& map);

// Adds delta to every present spike time.
InputSpikes shift_spikes(const InputSpikes& spikes, double delta);

struct SpikeRelease {
  int neuron = 0;
  double t = 0;  // sensor seconds
};

// Event-at-a-time LiDAR encoder. A spike is known as soon as the first event
// of its voxel arrives.
class LidarOnlineEncoder {
 public:
  LidarOnlineEncoder(const VoxelGridConfig& grid, const LidarEncoderConfig& config);
  LidarOnlineEncoder(const FrontViewConfig& view, const FrontViewCrop& crop,
                     const LidarEncoderConfig& config,
                     double light_speed = kSpeedOfLight);

  std::optional<SpikeRelease> push(const LidarEvent& e);
  Shape shape() const { return shape_; }

 private:
  std::optional<int> locate(const LidarEvent& e) const;

  VoxelGridConfig grid_;
  std::optional<FrontViewConfig> view_;
  FrontViewCrop crop_;
  LidarEncoderConfig config_;
  Shape shape_;
  std::vector<char> occupied_;
};

// Event-at-a-time DVS encoder. A pixel is evaluated once all of its events at
// a timestamp are in, i.e. when a later event arrives or on finish().
class DvsOnlineEncoder {
 public:
  DvsOnlineEncoder(int width, int height, const DvsEncoderConfig& config,
                   const Eigen::MatrixXi& initial = {});

  // Spikes that became certain with this event (all at times < e.t).
  std::vector<SpikeRelease> push(const DvsEvent& e);
  // Remaining spikes, including those that fire at t_k.
  std::vector<SpikeRelease> finish();
  Shape shape() const { return {height_, width_, 1}; }

 private:
  void flush(std::vector<SpikeRelease>& out);

  int width_;
  int height_;
  DvsEncoderConfig config_;
  std::vector<int> sum_;
  std::vector<char> fired_;
  std::vector<int> dirty_;
  double current_t_ = -1;
  bool finished_ = false;
};

// Everything needed to turn a raw stream into network input.
struct EncoderSettings {
  SensorKind sensor = SensorKind::kDvs;
  // Task window: t0/t_k of the DVS threshold and the normalization range.
  double t0 = 0;
  double t_k = 1;
  double t_norm = 4;  // 0 disables normalization

  ThresholdKind threshold_kind = ThresholdKind::kConstant;
  double alpha = 1;
  double beta = 0;
  double beta_rate = 0;

  // LiDAR: voxel grid, or the front-view crop when use_front_view is set.
  VoxelGridConfig voxel;
  bool use_front_view = false;
  FrontViewConfig front_view;
  FrontViewCrop crop;

  LidarEncoderConfig lidar_config() const { return {alpha, beta}; }
  DvsEncoderConfig dvs_config() const {
    return {threshold_kind, alpha, beta_rate, t0, t_k};
  }
  NormalizationMap normalization() const;
  void validate() const;

  // Key = value rendering and parsing; unknown keys are rejected.
  std::string to_text() const;
  static EncoderSettings from_text(std::string_view text);
  // Consumes the encoder keys of a larger config, leaving the rest.
  static EncoderSettings take_from(KeyValues& kv);
};

// Batch pipeline: preprocess + encode + normalize the whole stream.
InputSpikes encode_stream(const EventStream& stream, const EncoderSettings& settings);

// Text format for encoded spikes: "#spikes,h=,w=,c=" header, then one
// "index,t" row per present neuron.
std::string write_spikes(const InputSpikes& spikes);
InputSpikes parse_spikes(std::string_view content);

}  // namespace tsnn
