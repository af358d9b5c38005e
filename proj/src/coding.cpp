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

#include "tsnn/coding.hpp"

#include <algorithm>
#include <cmath>

#include "text_util.hpp"

namespace tsnn {

void LidarEncoderConfig::validate() const {
  if (!std::isfinite(alpha) || alpha < 0) throw DomainError("alpha must be >= 0");
  if (!std::isfinite(beta) || beta < 0) throw DomainError("beta must be >= 0");
}

void DvsEncoderConfig::validate() const {
  if (!std::isfinite(alpha) || alpha < 0) throw DomainError("alpha must be >= 0");
  if (!std::isfinite(beta_rate) || beta_rate < 0) {
    throw DomainError("beta_rate must be >= 0");
  }
  if (!(t0 < t_k)) throw WindowError("encoder window needs t0 < t_k");
}

NormalizationMap NormalizationMap::to_range(double t0, double t_k,
                                            double t_norm) {
  if (!(t0 < t_k)) throw WindowError("normalization window needs t0 < t_k");
  if (!(t_norm > 0)) throw DomainError("t_norm must be > 0");
  return {t0, t_norm / (t_k - t0)};
}

InputSpikes InputSpikes::absent(Shape shape) {
  InputSpikes s;
  s.shape = shape;
  s.times = Eigen::VectorXd::Constant(shape.size(), kNoSpike);
  s.z = s.times;
  return s;
}

InputSpikes InputSpikes::from_times(Shape shape, Eigen::VectorXd times) {
  if (times.size() != shape.size()) {
    throw ShapeError("spike vector length does not match shape " + to_string(shape));
  }
  InputSpikes s;
  s.shape = shape;
  s.z.resize(times.size());
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    if (std::isnan(times[i]) || times[i] == -kNoSpike) {
      throw DomainError("spike times must be finite or absent");
    }
    s.z[i] = is_spike(times[i]) ? std::exp(times[i]) : kNoSpike;
  }
  s.times = std::move(times);
  return s;
}

int InputSpikes::count_present() const {
  int n = 0;
  for (Eigen::Index i = 0; i < times.size(); ++i) n += is_spike(times[i]);
  return n;
}

double InputSpikes::first_time() const {
  return times.size() ? times.minCoeff() : kNoSpike;
}

InputSpikes encode_lidar(const VoxelGrid& grid, const LidarEncoderConfig& config) {
  config.validate();
  const auto n = static_cast<Eigen::Index>(grid.arrival.size());
  Eigen::VectorXd t = Eigen::VectorXd::Constant(n, kNoSpike);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& a = grid.arrival[static_cast<std::size_t>(i)];
    if (!a) continue;
    t[i] = std::max(config.beta, *a) + config.alpha * grid.values[i];
  }
  return InputSpikes::from_times(grid.shape(), std::move(t));
}

InputSpikes encode_dvs(const EventStream& stream, const DvsEncoderConfig& config,
                       const Eigen::MatrixXi& initial) {
  if (stream.kind() != SensorKind::kDvs) {
    throw KindError("encode_dvs needs a dvs stream");
  }
  DvsOnlineEncoder encoder(stream.width(), stream.height(), config, initial);
  const Shape shape = encoder.shape();
  Eigen::VectorXd t = Eigen::VectorXd::Constant(shape.size(), kNoSpike);
  for (const auto& e : stream.dvs_events()) {
    for (const auto& s : encoder.push(e)) t[s.neuron] = s.t;
  }
  for (const auto& s : encoder.finish()) t[s.neuron] = s.t;
  return InputSpikes::from_times(shape, std::move(t));
}

InputSpikes encode_frame_static(const Eigen::Ref<const Eigen::VectorXd>& values,
                                Shape shape, double alpha) {
  if (values.size() != shape.size()) throw ShapeError("value count does not match shape");
  if (!std::isfinite(alpha) || alpha < 0) throw DomainError("alpha must be >= 0");
  Eigen::VectorXd t = Eigen::VectorXd::Constant(shape.size(), kNoSpike);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw DomainError("frame values must be finite");
    if (values[i] > 0) t[i] = alpha * values[i];
  }
  return InputSpikes::from_times(shape, std::move(t));
}

InputSpikes normalize(const InputSpikes& spikes, const NormalizationMap& map) {
  Eigen::VectorXd t = spikes.times;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (is_spike(t[i])) t[i] = map.to_network(t[i]);
  }
  return InputSpikes::from_times(spikes.shape, std::move(t));
}

InputSpikes shift_spikes(const InputSpikes& spikes, double delta) {
  Eigen::VectorXd t = spikes.times;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (is_spike(t[i])) t[i] += delta;
  }
  return InputSpikes::from_times(spikes.shape, std::move(t));
}

// ---------------------------------------------------------------------------
// Online encoders.

LidarOnlineEncoder::LidarOnlineEncoder(const VoxelGridConfig& grid,
                                       const LidarEncoderConfig& config)
    : grid_(grid), config_(config), shape_(grid.shape()) {
  grid_.validate();
  config_.validate();
  occupied_.assign(static_cast<std::size_t>(shape_.size()), 0);
}

LidarOnlineEncoder::LidarOnlineEncoder(const FrontViewConfig& view,
                                       const FrontViewCrop& crop,
                                       const LidarEncoderConfig& config,
                                       double light_speed)
    : view_(view), crop_(crop), config_(config),
      shape_{crop.height, crop.width, 1} {
  view.validate();
  config_.validate();
  grid_.dims = {crop.height, crop.width, 1};
  grid_.light_speed = light_speed;
  grid_.validate();
  occupied_.assign(static_cast<std::size_t>(shape_.size()), 0);
}

std::optional<int> LidarOnlineEncoder::locate(const LidarEvent& e) const {
  if (!view_) return voxel_index(grid_, e.x, e.y, e.z);
  if (e.x == 0 && e.y == 0) return std::nullopt;
  const auto p = project_front_view(e.x, e.y, e.z, *view_);
  const int row = p.y_front - crop_.y_begin;
  const int col = p.x_front - crop_.x_begin;
  if (row < 0 || row >= crop_.height || col < 0 || col >= crop_.width) {
    return std::nullopt;
  }
  return row * crop_.width + col;
}

std::optional<SpikeRelease> LidarOnlineEncoder::push(const LidarEvent& e) {
  const auto idx = locate(e);
  if (!idx) return std::nullopt;
  auto& occ = occupied_[static_cast<std::size_t>(*idx)];
  if (occ) return std::nullopt;
  occ = 1;
  return SpikeRelease{
      *idx, std::max(config_.beta, e.t_a) + config_.alpha * voxel_value(grid_, e)};
}

DvsOnlineEncoder::DvsOnlineEncoder(int width, int height,
                                   const DvsEncoderConfig& config,
                                   const Eigen::MatrixXi& initial)
    : width_(width), height_(height), config_(config) {
  config_.validate();
  const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  sum_.assign(n, 0);
  fired_.assign(n, 0);
  if (initial.size() != 0) {
    if (initial.rows() != height || initial.cols() != width) {
      throw ShapeError("initial image does not match sensor size");
    }
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        sum_[static_cast<std::size_t>(y * width + x)] = initial(y, x);
      }
    }
  }
}

void DvsOnlineEncoder::flush(std::vector<SpikeRelease>& out) {
  const double threshold = config_.threshold(current_t_);
  for (const int i : dirty_) {
    const auto k = static_cast<std::size_t>(i);
    if (!fired_[k] && sum_[k] >= threshold) {
      fired_[k] = 1;
      out.push_back({i, current_t_});
    }
  }
  dirty_.clear();
}

std::vector<SpikeRelease> DvsOnlineEncoder::push(const DvsEvent& e) {
  std::vector<SpikeRelease> out;
  if (finished_) throw Error("DvsOnlineEncoder: push after finish");
  if (e.t < current_t_) throw DomainError("DvsOnlineEncoder: events out of order");
  if (e.t > current_t_) flush(out);
  current_t_ = e.t;
  if (e.t < config_.t0 || e.t > config_.t_k) return out;
  const int i = e.y * width_ + e.x;
  const auto k = static_cast<std::size_t>(i);
  if (fired_[k]) return out;
  sum_[k] += e.polarity;
  if (dirty_.empty() || dirty_.back() != i) {
    if (std::find(dirty_.begin(), dirty_.end(), i) == dirty_.end()) dirty_.push_back(i);
  }
  return out;
}

std::vector<SpikeRelease> DvsOnlineEncoder::finish() {
  std::vector<SpikeRelease> out;
  if (finished_) return out;
  flush(out);
  finished_ = true;
  const double threshold = config_.threshold(config_.t_k);
  for (std::size_t k = 0; k < sum_.size(); ++k) {
    if (!fired_[k] && sum_[k] >= threshold) {
      fired_[k] = 1;
      out.push_back({static_cast<int>(k), config_.t_k});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Settings.

NormalizationMap EncoderSettings::normalization() const {
  if (t_norm == 0) return {};
  return NormalizationMap::to_range(t0, t_k, t_norm);
}

void EncoderSettings::validate() const {
  if (!(t0 < t_k)) throw WindowError("encoder window needs t0 < t_k");
  if (!(t_norm >= 0)) throw DomainError("t_norm must be >= 0");
  if (sensor == SensorKind::kLidar) {
    lidar_config().validate();
    if (use_front_view) {
      front_view.validate();
    } else {
      voxel.validate();
    }
  } else {
    dvs_config().validate();
  }
}

namespace {

const char* voxel_value_name(VoxelValue v) {
  switch (v) {
    case VoxelValue::kFlyingTime: return "flying_time";
    case VoxelValue::kDistance: return "distance";
    case VoxelValue::kIntensity: return "intensity";
    case VoxelValue::kCount: return "count";
  }
  return "flying_time";
}

}  // namespace

std::string EncoderSettings::to_text() const {
  using text::format_double;
  std::string s;
  auto line = [&](const std::string& k, const std::string& v) {
    s += k + " = " + v + "\n";
  };
  line("sensor", sensor == SensorKind::kLidar ? "lidar" : "dvs");
  line("t0", format_double(t0));
  line("t_k", format_double(t_k));
  line("t_norm", format_double(t_norm));
  line("threshold_kind", threshold_kind == ThresholdKind::kConstant ? "constant" : "linear");
  line("alpha", format_double(alpha));
  line("beta", format_double(beta));
  line("beta_rate", format_double(beta_rate));
  line("voxel_dims", std::to_string(voxel.dims[0]) + "," +
                         std::to_string(voxel.dims[1]) + "," +
                         std::to_string(voxel.dims[2]));
  line("voxel_step", format_double(voxel.step[0]) + "," +
                         format_double(voxel.step[1]) + "," +
                         format_double(voxel.step[2]));
  line("voxel_origin", format_double(voxel.origin[0]) + "," +
                           format_double(voxel.origin[1]) + "," +
                           format_double(voxel.origin[2]));
  line("light_speed", format_double(voxel.light_speed));
  line("voxel_value", voxel_value_name(voxel.value));
  line("front_view", use_front_view ? "true" : "false");
  line("r_h", format_double(front_view.r_h));
  line("r_v", format_double(front_view.r_v));
  line("crop", std::to_string(crop.x_begin) + "," + std::to_string(crop.y_begin) +
                   "," + std::to_string(crop.width) + "," +
                   std::to_string(crop.height));
  return s;
}

EncoderSettings EncoderSettings::take_from(KeyValues& kv) {
  EncoderSettings s;
  const auto sensor = kv.take_string("sensor", "dvs");
  if (sensor == "lidar") {
    s.sensor = SensorKind::kLidar;
  } else if (sensor == "dvs") {
    s.sensor = SensorKind::kDvs;
  } else {
    throw ConfigError("sensor must be lidar or dvs");
  }
  s.t0 = kv.take_double("t0", s.t0);
  s.t_k = kv.take_double("t_k", s.t_k);
  s.t_norm = kv.take_double("t_norm", s.t_norm);
  const auto kind = kv.take_string("threshold_kind", "constant");
  if (kind == "constant") {
    s.threshold_kind = ThresholdKind::kConstant;
  } else if (kind == "linear") {
    s.threshold_kind = ThresholdKind::kLinear;
  } else {
    throw ConfigError("threshold_kind must be constant or linear");
  }
  s.alpha = kv.take_double("alpha", s.alpha);
  s.beta = kv.take_double("beta", s.beta);
  s.beta_rate = kv.take_double("beta_rate", s.beta_rate);

  auto triple = [&](std::string_view key, std::array<double, 3> fallback) {
    const auto v = kv.take_doubles(key, {fallback[0], fallback[1], fallback[2]});
    if (v.size() != 3) throw ConfigError(std::string(key) + " needs 3 values");
    return std::array<double, 3>{v[0], v[1], v[2]};
  };
  const auto dims = triple("voxel_dims", {double(s.voxel.dims[0]),
                                          double(s.voxel.dims[1]),
                                          double(s.voxel.dims[2])});
  for (int a = 0; a < 3; ++a) s.voxel.dims[a] = static_cast<int>(dims[a]);
  s.voxel.step = triple("voxel_step", s.voxel.step);
  s.voxel.origin = triple("voxel_origin", s.voxel.origin);
  s.voxel.light_speed = kv.take_double("light_speed", s.voxel.light_speed);
  const auto value = kv.take_string("voxel_value", "flying_time");
  if (value == "flying_time") {
    s.voxel.value = VoxelValue::kFlyingTime;
  } else if (value == "distance") {
    s.voxel.value = VoxelValue::kDistance;
  } else if (value == "intensity") {
    s.voxel.value = VoxelValue::kIntensity;
  } else if (value == "count") {
    s.voxel.value = VoxelValue::kCount;
  } else {
    throw ConfigError("unknown voxel_value '" + value + "'");
  }
  s.use_front_view = kv.take_bool("front_view", s.use_front_view);
  s.front_view.r_h = kv.take_double("r_h", s.front_view.r_h);
  s.front_view.r_v = kv.take_double("r_v", s.front_view.r_v);
  const auto crop = kv.take_doubles(
      "crop", {double(s.crop.x_begin), double(s.crop.y_begin),
               double(s.crop.width), double(s.crop.height)});
  if (crop.size() != 4) throw ConfigError("crop needs x,y,width,height");
  s.crop = {static_cast<int>(crop[0]), static_cast<int>(crop[1]),
            static_cast<int>(crop[2]), static_cast<int>(crop[3])};
  return s;
}

EncoderSettings EncoderSettings::from_text(std::string_view content) {
  auto kv = KeyValues::parse(content);
  auto s = take_from(kv);
  kv.reject_unused();
  return s;
}

InputSpikes encode_stream(const EventStream& stream,
                          const EncoderSettings& settings) {
  settings.validate();
  if (stream.kind() != settings.sensor) {
    throw KindError("stream sensor kind does not match encoder settings");
  }
  InputSpikes raw;
  if (settings.sensor == SensorKind::kDvs) {
    raw = encode_dvs(stream, settings.dvs_config());
  } else if (settings.use_front_view) {
    raw = encode_lidar(front_view_grid(stream, settings.front_view, settings.crop,
                                       settings.voxel.light_speed),
                       settings.lidar_config());
  } else {
    raw = encode_lidar(voxelize(stream, settings.voxel), settings.lidar_config());
  }
  if (settings.t_norm == 0) return raw;
  return normalize(raw, settings.normalization());
}

std::string write_spikes(const InputSpikes& spikes) {
  std::string out = "#spikes,h=" + std::to_string(spikes.shape.height) +
                    ",w=" + std::to_string(spikes.shape.width) +
                    ",c=" + std::to_string(spikes.shape.channels) + "\n";
  for (Eigen::Index i = 0; i < spikes.times.size(); ++i) {
    if (!is_spike(spikes.times[i])) continue;
    out += std::to_string(i) + "," + text::format_double(spikes.times[i]) + "\n";
  }
  return out;
}

InputSpikes parse_spikes(std::string_view content) {
  std::optional<Shape> shape;
  Eigen::VectorXd t;
  text::for_each_line(content, [&](std::size_t line_no, std::string_view raw) {
    auto line = text::trim(raw);
    if (line.empty()) return;
    if (!shape) {
      if (line.substr(0, 7) != "#spikes") throw ParseError(line_no, "expected '#spikes' header");
      Shape s;
      bool h = false, w = false, c = false;
      for (const auto field : text::split(line.substr(7), ',')) {
        if (field.empty()) continue;
        const auto eq = field.find('=');
        const auto v = eq == std::string_view::npos
                           ? std::nullopt
                           : text::parse_int(field.substr(eq + 1));
        if (!v || *v < 1) throw ParseError(line_no, "bad header field");
        const auto key = text::trim(field.substr(0, eq));
        if (key == "h") {
          s.height = static_cast<int>(*v), h = true;
        } else if (key == "w") {
          s.width = static_cast<int>(*v), w = true;
        } else if (key == "c") {
          s.channels = static_cast<int>(*v), c = true;
        } else {
          throw ParseError(line_no, "unknown header key");
        }
      }
      if (!(h && w && c)) throw ParseError(line_no, "header needs h, w, c");
      shape = s;
      t = Eigen::VectorXd::Constant(s.size(), kNoSpike);
      return;
    }
    if (line.front() == '#') return;
    const auto fields = text::split(line, ',');
    if (fields.size() != 2) throw ParseError(line_no, "row needs index,t");
    const auto idx = text::parse_int(fields[0]);
    const auto time = text::parse_double(fields[1]);
    if (!idx || *idx < 0 || *idx >= shape->size()) {
      throw ParseError(line_no, "neuron index out of range");
    }
    if (!time || !std::isfinite(*time)) throw ParseError(line_no, "bad spike time");
    t[*idx] = *time;
  });
  if (!shape) throw ParseError(1, "missing '#spikes' header");
  return InputSpikes::from_times(*shape, std::move(t));
}

}  // namespace tsnn
