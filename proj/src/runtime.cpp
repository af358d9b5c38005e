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

#include "tsnn/runtime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "text_util.hpp"

namespace tsnn {

EventMetrics event_metrics(std::size_t n_contributing, std::size_t n_all,
                           double t_decision, double t_first_input) {
  if (n_all == 0) throw DomainError("event ratio undefined: no events");
  if (n_contributing > n_all) throw DomainError("more contributing events than events");
  EventMetrics m;
  m.r_event = static_cast<double>(n_contributing) / static_cast<double>(n_all);
  m.ghat_time = 1.0 - m.r_event;
  m.ideal_delay = is_spike(t_decision) ? t_decision - t_first_input : kNoSpike;
  return m;
}

namespace {

NormalizationMap map_of(const Model& model) {
  return model.encoder.t_norm == 0 ? NormalizationMap{} : model.normalization;
}

// Fills the decision from the network output and the first input spike,
// both in network time.
Decision decide(const Model& model, const EventStream& stream,
                const Eigen::VectorXd& z_out, double first_input_net) {
  Decision d;
  d.n_all = stream.size();
  d.predicted = classify(z_out, model.net.z_max);
  const double z_first = z_out.size() ? z_out.minCoeff() : kNoSpike;
  const auto map = map_of(model);
  d.fired = is_spike(z_first);
  if (d.fired) {
    d.t_decision_network = std::log(z_first);
    d.t_decision = map.to_sensor(d.t_decision_network);
    d.n_contributing = stream.count_until(d.t_decision);
  } else {
    d.n_contributing = d.n_all;
  }
  const double delay_net = d.t_decision_network - first_input_net;
  const auto m = event_metrics(d.n_contributing, d.n_all,
                               d.fired ? delay_net / map.scale : kNoSpike, 0.0);
  d.r_event = m.r_event;
  d.ghat_time = m.ghat_time;
  d.ideal_delay = m.ideal_delay;
  return d;
}

void check_model_input(const Model& model, Shape encoded) {
  if (encoded != model.net.input) {
    throw ShapeError("encoder produces " + to_string(encoded) + " but network expects " +
                     to_string(model.net.input));
  }
}

// Releases input spikes event by event.
class OnlineEncoder {
 public:
  OnlineEncoder(const EncoderSettings& s, const EventStream& stream) : s_(s) {
    if (stream.kind() != s.sensor) throw KindError("stream kind does not match the model");
    if (s.sensor == SensorKind::kDvs) {
      dvs_.emplace(stream.width(), stream.height(), s.dvs_config());
      shape_ = dvs_->shape();
    } else if (s.use_front_view) {
      lidar_.emplace(s.front_view, s.crop, s.lidar_config(), s.voxel.light_speed);
      shape_ = lidar_->shape();
    } else {
      lidar_.emplace(s.voxel, s.lidar_config());
      shape_ = lidar_->shape();
    }
  }

  Shape shape() const { return shape_; }

  void push(const EventStream& stream, std::size_t i, std::vector<SpikeRelease>& out) {
    if (dvs_) {
      auto r = dvs_->push(stream.dvs_events()[i]);
      out.insert(out.end(), r.begin(), r.end());
      bound_ = std::min(stream.dvs_events()[i].t, s_.t_k);  // finish() fires at t_k
    } else {
      const auto& e = stream.lidar_events()[i];
      if (s_.voxel.value == VoxelValue::kIntensity && e.r < 0) {
        throw DomainError("negative intensity cannot be streamed");
      }
      if (auto r = lidar_->push(e)) out.push_back(*r);
      bound_ = std::max(s_.beta, e.t_a);
    }
  }

  void finish(std::vector<SpikeRelease>& out) {
    if (dvs_) {
      auto r = dvs_->finish();
      out.insert(out.end(), r.begin(), r.end());
    }
    bound_ = kNoSpike;
  }

  // Every spike not yet released fires at or after this sensor time.
  double bound() const { return bound_; }

 private:
  EncoderSettings s_;
  std::optional<DvsOnlineEncoder> dvs_;
  std::optional<LidarOnlineEncoder> lidar_;
  Shape shape_;
  double bound_ = -kNoSpike;
};

}  // namespace

bool supports_early_commit(const Model& model) {
  for (const auto& l : model.net.layers) {
    if (l.kind == LayerKind::kAvgPool) return false;
  }
  return !(model.encoder.sensor == SensorKind::kLidar && !model.encoder.use_front_view &&
           model.encoder.voxel.value == VoxelValue::kCount);
}

Decision batch_infer(const Model& model, const EventStream& stream) {
  if (stream.empty()) throw DomainError("event ratio undefined: no events");
  const InputSpikes in = encode_stream(stream, model.encoder);
  check_model_input(model, in.shape);
  const Eigen::VectorXd z_out = forward_network<double>(model.net, in.z);
  auto d = decide(model, stream, z_out, in.first_time());
  d.events_consumed = stream.size();
  return d;
}

Decision stream_infer(const Model& model, const EventStream& stream,
                      const StreamOptions& options) {
  if (stream.empty()) throw DomainError("event ratio undefined: no events");
  if (!(options.check_ratio >= 1)) throw ConfigError("check_ratio must be >= 1");
  if (!supports_early_commit(model)) {
    return batch_infer(model, stream);
  }
  model.encoder.validate();
  const auto map = map_of(model);
  OnlineEncoder encoder(model.encoder, stream);
  check_model_input(model, encoder.shape());

  const Shape shape = encoder.shape();
  Eigen::VectorXd times = Eigen::VectorXd::Constant(shape.size(), kNoSpike);
  Eigen::VectorXd z = times;
  double first_input = kNoSpike;
  std::vector<SpikeRelease> released;
  std::size_t n_released = 0;
  std::size_t next_check = 1;
  bool dirty = false;
  Eigen::VectorXd z_out;
  double z_first_out = kNoSpike;

  auto absorb = [&] {
    for (const auto& s : released) {
      // Same arithmetic as normalize() so the values match batch encoding.
      const double t = model.encoder.t_norm == 0 ? s.t : map.to_network(s.t);
      times[s.neuron] = t;
      z[s.neuron] = std::exp(t);
      first_input = std::min(first_input, t);
      ++n_released;
      dirty = true;
    }
    released.clear();
  };
  auto run_prefix = [&] {
    z_out = forward_network<double>(model.net, z);
    z_first_out = z_out.size() ? z_out.minCoeff() : kNoSpike;
    dirty = false;
    next_check = static_cast<std::size_t>(
        std::ceil(static_cast<double>(n_released) * options.check_ratio));
    next_check = std::max(next_check, n_released + 1);
  };
  auto certain = [&] {
    const double bound = encoder.bound();
    if (!is_spike(bound)) return bound > 0;
    const double t_bound = model.encoder.t_norm == 0 ? bound : map.to_network(bound);
    return z_first_out < std::exp(t_bound);
  };

  for (std::size_t i = 0; i < stream.size(); ++i) {
    encoder.push(stream, i, released);
    absorb();
    if (dirty && n_released >= next_check) run_prefix();
    if (!dirty && is_spike(z_first_out) && certain()) {
      auto d = decide(model, stream, z_out, first_input);
      d.events_consumed = i + 1;
      return d;
    }
  }
  encoder.finish(released);
  absorb();
  if (dirty || z_out.size() == 0) run_prefix();
  auto d = decide(model, stream, z_out, first_input);
  d.events_consumed = stream.size();
  return d;
}

std::size_t Histogram::total() const {
  std::size_t n = undefined;
  for (auto c : counts) n += c;
  return n;
}

namespace {

Histogram make_histogram(const std::vector<double>& values, double lo, double hi, int bins) {
  Histogram h;
  if (!(hi > lo)) hi = lo + 1;
  for (int b = 0; b <= bins; ++b) h.edges.push_back(lo + (hi - lo) * b / bins);
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double v : values) {
    if (!std::isfinite(v)) {
      ++h.undefined;
      continue;
    }
    auto b = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
    b = std::clamp(b, 0, bins - 1);
    ++h.counts[static_cast<std::size_t>(b)];
  }
  return h;
}

bool same(double a, double b) {
  return a == b || (std::isnan(a) && std::isnan(b));
}

bool same_decision(const Decision& a, const Decision& b) {
  return a.predicted == b.predicted && a.fired == b.fired &&
         same(a.t_decision, b.t_decision) && same(a.t_decision_network, b.t_decision_network) &&
         a.n_contributing == b.n_contributing && a.n_all == b.n_all &&
         same(a.r_event, b.r_event) && same(a.ghat_time, b.ghat_time) &&
         same(a.ideal_delay, b.ideal_delay) && a.events_consumed == b.events_consumed;
}

bool same_histogram(const Histogram& a, const Histogram& b) {
  return a.edges == b.edges && a.counts == b.counts && a.undefined == b.undefined;
}

}  // namespace

bool operator==(const EvalReport& a, const EvalReport& b) {
  if (a.samples != b.samples || !same(a.accuracy, b.accuracy) ||
      a.per_class_count != b.per_class_count ||
      a.per_class_accuracy.size() != b.per_class_accuracy.size() ||
      !same(a.mean_r_event, b.mean_r_event) || !same(a.median_r_event, b.median_r_event) ||
      !same_histogram(a.r_event_histogram, b.r_event_histogram) ||
      !same_histogram(a.delay_histogram, b.delay_histogram) ||
      !same(a.ref_accuracy, b.ref_accuracy) || !same(a.g_acc, b.g_acc) ||
      a.decisions.size() != b.decisions.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.per_class_accuracy.size(); ++i) {
    if (!same(a.per_class_accuracy[i], b.per_class_accuracy[i])) return false;
  }
  for (std::size_t i = 0; i < a.decisions.size(); ++i) {
    if (!same_decision(a.decisions[i], b.decisions[i])) return false;
  }
  return true;
}

double accuracy_gain(double accuracy, double ref_accuracy) {
  if (!(ref_accuracy > 0)) throw DomainError("reference accuracy must be > 0");
  return (accuracy - ref_accuracy) / ref_accuracy;
}

EvalReport evaluate(const Model& model, std::span<const LabeledStream> data,
                    const EvalOptions& options) {
  if (data.empty()) throw DomainError("evaluate: empty dataset");
  if (options.bins < 1) throw ConfigError("histogram bins must be >= 1");
  const int classes = model.net.num_classes();
  for (const auto& s : data) {
    if (s.label < 0 || s.label >= classes) {
      throw DomainError("label " + std::to_string(s.label) + " out of range for '" +
                        s.name + "'");
    }
  }

  EvalReport r;
  r.samples = data.size();
  r.per_class_count.assign(static_cast<std::size_t>(classes), 0);
  std::vector<std::size_t> per_class_correct(static_cast<std::size_t>(classes), 0);
  std::size_t correct = 0;
  std::vector<double> ratios;
  std::vector<double> delays;
  for (const auto& s : data) {
    Decision d = options.mode == InferMode::kStream
                     ? stream_infer(model, s.stream, options.stream)
                     : batch_infer(model, s.stream);
    const auto c = static_cast<std::size_t>(s.label);
    ++r.per_class_count[c];
    if (d.predicted == s.label) {
      ++correct;
      ++per_class_correct[c];
    }
    ratios.push_back(d.r_event);
    delays.push_back(d.ideal_delay);
    r.decisions.push_back(d);
  }

  const auto n = static_cast<double>(data.size());
  r.accuracy = static_cast<double>(correct) / n;
  for (int c = 0; c < classes; ++c) {
    const auto k = static_cast<std::size_t>(c);
    r.per_class_accuracy.push_back(
        r.per_class_count[k] ? static_cast<double>(per_class_correct[k]) /
                                   static_cast<double>(r.per_class_count[k])
                             : std::numeric_limits<double>::quiet_NaN());
  }
  double sum = 0;
  for (double v : ratios) sum += v;
  r.mean_r_event = sum / n;
  auto sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  r.median_r_event = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  r.r_event_histogram = make_histogram(ratios, 0.0, 1.0, options.bins);
  double max_delay = 0;
  for (double v : delays) {
    if (std::isfinite(v)) max_delay = std::max(max_delay, v);
  }
  r.delay_histogram = make_histogram(delays, 0.0, max_delay, options.bins);
  r.ref_accuracy = options.ref_accuracy;
  r.g_acc = options.ref_accuracy > 0 ? accuracy_gain(r.accuracy, options.ref_accuracy)
                                     : std::numeric_limits<double>::quiet_NaN();
  return r;
}

std::string decision_csv_header() {
  return "class,t_decision,r_event,ghat,ideal_delay";
}

std::string decision_csv(const Decision& d) {
  using text::format_double;
  auto f = [](double v) { return std::isfinite(v) ? format_double(v) : std::string("nan"); };
  return std::to_string(d.predicted) + "," + f(d.t_decision) + "," + f(d.r_event) + "," +
         f(d.ghat_time) + "," + f(d.ideal_delay);
}

std::string report_csv(const EvalReport& r) {
  using text::format_double;
  std::string s = "metric,value\n";
  auto row = [&](const std::string& k, double v) {
    s += k + "," + (std::isnan(v) ? std::string("nan") : format_double(v)) + "\n";
  };
  row("samples", static_cast<double>(r.samples));
  row("accuracy", r.accuracy);
  row("mean_r_event", r.mean_r_event);
  row("median_r_event", r.median_r_event);
  row("mean_ghat_time", 1.0 - r.mean_r_event);
  row("ref_accuracy", r.ref_accuracy);
  row("g_acc", r.g_acc);
  for (std::size_t c = 0; c < r.per_class_accuracy.size(); ++c) {
    row("class_" + std::to_string(c) + "_accuracy", r.per_class_accuracy[c]);
  }
  return s;
}

std::string histogram_csv(const Histogram& h) {
  using text::format_double;
  std::string s = "bin_low,bin_high,count\n";
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    s += format_double(h.edges[b]) + "," + format_double(h.edges[b + 1]) + "," +
         std::to_string(h.counts[b]) + "\n";
  }
  s += "undefined,," + std::to_string(h.undefined) + "\n";
  return s;
}

}  // namespace tsnn
