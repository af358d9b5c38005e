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

// Event-driven inference.
//
// stream_infer feeds events one at a time through the online encoder. After
// each event every input spike earlier than a known bound L has been
// released, and no later input can move an output spike that lies before L.
// The engine therefore commits as soon as the earliest output spike of the
// released prefix is earlier than L. That spike equals the batch result
// bit for bit.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tsnn/events.hpp"
#include "tsnn/model_io.hpp"

namespace tsnn {

struct EventMetrics {
  double r_event = 1;
  double ghat_time = 0;
  double ideal_delay = kNoSpike;
};

// r_event = n_contributing / n_all, ghat_time = 1 - r_event, ideal delay =
// t_decision - t_first_input. Throws DomainError when n_all is 0.
EventMetrics event_metrics(std::size_t n_contributing, std::size_t n_all,
                           double t_decision, double t_first_input);

struct Decision {
  int predicted = 0;
  bool fired = false;         // some output neuron spiked
  double t_decision = kNoSpike;          // sensor seconds
  double t_decision_network = kNoSpike;  // network time
  std::size_t n_contributing = 0;        // events with timestamp <= t_decision
  std::size_t n_all = 0;
  double r_event = 1;
  double ghat_time = 0;
  double ideal_delay = kNoSpike;  // sensor seconds
  std::size_t events_consumed = 0;  // events read before the engine committed
};

struct StreamOptions {
  // Prefix forward passes run when the released spike count has grown by
  // this factor since the last pass.
  double check_ratio = 1.25;
};

// Whether stream_infer can commit before the end of the stream. Average
// pooling and count-valued voxels are not monotone in late inputs, so those
// models are evaluated once the stream is exhausted.
bool supports_early_commit(const Model& model);

Decision stream_infer(const Model& model, const EventStream& stream,
                      const StreamOptions& options = {});
Decision batch_infer(const Model& model, const EventStream& stream);

struct LabeledStream {
  std::string name;
  EventStream stream;
  int label = 0;
};

struct Histogram {
  std::vector<double> edges;  // bins + 1 edges
  std::vector<std::size_t> counts;
  std::size_t undefined = 0;  // samples with no value (no output spike)

  std::size_t total() const;
};

struct EvalReport {
  std::size_t samples = 0;
  double accuracy = 0;
  std::vector<double> per_class_accuracy;  // NaN for classes without samples
  std::vector<std::size_t> per_class_count;
  double mean_r_event = 0;
  double median_r_event = 0;
  Histogram r_event_histogram;
  Histogram delay_histogram;
  double ref_accuracy = 0;  // 0 when not supplied
  double g_acc = 0;         // (accuracy - ref) / ref; NaN without a reference
  std::vector<Decision> decisions;

  friend bool operator==(const EvalReport&, const EvalReport&);
};

enum class InferMode { kStream, kBatch };

struct EvalOptions {
  InferMode mode = InferMode::kStream;
  StreamOptions stream;
  double ref_accuracy = 0;
  int bins = 10;
};

// Throws DomainError on an empty dataset or an out-of-range label.
EvalReport evaluate(const Model& model, std::span<const LabeledStream> data,
                    const EvalOptions& options = {});

double accuracy_gain(double accuracy, double ref_accuracy);

std::string decision_csv_header();
std::string decision_csv(const Decision& d);
std::string report_csv(const EvalReport& report);
std::string histogram_csv(const Histogram& h);

}  // namespace tsnn
