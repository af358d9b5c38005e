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


#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "support.hpp"
#include "tsnn/runtime.hpp"

using namespace tsnn;
using tsnn::testing::random_dvs_model;
using tsnn::testing::random_dvs_stream;
using tsnn::testing::random_lidar_model;
using tsnn::testing::random_lidar_stream;

namespace {

void check_same_decision(const Decision& s, const Decision& b) {
  REQUIRE(s.fired == b.fired);
  CHECK(s.predicted == b.predicted);
  if (b.fired) {
    CHECK(s.t_decision_network == b.t_decision_network);
    CHECK(s.t_decision == b.t_decision);
    CHECK(s.n_contributing == b.n_contributing);
  }
  CHECK(s.n_all == b.n_all);
}

}  // namespace

TEST_CASE("event metrics") {
  const auto m = event_metrics(76, 100, 2.3, 0.4);
  CHECK(m.r_event == 0.76);
  CHECK(m.ghat_time == 1 - 0.76);
  CHECK(m.ideal_delay == doctest::Approx(1.9).epsilon(1e-15));
  CHECK(event_metrics(38, 100, 1, 0).ghat_time == 1 - 0.38);
  CHECK(event_metrics(5, 5, 1, 0).ghat_time == 0);
  CHECK_THROWS_AS(event_metrics(0, 0, 1, 0), DomainError);
}

TEST_CASE("relative accuracy gain") {
  CHECK(accuracy_gain(0.966, 0.916) == doctest::Approx(0.0546).epsilon(1e-3));
  CHECK(accuracy_gain(0.5, 0.5) == 0);
}

TEST_CASE("streaming matches batch on DVS models") {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 40; ++k) {
    const auto model = random_dvs_model(rng, 8, 8, k % 2 == 0);
    const auto stream = random_dvs_stream(rng, 8, 8, 20 + static_cast<int>(rng() % 200));
    CAPTURE(k);
    check_same_decision(stream_infer(model, stream), batch_infer(model, stream));
  }
}

TEST_CASE("streaming matches batch on LiDAR models") {
  std::mt19937_64 rng(32);
  for (int k = 0; k < 40; ++k) {
    const auto model = random_lidar_model(rng);
    const auto stream = random_lidar_stream(rng, 5 + static_cast<int>(rng() % 60), 4);
    CAPTURE(k);
    check_same_decision(stream_infer(model, stream), batch_infer(model, stream));
  }
}

TEST_CASE("streaming commits early on some samples") {
  std::mt19937_64 rng(33);
  int early = 0;
  for (int k = 0; k < 30; ++k) {
    const auto model = random_dvs_model(rng, 8, 8, false);
    const auto stream = random_dvs_stream(rng, 8, 8, 300);
    const auto d = stream_infer(model, stream);
    CHECK(d.events_consumed <= d.n_all);
    CHECK(d.n_contributing <= d.n_all);
    if (d.fired && d.events_consumed < d.n_all) ++early;
  }
  CHECK(early > 0);
}

TEST_CASE("the events before the decision reproduce it") {
  std::mt19937_64 rng(34);
  for (int k = 0; k < 30; ++k) {
    const auto model = random_dvs_model(rng, 8, 8, false);
    const auto stream = random_dvs_stream(rng, 8, 8, 150);
    const auto d = stream_infer(model, stream);
    if (!d.fired) continue;
    const auto ev = stream.dvs_events();
    std::vector<DvsEvent> prefix(ev.begin(), ev.begin() + d.n_contributing);
    const auto head = EventStream::dvs(8, 8, PolarityConvention::kPlusMinusOne, prefix);
    const auto again = batch_infer(model, head);
    REQUIRE(again.fired);
    CHECK(again.predicted == d.predicted);
    CHECK(again.t_decision_network == d.t_decision_network);
    CHECK(again.r_event == 1);
  }
}

TEST_CASE("a decision after the last event has r_event 1") {
  Model m;
  m.encoder.sensor = SensorKind::kDvs;
  m.encoder.alpha = 1;
  m.encoder.t_norm = 0;
  m.normalization = m.encoder.normalization();
  m.net.input = {1, 1, 1};
  m.net.add_dense(1);
  m.net.layers[0].weights.setConstant(1, 1, 2.0);
  const auto s = EventStream::dvs(1, 1, PolarityConvention::kPlusMinusOne,
                                  {{0.1, 0, 0, 1}, {0.2, 0, 0, 1}});
  const auto d = stream_infer(m, s);
  REQUIRE(d.fired);
  CHECK(d.t_decision > 0.2);
  CHECK(d.r_event == 1);
  CHECK(d.ghat_time == 0);
  CHECK(d.ideal_delay == doctest::Approx(d.t_decision - 0.1));
}

TEST_CASE("shifting the stream keeps the class") {
  std::mt19937_64 rng(35);
  for (int k = 0; k < 20; ++k) {
    auto model = random_dvs_model(rng, 8, 8, false);
    model.encoder.t_norm = 0;
    model.normalization = model.encoder.normalization();
    const auto stream = random_dvs_stream(rng, 8, 8, 120);
    const auto a = batch_infer(model, stream);
    auto moved = model;
    moved.encoder.t0 += 0.5;
    moved.encoder.t_k += 0.5;
    moved.normalization = moved.encoder.normalization();
    const auto b = batch_infer(moved, shift_times(stream, 0.5));
    REQUIRE(a.fired == b.fired);
    CHECK(a.predicted == b.predicted);
    if (a.fired) {
      CHECK(b.t_decision == doctest::Approx(a.t_decision + 0.5).epsilon(1e-9));
      CHECK(b.n_contributing == a.n_contributing);
    }
  }
}

TEST_CASE("bad stream options and empty streams") {
  std::mt19937_64 rng(36);
  const auto model = random_dvs_model(rng, 4, 4, false);
  const auto stream = random_dvs_stream(rng, 4, 4, 10);
  StreamOptions opt;
  opt.check_ratio = 0.5;
  CHECK_THROWS_AS(stream_infer(model, stream, opt), ConfigError);
  const auto empty = EventStream::dvs(4, 4, PolarityConvention::kPlusMinusOne, {});
  CHECK_THROWS_AS(stream_infer(model, empty), DomainError);
  CHECK_THROWS_AS(batch_infer(model, empty), DomainError);
  const auto wrong = random_dvs_stream(rng, 5, 4, 10);
  CHECK_THROWS_AS(batch_infer(model, wrong), ShapeError);
}

TEST_CASE("evaluate aggregates decisions") {
  std::mt19937_64 rng(37);
  const auto model = random_dvs_model(rng, 8, 8, false);
  std::vector<LabeledStream> data;
  for (int k = 0; k < 25; ++k) {
    auto s = random_dvs_stream(rng, 8, 8, 100);
    const int label = batch_infer(model, s).predicted;
    data.push_back({"s" + std::to_string(k), std::move(s), label});
  }
  EvalOptions opt;
  opt.ref_accuracy = 0.8;
  const auto report = evaluate(model, data, opt);
  CHECK(report.samples == 25);
  CHECK(report.accuracy == 1.0);
  CHECK(report.g_acc == doctest::Approx(0.25));
  CHECK(report.decisions.size() == 25);
  CHECK(report.r_event_histogram.total() == 25);
  CHECK(report.delay_histogram.total() == 25);
  CHECK(report.r_event_histogram.counts.size() == 10);
  CHECK(report.r_event_histogram.edges.size() == 11);
  double sum = 0;
  for (const auto& d : report.decisions) sum += d.r_event;
  CHECK(report.mean_r_event == doctest::Approx(sum / 25));
  CHECK(report.per_class_count.size() == 4);
  CHECK(std::isnan(evaluate(model, data).g_acc));

  const auto batch = [&] {
    EvalOptions b;
    b.mode = InferMode::kBatch;
    b.ref_accuracy = 0.8;
    return evaluate(model, data, b);
  }();
  CHECK(batch.accuracy == report.accuracy);

  data[3].label = 4;
  CHECK_THROWS_AS(evaluate(model, data), DomainError);
  CHECK_THROWS_AS(evaluate(model, std::span<const LabeledStream>{}), DomainError);
}

TEST_CASE("csv renderings") {
  Decision d;
  d.predicted = 3;
  d.fired = true;
  d.t_decision = 0.5;
  d.n_contributing = 4;
  d.n_all = 8;
  d.r_event = 0.5;
  d.ghat_time = 0.5;
  const auto header = decision_csv_header();
  const auto row = decision_csv(d);
  const auto cols = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
  CHECK(cols(header) == cols(row));
  CHECK(row.rfind("3,", 0) == 0);

  Histogram h;
  h.edges = {0, 0.5, 1};
  h.counts = {2, 3};
  h.undefined = 1;
  CHECK(h.total() == 6);
  const auto text = histogram_csv(h);
  CHECK(text.find("0.5") != std::string::npos);
}
