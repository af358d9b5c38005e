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

// Asynchronous sensor events: LiDAR returns and DVS polarity events, the text
// event-file format, and synthetic generators for desk-scale experiments.
//
// Event file layout (UTF-8 text, '#' starts a comment after the header):
//
//   #sensor=lidar                                 rows: t_a,x,y,z,r
//   #sensor=dvs,w=<int>,h=<int>,polarity=pm1|01   rows: t,x,y,p

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsnn/common.hpp"

namespace tsnn {

enum class SensorKind { kLidar, kDvs };

// pm1: polarity written as -1/+1. 01: written as 0/1, with 0 meaning -1.
enum class PolarityConvention { kPlusMinusOne, kZeroOne };

struct LidarPoint {
  double x = 0, y = 0, z = 0;
  double r = 0;
};

struct LidarEvent {
  double t_a = 0;  // arrival time, seconds
  double x = 0, y = 0, z = 0;
  double r = 0;

  friend bool operator==(const LidarEvent&, const LidarEvent&) = default;
};

struct DvsEvent {
  double t = 0;
  int x = 0;
  int y = 0;
  int polarity = 1;  // always -1 or +1 once inside an EventStream

  friend bool operator==(const DvsEvent&, const DvsEvent&) = default;
};

// Immutable, time-sorted sequence of events from one sensor. Equal timestamps
// keep their original relative order.
class EventStream {
 public:
  EventStream() = default;

  // Both factories validate and stable-sort. Throw DomainError on negative or
  // non-finite times, out-of-bounds pixels, or invalid polarity.
  static EventStream lidar(std::vector<LidarEvent> events);
  static EventStream dvs(int width, int height, PolarityConvention convention,
                         std::vector<DvsEvent> events);

  SensorKind kind() const { return kind_; }
  int width() const { return width_; }
  int height() const { return height_; }
  PolarityConvention polarity_convention() const { return convention_; }

  std::span<const LidarEvent> lidar_events() const { return lidar_; }
  std::span<const DvsEvent> dvs_events() const { return dvs_; }

  std::size_t size() const {
    return kind_ == SensorKind::kLidar ? lidar_.size() : dvs_.size();
  }
  bool empty() const { return size() == 0; }
  double time(std::size_t i) const {
    return kind_ == SensorKind::kLidar ? lidar_[i].t_a : dvs_[i].t;
  }

  // Number of events with timestamp <= t.
  std::size_t count_until(double t) const;

  friend bool operator==(const EventStream&, const EventStream&) = default;

 private:
  SensorKind kind_ = SensorKind::kLidar;
  int width_ = 0;
  int height_ = 0;
  PolarityConvention convention_ = PolarityConvention::kPlusMinusOne;
  std::vector<LidarEvent> lidar_;
  std::vector<DvsEvent> dvs_;
};

// Throws ParseError naming the offending line.
EventStream parse_event_file(std::string_view content);

// Times are rendered in shortest round-trip form, so parsing the result
// reproduces the stream exactly.
std::string write_event_file(const EventStream& stream);

// Adds delta to every timestamp. Throws DomainError if a time would go
// negative.
EventStream shift_times(const EventStream& stream, double delta);

// Artificial arrival times growing linearly with x:
// t_a = t_start + rate * (x - min x). rate is seconds per meter and must be
// positive.
EventStream synth_lidar_arrivals(std::span<const LidarPoint> points,
                                 double t_start, double rate);

// DVS stand-in for a static image with intensities in [0, 255] (rows are y).
// A pixel of intensity v emits round(v * events_per_unit) positive events
// evenly spaced over [t0, t_k], offset by a per-pixel phase drawn from seed.
EventStream synth_events_from_image(
    const Eigen::Ref<const Eigen::MatrixXd>& image, double events_per_unit,
    double t0, double t_k, std::uint64_t seed);

}  // namespace tsnn
