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


#include <cmath>

#include "doctest.h"
#include "tsnn/events.hpp"

using namespace tsnn;

TEST_CASE("parse a single dvs event") {
  const auto s = parse_event_file("#sensor=dvs,w=2,h=2,polarity=pm1\n0.5,1,0,+1\n");
  REQUIRE(s.kind() == SensorKind::kDvs);
  REQUIRE(s.size() == 1);
  CHECK(s.dvs_events()[0] == DvsEvent{0.5, 1, 0, 1});
  CHECK(s.width() == 2);
  CHECK(s.height() == 2);
}

TEST_CASE("header-only file gives an empty stream") {
  CHECK(parse_event_file("#sensor=dvs,w=4,h=3,polarity=01\n").empty());
  CHECK(parse_event_file("#sensor=lidar\n").empty());
}

TEST_CASE("parsed events are sorted by time, stable on ties") {
  const auto s = parse_event_file(
      "#sensor=dvs,w=4,h=1,polarity=pm1\n0.3,0,0,1\n0.1,1,0,1\n0.3,2,0,-1\n0.1,3,0,1\n");
  const auto e = s.dvs_events();
  REQUIRE(e.size() == 4);
  CHECK(e[0].x == 1);
  CHECK(e[1].x == 3);
  CHECK(e[2].x == 0);
  CHECK(e[3].x == 2);
}

TEST_CASE("zero-one polarity maps 0 to -1") {
  const auto s = parse_event_file("#sensor=dvs,w=1,h=1,polarity=01\n0,0,0,0\n1,0,0,1\n");
  CHECK(s.dvs_events()[0].polarity == -1);
  CHECK(s.dvs_events()[1].polarity == 1);
}

TEST_CASE("comments and blank lines are ignored") {
  const auto s = parse_event_file("#sensor=lidar\n# a comment\n\n1,2,3,4,0.5 # trailing\n");
  REQUIRE(s.size() == 1);
  CHECK(s.lidar_events()[0] == LidarEvent{1, 2, 3, 4, 0.5});
}

TEST_CASE("malformed event files are rejected with the line number") {
  auto line_of = [](const char* text) {
    try {
      parse_event_file(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  CHECK(line_of("#sensor=radar\n") == 1);
  CHECK(line_of("0.1,0,0,1\n") == 1);
  CHECK(line_of("#sensor=dvs,w=2,h=2,polarity=pm1\n0.1,0,0,1\n0.2,x,0,1\n") == 3);
  CHECK(line_of("#sensor=dvs,w=2,h=2,polarity=pm1\n0.1,0,0,2\n") == 2);
  CHECK(line_of("#sensor=dvs,w=2,h=2,polarity=01\n0.1,0,0,-1\n") == 2);
  CHECK(line_of("#sensor=dvs,w=2,h=2,polarity=pm1\n-0.1,0,0,1\n") == 2);
  CHECK(line_of("#sensor=dvs,w=2,h=2,polarity=pm1\n0.1,2,0,1\n") == 2);
  CHECK(line_of("#sensor=lidar\n0.1,0,0\n") == 2);
}

TEST_CASE("event files round-trip exactly") {
  const auto dvs = EventStream::dvs(3, 2, PolarityConvention::kPlusMinusOne,
                                    {{0.1, 0, 0, 1}, {1.0 / 3.0, 2, 1, -1}, {0.7, 1, 1, 1}});
  CHECK(parse_event_file(write_event_file(dvs)) == dvs);

  const auto lidar =
      EventStream::lidar({{0.0, 1.5, -2.25, 0.1, 0.0}, {std::nextafter(1.0, 2.0), 3, 4, 5, 0.25}});
  const auto back = parse_event_file(write_event_file(lidar));
  CHECK(back == lidar);
  CHECK(back.lidar_events()[0].r == 0.0);

  const auto empty = EventStream::dvs(4, 4, PolarityConvention::kZeroOne, {});
  const auto text = write_event_file(empty);
  CHECK(text.find('\n') == text.size() - 1);
  CHECK(parse_event_file(text) == empty);
}

TEST_CASE("count_until counts events at or before t") {
  const auto s = EventStream::dvs(1, 1, PolarityConvention::kPlusMinusOne,
                                  {{0.1, 0, 0, 1}, {0.2, 0, 0, 1}, {0.2, 0, 0, 1}, {0.5, 0, 0, 1}});
  CHECK(s.count_until(0.0) == 0);
  CHECK(s.count_until(0.2) == 3);
  CHECK(s.count_until(1.0) == 4);
}

TEST_CASE("shift_times moves every timestamp") {
  const auto s = EventStream::lidar({{0.5, 1, 0, 0, 0}, {1.0, 2, 0, 0, 0}});
  const auto t = shift_times(s, 2.0);
  CHECK(t.lidar_events()[0].t_a == 2.5);
  CHECK(t.lidar_events()[1].t_a == 3.0);
  CHECK_THROWS_AS(shift_times(s, -1.0), DomainError);
}

TEST_CASE("synthetic lidar arrivals grow linearly with x") {
  const std::vector<LidarPoint> pts{{2, 0, 0, 0}, {0, 1, 0, 0}, {1, 0, 0, 0}};
  const auto s = synth_lidar_arrivals(pts, 0.0, 0.01);
  REQUIRE(s.size() == 3);
  CHECK(s.lidar_events()[0].t_a == 0.0);
  CHECK(s.lidar_events()[1].t_a == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(s.lidar_events()[2].t_a == doctest::Approx(0.02).epsilon(1e-15));

  const auto doubled = synth_lidar_arrivals(pts, 0.0, 0.02);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(doubled.lidar_events()[i].t_a == 2 * s.lidar_events()[i].t_a);
  }

  const std::vector<LidarPoint> one{{5, 5, 5, 1}};
  CHECK(synth_lidar_arrivals(one, 3.0, 1.0).lidar_events()[0].t_a == 3.0);

  const std::vector<LidarPoint> tie{{1, 0, 0, 0}, {1, 9, 0, 0}};
  const auto t = synth_lidar_arrivals(tie, 0.0, 1.0);
  CHECK(t.lidar_events()[0].t_a == t.lidar_events()[1].t_a);
  CHECK(t.lidar_events()[0].y == 0);
  CHECK(t.lidar_events()[1].y == 9);

  CHECK(synth_lidar_arrivals({}, 0.0, 1.0).empty());
  CHECK_THROWS_AS(synth_lidar_arrivals(one, 0.0, 0.0), DomainError);
}

TEST_CASE("synthetic image events") {
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(3, 3);
  CHECK(synth_events_from_image(zero, 4.0 / 255, 0, 1, 1).empty());

  Eigen::MatrixXd img = Eigen::MatrixXd::Zero(2, 3);
  img(1, 2) = 255;
  const auto s = synth_events_from_image(img, 4.0 / 255, 0, 1, 7);
  REQUIRE(s.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(s.dvs_events()[i].x == 2);
    CHECK(s.dvs_events()[i].y == 1);
    CHECK(s.dvs_events()[i].polarity == 1);
    CHECK(s.time(i) >= 0.0);
    CHECK(s.time(i) <= 1.0);
  }
  for (std::size_t i = 1; i + 1 < 4; ++i) {
    CHECK(s.time(i + 1) - s.time(i) == doctest::Approx(s.time(i) - s.time(i - 1)));
  }
  CHECK(synth_events_from_image(img, 4.0 / 255, 0, 1, 7) == s);

  Eigen::MatrixXd brighter = img;
  brighter(0, 0) = 100;
  std::size_t before = 0;
  for (int v = 0; v <= 255; v += 15) {
    brighter(0, 0) = v;
    const auto e = synth_events_from_image(brighter, 10.0 / 255, 0, 1, 3);
    std::size_t n = 0;
    for (const auto& ev : e.dvs_events()) n += ev.x == 0 && ev.y == 0;
    CHECK(n >= before);
    before = n;
  }
}
