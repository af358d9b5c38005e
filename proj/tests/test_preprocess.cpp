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
#include "tsnn/preprocess.hpp"

using namespace tsnn;

namespace {

VoxelGridConfig grid_10m() {
  VoxelGridConfig c;
  c.step = {1, 1, 1};
  c.dims = {10, 10, 2};
  c.origin = {0, 0, -1};
  c.light_speed = 3e8;
  return c;
}

}  // namespace

TEST_CASE("empty voxels hold zero and no arrival") {
  const auto g = voxelize(EventStream::lidar({}), grid_10m());
  CHECK(g.values.size() == 200);
  CHECK(g.values.isZero());
  for (int i = 0; i < 200; ++i) CHECK_FALSE(g.occupied(i));
}

TEST_CASE("voxel value is the round-trip flying time") {
  const auto g = voxelize(EventStream::lidar({{0.0, 3, 4, 0, 0}}), grid_10m());
  const int i = *voxel_index(g.config, 3, 4, 0);
  CHECK(i == (3 * 10 + 4) * 2 + 1);
  CHECK(g.values[i] == doctest::Approx(2.0 * 5.0 / 3e8).epsilon(1e-12));
  CHECK(g.values[i] == doctest::Approx(3.3333e-8).epsilon(1e-4));
  CHECK(*g.arrival[static_cast<std::size_t>(i)] == 0.0);
}

TEST_CASE("first arriving event sets the voxel") {
  const auto g =
      voxelize(EventStream::lidar({{0.5, 3.9, 4.9, 0.9, 0}, {0.2, 3.1, 4.1, 0.1, 0}}), grid_10m());
  const int i = *voxel_index(g.config, 3.5, 4.5, 0.5);
  CHECK(*g.arrival[static_cast<std::size_t>(i)] == 0.2);
  CHECK(g.values[i] ==
        doctest::Approx(2 * std::sqrt(3.1 * 3.1 + 4.1 * 4.1 + 0.1 * 0.1) / 3e8).epsilon(1e-12));
}

TEST_CASE("voxel membership is half-open") {
  const auto c = grid_10m();
  CHECK(*voxel_index(c, 1.0, 0.0, -1.0) == (1 * 10 + 0) * 2 + 0);
  CHECK(*voxel_index(c, 0.999999, 0.0, 0.0) == (0 * 10 + 0) * 2 + 1);
  CHECK_FALSE(voxel_index(c, 10.0, 0.0, 0.0).has_value());
  CHECK_FALSE(voxel_index(c, -0.001, 0.0, 0.0).has_value());
}

TEST_CASE("out-of-grid events are dropped and counted") {
  const auto g = voxelize(EventStream::lidar({{0, 50, 0, 0, 0}, {0, 1, 1, 0, 0}}), grid_10m());
  CHECK(g.dropped == 1);
  int occupied = 0;
  for (int i = 0; i < 200; ++i) occupied += g.occupied(i);
  CHECK(occupied == 1);
}

TEST_CASE("late duplicates do not change a grid") {
  std::vector<LidarEvent> ev{{0.1, 1.5, 2.5, 0.5, 0}, {0.3, 7.5, 2.5, -0.5, 0}};
  const auto a = voxelize(EventStream::lidar(ev), grid_10m());
  ev.push_back({0.9, 1.2, 2.2, 0.2, 0});
  ev.push_back({0.9, 7.1, 2.9, -0.9, 0});
  const auto b = voxelize(EventStream::lidar(ev), grid_10m());
  CHECK(a.values == b.values);
  CHECK(a.arrival == b.arrival);
}

TEST_CASE("voxelize rejects dvs streams") {
  CHECK_THROWS_AS(voxelize(EventStream::dvs(1, 1, PolarityConvention::kPlusMinusOne, {}),
                           grid_10m()),
                  KindError);
}

TEST_CASE("frame accumulation sums polarities inside the window") {
  const auto s = EventStream::dvs(2, 1, PolarityConvention::kPlusMinusOne,
                                  {{1, 0, 0, 1}, {2, 0, 0, 1}, {3, 0, 0, -1}});
  CHECK(accumulate_frame(s, 0, 4).values(0, 0) == 1);
  CHECK(accumulate_frame(s, 0, 2.5).values(0, 0) == 2);
  CHECK(accumulate_frame(s, 1, 3).values(0, 0) == 1);  // closed window
  CHECK(accumulate_frame(s, 0, 4).values(0, 1) == 0);

  const auto empty = EventStream::dvs(3, 2, PolarityConvention::kPlusMinusOne, {});
  CHECK(accumulate_frame(empty, 0, 1).values.isZero());
  CHECK_THROWS_AS(accumulate_frame(s, 2, 2), WindowError);
  CHECK_THROWS_AS(accumulate_frame(s, 3, 1), WindowError);
}

TEST_CASE("frame accumulation is additive across windows") {
  const auto s = EventStream::dvs(2, 2, PolarityConvention::kPlusMinusOne,
                                  {{0.1, 0, 0, 1},
                                   {0.4, 1, 1, 1},
                                   {0.5, 0, 0, -1},
                                   {0.8, 1, 0, 1},
                                   {0.9, 0, 0, 1}});
  const auto first = accumulate_frame(s, 0, 0.5);
  const auto second = accumulate_frame(s, 0.6, 1.0, first.values);
  CHECK(second.values == accumulate_frame(s, 0, 1.0).values);
}

TEST_CASE("front-view projection") {
  FrontViewConfig c;
  c.r_h = 0.01;
  c.r_v = 0.01;
  CHECK(project_front_view(1, 0, 0, c) == FrontViewIndex{0, 0});
  CHECK(project_front_view(1, 1, 0, c).x_front == -79);
  const auto up = project_front_view(1, 0, 0.3, c);
  const auto down = project_front_view(1, 0, -0.3, c);
  CHECK((up.y_front == -down.y_front || up.y_front == -down.y_front - 1));
  CHECK_THROWS_AS(project_front_view(0, 0, 0, c), DomainError);
}

TEST_CASE("grid and frame text containers round-trip") {
  const auto g = voxelize(
      EventStream::lidar({{0.1, 1.5, 2.5, 0.5, 0}, {0.3, 7.5, 2.5, -0.5, 0}}), grid_10m());
  const auto g2 = parse_grid(write_grid(g));
  CHECK(g2.values == g.values);
  CHECK(g2.arrival == g.arrival);

  const auto s = EventStream::dvs(3, 2, PolarityConvention::kPlusMinusOne,
                                  {{0.1, 2, 1, 1}, {0.2, 0, 0, -1}});
  const auto f = accumulate_frame(s, 0, 1);
  const auto f2 = parse_frame(write_frame(f));
  CHECK(f2.values == f.values);
  CHECK(f2.t0 == f.t0);
  CHECK(f2.t_k == f.t_k);
}
