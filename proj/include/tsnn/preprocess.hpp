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

// Spatial representations built from event streams: LiDAR voxel grids keyed
// by first arrival, DVS exposure frames, and the LiDAR front-view projection.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsnn/common.hpp"
#include "tsnn/events.hpp"

namespace tsnn {

inline constexpr double kSpeedOfLight = 299792458.0;

// What a voxel stores. Only kFlyingTime follows the first-arrival rule; the
// others are kept for experimentation.
enum class VoxelValue { kFlyingTime, kDistance, kIntensity, kCount };

struct VoxelGridConfig {
  std::array<double, 3> step{1.0, 1.0, 1.0};  // meters per voxel along x, y, z
  std::array<int, 3> dims{1, 1, 1};           // voxels along x, y, z
  std::array<double, 3> origin{0.0, 0.0, 0.0};
  double light_speed = kSpeedOfLight;
  VoxelValue value = VoxelValue::kFlyingTime;

  void validate() const;
  // Voxel (x_v, y_v, z_v) is input neuron (x_v * dims[1] + y_v) * dims[2] + z_v.
  Shape shape() const { return {dims[0], dims[1], dims[2]}; }
};

// D is zero exactly where no event landed; arrival holds the earliest t_a.
struct VoxelGrid {
  VoxelGridConfig config;
  Eigen::VectorXd values;                    // D, flattened per config.shape()
  std::vector<std::optional<double>> arrival;  // A
  std::size_t dropped = 0;                   // events outside the grid

  bool occupied(int i) const { return arrival[static_cast<std::size_t>(i)].has_value(); }
  Shape shape() const { return config.shape(); }
};

struct Frame {
  int width = 0;
  int height = 0;
  Eigen::MatrixXi values;   // D(y, x)
  Eigen::MatrixXi initial;  // I(y, x)
  double t0 = 0;
  double t_k = 0;

  Shape shape() const { return {height, width, 1}; }
};

struct FrontViewConfig {
  double r_h = 0.08 * 3.14159265358979323846 / 180.0;  // radians per column
  double r_v = 0.4 * 3.14159265358979323846 / 180.0;   // radians per row

  void validate() const;
};

// Window of the front-view plane kept for recognition; defaults to the
// 50 x 118 object crop.
struct FrontViewCrop {
  int x_begin = 0;  // first x_front column
  int y_begin = 0;  // first y_front row
  int width = 118;
  int height = 50;
};

struct FrontViewIndex {
  int x_front = 0;
  int y_front = 0;
  friend bool operator==(const FrontViewIndex&, const FrontViewIndex&) = default;
};

// Half-open voxel membership; the first arriving event in a voxel sets D and
// A. Throws KindError for non-LiDAR streams.
VoxelGrid voxelize(const EventStream& stream, const VoxelGridConfig& config);

// Returns the flat voxel index of a point, or nullopt when outside the grid.
std::optional<int> voxel_index(const VoxelGridConfig& config, double x,
                               double y, double z);

// Value a voxel gets from a single event under config.value.
double voxel_value(const VoxelGridConfig& config, const LidarEvent& e);

// D = I + sum of polarities with t0 <= t <= t_k. An empty `initial` means
// zeros. Throws WindowError when t0 >= t_k, KindError for non-DVS streams.
Frame accumulate_frame(const EventStream& stream, double t0, double t_k,
                       const Eigen::MatrixXi& initial = {});

// x_front = floor(-atan2(y, x) / R_h), y_front = floor(-atan(z / hypot(x, y)) / R_v).
// Throws DomainError when (x, y) = (0, 0).
FrontViewIndex project_front_view(double x, double y, double z,
                                  const FrontViewConfig& config);

// Projects a LiDAR stream onto the front view and keeps the crop as a
// height x width x 1 grid with first-arrival flying-time values.
VoxelGrid front_view_grid(const EventStream& stream,
                          const FrontViewConfig& config,
                          const FrontViewCrop& crop,
                          double light_speed = kSpeedOfLight);

// Text containers for golden files. Grid: "#grid,..." header, one D per line
// in flat order, then "#arrival" and one A per line ('-' when absent).
// Frame: "#frame,..." header, height rows of D, then "#initial" and I.
std::string write_grid(const VoxelGrid& grid);
VoxelGrid parse_grid(std::string_view content);
std::string write_frame(const Frame& frame);
Frame parse_frame(std::string_view content);

}  // namespace tsnn
