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

#include "tsnn/preprocess.hpp"

#include <cmath>
#include <map>

#include "text_util.hpp"

namespace tsnn {

void VoxelGridConfig::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (!(step[a] > 0) || !std::isfinite(step[a])) {
      throw DomainError("voxel step sizes must be positive");
    }
    if (dims[a] < 1) throw DomainError("voxel grid dims must be >= 1");
    if (!std::isfinite(origin[a])) throw DomainError("voxel origin must be finite");
  }
  if (!(light_speed > 0)) throw DomainError("light speed must be positive");
}

void FrontViewConfig::validate() const {
  if (!(r_h > 0) || !(r_v > 0)) {
    throw DomainError("front-view angular resolutions must be positive");
  }
}

std::optional<int> voxel_index(const VoxelGridConfig& config, double x,
                               double y, double z) {
  const std::array<double, 3> p{x, y, z};
  std::array<int, 3> v{};
  for (int a = 0; a < 3; ++a) {
    const double q = std::floor((p[a] - config.origin[a]) / config.step[a]);
    if (!(q >= 0) || q >= config.dims[a]) return std::nullopt;
    v[a] = static_cast<int>(q);
  }
  return (v[0] * config.dims[1] + v[1]) * config.dims[2] + v[2];
}

double voxel_value(const VoxelGridConfig& config, const LidarEvent& e) {
  const double dist = std::sqrt(e.x * e.x + e.y * e.y + e.z * e.z);
  switch (config.value) {
    case VoxelValue::kFlyingTime:
      return 2.0 * dist / config.light_speed;
    case VoxelValue::kDistance:
      return dist;
    case VoxelValue::kIntensity:
      return e.r;
    case VoxelValue::kCount:
      return 1.0;
  }
  return 0.0;
}

VoxelGrid voxelize(const EventStream& stream, const VoxelGridConfig& config) {
  if (stream.kind() != SensorKind::kLidar) {
    throw KindError("voxelize needs a lidar stream");
  }
  config.validate();
  const int n = config.shape().size();
  VoxelGrid grid;
  grid.config = config;
  grid.values = Eigen::VectorXd::Zero(n);
  grid.arrival.assign(static_cast<std::size_t>(n), std::nullopt);

  for (const auto& e : stream.lidar_events()) {
    const auto idx = voxel_index(config, e.x, e.y, e.z);
    if (!idx) {
      ++grid.dropped;
      continue;
    }
    auto& arrival = grid.arrival[static_cast<std::size_t>(*idx)];
    if (config.value == VoxelValue::kCount) {
      grid.values[*idx] += 1.0;
      if (!arrival) arrival = e.t_a;
      continue;
    }
    if (arrival) continue;  // first arrival wins
    arrival = e.t_a;
    grid.values[*idx] = voxel_value(config, e);
  }
  return grid;
}

Frame accumulate_frame(const EventStream& stream, double t0, double t_k,
                       const Eigen::MatrixXi& initial) {
  if (stream.kind() != SensorKind::kDvs) {
    throw KindError("accumulate_frame needs a dvs stream");
  }
  if (!(t0 < t_k)) throw WindowError("exposure window needs t0 < t_k");
  Frame f;
  f.width = stream.width();
  f.height = stream.height();
  f.t0 = t0;
  f.t_k = t_k;
  if (initial.size() == 0) {
    f.initial = Eigen::MatrixXi::Zero(f.height, f.width);
  } else {
    if (initial.rows() != f.height || initial.cols() != f.width) {
      throw ShapeError("initial image does not match sensor size");
    }
    f.initial = initial;
  }
  f.values = f.initial;
  for (const auto& e : stream.dvs_events()) {
    if (e.t < t0) continue;
    if (e.t > t_k) break;
    f.values(e.y, e.x) += e.polarity;
  }
  return f;
}

FrontViewIndex project_front_view(double x, double y, double z,
                                  const FrontViewConfig& config) {
  config.validate();
  if (x == 0 && y == 0) {
    throw DomainError("front-view azimuth undefined for x = y = 0");
  }
  const double azimuth = std::atan2(y, x);
  const double elevation = std::atan(z / std::hypot(x, y));
  return {static_cast<int>(std::floor(-azimuth / config.r_h)),
          static_cast<int>(std::floor(-elevation / config.r_v))};
}

VoxelGrid front_view_grid(const EventStream& stream,
                          const FrontViewConfig& config,
                          const FrontViewCrop& crop, double light_speed) {
  if (stream.kind() != SensorKind::kLidar) {
    throw KindError("front_view_grid needs a lidar stream");
  }
  if (crop.width < 1 || crop.height < 1) throw DomainError("empty crop");
  VoxelGridConfig gc;
  gc.dims = {crop.height, crop.width, 1};
  gc.light_speed = light_speed;
  gc.validate();

  VoxelGrid grid;
  grid.config = gc;
  grid.values = Eigen::VectorXd::Zero(gc.shape().size());
  grid.arrival.assign(static_cast<std::size_t>(gc.shape().size()), std::nullopt);
  for (const auto& e : stream.lidar_events()) {
    if (e.x == 0 && e.y == 0) {
      ++grid.dropped;
      continue;
    }
    const auto p = project_front_view(e.x, e.y, e.z, config);
    const int row = p.y_front - crop.y_begin;
    const int col = p.x_front - crop.x_begin;
    if (row < 0 || row >= crop.height || col < 0 || col >= crop.width) {
      ++grid.dropped;
      continue;
    }
    const int idx = row * crop.width + col;
    auto& arrival = grid.arrival[static_cast<std::size_t>(idx)];
    if (arrival) continue;
    arrival = e.t_a;
    grid.values[idx] = voxel_value(gc, e);
  }
  return grid;
}

namespace {

const char* value_name(VoxelValue v) {
  switch (v) {
    case VoxelValue::kFlyingTime: return "flying_time";
    case VoxelValue::kDistance: return "distance";
    case VoxelValue::kIntensity: return "intensity";
    case VoxelValue::kCount: return "count";
  }
  return "flying_time";
}

std::map<std::string, std::string, std::less<>> header_fields(
    std::size_t line_no, std::string_view line, std::string_view tag) {
  line = text::trim(line);
  const std::string prefix = "#" + std::string(tag);
  if (line.substr(0, prefix.size()) != prefix) {
    throw ParseError(line_no, "expected '" + prefix + "' header");
  }
  line.remove_prefix(prefix.size());
  std::map<std::string, std::string, std::less<>> out;
  for (const auto field : text::split(line, ',')) {
    if (field.empty()) continue;
    const auto eq = field.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "field without '='");
    out.emplace(std::string(text::trim(field.substr(0, eq))),
                std::string(text::trim(field.substr(eq + 1))));
  }
  return out;
}

template <typename Map>
double need_double(const Map& m, std::string_view key, std::size_t line_no) {
  const auto it = m.find(key);
  if (it == m.end()) throw ParseError(line_no, "missing " + std::string(key));
  const auto v = text::parse_double(it->second);
  if (!v) throw ParseError(line_no, "bad value for " + std::string(key));
  return *v;
}

template <typename Map>
long long need_int(const Map& m, std::string_view key, std::size_t line_no) {
  const auto it = m.find(key);
  if (it == m.end()) throw ParseError(line_no, "missing " + std::string(key));
  const auto v = text::parse_int(it->second);
  if (!v) throw ParseError(line_no, "bad value for " + std::string(key));
  return *v;
}

// Non-empty, non-comment lines with their numbers.
std::vector<std::pair<std::size_t, std::string_view>> content_lines(
    std::string_view content) {
  std::vector<std::pair<std::size_t, std::string_view>> lines;
  text::for_each_line(content, [&](std::size_t n, std::string_view l) {
    l = text::trim(l);
    if (!l.empty()) lines.emplace_back(n, l);
  });
  return lines;
}

}  // namespace

std::string write_grid(const VoxelGrid& grid) {
  const auto& c = grid.config;
  std::string out = "#grid,nx=" + std::to_string(c.dims[0]) +
                    ",ny=" + std::to_string(c.dims[1]) +
                    ",nz=" + std::to_string(c.dims[2]);
  const char* names[] = {"dx", "dy", "dz", "ox", "oy", "oz"};
  for (int a = 0; a < 3; ++a) {
    out += std::string(",") + names[a] + "=" + text::format_double(c.step[a]);
  }
  for (int a = 0; a < 3; ++a) {
    out += std::string(",") + names[3 + a] + "=" + text::format_double(c.origin[a]);
  }
  out += ",c=" + text::format_double(c.light_speed) +
         ",value=" + value_name(c.value) +
         ",dropped=" + std::to_string(grid.dropped) + "\n";
  for (Eigen::Index i = 0; i < grid.values.size(); ++i) {
    out += text::format_double(grid.values[i]) + "\n";
  }
  out += "#arrival\n";
  for (const auto& a : grid.arrival) {
    out += a ? text::format_double(*a) + "\n" : std::string("-\n");
  }
  return out;
}

VoxelGrid parse_grid(std::string_view content) {
  const auto lines = content_lines(content);
  if (lines.empty()) throw ParseError(1, "empty grid file");
  const auto h = header_fields(lines[0].first, lines[0].second, "grid");
  const auto ln = lines[0].first;
  VoxelGrid g;
  g.config.dims = {static_cast<int>(need_int(h, "nx", ln)),
                   static_cast<int>(need_int(h, "ny", ln)),
                   static_cast<int>(need_int(h, "nz", ln))};
  g.config.step = {need_double(h, "dx", ln), need_double(h, "dy", ln),
                   need_double(h, "dz", ln)};
  g.config.origin = {need_double(h, "ox", ln), need_double(h, "oy", ln),
                     need_double(h, "oz", ln)};
  g.config.light_speed = need_double(h, "c", ln);
  const auto vit = h.find("value");
  if (vit == h.end()) throw ParseError(ln, "missing value");
  if (vit->second == "flying_time") {
    g.config.value = VoxelValue::kFlyingTime;
  } else if (vit->second == "distance") {
    g.config.value = VoxelValue::kDistance;
  } else if (vit->second == "intensity") {
    g.config.value = VoxelValue::kIntensity;
  } else if (vit->second == "count") {
    g.config.value = VoxelValue::kCount;
  } else {
    throw ParseError(ln, "unknown voxel value kind");
  }
  g.dropped = static_cast<std::size_t>(need_int(h, "dropped", ln));
  try {
    g.config.validate();
  } catch (const DomainError& e) {
    throw ParseError(ln, e.what());
  }

  const auto n = static_cast<std::size_t>(g.config.shape().size());
  if (lines.size() != 2 * n + 2) throw ParseError(ln, "grid body has wrong length");
  g.values.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = text::parse_double(lines[1 + i].second);
    if (!v) throw ParseError(lines[1 + i].first, "non-numeric voxel value");
    g.values[static_cast<Eigen::Index>(i)] = *v;
  }
  if (lines[n + 1].second != "#arrival") {
    throw ParseError(lines[n + 1].first, "expected '#arrival'");
  }
  g.arrival.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& [line_no, s] = lines[n + 2 + i];
    if (s == "-") continue;
    const auto v = text::parse_double(s);
    if (!v) throw ParseError(line_no, "non-numeric arrival");
    g.arrival[i] = *v;
  }
  return g;
}

std::string write_frame(const Frame& frame) {
  std::string out = "#frame,w=" + std::to_string(frame.width) +
                    ",h=" + std::to_string(frame.height) +
                    ",t0=" + text::format_double(frame.t0) +
                    ",tk=" + text::format_double(frame.t_k) + "\n";
  auto rows = [&](const Eigen::MatrixXi& m) {
    for (int y = 0; y < frame.height; ++y) {
      for (int x = 0; x < frame.width; ++x) {
        if (x) out += ',';
        out += std::to_string(m(y, x));
      }
      out += '\n';
    }
  };
  rows(frame.values);
  out += "#initial\n";
  rows(frame.initial);
  return out;
}

Frame parse_frame(std::string_view content) {
  const auto lines = content_lines(content);
  if (lines.empty()) throw ParseError(1, "empty frame file");
  const auto ln = lines[0].first;
  const auto h = header_fields(ln, lines[0].second, "frame");
  Frame f;
  f.width = static_cast<int>(need_int(h, "w", ln));
  f.height = static_cast<int>(need_int(h, "h", ln));
  f.t0 = need_double(h, "t0", ln);
  f.t_k = need_double(h, "tk", ln);
  if (f.width < 1 || f.height < 1) throw ParseError(ln, "bad frame size");
  const auto rows = static_cast<std::size_t>(f.height);
  if (lines.size() != 2 * rows + 2) throw ParseError(ln, "frame body has wrong length");

  auto read = [&](std::size_t first, Eigen::MatrixXi& m) {
    m.resize(f.height, f.width);
    for (int y = 0; y < f.height; ++y) {
      const auto& [line_no, s] = lines[first + static_cast<std::size_t>(y)];
      const auto cells = text::split(s, ',');
      if (cells.size() != static_cast<std::size_t>(f.width)) {
        throw ParseError(line_no, "frame row has wrong width");
      }
      for (int x = 0; x < f.width; ++x) {
        const auto v = text::parse_int(cells[static_cast<std::size_t>(x)]);
        if (!v) throw ParseError(line_no, "non-integer frame value");
        m(y, x) = static_cast<int>(*v);
      }
    }
  };
  read(1, f.values);
  if (lines[rows + 1].second != "#initial") {
    throw ParseError(lines[rows + 1].first, "expected '#initial'");
  }
  read(rows + 2, f.initial);
  return f;
}

}  // namespace tsnn
