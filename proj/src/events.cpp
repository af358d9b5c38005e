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

#include "tsnn/events.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "text_util.hpp"

namespace tsnn {

std::string to_string(const Shape& shape) {
  return std::to_string(shape.height) + "x" + std::to_string(shape.width) +
         "x" + std::to_string(shape.channels);
}

namespace {

void check_time(double t) {
  if (!std::isfinite(t) || t < 0) {
    throw DomainError("event time must be finite and >= 0, got " +
                      text::format_double(t));
  }
}

}  // namespace

EventStream EventStream::lidar(std::vector<LidarEvent> events) {
  for (const auto& e : events) {
    check_time(e.t_a);
    if (!std::isfinite(e.x) || !std::isfinite(e.y) || !std::isfinite(e.z)) {
      throw DomainError("lidar event position must be finite");
    }
    if (!(e.r >= 0)) throw DomainError("lidar reflectance must be >= 0");
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const LidarEvent& a, const LidarEvent& b) {
                     return a.t_a < b.t_a;
                   });
  EventStream s;
  s.kind_ = SensorKind::kLidar;
  s.lidar_ = std::move(events);
  return s;
}

EventStream EventStream::dvs(int width, int height,
                             PolarityConvention convention,
                             std::vector<DvsEvent> events) {
  if (width <= 0 || height <= 0) {
    throw DomainError("dvs sensor size must be positive");
  }
  for (const auto& e : events) {
    check_time(e.t);
    if (e.x < 0 || e.x >= width || e.y < 0 || e.y >= height) {
      throw DomainError("dvs event outside sensor bounds");
    }
    if (e.polarity != 1 && e.polarity != -1) {
      throw DomainError("dvs polarity must be normalized to -1 or +1");
    }
  }
  std::stable_sort(
      events.begin(), events.end(),
      [](const DvsEvent& a, const DvsEvent& b) { return a.t < b.t; });
  EventStream s;
  s.kind_ = SensorKind::kDvs;
  s.width_ = width;
  s.height_ = height;
  s.convention_ = convention;
  s.dvs_ = std::move(events);
  return s;
}

std::size_t EventStream::count_until(double t) const {
  if (kind_ == SensorKind::kLidar) {
    return std::upper_bound(lidar_.begin(), lidar_.end(), t,
                            [](double v, const LidarEvent& e) {
                              return v < e.t_a;
                            }) -
           lidar_.begin();
  }
  return std::upper_bound(
             dvs_.begin(), dvs_.end(), t,
             [](double v, const DvsEvent& e) { return v < e.t; }) -
         dvs_.begin();
}

namespace {

struct Header {
  SensorKind kind = SensorKind::kLidar;
  int width = 0;
  int height = 0;
  PolarityConvention convention = PolarityConvention::kPlusMinusOne;
};

Header parse_header(std::size_t line_no, std::string_view line) {
  line = text::trim(line);
  if (line.empty() || line.front() != '#') {
    throw ParseError(line_no, "expected '#sensor=...' header");
  }
  line.remove_prefix(1);
  Header h;
  bool have_sensor = false, have_w = false, have_h = false, have_p = false;
  for (const auto field : text::split(line, ',')) {
    const auto eq = field.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(line_no, "header field without '='");
    }
    const auto key = text::trim(field.substr(0, eq));
    const auto value = text::trim(field.substr(eq + 1));
    if (key == "sensor") {
      if (value == "lidar") {
        h.kind = SensorKind::kLidar;
      } else if (value == "dvs") {
        h.kind = SensorKind::kDvs;
      } else {
        throw ParseError(line_no, "unknown sensor '" + std::string(value) + "'");
      }
      have_sensor = true;
    } else if (key == "w" || key == "h") {
      const auto v = text::parse_int(value);
      if (!v || *v <= 0) throw ParseError(line_no, "bad sensor dimension");
      (key == "w" ? h.width : h.height) = static_cast<int>(*v);
      (key == "w" ? have_w : have_h) = true;
    } else if (key == "polarity") {
      if (value == "pm1") {
        h.convention = PolarityConvention::kPlusMinusOne;
      } else if (value == "01") {
        h.convention = PolarityConvention::kZeroOne;
      } else {
        throw ParseError(line_no, "polarity must be pm1 or 01");
      }
      have_p = true;
    } else {
      throw ParseError(line_no, "unknown header key '" + std::string(key) + "'");
    }
  }
  if (!have_sensor) throw ParseError(line_no, "header lacks sensor=");
  if (h.kind == SensorKind::kDvs && !(have_w && have_h && have_p)) {
    throw ParseError(line_no, "dvs header needs w, h and polarity");
  }
  if (h.kind == SensorKind::kLidar && (have_w || have_h || have_p)) {
    throw ParseError(line_no, "lidar header takes no w/h/polarity");
  }
  return h;
}

double field_double(std::size_t line_no, std::string_view s) {
  const auto v = text::parse_double(s);
  if (!v) throw ParseError(line_no, "non-numeric field '" + std::string(s) + "'");
  return *v;
}

int field_int(std::size_t line_no, std::string_view s) {
  const auto v = text::parse_int(s);
  if (!v) throw ParseError(line_no, "non-integer field '" + std::string(s) + "'");
  return static_cast<int>(*v);
}

}  // namespace

EventStream parse_event_file(std::string_view content) {
  std::optional<Header> header;
  std::vector<LidarEvent> lidar;
  std::vector<DvsEvent> dvs;

  text::for_each_line(content, [&](std::size_t line_no, std::string_view raw) {
    if (!header) {
      if (text::trim(raw).empty()) return;
      header = parse_header(line_no, raw);
      return;
    }
    auto line = raw.substr(0, raw.find('#'));
    line = text::trim(line);
    if (line.empty()) return;
    const auto fields = text::split(line, ',');

    if (header->kind == SensorKind::kLidar) {
      if (fields.size() != 5) {
        throw ParseError(line_no, "lidar row needs 5 fields: t_a,x,y,z,r");
      }
      LidarEvent e{field_double(line_no, fields[0]),
                   field_double(line_no, fields[1]),
                   field_double(line_no, fields[2]),
                   field_double(line_no, fields[3]),
                   field_double(line_no, fields[4])};
      if (!std::isfinite(e.t_a) || e.t_a < 0) {
        throw ParseError(line_no, "negative or non-finite time");
      }
      if (!std::isfinite(e.x) || !std::isfinite(e.y) || !std::isfinite(e.z)) {
        throw ParseError(line_no, "non-finite position");
      }
      if (!(e.r >= 0)) throw ParseError(line_no, "negative reflectance");
      lidar.push_back(e);
      return;
    }

    if (fields.size() != 4) {
      throw ParseError(line_no, "dvs row needs 4 fields: t,x,y,p");
    }
    DvsEvent e;
    e.t = field_double(line_no, fields[0]);
    e.x = field_int(line_no, fields[1]);
    e.y = field_int(line_no, fields[2]);
    if (!std::isfinite(e.t) || e.t < 0) {
      throw ParseError(line_no, "negative or non-finite time");
    }
    if (e.x < 0 || e.x >= header->width || e.y < 0 || e.y >= header->height) {
      throw ParseError(line_no, "pixel outside sensor bounds");
    }
    const auto p = fields[3];
    if (header->convention == PolarityConvention::kPlusMinusOne) {
      if (p == "1" || p == "+1") {
        e.polarity = 1;
      } else if (p == "-1") {
        e.polarity = -1;
      } else {
        throw ParseError(line_no, "polarity outside {-1,+1}");
      }
    } else {
      if (p == "1") {
        e.polarity = 1;
      } else if (p == "0") {
        e.polarity = -1;
      } else {
        throw ParseError(line_no, "polarity outside {0,1}");
      }
    }
    dvs.push_back(e);
  });

  if (!header) throw ParseError(1, "missing header");
  if (header->kind == SensorKind::kLidar) return EventStream::lidar(std::move(lidar));
  return EventStream::dvs(header->width, header->height, header->convention,
                          std::move(dvs));
}

std::string write_event_file(const EventStream& stream) {
  std::string out;
  if (stream.kind() == SensorKind::kLidar) {
    out += "#sensor=lidar\n";
    for (const auto& e : stream.lidar_events()) {
      out += text::format_double(e.t_a) + ',' + text::format_double(e.x) + ',' +
             text::format_double(e.y) + ',' + text::format_double(e.z) + ',' +
             text::format_double(e.r) + '\n';
    }
    return out;
  }
  const bool zero_one =
      stream.polarity_convention() == PolarityConvention::kZeroOne;
  out += "#sensor=dvs,w=" + std::to_string(stream.width()) +
         ",h=" + std::to_string(stream.height()) +
         ",polarity=" + (zero_one ? "01" : "pm1") + '\n';
  for (const auto& e : stream.dvs_events()) {
    const char* p = e.polarity > 0 ? "1" : (zero_one ? "0" : "-1");
    out += text::format_double(e.t) + ',' + std::to_string(e.x) + ',' +
           std::to_string(e.y) + ',' + p + '\n';
  }
  return out;
}

EventStream shift_times(const EventStream& stream, double delta) {
  if (stream.kind() == SensorKind::kLidar) {
    std::vector<LidarEvent> events(stream.lidar_events().begin(),
                                   stream.lidar_events().end());
    for (auto& e : events) e.t_a += delta;
    return EventStream::lidar(std::move(events));
  }
  std::vector<DvsEvent> events(stream.dvs_events().begin(),
                               stream.dvs_events().end());
  for (auto& e : events) e.t += delta;
  return EventStream::dvs(stream.width(), stream.height(),
                          stream.polarity_convention(), std::move(events));
}

EventStream synth_lidar_arrivals(std::span<const LidarPoint> points,
                                 double t_start, double rate) {
  if (!(rate > 0)) throw DomainError("arrival rate must be > 0");
  if (!(t_start >= 0)) throw DomainError("t_start must be >= 0");
  if (points.empty()) return EventStream::lidar({});
  double x_min = points.front().x;
  for (const auto& p : points) x_min = std::min(x_min, p.x);
  std::vector<LidarEvent> events;
  events.reserve(points.size());
  for (const auto& p : points) {
    events.push_back({t_start + rate * (p.x - x_min), p.x, p.y, p.z, p.r});
  }
  return EventStream::lidar(std::move(events));
}

EventStream synth_events_from_image(
    const Eigen::Ref<const Eigen::MatrixXd>& image, double events_per_unit,
    double t0, double t_k, std::uint64_t seed) {
  if (!(t_k > t0)) throw WindowError("synthetic window needs t_k > t0");
  if (!(events_per_unit > 0)) throw DomainError("events_per_unit must be > 0");
  const int height = static_cast<int>(image.rows());
  const int width = static_cast<int>(image.cols());

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase_dist(0.0, 1.0);
  std::vector<DvsEvent> events;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      // One draw per pixel whether or not it fires, so a pixel's phase does
      // not depend on its neighbours' intensities.
      const double phase = phase_dist(rng);
      const double v = std::clamp(image(y, x), 0.0, 255.0);
      const auto n = static_cast<long>(std::lround(v * events_per_unit));
      if (n <= 0) continue;
      const double spacing = (t_k - t0) / static_cast<double>(n);
      for (long k = 0; k < n; ++k) {
        events.push_back({t0 + (static_cast<double>(k) + phase) * spacing, x, y, 1});
      }
    }
  }
  return EventStream::dvs(std::max(width, 1), std::max(height, 1),
                          PolarityConvention::kPlusMinusOne, std::move(events));
}

}  // namespace tsnn
