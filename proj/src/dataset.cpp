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

#include "tsnn/dataset.hpp"

#include <fstream>
#include <sstream>

#include <zlib.h>

#include "text_util.hpp"

namespace tsnn {
namespace {

std::string read_gz(const std::filesystem::path& path) {
  gzFile f = gzopen(path.string().c_str(), "rb");
  if (!f) throw Error("cannot open " + path.string());
  std::string out;
  char buf[1 << 16];
  int n;
  while ((n = gzread(f, buf, sizeof buf)) > 0) out.append(buf, static_cast<std::size_t>(n));
  const bool failed = n < 0;
  gzclose(f);
  if (failed) throw Error("read error in " + path.string());
  return out;
}

std::uint32_t big_endian(const std::string& s, std::size_t at) {
  if (s.size() < at + 4) throw Error("IDX header truncated");
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < 4; ++i) v = (v << 8) | static_cast<unsigned char>(s[at + i]);
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

DigitImages load_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
  const auto img = read_gz(images);
  const auto lab = read_gz(labels);
  if (big_endian(img, 0) != 0x803) throw Error("not an IDX image file: " + images.string());
  if (big_endian(lab, 0) != 0x801) throw Error("not an IDX label file: " + labels.string());
  const std::size_t n = big_endian(img, 4);
  const std::size_t rows = big_endian(img, 8);
  const std::size_t cols = big_endian(img, 12);
  if (big_endian(lab, 4) != n) throw Error("IDX image and label counts differ");
  if (img.size() != 16 + n * rows * cols || lab.size() != 8 + n) {
    throw Error("IDX payload size mismatch");
  }
  DigitImages d;
  for (std::size_t k = 0; k < n; ++k) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    const std::size_t base = 16 + k * rows * cols;
    for (std::size_t y = 0; y < rows; ++y) {
      for (std::size_t x = 0; x < cols; ++x) {
        m(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) =
            static_cast<unsigned char>(img[base + y * cols + x]);
      }
    }
    d.images.push_back(std::move(m));
    d.labels.push_back(static_cast<unsigned char>(lab[8 + k]));
  }
  return d;
}

std::vector<LabeledStream> digit_streams(const DigitImages& digits, std::size_t begin,
                                         std::size_t end, const DigitStreamConfig& config) {
  if (begin > end || end > digits.images.size()) throw DomainError("digit range out of bounds");
  std::vector<LabeledStream> out;
  for (std::size_t i = begin; i < end; ++i) {
    out.push_back({"digit_" + std::to_string(i),
                   synth_events_from_image(digits.images[i], config.events_per_unit,
                                           config.t0, config.t_k, config.seed + i),
                   digits.labels[i]});
  }
  return out;
}

std::vector<LabeledStream> load_dataset_dir(const std::filesystem::path& dir) {
  const auto listing = read_file(dir / "labels.csv");
  std::vector<LabeledStream> out;
  text::for_each_line(listing, [&](std::size_t line_no, std::string_view line) {
    line = text::trim(line);
    if (line.empty() || line.front() == '#') return;
    const auto fields = text::split(line, ',');
    if (fields.size() != 2) throw ParseError(line_no, "expected file,label");
    const auto name = std::string(text::trim(fields[0]));
    if (line_no == 1 && name == "file") return;  // header
    const auto label = text::parse_int(text::trim(fields[1]));
    if (!label) throw ParseError(line_no, "bad label");
    out.push_back({name, parse_event_file(read_file(dir / name)), static_cast<int>(*label)});
  });
  if (out.empty()) throw Error("no samples listed in " + (dir / "labels.csv").string());
  return out;
}

void write_dataset_dir(const std::filesystem::path& dir, std::span<const LabeledStream> data) {
  std::filesystem::create_directories(dir);
  std::ofstream listing(dir / "labels.csv");
  listing << "file,label\n";
  for (const auto& s : data) {
    const std::string file = s.name + ".events";
    std::ofstream out(dir / file);
    out << write_event_file(s.stream);
    if (!out) throw Error("cannot write " + (dir / file).string());
    listing << file << "," << s.label << "\n";
  }
  if (!listing) throw Error("cannot write " + (dir / "labels.csv").string());
}

std::vector<Sample> encode_dataset(std::span<const LabeledStream> data,
                                   const EncoderSettings& settings) {
  std::vector<Sample> out;
  out.reserve(data.size());
  for (const auto& s : data) out.push_back({encode_stream(s.stream, settings), s.label});
  return out;
}

}  // namespace tsnn
