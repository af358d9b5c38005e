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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tsnn/runtime.hpp"
#include "tsnn/training.hpp"

namespace tsnn {

struct DigitImages {
  std::vector<Eigen::MatrixXd> images;  // pixel values 0..255
  std::vector<int> labels;
};

// Reads a gzip-compressed (or plain) IDX image/label pair.
DigitImages load_idx(const std::filesystem::path& images, const std::filesystem::path& labels);

struct DigitStreamConfig {
  double events_per_unit = 10.0 / 255.0;
  double t0 = 0;
  double t_k = 1;
  std::uint64_t seed = 1;
};

// Converts images [begin, end) to DVS streams; image i uses seed + i.
std::vector<LabeledStream> digit_streams(const DigitImages& digits, std::size_t begin,
                                         std::size_t end, const DigitStreamConfig& config);

// Directory layout: labels.csv with "file,label" rows next to the event files.
std::vector<LabeledStream> load_dataset_dir(const std::filesystem::path& dir);
void write_dataset_dir(const std::filesystem::path& dir, std::span<const LabeledStream> data);

// Encodes every stream with the given settings.
std::vector<Sample> encode_dataset(std::span<const LabeledStream> data,
                                   const EncoderSettings& settings);

}  // namespace tsnn
