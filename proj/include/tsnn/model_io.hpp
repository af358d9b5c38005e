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

// Model file layout, all little-endian:
//
//   "TSNN"  u32 version
//   u32 len, preset name bytes
//   f64 normalization offset, f64 normalization scale
//   u32 len, encoder settings text (key = value lines)
//   f64 z_max, f64 epsilon_denom
//   u32 x3 input shape (h, w, c)
//   u32 layer count
//   per layer: u32 kind, u32 n, n x u32 shape ints
//              (in h,w,c, out h,w,c, kernel, stride, pad_top, pad_left),
//              u64 weight count, f64 weights row-major
//   u32 CRC-32 of everything above

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "tsnn/coding.hpp"
#include "tsnn/network.hpp"

namespace tsnn {

inline constexpr std::uint32_t kModelFormatVersion = 1;

struct Model {
  Network net;
  EncoderSettings encoder;
  NormalizationMap normalization;
};

std::string save_model(const Model& model);
// Throws FormatError with the matching code.
Model load_model(std::string_view bytes);

void save_model_file(const Model& model, const std::filesystem::path& path);
Model load_model_file(const std::filesystem::path& path);

}  // namespace tsnn
