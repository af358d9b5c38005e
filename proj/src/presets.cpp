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

#include "tsnn/presets.hpp"

namespace tsnn {

const char* to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::kDense: return "dense";
    case LayerKind::kConv: return "conv";
    case LayerKind::kAvgPool: return "avg_pool";
    case LayerKind::kMaxPool: return "max_pool";
  }
  return "unknown";
}

const std::vector<PresetInfo>& preset_table() {
  static const std::vector<PresetInfo> table = {
      {"kitti", "(50x118x1): C5-48, C5-24, F256, F8"},
      {"nsydney", "(32x32x32): C5-32, C3-32, F128, F9"},
      {"dvs-barrel", "(32x32x1, 1024 inputs): F2000, F36"},
      {"nmnist", "(28x28x1): C5-32, C5-16, F10"},
      {"ncaltech101", "(200x300x1): C5-16, C3-8, F64, F101"},
      {"handgesture", "(120x320x1): C5-32, C3-48, C3-16, F64, F10"},
      {"cifar-small", "(128x128x1): C3-32, AP, C3-48, AP, F256, F10"},
      {"cifar-mid", "(128x128x1): C3-32, C3-48, AP, C3-64, AP, F256, F10"},
      {"cifar-large",
       "(128x128x1): C3-32, C3-64, AP, C3-128, C3-256, AP, F1024, F10"},
  };
  return table;
}

Network make_preset(std::string_view name) {
  Network net;
  net.preset = std::string(name);
  constexpr int s = 2;
  constexpr auto AP = LayerKind::kAvgPool;
  if (name == "kitti") {
    net.input = {50, 118, 1};
    net.add_conv(5, 48, s).add_conv(5, 24, s).add_dense(256).add_dense(8);
  } else if (name == "nsydney") {
    net.input = {32, 32, 32};
    net.add_conv(5, 32, s).add_conv(3, 32, s).add_dense(128).add_dense(9);
  } else if (name == "dvs-barrel") {
    net.input = {32, 32, 1};
    net.add_dense(2000).add_dense(36);
  } else if (name == "nmnist") {
    net.input = {28, 28, 1};
    net.add_conv(5, 32, s).add_conv(5, 16, s).add_dense(10);
  } else if (name == "ncaltech101") {
    net.input = {200, 300, 1};
    net.add_conv(5, 16, s).add_conv(3, 8, s).add_dense(64).add_dense(101);
  } else if (name == "handgesture") {
    net.input = {120, 320, 1};
    net.add_conv(5, 32, s).add_conv(3, 48, s).add_conv(3, 16, s).add_dense(64).add_dense(10);
  } else if (name == "cifar-small") {
    net.input = {128, 128, 1};
    net.add_conv(3, 32, s).add_pool(AP).add_conv(3, 48, s).add_pool(AP);
    net.add_dense(256).add_dense(10);
  } else if (name == "cifar-mid") {
    net.input = {128, 128, 1};
    net.add_conv(3, 32, s).add_conv(3, 48, s).add_pool(AP).add_conv(3, 64, s).add_pool(AP);
    net.add_dense(256).add_dense(10);
  } else if (name == "cifar-large") {
    net.input = {128, 128, 1};
    net.add_conv(3, 32, s).add_conv(3, 64, s).add_pool(AP);
    net.add_conv(3, 128, s).add_conv(3, 256, s).add_pool(AP);
    net.add_dense(1024).add_dense(10);
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  net.validate();
  return net;
}

}  // namespace tsnn
