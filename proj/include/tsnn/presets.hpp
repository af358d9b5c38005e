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

#include <string>
#include <string_view>
#include <vector>

#include "tsnn/network.hpp"

namespace tsnn {

struct PresetInfo {
  std::string name;
  std::string description;  // e.g. "(28x28x1): C5-32, C5-16, F10"
};

// Named architectures. Convolutions use 'same' padding and stride 2; pooling
// layers are 2x2 with stride 2. Weights come back zeroed; see init_weights().
// Throws ConfigError for an unknown name.
Network make_preset(std::string_view name);

const std::vector<PresetInfo>& preset_table();

}  // namespace tsnn
