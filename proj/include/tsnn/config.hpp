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

// Line-oriented "key = value" files. '#' starts a comment. Every key must be
// consumed by some reader; leftovers are reported by reject_unused().

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tsnn {

class KeyValues {
 public:
  // Throws ParseError on a line without '=' or a duplicated key.
  static KeyValues parse(std::string_view content);

  bool contains(std::string_view key) const;
  void set(const std::string& key, const std::string& value);

  // take_* mark the key as consumed; a missing key yields the fallback.
  // Malformed values throw ConfigError naming the key and line.
  std::optional<std::string> take(std::string_view key);
  std::string take_string(std::string_view key, std::string fallback);
  double take_double(std::string_view key, double fallback);
  long long take_int(std::string_view key, long long fallback);
  bool take_bool(std::string_view key, bool fallback);
  std::vector<double> take_doubles(std::string_view key,
                                   std::vector<double> fallback);

  // Throws ConfigError listing every key nobody consumed.
  void reject_unused() const;

 private:
  struct Entry {
    std::string value;
    std::size_t line = 0;
    bool used = false;
  };
  std::map<std::string, Entry, std::less<>> entries_;
};

}  // namespace tsnn
