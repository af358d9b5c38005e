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

#include "tsnn/config.hpp"

#include "text_util.hpp"
#include "tsnn/common.hpp"

namespace tsnn {

KeyValues KeyValues::parse(std::string_view content) {
  KeyValues kv;
  text::for_each_line(content, [&](std::size_t line_no, std::string_view raw) {
    auto line = text::trim(raw.substr(0, raw.find('#')));
    if (line.empty()) return;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(line_no, "expected 'key = value'");
    }
    const auto key = std::string(text::trim(line.substr(0, eq)));
    if (key.empty()) throw ParseError(line_no, "empty key");
    const auto [it, inserted] = kv.entries_.emplace(
        key, Entry{std::string(text::trim(line.substr(eq + 1))), line_no, false});
    if (!inserted) throw ParseError(line_no, "duplicate key '" + key + "'");
  });
  return kv;
}

bool KeyValues::contains(std::string_view key) const {
  return entries_.find(key) != entries_.end();
}

void KeyValues::set(const std::string& key, const std::string& value) {
  entries_[key] = Entry{value, 0, false};
}

std::optional<std::string> KeyValues::take(std::string_view key) {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  it->second.used = true;
  return it->second.value;
}

namespace {

[[noreturn]] void bad_value(std::string_view key, std::size_t line,
                            const std::string& value) {
  throw ConfigError("line " + std::to_string(line) + ": bad value '" + value +
                    "' for key '" + std::string(key) + "'");
}

}  // namespace

std::string KeyValues::take_string(std::string_view key, std::string fallback) {
  auto v = take(key);
  return v ? *v : std::move(fallback);
}

double KeyValues::take_double(std::string_view key, double fallback) {
  const auto v = take(key);
  if (!v) return fallback;
  const auto d = text::parse_double(*v);
  if (!d) bad_value(key, entries_.find(key)->second.line, *v);
  return *d;
}

long long KeyValues::take_int(std::string_view key, long long fallback) {
  const auto v = take(key);
  if (!v) return fallback;
  const auto i = text::parse_int(*v);
  if (!i) bad_value(key, entries_.find(key)->second.line, *v);
  return *i;
}

bool KeyValues::take_bool(std::string_view key, bool fallback) {
  const auto v = take(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1") return true;
  if (*v == "false" || *v == "0") return false;
  bad_value(key, entries_.find(key)->second.line, *v);
}

std::vector<double> KeyValues::take_doubles(std::string_view key,
                                            std::vector<double> fallback) {
  const auto v = take(key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const auto part : text::split(*v, ',')) {
    const auto d = text::parse_double(part);
    if (!d) bad_value(key, entries_.find(key)->second.line, *v);
    out.push_back(*d);
  }
  return out;
}

void KeyValues::reject_unused() const {
  std::string unknown;
  for (const auto& [key, entry] : entries_) {
    if (entry.used) continue;
    if (!unknown.empty()) unknown += ", ";
    unknown += key + " (line " + std::to_string(entry.line) + ")";
  }
  if (!unknown.empty()) throw ConfigError("unknown config keys: " + unknown);
}

}  // namespace tsnn
