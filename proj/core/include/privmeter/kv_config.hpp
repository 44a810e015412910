// Copyright 2026 The PrivMeter Authors
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
#include <istream>
#include <string>
#include <vector>

namespace privmeter {

/// Line-based `key=value` config with optional `[section]` headers and `#`
/// comments. Keys keep file order; duplicate keys within a section are
/// rejected.
struct KvSection {
  std::string name;  // "" for the leading unnamed section
  std::vector<std::pair<std::string, std::string>> entries;

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
};

std::vector<KvSection> parse_kv_sections(std::istream& in);

/// Convenience for single-section files: everything must live in the unnamed
/// section.
KvSection parse_kv_flat(std::istream& in);

std::uint64_t parse_u64(const std::string& text, const std::string& what);
double parse_double(const std::string& text, const std::string& what);

}  // namespace privmeter
