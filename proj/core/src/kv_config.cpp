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

#include "privmeter/kv_config.hpp"

#include <algorithm>
#include <charconv>

#include "privmeter/errors.hpp"

namespace privmeter {

namespace {

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

}  // namespace

bool KvSection::has(const std::string& key) const {
  return std::any_of(entries.begin(), entries.end(),
                     [&](const auto& entry) { return entry.first == key; });
}

const std::string& KvSection::get(const std::string& key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return v;
  }
  fail(Errc::parse_error, "missing key '" + key + "'" +
                              (name.empty() ? "" : " in section [" + name + "]"));
}

std::string KvSection::get_or(const std::string& key,
                              const std::string& fallback) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return v;
  }
  return fallback;
}

std::vector<KvSection> parse_kv_sections(std::istream& in) {
  std::vector<KvSection> sections;
  sections.push_back(KvSection{});

  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;

    if (text.front() == '[') {
      if (text.back() != ']' || text.size() < 3) {
        fail(Errc::parse_error,
             "malformed section header at line " + std::to_string(line_number));
      }
      sections.push_back(KvSection{trim(text.substr(1, text.size() - 2)), {}});
      continue;
    }

    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      fail(Errc::parse_error,
           "expected key=value at line " + std::to_string(line_number));
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) {
      fail(Errc::parse_error,
           "empty key at line " + std::to_string(line_number));
    }
    if (sections.back().has(key)) {
      fail(Errc::parse_error, "duplicate key '" + key + "' at line " +
                                  std::to_string(line_number));
    }
    sections.back().entries.emplace_back(key, value);
  }

  if (sections.front().entries.empty() && sections.size() > 1) {
    sections.erase(sections.begin());
  }
  return sections;
}

KvSection parse_kv_flat(std::istream& in) {
  std::vector<KvSection> sections = parse_kv_sections(in);
  if (sections.size() != 1 || !sections.front().name.empty()) {
    fail(Errc::parse_error, "expected a flat key=value file without sections");
  }
  return std::move(sections.front());
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  std::uint64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    fail(Errc::parse_error, what + ": expected unsigned integer, got '" +
                                text + "'");
  }
  return value;
}

double parse_double(const std::string& text, const std::string& what) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    fail(Errc::parse_error, what + ": expected number, got '" + text + "'");
  }
  return value;
}

}  // namespace privmeter
