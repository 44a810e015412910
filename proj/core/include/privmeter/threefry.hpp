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

#include <array>
#include <cstdint>

namespace privmeter {

/// Threefry-4x64, 20 rounds: a keyed counter-based block generator built on
/// the Threefish-256 mixing schedule with the tweak removed. The output at a
/// given counter is a pure function of (key, counter), so any position of the
/// stream can be regenerated at random access, which is what makes exact
/// replay of a past billing period possible.
namespace threefry {

using Block = std::array<std::uint64_t, 4>;

/// One 256-bit block of the 20-round Threefry-4x64 function.
Block encrypt(const Block& key, const Block& counter);

/// Maps a 64-bit word to a double in the open interval (0, 1). Uses the top
/// 52 bits plus a half-step offset so neither endpoint can occur.
double to_unit_open(std::uint64_t word);

}  // namespace threefry

}  // namespace privmeter
