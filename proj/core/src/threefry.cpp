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

#include "privmeter/threefry.hpp"

#include <bit>

namespace privmeter::threefry {

namespace {

// Key-schedule parity constant from Threefish.
constexpr std::uint64_t kParity = 0x1BD11BDAA9FC1A22ull;

// Threefish-256 rotation distances, indexed by round mod 8.
constexpr unsigned kRotation[8][2] = {
    {14, 16}, {52, 57}, {23, 40}, {5, 37},
    {25, 33}, {46, 12}, {58, 22}, {32, 32},
};

inline void mix(std::uint64_t& a, std::uint64_t& b, unsigned rotation) {
  a += b;
  b = std::rotl(b, static_cast<int>(rotation)) ^ a;
}

}  // namespace

Block encrypt(const Block& key, const Block& counter) {
  const std::uint64_t ks[5] = {
      key[0], key[1], key[2], key[3],
      kParity ^ key[0] ^ key[1] ^ key[2] ^ key[3],
  };

  Block x = counter;
  for (int i = 0; i < 4; ++i) x[i] += ks[i];

  for (unsigned round = 0; round < 20; ++round) {
    const unsigned d = round % 8;
    if (round % 2 == 0) {
      mix(x[0], x[1], kRotation[d][0]);
      mix(x[2], x[3], kRotation[d][1]);
    } else {
      // The word permutation (swap x1/x3) is folded into the pairing.
      mix(x[0], x[3], kRotation[d][0]);
      mix(x[2], x[1], kRotation[d][1]);
    }
    if ((round + 1) % 4 == 0) {
      const std::uint64_t injection = (round + 1) / 4;  // 1..5
      for (std::uint64_t j = 0; j < 4; ++j) {
        x[j] += ks[(injection + j) % 5];
      }
      x[3] += injection;
    }
  }
  return x;
}

double to_unit_open(std::uint64_t word) {
  // (k + 0.5) / 2^52 with k on 52 bits: every k + 0.5 is exactly
  // representable, so the result lies in [2^-53, 1 - 2^-53] with no rounding.
  return (static_cast<double>(word >> 12) + 0.5) * 0x1.0p-52;
}

}  // namespace privmeter::threefry
