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
#include <span>

#include "privmeter/core_types.hpp"
#include "privmeter/threefry.hpp"

namespace privmeter {

/// Everything that pins down one meter's noise stream for one billing period.
/// The secret comes from provisioning; meter and period are mixed into the
/// generator key so that replaying a (secret, meter, period) triple always
/// reproduces the identical stream and nothing else does.
struct SeedMaterial {
  std::array<std::uint8_t, 32> secret{};
  MeterId meter;
  std::uint64_t period_id = 0;
};

/// Deterministic N(0, sigma^2) stream over a Threefry-4x64 keystream.
/// Uniform pairs go through the Box-Muller transform, four Gaussian values
/// per 256-bit block. Values are addressable by position, so a stream can be
/// replayed or resumed exactly.
class GaussianStream {
 public:
  /// Next variate in sequence; advances the position.
  double next();

  /// Variate at an absolute position without touching the cursor.
  double value_at(std::uint64_t position) const;

  void reset(std::uint64_t position = 0) { position_ = position; }
  std::uint64_t position() const { return position_; }
  double sigma() const { return sigma_; }

 private:
  friend GaussianStream derive_stream(const SeedMaterial& seed, double sigma);

  GaussianStream(const threefry::Block& key, double sigma)
      : key_(key), sigma_(sigma) {}

  threefry::Block key_;
  double sigma_;
  std::uint64_t position_ = 0;
};

/// Builds the per-period stream for a meter. sigma must be > 0; a degenerate
/// zero-noise stream would make every report a plaintext reading.
GaussianStream derive_stream(const SeedMaterial& seed, double sigma);

inline double next_noise(GaussianStream& stream) { return stream.next(); }

/// Closing noise for the last interval: the value that makes the
/// tariff-weighted noise sum over the whole period cancel to zero.
/// weighted_sum is sum(s_i * trf_i) over intervals 1..L-1.
double closing_noise(double weighted_sum, double last_tariff);

/// Closing noise against a replacement tariff vector: re-weights the retained
/// noise values with the new prices and solves the same cancellation
/// constraint for the last interval. retained_noise must hold exactly L-1
/// values for the schedule's L intervals.
double closing_noise_adjusted(std::span<const double> retained_noise,
                              const TariffSchedule& new_tariffs);

}  // namespace privmeter
