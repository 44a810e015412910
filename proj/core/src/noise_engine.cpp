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

#include "privmeter/noise_engine.hpp"

#include <cmath>
#include <cstring>
#include <numbers>

namespace privmeter {

namespace {

// Four Gaussian values per block: words (0,1) and (2,3) are Box-Muller pairs.
std::array<double, 4> gaussian_block(const threefry::Block& key,
                                     std::uint64_t block_index) {
  const threefry::Block words =
      threefry::encrypt(key, {block_index, 0, 0, 0});

  std::array<double, 4> out;
  for (int pair = 0; pair < 2; ++pair) {
    const double u1 = threefry::to_unit_open(words[2 * pair]);
    const double u2 = threefry::to_unit_open(words[2 * pair + 1]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    out[2 * pair] = radius * std::cos(angle);
    out[2 * pair + 1] = radius * std::sin(angle);
  }
  return out;
}

}  // namespace

double GaussianStream::next() {
  const double value = value_at(position_);
  ++position_;
  return value;
}

double GaussianStream::value_at(std::uint64_t position) const {
  const std::array<double, 4> block = gaussian_block(key_, position / 4);
  return sigma_ * block[position % 4];
}

GaussianStream derive_stream(const SeedMaterial& seed, double sigma) {
  if (!std::isfinite(sigma) || sigma <= 0.0) {
    fail(Errc::validation_error, "noise sigma must be finite and > 0");
  }

  threefry::Block key;
  static_assert(sizeof(key) == sizeof(seed.secret));
  std::memcpy(key.data(), seed.secret.data(), sizeof(key));
  key[2] ^= seed.meter.value;
  key[3] ^= seed.period_id;
  return GaussianStream(key, sigma);
}

double closing_noise(double weighted_sum, double last_tariff) {
  if (!std::isfinite(last_tariff) || last_tariff <= 0.0) {
    fail(Errc::price_not_positive, "last tariff must be finite and > 0");
  }
  return -weighted_sum / last_tariff;
}

double closing_noise_adjusted(std::span<const double> retained_noise,
                              const TariffSchedule& new_tariffs) {
  const std::size_t interval_count = new_tariffs.prices.size();
  if (interval_count == 0 || retained_noise.size() != interval_count - 1) {
    fail(Errc::length_mismatch,
         "retained noise has " + std::to_string(retained_noise.size()) +
             " values, tariff vector expects " +
             std::to_string(interval_count == 0 ? 0 : interval_count - 1));
  }

  double weighted_sum = 0.0;
  for (std::size_t i = 0; i < retained_noise.size(); ++i) {
    const double price = new_tariffs.prices[i];
    if (!std::isfinite(price) || price <= 0.0) {
      fail(Errc::price_not_positive,
           "replacement tariff at interval " + std::to_string(i + 1) +
               " must be finite and > 0");
    }
    weighted_sum += retained_noise[i] * price;
  }
  return closing_noise(weighted_sum, new_tariffs.prices[interval_count - 1]);
}

}  // namespace privmeter
