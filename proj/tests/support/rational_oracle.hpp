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

// Exact-rational re-implementation of the billing chain, used as the test
// oracle. Every finite double converts to a rational exactly, so the chain
// below has no rounding anywhere: if the algebraic cancellation holds, it
// holds to equality. Deliberately independent of the library implementation.

#pragma once

#include <gmpxx.h>

#include <span>
#include <vector>

namespace privmeter::oracle {

using Rat = mpq_class;

inline Rat rat(double value) { return Rat(value); }

/// sum(a_i * b_i), exact.
inline Rat dot(std::span<const double> a, std::span<const double> b) {
  Rat sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum += rat(a[i]) * rat(b[i]);
  }
  return sum;
}

/// Exact closing noise: -sum(noise_i * price_i, i < L-1... i in [0, L-2]) / price_{L-1}.
inline Rat closing_noise(std::span<const double> retained_noise,
                         std::span<const double> prices) {
  Rat weighted = 0;
  for (std::size_t i = 0; i < retained_noise.size(); ++i) {
    weighted += rat(retained_noise[i]) * rat(prices[i]);
  }
  return -weighted / rat(prices[prices.size() - 1]);
}

/// Exact tariff-weighted sum over the full noise vector including the closing
/// value; zero iff the cancellation constraint holds.
inline Rat weighted_noise_sum(std::span<const double> retained_noise,
                              const Rat& closing, std::span<const double> prices) {
  Rat sum = 0;
  for (std::size_t i = 0; i < retained_noise.size(); ++i) {
    sum += rat(retained_noise[i]) * rat(prices[i]);
  }
  sum += closing * rat(prices[prices.size() - 1]);
  return sum;
}

/// Exact final bill from the noisy chain: perturb with the retained noise and
/// the exact closing noise, multiply by tariffs, sum.
inline Rat final_bill(std::span<const double> consumption,
                      std::span<const double> retained_noise,
                      std::span<const double> prices) {
  const Rat closing = closing_noise(retained_noise, prices);
  Rat bill = 0;
  for (std::size_t i = 0; i + 1 < consumption.size(); ++i) {
    bill += (rat(consumption[i]) + rat(retained_noise[i])) * rat(prices[i]);
  }
  bill += (rat(consumption.back()) + closing) * rat(prices.back());
  return bill;
}

/// Exact true bill sum(c_i * trf_i).
inline Rat true_bill(std::span<const double> consumption,
                     std::span<const double> prices) {
  return dot(consumption, prices);
}

inline double to_double(const Rat& value) { return value.get_d(); }

}  // namespace privmeter::oracle
