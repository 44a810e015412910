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
#include <span>
#include <vector>

#include "privmeter/core_types.hpp"

namespace privmeter {

/// Histogram-estimated probability mass function. Divergence comparisons are
/// only defined between pmfs built over identical edges.
struct DiscretePmf {
  std::vector<double> edges;   // strictly increasing, bins.size() + 1 entries
  std::vector<double> masses;  // non-negative, sums to 1
};

/// Equal-width edges spanning [lo, hi]; the shared binning both pmfs of a
/// comparison are built on.
std::vector<double> equal_width_edges(double lo, double hi, std::size_t bins);

/// Normalized bin counts of `data` over `edges`. Every data point must land
/// inside [edges.front(), edges.back()]; the top edge is inclusive.
DiscretePmf histogram(std::span<const double> data, std::vector<double> edges);

/// Kullback-Leibler divergence D(q || p) in bits. Terms with q(x) = 0
/// contribute nothing; a bin with q(x) > 0 and p(x) = 0 makes the divergence
/// infinite.
double kl_divergence(const DiscretePmf& q, const DiscretePmf& p);

/// Jensen-Shannon divergence in bits: 1/2 D(q||m) + 1/2 D(p||m) with
/// m = (q+p)/2. Symmetric and always within [0, 1] in base 2.
double js_divergence(const DiscretePmf& q, const DiscretePmf& p);

struct SweepPoint {
  double scale = 0.0;  // sigma multiplier
  double js = 0.0;
};

/// One sweep rung with the underlying histograms, for plotting.
struct SweepDetail {
  double scale = 0.0;
  double js = 0.0;
  DiscretePmf original;
  DiscretePmf noisy;
};

/// Runs the full perturbation pipeline (per-interval noise plus the closing
/// noise) over the given series at sigma * scale for every scale, then
/// histograms original vs. noisy readings over shared equal-width edges and
/// reports the JS divergence per scale. Deterministic in `seed`; each scale
/// draws from its own derived stream.
std::vector<SweepPoint> noise_scale_sweep(
    std::span<const ConsumptionSeries> dataset, const TariffSchedule& tariffs,
    std::span<const double> scales, std::size_t bins, std::uint64_t seed,
    double sigma = 1.0);

std::vector<SweepPoint> noise_scale_sweep(const ConsumptionSeries& series,
                                          const TariffSchedule& tariffs,
                                          std::span<const double> scales,
                                          std::size_t bins, std::uint64_t seed,
                                          double sigma = 1.0);

/// Same sweep, keeping each rung's histograms.
std::vector<SweepDetail> noise_scale_sweep_detailed(
    std::span<const ConsumptionSeries> dataset, const TariffSchedule& tariffs,
    std::span<const double> scales, std::size_t bins, std::uint64_t seed,
    double sigma = 1.0);

}  // namespace privmeter
