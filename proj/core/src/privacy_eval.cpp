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

#include "privmeter/privacy_eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "privmeter/meter.hpp"
#include "privmeter/network_sim.hpp"

namespace privmeter {

namespace {

void require_shared_edges(const DiscretePmf& q, const DiscretePmf& p) {
  if (q.edges != p.edges) {
    fail(Errc::validation_error,
         "divergence requires pmfs over identical bin edges");
  }
}

}  // namespace

std::vector<double> equal_width_edges(double lo, double hi, std::size_t bins) {
  if (bins < 1) {
    fail(Errc::validation_error, "need at least one bin");
  }
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    fail(Errc::validation_error, "edge range must be finite with lo < hi");
  }
  std::vector<double> edges(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) {
    edges[i] = lo + width * static_cast<double>(i);
  }
  edges.back() = hi;  // guard against accumulation drift at the top edge
  return edges;
}

DiscretePmf histogram(std::span<const double> data, std::vector<double> edges) {
  if (data.empty()) {
    fail(Errc::validation_error, "cannot histogram an empty sample");
  }
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()) ||
      std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    fail(Errc::validation_error, "edges must be strictly increasing");
  }

  std::vector<double> masses(edges.size() - 1, 0.0);
  for (const double value : data) {
    if (!(value >= edges.front() && value <= edges.back())) {
      fail(Errc::validation_error,
           "value " + std::to_string(value) + " outside edge range [" +
               std::to_string(edges.front()) + ", " +
               std::to_string(edges.back()) + "]");
    }
    // upper_bound puts a value equal to an interior edge into the right bin;
    // the top edge is inclusive in the last bin.
    const auto it = std::upper_bound(edges.begin(), edges.end(), value);
    std::size_t bin = static_cast<std::size_t>(it - edges.begin());
    bin = bin == 0 ? 0 : bin - 1;
    bin = std::min(bin, masses.size() - 1);
    masses[bin] += 1.0;
  }

  const double total = static_cast<double>(data.size());
  for (double& mass : masses) mass /= total;
  return DiscretePmf{std::move(edges), std::move(masses)};
}

double kl_divergence(const DiscretePmf& q, const DiscretePmf& p) {
  require_shared_edges(q, p);
  double divergence = 0.0;
  for (std::size_t i = 0; i < q.masses.size(); ++i) {
    const double qi = q.masses[i];
    if (qi == 0.0) continue;  // 0 * log(0/x) = 0
    if (p.masses[i] == 0.0) {
      return std::numeric_limits<double>::infinity();
    }
    divergence += qi * std::log2(qi / p.masses[i]);
  }
  return divergence;
}

double js_divergence(const DiscretePmf& q, const DiscretePmf& p) {
  require_shared_edges(q, p);
  double q_side = 0.0;
  double p_side = 0.0;
  for (std::size_t i = 0; i < q.masses.size(); ++i) {
    const double qi = q.masses[i];
    const double pi = p.masses[i];
    const double mi = 0.5 * (qi + pi);
    if (qi > 0.0) q_side += qi * std::log2(qi / mi);
    if (pi > 0.0) p_side += pi * std::log2(pi / mi);
  }
  const double divergence = 0.5 * (q_side + p_side);
  // Mathematically in [0, 1]; rounding can drift a last-place ulp outside.
  return std::clamp(divergence, 0.0, 1.0);
}

std::vector<SweepDetail> noise_scale_sweep_detailed(
    std::span<const ConsumptionSeries> dataset, const TariffSchedule& tariffs,
    std::span<const double> scales, std::size_t bins, std::uint64_t seed,
    double sigma) {
  if (dataset.empty()) {
    fail(Errc::validation_error, "sweep needs at least one series");
  }
  if (bins < 2) {
    fail(Errc::validation_error, "sweep needs at least two bins");
  }
  const std::uint32_t interval_count =
      static_cast<std::uint32_t>(tariffs.prices.size());
  if (interval_count < 1) {
    fail(Errc::validation_error, "tariff schedule is empty");
  }

  std::vector<double> original;
  original.reserve(dataset.size() * interval_count);
  for (const ConsumptionSeries& series : dataset) {
    if (series.readings.size() != interval_count) {
      fail(Errc::length_mismatch,
           "series for meter " + to_string(series.meter) +
               " does not match the tariff schedule length");
    }
    original.insert(original.end(), series.readings.begin(),
                    series.readings.end());
  }

  std::vector<MeterId> meter_ids;
  meter_ids.reserve(dataset.size());
  for (const ConsumptionSeries& series : dataset) {
    meter_ids.push_back(series.meter);
  }
  const SeedStore seeds = SeedStore::derive_from_master(seed, meter_ids);

  // One shared binning for every scale, anchored to the original data's
  // range. Noisy readings are clamped to that range before counting, so the
  // outermost bins double as under/overflow bins. Ranging over the combined
  // data instead would tie the bin width to each scale's noise extremes and
  // make the divergence saturate at a scale-independent level.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const double value : original) {
    lo = std::min(lo, value);
    hi = std::max(hi, value);
  }
  if (!(lo < hi)) {  // degenerate: widen into a proper interval
    lo -= 0.5;
    hi += 0.5;
  }
  const std::vector<double> edges = equal_width_edges(lo, hi, bins);
  const DiscretePmf original_pmf = histogram(original, edges);

  std::vector<SweepDetail> sweep;
  sweep.reserve(scales.size());
  for (std::size_t scale_index = 0; scale_index < scales.size(); ++scale_index) {
    const double scale = scales[scale_index];
    if (!std::isfinite(scale) || scale <= 0.0) {
      fail(Errc::validation_error, "noise scales must be finite and > 0");
    }

    std::vector<double> noisy;
    noisy.reserve(original.size());
    for (const ConsumptionSeries& series : dataset) {
      // One stream per (meter, scale); the period counter keys the scale so
      // scales stay independent.
      const SeedMaterial material =
          seeds.material_for(series.meter, /*period_id=*/scale_index + 1);
      Meter meter(series.meter, tariffs.area,
                  BillingPeriodConfig(1440, interval_count),
                  derive_stream(material, sigma * scale));
      for (std::uint32_t i = 1; i < interval_count; ++i) {
        noisy.push_back(
            meter.report_interval(series.readings[i - 1], tariffs.prices[i - 1], i)
                .value);
      }
      noisy.push_back(meter
                          .close_period(series.readings[interval_count - 1],
                                        tariffs.prices[interval_count - 1])
                          .value);
    }
    for (double& value : noisy) {
      value = std::clamp(value, lo, hi);
    }

    DiscretePmf noisy_pmf = histogram(noisy, edges);
    const double js = js_divergence(noisy_pmf, original_pmf);
    sweep.push_back(
        SweepDetail{scale, js, original_pmf, std::move(noisy_pmf)});
  }
  return sweep;
}

std::vector<SweepPoint> noise_scale_sweep(
    std::span<const ConsumptionSeries> dataset, const TariffSchedule& tariffs,
    std::span<const double> scales, std::size_t bins, std::uint64_t seed,
    double sigma) {
  std::vector<SweepPoint> sweep;
  for (const SweepDetail& detail : noise_scale_sweep_detailed(
           dataset, tariffs, scales, bins, seed, sigma)) {
    sweep.push_back(SweepPoint{detail.scale, detail.js});
  }
  return sweep;
}

std::vector<SweepPoint> noise_scale_sweep(const ConsumptionSeries& series,
                                          const TariffSchedule& tariffs,
                                          std::span<const double> scales,
                                          std::size_t bins, std::uint64_t seed,
                                          double sigma) {
  return noise_scale_sweep(std::span<const ConsumptionSeries>(&series, 1),
                           tariffs, scales, bins, seed, sigma);
}

}  // namespace privmeter
