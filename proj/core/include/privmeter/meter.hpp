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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "privmeter/core_types.hpp"
#include "privmeter/noise_engine.hpp"

namespace privmeter {

enum class MeterPhase { open, closed, purged };

const char* to_string(MeterPhase phase) noexcept;

/// Pure perturbation step: nc = c + s. Kept free so the additive identity is
/// testable without a meter.
NoisyReading make_noisy_reading(MeterId meter, std::uint32_t interval_index,
                                double consumption_kwh, double noise_kwh,
                                bool replacement_flag = false);

/// One smart meter's protocol state across a billing period.
///
/// Open:   reports perturbed readings for intervals 1..L-1, retaining each
///         drawn noise value and the running tariff-weighted noise sum.
/// Closed: the final interval was perturbed with the computed closing noise;
///         the retained noise and the true last reading stay available for a
///         bounded number of tariff adjustments.
/// Purged: retention window over; everything secret is erased and any further
///         adjustment request is refused.
class Meter {
 public:
  Meter(MeterId id, AreaId area, BillingPeriodConfig config,
        GaussianStream stream, std::uint32_t max_adjustments = 1);

  /// Perturbs and reports interval `interval_index` (1..L-1). Indices must
  /// arrive strictly in order.
  NoisyReading report_interval(double consumption_kwh, double tariff,
                               std::uint32_t interval_index);

  /// Perturbs the final interval with the closing noise that cancels the
  /// tariff-weighted noise sum, retains the true reading for possible
  /// adjustments, and moves to Closed.
  NoisyReading close_period(double consumption_kwh, double tariff);

  /// Recomputes the closing noise against a replacement tariff vector and
  /// returns the replacement last reading (replacement_flag set). Only valid
  /// in Closed and while the adjustment budget lasts.
  NoisyReading apply_tariff_adjustment(const TariffSchedule& new_tariffs);

  /// Erases retained noise, the true last reading, and the stream. Idempotent
  /// once Closed; refuses to run mid-period.
  void purge();

  MeterId id() const { return id_; }
  AreaId area() const { return area_; }
  const BillingPeriodConfig& config() const { return config_; }
  MeterPhase phase() const { return phase_; }
  std::span<const double> retained_noise() const { return retained_noise_; }
  double weighted_noise_sum() const { return weighted_sum_; }
  std::uint32_t reported_intervals() const {
    return static_cast<std::uint32_t>(retained_noise_.size()) +
           (phase_ == MeterPhase::open ? 0 : 1);
  }
  std::uint32_t adjustments_applied() const { return adjustments_applied_; }
  std::uint32_t max_adjustments() const { return max_adjustments_; }
  std::optional<double> last_true_reading() const { return last_true_reading_; }

  /// Bytes of protocol state currently retained (noise vector, running sum,
  /// retained last reading). Used by the harness to track peak memory against
  /// the analytic model.
  std::size_t state_bytes() const;

  /// Rebuilds a Closed meter from persisted state, e.g. when a tariff
  /// adjustment arrives in a later process than the one that ran the period.
  static Meter restore_closed(MeterId id, AreaId area,
                              BillingPeriodConfig config,
                              std::vector<double> retained_noise,
                              double last_true_reading,
                              std::uint32_t adjustments_applied,
                              std::uint32_t max_adjustments);

 private:
  // Streamless shell used by restore_closed().
  Meter(MeterId id, AreaId area, BillingPeriodConfig config);

  MeterId id_;
  AreaId area_;
  BillingPeriodConfig config_;
  std::optional<GaussianStream> stream_;
  std::vector<double> retained_noise_;
  double weighted_sum_ = 0.0;
  std::optional<double> last_true_reading_;
  MeterPhase phase_ = MeterPhase::open;
  std::uint32_t adjustments_applied_ = 0;
  std::uint32_t max_adjustments_;
};

}  // namespace privmeter
