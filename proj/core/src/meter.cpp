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

#include "privmeter/meter.hpp"

#include <cmath>
#include <utility>

namespace privmeter {

const char* to_string(MeterPhase phase) noexcept {
  switch (phase) {
    case MeterPhase::open: return "Open";
    case MeterPhase::closed: return "Closed";
    case MeterPhase::purged: return "Purged";
  }
  return "?";
}

NoisyReading make_noisy_reading(MeterId meter, std::uint32_t interval_index,
                                double consumption_kwh, double noise_kwh,
                                bool replacement_flag) {
  return NoisyReading{meter, interval_index, consumption_kwh + noise_kwh,
                      replacement_flag};
}

Meter::Meter(MeterId id, AreaId area, BillingPeriodConfig config,
             GaussianStream stream, std::uint32_t max_adjustments)
    : id_(id),
      area_(area),
      config_(config),
      stream_(std::move(stream)),
      max_adjustments_(max_adjustments) {
  retained_noise_.reserve(config_.interval_count() - 1);
}

NoisyReading Meter::report_interval(double consumption_kwh, double tariff,
                                    std::uint32_t interval_index) {
  if (phase_ != MeterPhase::open) {
    fail(Errc::phase_error, "meter " + to_string(id_) + " is " +
                                to_string(phase_) + ", cannot report");
  }
  const std::uint32_t expected =
      static_cast<std::uint32_t>(retained_noise_.size()) + 1;
  if (interval_index != expected || interval_index >= config_.interval_count()) {
    fail(Errc::sequence_error,
         "meter " + to_string(id_) + " expected interval " +
             std::to_string(expected) + " of 1.." +
             std::to_string(config_.interval_count() - 1) + ", got " +
             std::to_string(interval_index));
  }
  if (!std::isfinite(tariff) || tariff <= 0.0) {
    fail(Errc::price_not_positive, "tariff must be finite and > 0");
  }
  if (!std::isfinite(consumption_kwh) || consumption_kwh < 0.0) {
    fail(Errc::validation_error, "consumption must be finite and >= 0");
  }

  const double noise = stream_->next();
  retained_noise_.push_back(noise);
  weighted_sum_ += noise * tariff;
  return make_noisy_reading(id_, interval_index, consumption_kwh, noise);
}

NoisyReading Meter::close_period(double consumption_kwh, double tariff) {
  if (phase_ != MeterPhase::open) {
    fail(Errc::phase_error, "meter " + to_string(id_) + " is " +
                                to_string(phase_) + ", cannot close");
  }
  if (retained_noise_.size() != config_.interval_count() - 1u) {
    fail(Errc::sequence_error,
         "meter " + to_string(id_) + " has reported " +
             std::to_string(retained_noise_.size()) + " intervals, needs " +
             std::to_string(config_.interval_count() - 1) + " before closing");
  }
  if (!std::isfinite(consumption_kwh) || consumption_kwh < 0.0) {
    fail(Errc::validation_error, "consumption must be finite and >= 0");
  }

  const double noise = closing_noise(weighted_sum_, tariff);
  last_true_reading_ = consumption_kwh;
  phase_ = MeterPhase::closed;
  return make_noisy_reading(id_, config_.interval_count(), consumption_kwh,
                            noise);
}

NoisyReading Meter::apply_tariff_adjustment(const TariffSchedule& new_tariffs) {
  if (phase_ != MeterPhase::closed) {
    fail(Errc::phase_error, "meter " + to_string(id_) + " is " +
                                to_string(phase_) +
                                ", adjustments need a closed period");
  }
  if (adjustments_applied_ >= max_adjustments_) {
    fail(Errc::adjustment_budget_exhausted,
         "meter " + to_string(id_) + " already applied " +
             std::to_string(adjustments_applied_) + " adjustment(s)");
  }
  validate_tariff_schedule(new_tariffs, config_);

  const double noise = closing_noise_adjusted(retained_noise_, new_tariffs);
  ++adjustments_applied_;
  return make_noisy_reading(id_, config_.interval_count(), *last_true_reading_,
                            noise, /*replacement_flag=*/true);
}

void Meter::purge() {
  if (phase_ == MeterPhase::purged) {
    return;
  }
  if (phase_ != MeterPhase::closed) {
    fail(Errc::phase_error,
         "meter " + to_string(id_) + " cannot purge an open period");
  }
  retained_noise_.clear();
  retained_noise_.shrink_to_fit();
  weighted_sum_ = 0.0;
  last_true_reading_.reset();
  stream_.reset();
  phase_ = MeterPhase::purged;
}

std::size_t Meter::state_bytes() const {
  std::size_t bytes = retained_noise_.size() * sizeof(double);
  bytes += sizeof(weighted_sum_);
  if (last_true_reading_) bytes += sizeof(double);
  return bytes;
}

Meter Meter::restore_closed(MeterId id, AreaId area, BillingPeriodConfig config,
                            std::vector<double> retained_noise,
                            double last_true_reading,
                            std::uint32_t adjustments_applied,
                            std::uint32_t max_adjustments) {
  if (retained_noise.size() != config.interval_count() - 1u) {
    fail(Errc::length_mismatch,
         "restored noise vector for meter " + to_string(id) + " has " +
             std::to_string(retained_noise.size()) + " values, expected " +
             std::to_string(config.interval_count() - 1));
  }
  Meter meter(id, area, config);
  meter.retained_noise_ = std::move(retained_noise);
  for (const double noise : meter.retained_noise_) {
    if (!std::isfinite(noise)) {
      fail(Errc::validation_error, "restored noise values must be finite");
    }
  }
  meter.last_true_reading_ = last_true_reading;
  meter.adjustments_applied_ = adjustments_applied;
  meter.max_adjustments_ = max_adjustments;
  meter.phase_ = MeterPhase::closed;
  return meter;
}

Meter::Meter(MeterId id, AreaId area, BillingPeriodConfig config)
    : id_(id), area_(area), config_(config), max_adjustments_(1) {}

}  // namespace privmeter
