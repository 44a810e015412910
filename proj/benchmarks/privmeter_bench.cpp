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

#include <benchmark/benchmark.h>

#include <vector>

#include "privmeter/dataset.hpp"
#include "privmeter/meter.hpp"
#include "privmeter/network_sim.hpp"
#include "privmeter/overhead_model.hpp"
#include "privmeter/privacy_eval.hpp"

namespace {

using namespace privmeter;

SeedMaterial bench_seed() {
  SeedMaterial seed;
  seed.secret.fill(0xB3);
  seed.meter = MeterId{1};
  seed.period_id = 1;
  return seed;
}

void BM_GaussianDraw(benchmark::State& state) {
  GaussianStream stream = derive_stream(bench_seed(), 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stream.next());
  }
}
BENCHMARK(BM_GaussianDraw);

void BM_MeterPeriod(benchmark::State& state) {
  const auto interval_count = static_cast<std::uint32_t>(state.range(0));
  const BillingPeriodConfig config(1440, interval_count);
  const std::vector<double> prices(interval_count, 0.12);

  for (auto _ : state) {
    Meter meter(MeterId{1}, AreaId{1}, config,
                derive_stream(bench_seed(), 1.0));
    for (std::uint32_t i = 1; i < interval_count; ++i) {
      benchmark::DoNotOptimize(meter.report_interval(1.25, prices[i - 1], i));
    }
    benchmark::DoNotOptimize(meter.close_period(1.25, prices.back()));
  }
  state.SetItemsProcessed(state.iterations() * interval_count);
}
BENCHMARK(BM_MeterPeriod)->Arg(96)->Arg(2880);

void BM_ScenarioOne(benchmark::State& state) {
  const auto meters = static_cast<std::uint32_t>(state.range(0));
  SimConfig config;
  config.period = BillingPeriodConfig(15, 1);
  std::vector<MeterId> ids;
  for (std::uint32_t m = 1; m <= meters; ++m) {
    ids.push_back(MeterId{m});
    config.areas[MeterId{m}] = AreaId{1 + (m - 1) % 4};
  }
  const auto consumption = generate_synthetic(meters, config.period, 1);
  std::map<AreaId, TariffSchedule> tariffs;
  for (std::uint64_t area = 1; area <= 4; ++area) {
    tariffs[AreaId{area}] =
        TariffSchedule{AreaId{area}, std::vector<double>(96, 0.10)};
  }
  const SeedStore seeds = SeedStore::derive_from_master(2, ids);

  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_scenario_one(config, consumption, tariffs, seeds));
  }
  state.SetItemsProcessed(state.iterations() * meters * 96);
}
BENCHMARK(BM_ScenarioOne)->Arg(20)->Arg(100);

void BM_PacketSize(benchmark::State& state) {
  const auto stacks = default_link_stacks();
  std::uint64_t payload = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(packet_size(payload, stacks[0]));
    payload = payload % 16384 + 1;
  }
}
BENCHMARK(BM_PacketSize);

void BM_JsDivergence(benchmark::State& state) {
  const auto bins = static_cast<std::size_t>(state.range(0));
  std::vector<double> q_data;
  std::vector<double> p_data;
  GaussianStream stream = derive_stream(bench_seed(), 1.0);
  for (int i = 0; i < 10'000; ++i) {
    q_data.push_back(stream.next());
    p_data.push_back(stream.next() + 0.5);
  }
  const auto edges = equal_width_edges(-6.0, 7.0, bins);
  const DiscretePmf q = histogram(q_data, edges);
  const DiscretePmf p = histogram(p_data, edges);

  for (auto _ : state) {
    benchmark::DoNotOptimize(js_divergence(q, p));
  }
}
BENCHMARK(BM_JsDivergence)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
