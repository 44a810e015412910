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

#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "privmeter/dataset.hpp"
#include "privmeter/kv_config.hpp"
#include "privmeter/network_sim.hpp"
#include "privmeter/overhead_model.hpp"
#include "privmeter/privacy_eval.hpp"
#include "privmeter/state_io.hpp"

namespace privmeter::cli {

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(Errc::io_error, "cannot read '" + path + "'");
  }
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    fail(Errc::io_error, "cannot write '" + path + "'");
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out = open_output(path);
  out << content;
  if (!out) {
    fail(Errc::io_error, "failed writing '" + path + "'");
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in = open_input(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct SimulateOptions {
  std::string dataset_path;
  std::string tariffs_path;
  std::uint32_t interval_minutes = 15;
  std::uint32_t days = 1;
  double sigma = 1.0;
  std::string seeds_path;
  std::string out_path;
  std::string trace_path;
  std::string state_out_path;
  std::string areas_path;
  std::uint64_t period_id = 1;
  std::uint32_t max_adjustments = 1;
};

int run_simulate(const SimulateOptions& options) {
  const BillingPeriodConfig config(options.interval_minutes, options.days);

  std::ifstream dataset_in = open_input(options.dataset_path);
  const auto consumption = load_consumption_csv(dataset_in, config);

  std::ifstream tariffs_in = open_input(options.tariffs_path);
  const auto tariffs = load_tariff_csv(tariffs_in, config);

  std::ifstream seeds_in = open_input(options.seeds_path);
  const SeedStore seeds = load_seed_file(seeds_in);

  std::map<MeterId, AreaId> areas;
  if (!options.areas_path.empty()) {
    std::ifstream areas_in = open_input(options.areas_path);
    for (const auto& [key, value] : parse_kv_flat(areas_in).entries) {
      areas[MeterId{parse_u64(key, "areas file meter id")}] =
          AreaId{parse_u64(value, "areas file area id")};
    }
    for (const auto& [meter, _] : consumption) {
      if (!areas.count(meter)) {
        fail(Errc::validation_error, "areas file does not map meter " +
                                         to_string(meter));
      }
    }
  } else {
    if (tariffs.size() != 1) {
      fail(Errc::validation_error,
           "tariff file covers " + std::to_string(tariffs.size()) +
               " areas; pass --areas to map meters to areas");
    }
    const AreaId only_area = tariffs.begin()->first;
    for (const auto& [meter, _] : consumption) {
      areas[meter] = only_area;
    }
  }

  if (options.max_adjustments > 1) {
    std::cerr << "warning: max adjustments set to "
              << options.max_adjustments
              << "; every adjustment publishes one more linear relation over "
                 "the retained noise\n";
  }

  SimConfig sim_config;
  sim_config.period = config;
  sim_config.areas = std::move(areas);
  sim_config.sigma = options.sigma;
  sim_config.period_id = options.period_id;
  sim_config.max_adjustments = options.max_adjustments;

  Simulation simulation(sim_config, consumption, tariffs, seeds);
  const SimResult result = simulation.run_scenario_one();

  std::vector<BillRow> rows;
  rows.reserve(result.final_bills.size());
  for (const auto& [meter, bill] : result.final_bills) {
    rows.push_back(BillRow{meter, options.period_id, bill, false});
  }
  std::ofstream bills_out = open_output(options.out_path);
  write_bills_csv(bills_out, rows);

  if (!options.trace_path.empty()) {
    write_file(options.trace_path, result.trace);
  }
  if (!options.state_out_path.empty()) {
    std::ofstream state_out = open_output(options.state_out_path);
    save_state(state_out, capture_state(simulation));
  }
  return 0;
}

struct RebillOptions {
  std::string state_path;
  std::string new_tariffs_path;
  std::string out_path;
  std::string state_out_path;
};

int run_rebill(const RebillOptions& options) {
  std::ifstream state_in = open_input(options.state_path);
  SimulationState state = load_state(state_in);

  std::ifstream tariffs_in = open_input(options.new_tariffs_path);
  const auto new_tariffs = load_tariff_csv(tariffs_in, state.config);

  const RebillOutcome outcome = rebill_from_state(state, new_tariffs);
  if (!outcome.failures.empty()) {
    for (const auto& [meter, code] : outcome.failures) {
      std::cerr << "error: meter " << to_string(meter) << ": "
                << to_string(code) << '\n';
    }
    return 1;
  }

  std::vector<BillRow> rows;
  rows.reserve(outcome.rebilled_bills.size());
  for (const auto& [meter, bill] : outcome.rebilled_bills) {
    rows.push_back(
        BillRow{meter, state.period_id, bill, outcome.adjusted_flags.at(meter)});
  }
  std::ofstream bills_out = open_output(options.out_path);
  write_bills_csv(bills_out, rows);

  if (!options.state_out_path.empty()) {
    std::ofstream state_out = open_output(options.state_out_path);
    save_state(state_out, state);
  }
  return 0;
}

struct PrivacyEvalOptions {
  std::string dataset_path;
  std::string tariffs_path;
  std::vector<double> scales;
  std::size_t bins = 64;
  std::uint64_t seed = 1;
  std::string out_path;
  std::string bins_out_path;
};

int run_privacy_eval(const PrivacyEvalOptions& options) {
  // The sweep only needs the interval count; infer it from the tariff file.
  const std::string tariff_text = slurp(options.tariffs_path);
  std::uint32_t interval_count = 0;
  {
    std::istringstream probe(tariff_text);
    interval_count =
        max_interval_index_csv(probe, "area_id,interval_index,price");
  }
  const BillingPeriodConfig config(1440, interval_count);

  std::istringstream tariffs_in(tariff_text);
  const auto tariffs = load_tariff_csv(tariffs_in, config);
  if (tariffs.size() != 1) {
    fail(Errc::validation_error,
         "privacy-eval expects a single-area tariff file, found " +
             std::to_string(tariffs.size()) + " areas");
  }

  std::ifstream dataset_in = open_input(options.dataset_path);
  const auto consumption = load_consumption_csv(dataset_in, config);

  std::vector<ConsumptionSeries> series;
  series.reserve(consumption.size());
  for (const auto& [_, one] : consumption) series.push_back(one);

  const auto sweep =
      noise_scale_sweep(series, tariffs.begin()->second, options.scales,
                        options.bins, options.seed);

  std::ofstream out = open_output(options.out_path);
  out << "scale,js_divergence\n";
  char line[96];
  for (const SweepPoint& point : sweep) {
    std::snprintf(line, sizeof(line), "%g,%.6f\n", point.scale, point.js);
    out << line;
  }
  return 0;
}

struct OverheadOptions {
  std::string links_path;
  std::vector<std::uint64_t> payloads;
  std::string out_path;
};

int run_overhead_report(const OverheadOptions& options) {
  std::vector<LinkStack> stacks;
  std::string links_path = options.links_path;
  if (links_path.empty()) {
    if (const char* config_dir = std::getenv("PRIVMETER_CONFIG_DIR")) {
      const std::filesystem::path candidate =
          std::filesystem::path(config_dir) / "links.conf";
      if (std::filesystem::exists(candidate)) {
        links_path = candidate.string();
      }
    }
  }
  if (links_path.empty()) {
    const auto defaults = default_link_stacks();
    stacks.assign(defaults.begin(), defaults.end());
  } else {
    std::ifstream links_in = open_input(links_path);
    stacks = load_link_stacks(links_in);
  }

  std::ofstream out = open_output(options.out_path);
  write_overhead_report(out, stacks, options.payloads);
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Privacy-preserving smart-metering billing simulator"};
  app.require_subcommand(1);

  SimulateOptions simulate;
  CLI::App* simulate_cmd = app.add_subcommand(
      "simulate", "Run one billing period and export the bills");
  simulate_cmd->add_option("--dataset", simulate.dataset_path,
                           "Consumption CSV (meter_id,interval_index,kwh)")
      ->required();
  simulate_cmd->add_option("--tariffs", simulate.tariffs_path,
                           "Tariff CSV (area_id,interval_index,price)")
      ->required();
  simulate_cmd->add_option("--interval-mins", simulate.interval_minutes,
                           "Reporting interval length in minutes")
      ->required();
  simulate_cmd->add_option("--days", simulate.days, "Billing period in days")
      ->required();
  simulate_cmd->add_option("--sigma", simulate.sigma,
                           "Noise standard deviation in kWh");
  simulate_cmd->add_option("--seeds", simulate.seeds_path,
                           "Seed file (meter_id=hex per line)")
      ->required();
  simulate_cmd->add_option("--out", simulate.out_path, "Bills CSV to write")
      ->required();
  simulate_cmd->add_option("--trace", simulate.trace_path,
                           "Event trace file to write");
  simulate_cmd->add_option("--state-out", simulate.state_out_path,
                           "Simulation state file for a later rebill");
  simulate_cmd->add_option("--areas", simulate.areas_path,
                           "meter=area mapping file (key=value lines)");
  simulate_cmd->add_option("--period-id", simulate.period_id,
                           "Billing period counter");
  simulate_cmd->add_option("--max-adjustments", simulate.max_adjustments,
                           "Tariff adjustments allowed per period");

  RebillOptions rebill;
  CLI::App* rebill_cmd = app.add_subcommand(
      "rebill", "Recompute bills from saved state under new tariffs");
  rebill_cmd->add_option("--state", rebill.state_path, "Simulation state file")
      ->required();
  rebill_cmd->add_option("--new-tariffs", rebill.new_tariffs_path,
                         "Replacement tariff CSV")
      ->required();
  rebill_cmd->add_option("--out", rebill.out_path, "Bills CSV to write")
      ->required();
  rebill_cmd->add_option("--state-out", rebill.state_out_path,
                         "Updated state file to write");

  PrivacyEvalOptions privacy;
  CLI::App* privacy_cmd = app.add_subcommand(
      "privacy-eval", "JS divergence between original and noisy readings");
  privacy_cmd->add_option("--dataset", privacy.dataset_path, "Consumption CSV")
      ->required();
  privacy_cmd->add_option("--tariffs", privacy.tariffs_path,
                          "Single-area tariff CSV")
      ->required();
  privacy_cmd->add_option("--scales", privacy.scales,
                          "Comma-separated sigma multipliers")
      ->required()
      ->delimiter(',');
  privacy_cmd->add_option("--bins", privacy.bins, "Histogram bins");
  privacy_cmd->add_option("--seed", privacy.seed, "Master seed");
  privacy_cmd->add_option("--out", privacy.out_path, "Sweep CSV to write")
      ->required();

  OverheadOptions overhead;
  CLI::App* overhead_cmd = app.add_subcommand(
      "overhead-report", "Per-link packet sizes and transmission times");
  overhead_cmd->add_option("--links", overhead.links_path,
                           "Link stack config; defaults to "
                           "$PRIVMETER_CONFIG_DIR/links.conf or built-ins");
  overhead_cmd->add_option("--payloads", overhead.payloads,
                           "Comma-separated payload sizes in bytes")
      ->required()
      ->delimiter(',');
  overhead_cmd->add_option("--out", overhead.out_path, "Report CSV to write")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    return app.exit(error);
  }

  try {
    if (simulate_cmd->parsed()) return run_simulate(simulate);
    if (rebill_cmd->parsed()) return run_rebill(rebill);
    if (privacy_cmd->parsed()) return run_privacy_eval(privacy);
    if (overhead_cmd->parsed()) return run_overhead_report(overhead);
  } catch (const Error& error) {
    std::cerr << "error: " << error.what() << '\n';
    return 1;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << '\n';
    return 1;
  }
  return 0;
}

int cli_main(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("privmeter");
  for (const std::string& arg : args) {
    argv.push_back(arg.c_str());
  }
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace privmeter::cli
