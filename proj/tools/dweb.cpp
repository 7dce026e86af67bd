/*
 * Copyright (c) 2026 The dweb Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line front end: estimate, load, workload, run, reset.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "dweb/cli.hpp"

int main(int argc, char** argv) {
  using namespace dweb::cli;
  CLI::App app{"dweb: data warehouse benchmark generator"};
  app.require_subcommand(1);
  Options o;

  auto add_params = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config, "Parameter file (KEY=value lines)");
    cmd->add_option("--low-level", o.low_level, "Low-level parameter file, bypasses derivation");
    cmd->add_option("--seed", o.seed, "Master seed (overrides SEED)");
  };
  auto add_backend = [&](CLI::App* cmd) {
    cmd->add_option("--db", o.db, "Database file path or connection URI")->required();
    cmd->add_option("--dialect", o.dialect, "SQL dialect override (ansi, sqlite, postgresql, mysql)");
    cmd->add_option("--batch-size", o.batch_size, "Rows per bulk insert batch")->check(CLI::PositiveNumber);
  };

  auto* estimate = app.add_subcommand("estimate", "Print the estimated warehouse size");
  add_params(estimate);

  auto* load = app.add_subcommand("load", "Create and fill the warehouse");
  add_params(load);
  add_backend(load);
  load->add_option("--out", o.out, "Also write the DDL to this file");
  load->add_option("--csv", o.csv, "Also export table contents as CSV into this directory");
  load->add_flag("--force-reset", o.force_reset, "Drop existing warehouse tables first");

  auto* workload = app.add_subcommand("workload", "Generate and save a workload");
  add_params(workload);
  workload->add_option("--out", o.out, "Workload file to write")->required();

  auto* run = app.add_subcommand("run", "Run the performance test");
  add_params(run);
  add_backend(run);
  run->add_option("--workload", o.workload, "Workload file to execute");
  run->add_option("--csv", o.csv, "CSV file for the timings");
  run->add_option("--repn", o.repn, "Number of warm runs (overrides REPN)");
  run->add_flag("--new-workload", o.new_workload, "Generate the workload instead of loading it");
  run->add_flag("--continue-on-error", o.continue_on_error, "Record failing queries and carry on");

  auto* reset = app.add_subcommand("reset", "Drop every warehouse table");
  add_backend(reset);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  if (estimate->parsed()) return cmd_estimate(o, std::cout, std::cerr);
  if (load->parsed()) return cmd_load(o, std::cout, std::cerr);
  if (workload->parsed()) return cmd_workload(o, std::cout, std::cerr);
  if (run->parsed()) return cmd_run(o, std::cout, std::cerr);
  return cmd_reset(o, std::cout, std::cerr);
}
