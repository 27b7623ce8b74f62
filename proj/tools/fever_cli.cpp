//------------------------------------------------------------------------------
//
//   Copyright 2026 The fever-sim Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include "fever/experiment.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

namespace {

using nlohmann::json;

struct Options
{
  std::string                  input;
  std::optional<std::uint64_t> seed;
  unsigned                     jobs{std::max(1u, std::thread::hardware_concurrency())};
  std::string                  out;
  std::string                  horizon;
};

fever::ExperimentSpec load_spec(Options const &opt, fever::ExperimentMode mode)
{
  std::ifstream in(opt.input);
  if (!in)
  {
    throw fever::ConfigError("cannot open '" + opt.input + "'");
  }
  json doc;
  try
  {
    doc = json::parse(in);
  }
  catch (json::parse_error const &e)
  {
    throw fever::ConfigError(opt.input + " is not valid JSON: " + e.what());
  }
  auto spec = fever::experiment_spec_from_json(doc);
  spec.mode = mode;
  if (opt.seed)
  {
    spec.seed_base = *opt.seed;
  }
  if (!opt.horizon.empty())
  {
    spec.base["horizon"] = opt.horizon;
  }
  if (!opt.out.empty())
  {
    spec.out_dir      = opt.out;
    spec.write_traces = true;
  }
  return spec;
}

void print_totals(fever::ExperimentSummary const &s)
{
  std::cout << "cells: " << s.cells << "\nerrors: " << s.errors << "\nviolations: " << s.violations
            << "\nempirical_W: " << s.empirical_w << " (frozen " << fever::kWordConstant << ")\n";
  if (s.empirical_c)
  {
    std::cout << "empirical_C: " << *s.empirical_c << " (frozen "
              << fever::kResponsivenessConstant << ")\n";
  }
}

void print_violations(std::vector<fever::CellResult> const &cells, std::size_t limit)
{
  std::size_t shown = 0;
  for (auto const &c : cells)
  {
    if (!c.metrics)
    {
      continue;
    }
    for (auto const &v : c.metrics->violations)
    {
      if (shown++ == limit)
      {
        return;
      }
      std::cerr << "cell " << c.index << " seq " << v.seq << " " << v.invariant << ": " << v.detail
                << "\n";
    }
  }
}

int cmd_run(Options const &opt)
{
  auto const result = fever::run_experiment(load_spec(opt, fever::ExperimentMode::measure), opt.jobs);
  fever::write_metrics_jsonl(std::cout, result.cells);
  for (auto const &c : result.cells)
  {
    if (!c.error.empty())
    {
      std::cerr << "cell " << c.index << ": " << c.error << "\n";
    }
  }
  return result.summary.errors == result.summary.cells ? 2 : 0;
}

int cmd_verify(Options const &opt)
{
  auto const result = fever::run_experiment(load_spec(opt, fever::ExperimentMode::verify), opt.jobs);
  print_violations(result.cells, 20);
  print_totals(result.summary);
  return result.summary.violations > 0 ? 1 : 0;
}

int cmd_sweep(Options const &opt)
{
  auto const result = fever::run_experiment(load_spec(opt, fever::ExperimentMode::measure), opt.jobs);
  fever::write_summary_csv(std::cout, result.summary);
  print_totals(result.summary);
  return 0;
}

int cmd_replay(Options const &opt)
{
  auto const r = fever::replay(opt.input);
  std::cout << fever::metrics_json(r.metrics).dump(1) << "\n";
  if (!r.stored)
  {
    std::cerr << "trace carries no stored metrics\n";
    return 0;
  }
  if (!r.matches)
  {
    std::cerr << "replayed metrics differ from the stored ones\n";
    return 1;
  }
  std::cerr << "replayed metrics match\n";
  return 0;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Fever view synchronisation simulator"};
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App *sub, char const *what) {
    sub->add_option("input", opt.input, what)->required();
    sub->add_option("--seed", opt.seed, "Base seed; overrides the one in the input file");
    sub->add_option("--jobs", opt.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", opt.out, "Directory for metrics, summary and traces");
    sub->add_option("--horizon", opt.horizon, "Simulation horizon, e.g. 120 or 361/3");
  };

  auto *run    = app.add_subcommand("run", "Run every cell and print one metrics record per run");
  auto *verify = app.add_subcommand("verify", "Run every cell with the invariant suite; nonzero exit on violations");
  auto *sweep  = app.add_subcommand("sweep", "Run every cell and print the per (n, f) summary");
  auto *replay = app.add_subcommand("replay", "Recompute metrics and invariants from a stored trace");
  add_common(run, "Run config or experiment file (JSON)");
  add_common(verify, "Run config or experiment file (JSON)");
  add_common(sweep, "Experiment file (JSON)");
  replay->add_option("trace", opt.input, "ND-JSON trace")->required();

  CLI11_PARSE(app, argc, argv);

  try
  {
    if (run->parsed())
    {
      return cmd_run(opt);
    }
    if (verify->parsed())
    {
      return cmd_verify(opt);
    }
    if (sweep->parsed())
    {
      return cmd_sweep(opt);
    }
    return cmd_replay(opt);
  }
  catch (fever::TraceParseError const &e)
  {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  }
  catch (std::exception const &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
