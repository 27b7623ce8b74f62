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

#pragma once

#include "fever/metrics.hpp"
#include "fever/sim_config.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fever {

enum class ExperimentMode
{
  measure,
  verify,
  replay,  // every cell is simulated, serialised, parsed back and re-measured
};

std::string_view to_string(ExperimentMode mode);
ExperimentMode   parse_experiment_mode(std::string_view text);

/// A config template plus the grid of values to run it over.
///
/// Sweep keys are dotted paths into the config document ("corruption.strategy",
/// "offsets.mode", ...). The key "f" is shorthand for "corruption.count". A
/// value may be a range string "a..b" of integers where either end can be "t",
/// resolved against the cell's n. Sweeps holding ranges expand after the rest.
struct ExperimentSpec
{
  nlohmann::json                                             base = nlohmann::json::object();
  std::vector<std::pair<std::string, std::vector<nlohmann::json>>> sweeps;
  std::uint64_t                                              seed_count{1};
  std::uint64_t                                              seed_base{0};
  ExperimentMode                                             mode{ExperimentMode::measure};
  std::string                                                out_dir;  // empty: no files
  bool                                                       write_traces{false};
  std::size_t                                                max_cells{200000};
};

/// Accepts either an experiment document (one with a "base" key) or a bare
/// config document, which becomes a single cell using its own seed.
ExperimentSpec experiment_spec_from_json(nlohmann::json const &doc);

struct Cell
{
  std::size_t    index{0};
  nlohmann::json config;
};

/// Cartesian expansion in sweep order, seeds innermost. Throws ConfigError
/// when the expansion exceeds max_cells.
std::vector<Cell> expand_cells(ExperimentSpec const &spec);

struct CellResult
{
  std::size_t               index{0};
  nlohmann::json            config;
  std::optional<RunMetrics> metrics;
  std::string               error;  // refusal or replay mismatch
};

struct SummaryRow
{
  std::uint32_t n{0};
  std::uint32_t f{0};
  std::size_t   runs{0};
  std::size_t   errors{0};
  std::size_t   violations{0};
  std::size_t   without_t_star{0};
  double        max_latency{0};
  double        mean_latency{0};
  std::uint64_t max_words{0};
  double        mean_words{0};
  double        max_f_star{0};
};

struct ExperimentSummary
{
  std::vector<SummaryRow> rows;  // sorted by (n, f)
  std::size_t             cells{0};
  std::size_t             errors{0};
  std::size_t             violations{0};
  double                  empirical_w{0};  // max words / ((f* + 3) n)
  std::optional<double>   empirical_c;     // max (latency - gamma) / delta, f = 0 and delta <= delta_cap / 10
};

struct ExperimentResult
{
  std::vector<CellResult> cells;  // in cell order
  ExperimentSummary       summary;
};

/// Runs every cell on `jobs` worker threads. Each cell is an isolated
/// simulation; trace files are written under a lock. Metrics files are
/// written once all cells finish, in cell order.
ExperimentResult run_experiment(ExperimentSpec const &spec, unsigned jobs = 1);

ExperimentSummary summarize(std::vector<CellResult> const &cells);

/// One flat record per run.
nlohmann::json metrics_record(CellResult const &cell);
std::string    metrics_csv_header();
std::string    metrics_csv_row(CellResult const &cell);

void write_metrics_jsonl(std::ostream &out, std::vector<CellResult> const &cells);
void write_metrics_csv(std::ostream &out, std::vector<CellResult> const &cells);
void write_summary_csv(std::ostream &out, ExperimentSummary const &summary);

struct ReplayResult
{
  RunMetrics                    metrics;
  std::optional<nlohmann::json> stored;  // metrics embedded in the trace, if any
  bool                          matches{true};
};

/// Recomputes metrics and invariants from a stored trace without simulating.
/// Throws TraceParseError on malformed input.
ReplayResult replay(std::string const &trace_path);
ReplayResult replay(std::istream &in);

}  // namespace fever
