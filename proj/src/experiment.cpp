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

#include "fever/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace fever {

using nlohmann::json;

std::string_view to_string(ExperimentMode mode)
{
  switch (mode)
  {
  case ExperimentMode::measure:
    return "measure";
  case ExperimentMode::verify:
    return "verify";
  case ExperimentMode::replay:
    return "replay";
  }
  return "unknown";
}

ExperimentMode parse_experiment_mode(std::string_view text)
{
  for (auto mode : {ExperimentMode::measure, ExperimentMode::verify, ExperimentMode::replay})
  {
    if (to_string(mode) == text)
    {
      return mode;
    }
  }
  throw ConfigError("unknown experiment mode: '" + std::string(text) + "'");
}

ExperimentSpec experiment_spec_from_json(json const &doc)
{
  if (!doc.is_object())
  {
    throw ConfigError("experiment spec must be a JSON object");
  }
  ExperimentSpec spec;
  if (!doc.contains("base"))
  {
    spec.base      = doc;
    spec.seed_base = doc.value("seed", std::uint64_t{0});
    return spec;
  }

  static std::set<std::string> const known = {"base", "sweeps", "seeds", "mode", "output",
                                              "max_cells"};
  for (auto const &[key, value] : doc.items())
  {
    if (!known.contains(key))
    {
      throw ConfigError("unknown experiment key: '" + key + "'");
    }
  }
  try
  {
    spec.base = doc.at("base");
    if (!spec.base.is_object())
    {
      throw ConfigError("experiment base must be a JSON object");
    }
    if (doc.contains("sweeps"))
    {
      for (auto const &[key, values] : doc.at("sweeps").items())
      {
        std::vector<json> list;
        if (values.is_array())
        {
          list.assign(values.begin(), values.end());
        }
        else
        {
          list.push_back(values);
        }
        if (list.empty())
        {
          throw ConfigError("sweep '" + key + "' has no values");
        }
        spec.sweeps.emplace_back(key, std::move(list));
      }
      // Object keys arrive sorted, so ranges go last to see the swept n.
      std::stable_partition(spec.sweeps.begin(), spec.sweeps.end(), [](auto const &sweep) {
        return std::none_of(sweep.second.begin(), sweep.second.end(), [](json const &v) {
          return v.is_string() && v.template get<std::string>().find("..") != std::string::npos;
        });
      });
    }
    if (doc.contains("seeds"))
    {
      auto const &s   = doc.at("seeds");
      spec.seed_count = s.value("count", std::uint64_t{1});
      spec.seed_base  = s.value("base", std::uint64_t{0});
    }
    else
    {
      spec.seed_base = spec.base.value("seed", std::uint64_t{0});
    }
    if (doc.contains("mode"))
    {
      spec.mode = parse_experiment_mode(doc.at("mode").get<std::string>());
    }
    if (doc.contains("output"))
    {
      auto const &o     = doc.at("output");
      spec.out_dir      = o.value("dir", std::string{});
      spec.write_traces = o.value("traces", false);
    }
    spec.max_cells = doc.value("max_cells", spec.max_cells);
  }
  catch (json::exception const &e)
  {
    throw ConfigError(std::string("malformed experiment spec: ") + e.what());
  }
  return spec;
}

namespace {

void set_path(json &doc, std::string const &key, json const &value)
{
  std::string const path = key == "f" ? "corruption.count" : key;
  json             *node = &doc;
  std::size_t       pos  = 0;
  while (true)
  {
    auto const dot  = path.find('.', pos);
    auto const part = path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (dot == std::string::npos)
    {
      (*node)[part] = value;
      return;
    }
    json &child = (*node)[part];
    if (!child.is_object())
    {
      // A string shorthand such as "network": "fixed_delta" becomes {"kind": ...}.
      child = child.is_string() ? json{{"kind", child}} : json::object();
    }
    node = &child;
    pos  = dot + 1;
  }
}

std::uint32_t fault_bound_of(json const &doc)
{
  if (doc.contains("t"))
  {
    return doc.at("t").get<std::uint32_t>();
  }
  return default_fault_bound(doc.value("n", 4u));
}

std::vector<json> resolve_values(std::vector<json> const &values, json const &doc)
{
  std::vector<json> out;
  for (auto const &v : values)
  {
    if (!v.is_string())
    {
      out.push_back(v);
      continue;
    }
    auto const text = v.get<std::string>();
    auto const dots = text.find("..");
    if (dots == std::string::npos)
    {
      out.push_back(v);
      continue;
    }
    auto const bound = [&](std::string const &s) -> std::int64_t {
      if (s == "t")
      {
        return fault_bound_of(doc);
      }
      try
      {
        std::size_t used = 0;
        auto const  x    = std::stoll(s, &used);
        if (used == s.size())
        {
          return x;
        }
      }
      catch (std::exception const &)
      {
      }
      throw ConfigError("malformed range '" + text + "'");
    };
    auto const lo = bound(text.substr(0, dots));
    auto const hi = bound(text.substr(dots + 2));
    for (auto x = lo; x <= hi; ++x)
    {
      out.emplace_back(x);
    }
  }
  return out;
}

void expand_from(ExperimentSpec const &spec, std::size_t depth, json const &doc,
                 std::vector<Cell> &out)
{
  if (depth == spec.sweeps.size())
  {
    for (std::uint64_t s = 0; s < spec.seed_count; ++s)
    {
      if (out.size() >= spec.max_cells)
      {
        throw ConfigError("experiment expands beyond the cap of " +
                          std::to_string(spec.max_cells) + " cells");
      }
      json cell    = doc;
      cell["seed"] = spec.seed_base + s;
      out.push_back(Cell{out.size(), std::move(cell)});
    }
    return;
  }
  auto const &[key, values] = spec.sweeps[depth];
  for (auto const &v : resolve_values(values, doc))
  {
    json next = doc;
    set_path(next, key, v);
    expand_from(spec, depth + 1, next, out);
  }
}

std::string cell_name(std::size_t index)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "cell-%06zu.ndjson", index);
  return buf;
}

CellResult run_cell(Cell const &cell, ExperimentSpec const &spec, std::mutex &file_lock)
{
  CellResult r;
  r.index  = cell.index;
  r.config = cell.config;
  try
  {
    auto const cfg     = sim_config_from_json(cell.config);
    auto const trace   = simulate(cfg);
    auto       metrics = compute_metrics(trace);
    json const mj      = metrics_json(metrics);

    if (spec.mode == ExperimentMode::replay || (spec.write_traces && !spec.out_dir.empty()))
    {
      std::string const text = trace_to_string(trace, &mj);
      if (spec.mode == ExperimentMode::replay)
      {
        std::istringstream in(text);
        auto const         parsed = read_trace(in);
        if (trace_to_string(parsed.trace, &mj) != text)
        {
          r.error = "trace does not round-trip";
        }
        else if (metrics_json(compute_metrics(parsed.trace)) != mj)
        {
          r.error = "replayed metrics differ from the run";
        }
      }
      if (spec.write_traces && !spec.out_dir.empty())
      {
        std::lock_guard<std::mutex> guard(file_lock);
        auto const dir = std::filesystem::path(spec.out_dir) / "traces";
        std::filesystem::create_directories(dir);
        std::ofstream(dir / cell_name(cell.index)) << text;
      }
    }
    r.metrics = std::move(metrics);
  }
  catch (ConfigError const &e)
  {
    r.error = e.what();
  }
  catch (std::exception const &e)
  {
    r.error = std::string("internal error: ") + e.what();
  }
  return r;
}

std::string csv_time(std::optional<Time> const &t)
{
  return t ? to_string(*t) : std::string{};
}

}  // namespace

std::vector<Cell> expand_cells(ExperimentSpec const &spec)
{
  std::vector<Cell> out;
  expand_from(spec, 0, spec.base, out);
  return out;
}

ExperimentSummary summarize(std::vector<CellResult> const &cells)
{
  ExperimentSummary                                         s;
  std::map<std::pair<std::uint32_t, std::uint32_t>, SummaryRow> rows;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> with_latency;

  s.cells = cells.size();
  for (auto const &c : cells)
  {
    if (!c.metrics)
    {
      ++s.errors;
      auto const n = c.config.value("n", 4u);
      std::uint32_t f = 0;
      if (c.config.contains("corruption") && c.config.at("corruption").is_object())
      {
        f = c.config.at("corruption").value("count", 0u);
      }
      auto &row = rows[{n, f}];
      row.n     = n;
      row.f     = f;
      ++row.errors;
      continue;
    }
    auto const &m   = *c.metrics;
    auto       &row = rows[{m.n, m.f}];
    row.n           = m.n;
    row.f           = m.f;
    ++row.runs;
    if (!c.error.empty())
    {
      ++row.errors;
      ++s.errors;
    }
    row.violations += m.violations.size();
    s.violations += m.violations.size();
    row.max_words = std::max(row.max_words, m.words);
    row.mean_words += static_cast<double>(m.words);
    row.max_f_star = std::max(row.max_f_star, static_cast<double>(m.f_star));
    s.empirical_w  = std::max(s.empirical_w, static_cast<double>(m.words) /
                                                 static_cast<double>((m.f_star + 3) * m.n));
    if (!m.latency)
    {
      ++row.without_t_star;
      continue;
    }
    double const lat = to_double(*m.latency);
    row.max_latency  = std::max(row.max_latency, lat);
    row.mean_latency += lat;
    ++with_latency[{m.n, m.f}];

    if (m.f == 0)
    {
      auto const cfg   = sim_config_from_json(c.config);
      Time const delta = cfg.network == NetworkKind::worst_case_max_delay ? cfg.params.delta_cap
                                                                          : cfg.delta_actual;
      if (delta * Time(10) <= cfg.params.delta_cap)
      {
        double const sample =
            std::max(0.0, to_double((*m.latency - cfg.params.gamma) / delta));
        s.empirical_c = std::max(s.empirical_c.value_or(0.0), sample);
      }
    }
  }
  for (auto &[key, row] : rows)
  {
    if (row.runs > 0)
    {
      row.mean_words /= static_cast<double>(row.runs);
    }
    if (auto it = with_latency.find(key); it != with_latency.end() && it->second > 0)
    {
      row.mean_latency /= static_cast<double>(it->second);
    }
    s.rows.push_back(row);
  }
  return s;
}

ExperimentResult run_experiment(ExperimentSpec const &spec, unsigned jobs)
{
  auto const cells = expand_cells(spec);

  ExperimentResult result;
  result.cells.resize(cells.size());
  std::mutex               file_lock;
  std::atomic<std::size_t> next{0};
  auto                     worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++)
    {
      result.cells[i] = run_cell(cells[i], spec, file_lock);
    }
  };

  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(cells.size())));
  if (jobs == 1)
  {
    worker();
  }
  else
  {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j)
    {
      pool.emplace_back(worker);
    }
    for (auto &th : pool)
    {
      th.join();
    }
  }

  result.summary = summarize(result.cells);
  if (!spec.out_dir.empty())
  {
    std::filesystem::path const dir(spec.out_dir);
    std::filesystem::create_directories(dir);
    std::ofstream jsonl(dir / "metrics.jsonl");
    write_metrics_jsonl(jsonl, result.cells);
    std::ofstream csv(dir / "metrics.csv");
    write_metrics_csv(csv, result.cells);
    std::ofstream summary(dir / "summary.csv");
    write_summary_csv(summary, result.summary);
  }
  return result;
}

json metrics_record(CellResult const &cell)
{
  json j;
  j["cell"] = cell.index;
  if (cell.metrics)
  {
    auto const &m        = *cell.metrics;
    j["config_hash"]     = m.config_hash;
    j["seed"]            = m.seed;
    j["n"]               = m.n;
    j["t"]               = m.t;
    j["f"]               = m.f;
    j["f_star"]          = m.f_star;
    j["gst"]             = time_json(m.gst);
    j["delta"]           = time_json(m.delta);
    j["t_star"]          = m.t_star ? time_json(*m.t_star) : json(nullptr);
    j["latency"]         = m.latency ? time_json(*m.latency) : json(nullptr);
    j["words"]           = m.words;
    j["violations_count"] = m.violations.size();
  }
  else
  {
    j["seed"] = cell.config.value("seed", std::uint64_t{0});
    j["n"]    = cell.config.value("n", 4u);
  }
  if (!cell.error.empty())
  {
    j["error"] = cell.error;
  }
  return j;
}

std::string metrics_csv_header()
{
  return "cell,config_hash,seed,n,t,f,f_star,gst,delta,t_star,latency,words,violations_count,error";
}

std::string metrics_csv_row(CellResult const &cell)
{
  std::ostringstream out;
  out << cell.index << ',';
  if (cell.metrics)
  {
    auto const &m = *cell.metrics;
    out << m.config_hash << ',' << m.seed << ',' << m.n << ',' << m.t << ',' << m.f << ','
        << m.f_star << ',' << to_string(m.gst) << ',' << to_string(m.delta) << ','
        << csv_time(m.t_star) << ',' << csv_time(m.latency) << ',' << m.words << ','
        << m.violations.size() << ',';
  }
  else
  {
    out << ',' << cell.config.value("seed", std::uint64_t{0}) << ','
        << cell.config.value("n", 4u) << ",,,,,,,,,,";
  }
  std::string err = cell.error;
  std::replace(err.begin(), err.end(), ',', ';');
  std::replace(err.begin(), err.end(), '\n', ' ');
  out << err;
  return out.str();
}

void write_metrics_jsonl(std::ostream &out, std::vector<CellResult> const &cells)
{
  for (auto const &c : cells)
  {
    out << metrics_record(c).dump() << '\n';
  }
}

void write_metrics_csv(std::ostream &out, std::vector<CellResult> const &cells)
{
  out << metrics_csv_header() << '\n';
  for (auto const &c : cells)
  {
    out << metrics_csv_row(c) << '\n';
  }
}

void write_summary_csv(std::ostream &out, ExperimentSummary const &summary)
{
  out << "n,f,runs,errors,violations,without_t_star,max_latency,mean_latency,max_words,"
         "mean_words,max_f_star\n";
  for (auto const &r : summary.rows)
  {
    out << r.n << ',' << r.f << ',' << r.runs << ',' << r.errors << ',' << r.violations << ','
        << r.without_t_star << ',' << r.max_latency << ',' << r.mean_latency << ','
        << r.max_words << ',' << r.mean_words << ',' << r.max_f_star << '\n';
  }
}

ReplayResult replay(std::istream &in)
{
  auto parsed = read_trace(in);
  ReplayResult r;
  r.metrics = compute_metrics(parsed.trace);
  r.stored  = std::move(parsed.metrics);
  if (r.stored)
  {
    r.matches = metrics_json(r.metrics) == *r.stored;
  }
  return r;
}

ReplayResult replay(std::string const &trace_path)
{
  std::ifstream in(trace_path);
  if (!in)
  {
    throw std::runtime_error("cannot open trace '" + trace_path + "'");
  }
  return replay(in);
}

}  // namespace fever
