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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any of them fails.

#include "fever/experiment.hpp"
#include "fever/metrics.hpp"
#include "fever/offsets.hpp"
#include "fever/simulator.hpp"

#include "oracles.hpp"

#include <json.hpp>

#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace fever;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

// Every run below uses the default k, x and Delta.
ProtocolParams const kDefaults = ProtocolParams::make(4, Time(1));

double seconds_since(Clock::time_point start)
{
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome
{
  bool        pass{false};
  std::string detail;
};

std::vector<json> expand(json const &spec)
{
  std::vector<json> out;
  for (auto const &cell : expand_cells(experiment_spec_from_json(spec)))
  {
    out.push_back(cell.config);
  }
  return out;
}

std::string join_counts(std::map<std::string, std::size_t> const &counts)
{
  std::string out;
  for (auto const &[id, c] : counts)
  {
    out += (out.empty() ? "" : ", ") + id + "=" + std::to_string(c);
  }
  return out.empty() ? "none" : out;
}

// Shared soundness matrix: every n, f, strategy, network, offset mode and gst.
struct Matrix
{
  std::size_t                        runs{0};
  std::size_t                        refused{0};
  double                             seconds{0};
  std::map<std::string, std::size_t> violations;
  std::size_t                        oracle_dagger_failures{0};
  std::size_t                        vc_checked{0};
  std::size_t                        qc_checked{0};
  std::size_t                        vc_bad{0};
  std::size_t                        qc_bad{0};
  std::size_t                        latency_over{0};
  std::size_t                        without_t_star{0};
  std::string                        first_problem;
};

void scan_certificates(Trace const &trace, std::vector<bool> const &correct, Matrix &m)
{
  auto const t = trace.header.config.params.t;
  auto check   = [&](PayloadKind kind, std::vector<ProcessorId> const &signers) {
    auto const honest = static_cast<std::size_t>(
        std::count_if(signers.begin(), signers.end(), [&](ProcessorId s) { return correct[s]; }));
    if (kind == PayloadKind::view_certificate)
    {
      ++m.vc_checked;
      m.vc_bad += honest < 1;
    }
    else if (kind == PayloadKind::quorum_certificate)
    {
      ++m.qc_checked;
      m.qc_bad += honest < t + 1;
    }
  };
  for (auto const &e : trace.events)
  {
    for (auto const &f : e.formed)
    {
      check(f.kind, f.signers);
    }
    if (e.payload)
    {
      check(e.payload->kind, e.payload->signers);
    }
  }
}

Matrix run_matrix()
{
  json const spec = {
      {"base",
       {{"delta_actual", 1},
        {"tail", 54},  // 18 gamma
        {"offsets", {{"gap", 1000}}},
        {"corruption", {{"selection", "random"}}}}},
      {"sweeps",
       {{"n", {4, 7, 10, 31}},
        {"f", "0..t"},
        {"corruption.strategy",
         {"silent", "crash_leader", "selective_vc", "early_signer", "vote_stuffer", "late_qc_relayer"}},
        {"network", {"fixed_delta", "worst_case_max_delay", "uniform_random"}},
        {"offsets.mode", {"all_zero", "two_cluster", "adversarial_spread"}},
        {"gst", {0, "3/2", "64/3"}}}}};

  Matrix     m;
  auto const start = Clock::now();
  auto       cells = expand(spec);
  for (std::size_t i = 0; i < cells.size(); ++i)
  {
    auto doc    = cells[i];
    doc["seed"] = i;
    Trace tr;
    try
    {
      tr = simulate(sim_config_from_json(doc));
    }
    catch (ConfigError const &)
    {
      ++m.refused;
      continue;
    }
    ++m.runs;
    auto const metrics = compute_metrics(tr);
    for (auto const &v : metrics.violations)
    {
      if (m.violations[v.invariant]++ == 0 && m.first_problem.empty())
      {
        m.first_problem = v.invariant + " in " + doc.dump() + ": " + v.detail;
      }
    }
    auto const correct = oracle::never_corrupted(tr);
    if (oracle::first_dagger_failure(tr, correct))
    {
      ++m.oracle_dagger_failures;
    }
    scan_certificates(tr, correct, m);
    if (!metrics.t_star)
    {
      ++m.without_t_star;
    }
    else
    {
      auto const &p = tr.header.config.params;
      auto const  sp = compute_sync_point(tr);
      if (*metrics.t_star - tr.header.config.gst > Time(TimeInt(p.k * (sp.f_star + 3))) * p.gamma)
      {
        ++m.latency_over;
      }
    }
  }
  m.seconds = seconds_since(start);
  return m;
}

std::size_t count_of(Matrix const &m, std::initializer_list<char const *> ids)
{
  std::size_t total = 0;
  for (auto const *id : ids)
  {
    auto const it = m.violations.find(id);
    total += it == m.violations.end() ? 0 : it->second;
  }
  return total;
}

Outcome criterion_1(Matrix const &m)
{
  std::ostringstream os;
  auto const         lib = count_of(m, {"dagger"});
  os << m.runs << " runs (" << m.refused << " offset/corruption combinations refused), "
     << "library dagger violations " << lib << ", oracle replay failures "
     << m.oracle_dagger_failures << ", " << m.seconds << " s; all invariants: "
     << join_counts(m.violations);
  if (!m.first_problem.empty())
  {
    os << "; first: " << m.first_problem;
  }
  return {m.runs >= 1000 && lib == 0 && m.oracle_dagger_failures == 0 && m.seconds < 300,
          os.str()};
}

Outcome criterion_2(Matrix const &m)
{
  auto const bad = count_of(m, {"first_entry", "entry_time", "qc_visibility"});
  std::ostringstream os;
  os << m.runs << " runs, first-entry/entry-time/QC-visibility violations " << bad;
  return {m.runs >= 1000 && bad == 0, os.str()};
}

Outcome criterion_6(Matrix const &m)
{
  auto const lib = count_of(m, {"vc_honesty", "qc_honesty", "unforgeability"});
  std::ostringstream os;
  os << m.vc_checked << " VCs and " << m.qc_checked << " QCs scanned, lacking correct signers: "
     << m.vc_bad << " VCs, " << m.qc_bad << " QCs; library honesty violations " << lib;
  return {m.vc_checked > 0 && m.qc_checked > 0 && m.vc_bad == 0 && m.qc_bad == 0 && lib == 0,
          os.str()};
}

// Least-squares fit of y on x; returns R^2.
double r_squared(std::vector<std::pair<double, double>> const &pts)
{
  double const n  = static_cast<double>(pts.size());
  double       sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (auto const &[x, y] : pts)
  {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  double const cov = sxy - sx * sy / n;
  double const vx  = sxx - sx * sx / n;
  double const vy  = syy - sy * sy / n;
  return vx > 0 && vy > 0 ? cov * cov / (vx * vy) : 0.0;
}

Outcome criterion_3(std::size_t &latency_over, std::size_t &latency_runs)
{
  json const spec = {
      {"base", {{"corruption", {{"selection", "first_leaders"}}}}},
      {"sweeps",
       {{"n", {4, 10, 31}},
        {"f", "0..t"},
        {"gst", {0, "3/2", "64/3"}},
        {"corruption.strategy",
         {"silent", "crash_leader", "selective_vc", "early_signer", "vote_stuffer", "late_qc_relayer"}},
        {"network", {"worst_case_max_delay", "fixed_delta", "uniform_random"}}}},
      {"seeds", {{"count", 2}}}};

  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> worst;  // (n, f*) -> words
  std::size_t runs = 0, over = 0, missing = 0;
  double      max_ratio = 0;
  for (auto const &doc : expand(spec))
  {
    auto const m = compute_metrics(simulate(sim_config_from_json(doc)));
    ++runs;
    if (!m.t_star)
    {
      ++missing;
      continue;
    }
    ++latency_runs;
    if (*m.latency > Time(TimeInt(kDefaults.k * (m.f_star + 3))) * kDefaults.gamma)
    {
      ++latency_over;
    }
    auto const bound = kWordConstant * (m.f_star + 3) * m.n;
    over += m.words > bound;
    max_ratio = std::max(max_ratio, static_cast<double>(m.words) / ((m.f_star + 3.0) * m.n));
    auto &w   = worst[{m.n, m.f_star}];
    w         = std::max(w, m.words);
  }
  std::vector<std::pair<double, double>> pts;
  for (auto const &[key, words] : worst)
  {
    pts.emplace_back(static_cast<double>(key.first) * key.second, static_cast<double>(words));
  }
  double const r2 = r_squared(pts);
  std::ostringstream os;
  os << runs << " runs, " << over << " over W(f*+3)n with W=" << kWordConstant
     << " (max words/((f*+3)n) = " << max_ratio << "), " << missing << " without t*; R^2 = " << r2
     << " over " << pts.size() << " worst-case (n, f*) points";
  return {over == 0 && missing == 0 && r2 >= 0.95, os.str()};
}

Outcome criterion_4(Matrix const &m, std::size_t sweep_over, std::size_t sweep_runs)
{
  json const spec = {
      {"base", {{"delta_actual", "1/100"}}},
      {"sweeps",
       {{"n", {4, 7, 10, 31}},
        {"network", {"fixed_delta", "uniform_random"}},
        {"offsets.mode", {"all_zero", "two_cluster", "adversarial_spread"}},
        {"offsets.gap", {1000}},
        {"gst", {0, "3/2", "64/3", 5, "37/4"}}}},
      {"seeds", {{"count", 2}}}};
  std::size_t runs = 0, slow = 0;
  double      worst_c = 0;
  for (auto const &doc : expand(spec))
  {
    auto const tr = simulate(sim_config_from_json(doc));
    auto const m4 = compute_metrics(tr);
    ++runs;
    auto const &cfg   = tr.header.config;
    Time const  limit = Time(TimeInt(kResponsivenessConstant)) * cfg.delta_actual + cfg.params.gamma +
                       cfg.params.delta_cap;
    if (!m4.latency || *m4.latency > limit)
    {
      ++slow;
      continue;
    }
    worst_c = std::max(worst_c, to_double((*m4.latency - cfg.params.gamma) / cfg.delta_actual));
  }
  std::ostringstream os;
  os << "latency bound: " << m.latency_over + sweep_over << " over k(f*+3)gamma in "
     << m.runs - m.without_t_star + sweep_runs << " runs; responsiveness: " << slow << " of " << runs
     << " f=0 runs at delta=Delta/100 exceed C delta + gamma + Delta with C="
     << kResponsivenessConstant << " (worst (latency-gamma)/delta = " << worst_c << ")";
  return {m.latency_over + sweep_over == 0 && m.without_t_star == 0 && slow == 0 &&
              kResponsivenessConstant <= 6,
          os.str()};
}

Outcome criterion_5()
{
  std::size_t   runs = 0, missing = 0;
  double        sum_f = 0, sum_words = 0, sum_latency = 0;
  char const   *gsts[] = {"0", "3/2", "64/3"};
  std::uint32_t n      = 31;
  for (std::uint64_t seed = 0; seed < 500; ++seed)
  {
    json const doc = {{"n", n},
                      {"seed", seed},
                      {"gst", gsts[seed % 3]},
                      {"network", "uniform_random"},
                      {"leader_schedule", "random_permutations"},
                      {"schedule_seed", seed},
                      {"corruption",
                       {{"count", 10},
                        {"strategy", "silent"},
                        {"selection", "random"},
                        {"time", 0},
                        {"seed", 0x5eed0000 + seed * 7919}}}};
    auto const m = compute_metrics(simulate(sim_config_from_json(doc)));
    ++runs;
    if (!m.latency)
    {
      ++missing;
      continue;
    }
    sum_f += m.f_star;
    sum_words += static_cast<double>(m.words);
    sum_latency += to_double(*m.latency);
  }
  double const done         = static_cast<double>(runs - missing);
  double const mean_f       = sum_f / done;
  double const mean_words   = sum_words / done;
  double const mean_latency = sum_latency / done;
  double const word_cap     = static_cast<double>(kWordConstant * 5 * n);
  double const latency_cap  = 5.0 * kDefaults.k * to_double(kDefaults.gamma);
  std::ostringstream os;
  os << runs << " runs (n=31, t=10 silent, random permutations): mean f* " << mean_f
     << " (<= 2), mean words " << mean_words << " (<= " << word_cap << "), mean latency "
     << mean_latency << " (<= " << latency_cap << ")";
  return {missing == 0 && mean_f <= 2 && mean_words <= word_cap && mean_latency <= latency_cap,
          os.str()};
}

Outcome criterion_7()
{
  std::map<std::string, std::pair<std::size_t, std::size_t>> per_delta;  // windows, failed
  std::size_t                                                 runs = 0;
  for (char const *delta : {"1", "1/10", "1/100"})
  {
    json const spec = {
        {"base", {{"delta_actual", delta}, {"tail", 9}}},
        {"sweeps",
         {{"n", {4, 7, 10}},
          {"network", {"fixed_delta", "uniform_random"}},
          {"offsets.mode", {"all_zero", "two_cluster", "adversarial_spread"}},
          {"offsets.gap", {1000}},
          {"gst", {0, "3/2", "64/3"}}}},
        {"seeds", {{"count", 2}}}};
    auto &[windows, failed] = per_delta[delta];
    for (auto const &doc : expand(spec))
    {
      ++runs;
      for (auto const &w : check_contract(simulate(sim_config_from_json(doc))))
      {
        ++windows;
        failed += !w.satisfied;
      }
    }
  }
  bool               ok = true;
  std::ostringstream os;
  os << runs << " f=0 runs;";
  for (auto const &[delta, counts] : per_delta)
  {
    os << " delta=" << delta << ": " << counts.second << " of " << counts.first
       << " windows miss 3 delta;";
    ok = ok && counts.first > 0 && counts.second == 0;
  }
  return {ok, os.str()};
}

// Smallest gap between consecutive QC formations in a synchronous fault-free run.
Time min_qc_interval(std::uint32_t n)
{
  auto const tr = simulate(sim_config_from_json({{"n", n}, {"gst", 0}, {"tail", 27}}));
  auto const qcs = qc_formations(tr);
  std::optional<Time> best;
  for (std::size_t i = 1; i < qcs.size(); ++i)
  {
    Time const gap = qcs[i].time - qcs[i - 1].time;
    if (gap > Time(0) && (!best || gap < *best))
    {
      best = gap;
    }
  }
  return best.value_or(Time(0));
}

Outcome criterion_8()
{
  std::size_t runs = 0, dagger_bad = 0, windows = 0, missed = 0, oracle_bad = 0;
  std::string first_problem;
  std::map<std::uint32_t, std::string> eps_by_n;
  for (std::uint32_t n : {4, 7})
  {
    std::uint32_t const t     = (n - 1) / 3;
    Time const          gamma = kDefaults.gamma, delta_cap = kDefaults.delta_cap;
    Time const          u     = min_qc_interval(n);
    Time const          ell   = Time(TimeInt(3 * (t + 3))) * gamma;
    Time const          eps   = u / (Time(50) * ell);
    Time const          gap   = Time(10) * ell;
    std::size_t const   count = 4;
    eps_by_n[n]               = to_string(eps);
    json schedule             = json::array();
    std::vector<std::pair<Time, Time>> spans;
    Time                               at = gap;
    for (std::size_t w = 0; w < count; ++w)
    {
      spans.emplace_back(at, at + ell);
      schedule.push_back({{"start", to_string(at)}, {"end", to_string(at + ell)}});
      at += ell + gap;
    }
    Time const horizon = spans.back().second;
    for (std::uint64_t seed = 0; seed < 50; ++seed)
    {
      std::uint32_t const      f = static_cast<std::uint32_t>(seed % (t + 1));
      std::vector<ProcessorId> ids(n);
      std::iota(ids.begin(), ids.end(), ProcessorId{0});
      std::mt19937_64 rng(seed);
      std::shuffle(ids.begin(), ids.end(), rng);
      std::vector<bool> correct(n, true);
      json              list = json::array();
      for (std::uint32_t i = 0; i < f; ++i)
      {
        correct[ids[i]] = false;
        list.push_back({{"id", ids[i]}, {"strategy", "crash_leader"}});
      }
      // Offsets spread within Delta rather than gamma leave room for drift.
      auto const offsets = generate_initial_offsets(
          n, t, delta_cap, OffsetSpec{OffsetMode::adversarial_spread, Time(0), seed, {}}, correct);
      json values = json::array();
      for (auto const &o : offsets)
      {
        values.push_back(to_string(o));
      }
      json const doc = {{"n", n},
                        {"seed", seed},
                        {"gst", to_string(spans.front().first)},
                        {"network", "uniform_random"},
                        {"offsets", {{"mode", "explicit"}, {"values", values}}},
                        {"corruption", {{"list", list}}},
                        {"drift", {{"epsilon", to_string(eps)}}},
                        {"synchrony_schedule", schedule},
                        {"horizon", to_string(horizon)},
                        {"stop_at_t_star", false}};
      auto const tr = simulate(sim_config_from_json(doc));
      ++runs;
      auto const vs = assert_invariants(tr);
      for (auto const &v : vs)
      {
        if (v.invariant == "dagger")
        {
          ++dagger_bad;
          if (first_problem.empty())
          {
            first_problem = doc.dump() + ": " + v.detail;
          }
        }
      }
      oracle_bad += oracle::first_dagger_failure(tr, oracle::never_corrupted(tr)).has_value();
      auto const qcs = qc_formations(tr);
      for (auto const &[s, e] : spans)
      {
        ++windows;
        bool const hit = std::any_of(qcs.begin(), qcs.end(), [&](QcFormation const &q) {
          return q.correct_leader && q.time >= s && q.time < e;
        });
        if (!hit)
        {
          ++missed;
          if (first_problem.empty())
          {
            first_problem = "no correct-leader QC in [" + to_string(s) + ", " + to_string(e) +
                            ") for " + doc.dump();
          }
        }
      }
    }
  }
  std::ostringstream os;
  os << runs << " runs (n in {4, 7}, f in 0..t, epsilon " << eps_by_n[4] << " / " << eps_by_n[7]
     << ", async gaps of 10 l), dagger violations " << dagger_bad << " (oracle " << oracle_bad
     << "), " << missed << " of " << windows << " synchronous windows without a correct-leader QC";
  if (!first_problem.empty())
  {
    os << "; first: " << first_problem;
  }
  return {runs >= 50 && dagger_bad == 0 && oracle_bad == 0 && missed == 0, os.str()};
}

Outcome criterion_9()
{
  oracle::ConfigGen gen(9);
  std::size_t       specs = 0, differ = 0, mismatched = 0;
  while (specs < 100)
  {
    SimConfig cfg;
    Trace     first;
    try
    {
      cfg   = sim_config_from_json(gen.next());
      first = simulate(cfg);
    }
    catch (ConfigError const &)
    {
      continue;
    }
    ++specs;
    auto const second  = simulate(cfg);
    auto const metrics = metrics_json(compute_metrics(first));
    auto const text    = trace_to_string(first, &metrics);
    differ += text != trace_to_string(second, &metrics);
    std::istringstream in(text);
    auto const         r = replay(in);
    mismatched += !r.matches || metrics_json(r.metrics) != metrics;
  }
  std::ostringstream os;
  os << specs << " generated specs: " << differ << " non-identical reruns, " << mismatched
     << " replay mismatches";
  return {differ == 0 && mismatched == 0, os.str()};
}

}  // namespace

int main()
{
  bool all    = true;
  auto report = [&](int id, std::function<Outcome()> const &fn) {
    auto const start = Clock::now();
    Outcome    o;
    try
    {
      o = fn();
    }
    catch (std::exception const &e)
    {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << o.detail << " ["
              << seconds_since(start) << " s]" << std::endl;
  };

  Matrix      matrix;
  std::size_t sweep_over = 0, sweep_runs = 0;
  report(1, [&] {
    matrix = run_matrix();
    return criterion_1(matrix);
  });
  report(2, [&] { return criterion_2(matrix); });
  report(3, [&] { return criterion_3(sweep_over, sweep_runs); });
  report(4, [&] { return criterion_4(matrix, sweep_over, sweep_runs); });
  report(5, criterion_5);
  report(6, [&] { return criterion_6(matrix); });
  report(7, criterion_7);
  report(8, criterion_8);
  report(9, criterion_9);
  return all ? 0 : 1;
}
