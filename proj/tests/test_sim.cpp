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
#include "fever/metrics.hpp"
#include "fever/simulator.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <sstream>

using namespace fever;
using nlohmann::json;

namespace {

Trace run(json const &doc)
{
  return simulate(sim_config_from_json(doc));
}

bool has_violation(std::vector<Violation> const &vs, std::string const &id)
{
  return std::any_of(vs.begin(), vs.end(), [&](Violation const &v) { return v.invariant == id; });
}

std::string describe(std::vector<Violation> const &vs)
{
  std::string out;
  for (auto const &v : vs)
  {
    out += v.invariant + " @" + std::to_string(v.seq) + ": " + v.detail + "\n";
  }
  return out;
}

std::optional<GlobalTime> first_qc_time(Trace const &trace, View v)
{
  for (auto const &e : trace.events)
  {
    for (auto const &f : e.formed)
    {
      if (f.kind == PayloadKind::quorum_certificate && f.view == v)
      {
        return e.time;
      }
    }
  }
  return std::nullopt;
}

std::optional<GlobalTime> first_entry_time(Trace const &trace, View v)
{
  for (auto const &e : trace.events)
  {
    for (auto const &d : e.deltas)
    {
      if (d.view >= v)
      {
        return e.time;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

TEST_SUITE("simnet")
{
  TEST_CASE("fault-free synchronous run certifies views 0 and 1 before anyone reaches view 3")
  {
    auto const tr = run({{"n", 4}, {"gst", 0}, {"tail", 9}});
    auto const t_star = compute_t_star(tr);
    REQUIRE(t_star.has_value());
    CHECK(t_star == first_qc_time(tr, 0));
    CHECK(*t_star == Time(2));
    auto const enter3 = first_entry_time(tr, 3);
    REQUIRE(enter3.has_value());
    REQUIRE(first_qc_time(tr, 1).has_value());
    CHECK(*first_qc_time(tr, 0) < *enter3);
    CHECK(*first_qc_time(tr, 1) < *enter3);
    auto const vs = assert_invariants(tr);
    CHECK_MESSAGE(vs.empty(), describe(vs));
  }

  TEST_CASE("silent first leader: progress waits for the next group at its clock-time")
  {
    auto const tr = run({{"n", 4},
                         {"gst", 0},
                         {"corruption", {{"count", 1}, {"strategy", "silent"}}},
                         {"tail", 9}});
    REQUIRE(tr.header.corruptions.size() == 1);
    CHECK(tr.header.corruptions[0].id == 0);
    auto const t_star = compute_t_star(tr);
    REQUIRE(t_star.has_value());
    CHECK(first_qc_time(tr, 0) == std::nullopt);
    CHECK(*t_star >= Time(9));
    bool threshold_entry = false;
    for (auto const &e : tr.events)
    {
      for (auto const &f : e.formed)
      {
        if (f.kind == PayloadKind::quorum_certificate && e.time == *t_star)
        {
          CHECK(f.view / 3 == 1);
        }
      }
      if (e.kind == EventKind::threshold && e.threshold_view == 3)
      {
        CHECK(e.time == Time(9));
        threshold_entry = true;
      }
    }
    CHECK(threshold_entry);
    auto const vs = assert_invariants(tr);
    CHECK_MESSAGE(vs.empty(), describe(vs));
  }

  TEST_CASE("same config gives a byte-identical trace")
  {
    json const doc{{"n", 7},
                   {"gst", "64/3"},
                   {"seed", 5},
                   {"network", "uniform_random"},
                   {"offsets", {{"mode", "adversarial_spread"}}},
                   {"corruption", {{"count", 2}, {"strategy", "late_qc_relayer"}, {"selection", "random"}}},
                   {"tail", 18}};
    CHECK(trace_to_string(run(doc)) == trace_to_string(run(doc)));
    auto other      = doc;
    other["seed"]   = 6;
    CHECK(trace_to_string(run(doc)) != trace_to_string(run(other)));
  }

  TEST_CASE("early signer cannot produce a VC without a correct signer")
  {
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
      auto const tr = run({{"n", 7},
                           {"seed", seed},
                           {"gst", "3/2"},
                           {"offsets", {{"mode", "adversarial_spread"}}},
                           {"corruption", {{"count", 2}, {"strategy", "early_signer"}, {"selection", "random"}}},
                           {"tail", 27}});
      auto const correct = oracle::never_corrupted(tr);
      for (auto const &e : tr.events)
      {
        for (auto const &f : e.formed)
        {
          if (f.kind == PayloadKind::view_certificate)
          {
            auto const honest = std::count_if(f.signers.begin(), f.signers.end(),
                                              [&](ProcessorId s) { return correct[s]; });
            CHECK(honest >= 1);
          }
        }
      }
      CHECK(assert_invariants(tr).empty());
    }
  }

  TEST_CASE("late QC relayer keeps correct clocks within the spread condition")
  {
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
      auto const tr = run({{"n", 10},
                           {"seed", seed},
                           {"gst", "64/3"},
                           {"network", "uniform_random"},
                           {"offsets", {{"mode", "adversarial_spread"}}},
                           {"corruption", {{"count", 3}, {"strategy", "late_qc_relayer"}, {"selection", "random"}}},
                           {"tail", 27}});
      auto const &p       = tr.header.config.params;
      auto const  correct = oracle::never_corrupted(tr);
      // Replay the clock of each processor from its deltas and test the
      // condition at every event time.
      std::vector<ClockTime>  at_last(tr.header.initial_clocks);
      std::vector<GlobalTime> last_update(p.n, Time(0));
      for (auto const &e : tr.events)
      {
        for (auto const &d : e.deltas)
        {
          at_last[d.id]     = d.clock;
          last_update[d.id] = e.time;
        }
        std::vector<ClockTime> now;
        for (ProcessorId i = 0; i < p.n; ++i)
        {
          if (correct[i])
          {
            now.push_back(at_last[i] + (e.time - last_update[i]));
          }
        }
        REQUIRE(oracle::dagger(now, p.gamma, p.t));
      }
    }
  }

  TEST_CASE("unknown or inconsistent configs are refused")
  {
    CHECK_THROWS_AS(sim_config_from_json({{"n", 4}, {"bogus", 1}}), ConfigError);
    CHECK_THROWS_AS(run({{"n", 4}, {"t", 2}}), ConfigError);
    CHECK_THROWS_AS(run({{"n", 4}, {"corruption", {{"count", 2}}}}), ConfigError);
    CHECK_THROWS_AS(run({{"n", 4}, {"offsets", {{"mode", "explicit"}, {"values", {0, 0, 0, 1000}}}}}),
                    ConfigError);
  }

  TEST_CASE("config json round-trips")
  {
    oracle::ConfigGen gen(11);
    for (int i = 0; i < 50; ++i)
    {
      auto const cfg = sim_config_from_json(gen.next());
      auto const back = sim_config_from_json(to_json(cfg));
      CHECK(to_json(back) == to_json(cfg));
      CHECK(config_hash(back) == config_hash(cfg));
    }
  }
}

TEST_SUITE("metrics_invariants")
{
  TEST_CASE("t* counts only QCs strictly after gst")
  {
    auto tr = run({{"n", 4}, {"gst", 0}, {"tail", 18}});
    REQUIRE(compute_t_star(tr) == Time(2));
    tr.header.config.gst = Time(2);
    auto const later     = compute_t_star(tr);
    REQUIRE(later.has_value());
    CHECK(*later > Time(2));
    CHECK(later == oracle::first_correct_qc_after(tr, Time(2)));
  }

  TEST_CASE("word count agrees with an independent tally")
  {
    oracle::ConfigGen gen(3);
    int               checked = 0;
    for (int i = 0; i < 60; ++i)
    {
      Trace tr;
      try
      {
        tr = run(gen.next());
      }
      catch (ConfigError const &)
      {
        continue;
      }
      auto const t_star = compute_t_star(tr);
      if (!t_star)
      {
        continue;
      }
      auto const &cfg = tr.header.config;
      CHECK(count_words(tr, *t_star) ==
            oracle::words_between(tr, cfg.gst + cfg.params.delta_cap, *t_star));
      CHECK(count_words(tr, Time(0), tr.end_time) ==
            oracle::words_between(tr, Time(0), tr.end_time));
      ++checked;
    }
    CHECK(checked > 20);
  }

  TEST_CASE("f* for a corrupted round-robin leader matches the schedule walk")
  {
    auto const tr = run({{"n", 4},
                         {"gst", 0},
                         {"corruption", {{"list", {{{"id", 1}, {"time", 0}}}}}},
                         {"tail", 9}});
    auto const sp = compute_sync_point(tr);
    CHECK(sp.f_star == 1);
    CHECK(sp.f_star == oracle::f_star_rr(sp.v, 3, 4, oracle::never_corrupted(tr)));
  }

  TEST_CASE("f* agrees with the schedule walk on random round-robin runs")
  {
    oracle::ConfigGen gen(17);
    for (int i = 0; i < 60; ++i)
    {
      Trace tr;
      try
      {
        tr = run(gen.next());
      }
      catch (ConfigError const &)
      {
        continue;
      }
      auto const &p  = tr.header.config.params;
      auto const  sp = compute_sync_point(tr);
      CHECK(sp.f_star == oracle::f_star_rr(sp.v, p.k, p.n, oracle::never_corrupted(tr)));
    }
  }

  TEST_CASE("a clock moved backwards is reported")
  {
    auto tr = run({{"n", 4}, {"gst", 0}, {"tail", 9}});
    REQUIRE(assert_invariants(tr).empty());
    bool planted = false;
    for (auto &e : tr.events)
    {
      for (auto &d : e.deltas)
      {
        if (!planted && d.clock > Time(4))
        {
          d.clock -= Time(4);
          planted = true;
        }
      }
    }
    REQUIRE(planted);
    CHECK(has_violation(assert_invariants(tr), "clock_monotonicity"));
  }

  TEST_CASE("a VC without a correct signer is reported")
  {
    auto tr = run({{"n", 7},
                   {"gst", 0},
                   {"corruption", {{"list", {{{"id", 5}}, {{"id", 6}}}}}},
                   {"tail", 9}});
    REQUIRE(assert_invariants(tr).empty());
    bool planted = false;
    for (auto &e : tr.events)
    {
      for (auto &f : e.formed)
      {
        if (!planted && f.kind == PayloadKind::view_certificate)
        {
          f.signers = {5, 6};
          planted   = true;
        }
      }
    }
    REQUIRE(planted);
    auto const vs = assert_invariants(tr);
    CHECK(std::any_of(vs.begin(), vs.end(), [](Violation const &v) {
      return v.invariant == "vc_honesty" && v.detail.find("no correct signer") != std::string::npos;
    }));
  }

  TEST_CASE("contract windows are satisfied in a synchronous fault-free run")
  {
    auto const wins = check_contract(run({{"n", 7}, {"gst", 0}, {"tail", 27}, {"delta_actual", "1/10"}}));
    CHECK_FALSE(wins.empty());
    for (auto const &w : wins)
    {
      CHECK(w.satisfied);
    }
  }
}

TEST_SUITE("replay")
{
  TEST_CASE("stored trace replays to the same metrics")
  {
    auto const tr      = run({{"n", 7}, {"gst", "3/2"}, {"network", "uniform_random"}, {"tail", 18}});
    auto const metrics = metrics_json(compute_metrics(tr));
    std::istringstream in(trace_to_string(tr, &metrics));
    auto const r = replay(in);
    CHECK(r.stored.has_value());
    CHECK(r.matches);
    CHECK(metrics_json(r.metrics) == metrics);
  }

  TEST_CASE("truncated trace reports the line it failed on")
  {
    auto const         text = trace_to_string(run({{"n", 4}, {"tail", 9}}));
    auto const         cut  = text.substr(0, text.size() / 2);
    auto const         lines = static_cast<std::size_t>(std::count(cut.begin(), cut.end(), '\n'));
    std::istringstream in(cut);
    try
    {
      read_trace(in);
      FAIL("truncated trace was accepted");
    }
    catch (TraceParseError const &e)
    {
      CHECK(e.line() == lines + 1);
    }
  }

  TEST_CASE("hand-edited backward clock is caught on replay")
  {
    auto tr = run({{"n", 4}, {"tail", 9}});
    for (auto &e : tr.events)
    {
      if (!e.deltas.empty() && e.deltas.front().clock > Time(5))
      {
        e.deltas.front().clock = Time(1);
        break;
      }
    }
    std::istringstream in(trace_to_string(tr));
    auto const         r = replay(in);
    CHECK(has_violation(r.metrics.violations, "clock_monotonicity"));
  }
}
