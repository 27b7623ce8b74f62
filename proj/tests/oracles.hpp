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

// Independent re-derivations used to check the library. They read traces and
// configs directly and share no code with the metrics module.

#include "fever/sim_config.hpp"
#include "fever/trace.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

using fever::GlobalTime;
using fever::ProcessorId;
using fever::Time;
using fever::View;

inline bool dagger(std::vector<Time> const &clocks, Time const &gamma, std::uint32_t t)
{
  for (auto const &c : clocks)
  {
    auto const within = std::count_if(clocks.begin(), clocks.end(),
                                      [&](Time const &o) { return o >= c - gamma; });
    if (static_cast<std::uint32_t>(within) < t + 1)
    {
      return false;
    }
  }
  return true;
}

/// Same condition, checked at the most advanced clock only: the count of
/// clocks within gamma of a clock c can only shrink as c grows.
inline bool dagger_by_max(std::vector<Time> const &clocks, Time const &gamma, std::uint32_t t)
{
  if (clocks.empty())
  {
    return t == 0;
  }
  Time const top    = *std::max_element(clocks.begin(), clocks.end());
  auto const within = std::count_if(clocks.begin(), clocks.end(),
                                    [&](Time const &o) { return o >= top - gamma; });
  return static_cast<std::uint32_t>(within) >= t + 1;
}

/// Replays the clocks of never-corrupted processors and checks the spread
/// condition at every event time. Returns the seq of the first failure.
inline std::optional<std::uint64_t> first_dagger_failure(fever::Trace const &trace,
                                                         std::vector<bool> const &correct)
{
  auto const            &h = trace.header;
  std::vector<Time>       base(h.initial_clocks);
  std::vector<GlobalTime> since(base.size(), Time(0));
  std::vector<Time>       now;
  for (auto const &e : trace.events)
  {
    for (auto const &d : e.deltas)
    {
      base[d.id]  = d.clock;
      since[d.id] = e.time;
    }
    now.clear();
    for (std::size_t i = 0; i < base.size(); ++i)
    {
      if (correct[i])
      {
        now.push_back(base[i] + h.rates[i] * (e.time - since[i]));
      }
    }
    if (!dagger_by_max(now, h.config.params.gamma, h.config.params.t))
    {
      return e.seq;
    }
  }
  return std::nullopt;
}

/// Processors the adversary never corrupts, read from the corruption schedule
/// (a run may end before a scheduled corruption fires).
inline std::vector<bool> never_corrupted(fever::Trace const &trace)
{
  std::vector<bool> ok(trace.header.config.params.n, true);
  for (auto const &c : trace.header.corruptions)
  {
    ok[c.id] = false;
  }
  for (auto const &e : trace.events)
  {
    if (e.kind == fever::EventKind::corruption)
    {
      ok[e.proc] = false;
    }
  }
  return ok;
}

inline std::optional<GlobalTime> corruption_time(fever::Trace const &trace, ProcessorId p)
{
  for (auto const &e : trace.events)
  {
    if (e.kind == fever::EventKind::corruption && e.proc == p)
    {
      return e.time;
    }
  }
  return std::nullopt;
}

/// First QC formed strictly after gst by a processor that is never corrupted.
inline std::optional<GlobalTime> first_correct_qc_after(fever::Trace const &trace,
                                                        GlobalTime const &gst)
{
  auto const ok = never_corrupted(trace);
  for (auto const &e : trace.events)
  {
    if (e.time <= gst || !ok[e.proc])
    {
      continue;
    }
    for (auto const &f : e.formed)
    {
      if (f.kind == fever::PayloadKind::quorum_certificate)
      {
        return e.time;
      }
    }
  }
  return std::nullopt;
}

/// Words of sends in [from, to] whose sender was not corrupted at the send.
inline std::uint64_t words_between(fever::Trace const &trace, GlobalTime const &from,
                                   GlobalTime const &to)
{
  std::uint64_t total = 0;
  for (auto const &e : trace.events)
  {
    auto const corrupted_at = corruption_time(trace, e.proc);
    for (auto const &s : e.sent)
    {
      if (s.send_time < from || s.send_time > to)
      {
        continue;
      }
      if (corrupted_at && *corrupted_at <= s.send_time)
      {
        continue;
      }
      total += s.words;
    }
  }
  return total;
}

/// Round-robin leader of view v.
inline ProcessorId rr_leader(View v, std::uint32_t k, std::uint32_t n)
{
  return static_cast<ProcessorId>((v / k) % n);
}

/// Faulty-led initial views strictly between v0 and v1 for the pivot view v,
/// found by walking the round-robin schedule.
inline std::uint32_t f_star_rr(View v, std::uint32_t k, std::uint32_t n,
                               std::vector<bool> const &correct)
{
  ProcessorId const      lv = rr_leader(v, k, n);
  std::optional<View>    v0;
  for (std::int64_t u = static_cast<std::int64_t>(v) - 1; u >= 0; --u)
  {
    if (u % k == 0 && correct[rr_leader(u, k, n)] && rr_leader(u, k, n) != lv)
    {
      v0 = static_cast<View>(u);
      break;
    }
  }
  View v1 = v + 1;
  while (v1 % k != 0 || !correct[rr_leader(v1, k, n)])
  {
    ++v1;
  }
  std::uint32_t count = 0;
  for (View u = v0 ? *v0 + 1 : 0; u < v1; ++u)
  {
    if (u % k == 0 && !correct[rr_leader(u, k, n)])
    {
      ++count;
    }
  }
  return count;
}

/// Hand-rolled generator of simulator configs spanning the model's options.
struct ConfigGen
{
  std::mt19937_64 rng;

  explicit ConfigGen(std::uint64_t seed)
    : rng{seed}
  {}

  template <typename T>
  T pick(std::vector<T> const &options)
  {
    std::uniform_int_distribution<std::size_t> d(0, options.size() - 1);
    return options[d(rng)];
  }

  std::uint64_t below(std::uint64_t bound)
  {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(rng);
  }

  nlohmann::json next()
  {
    std::uint32_t const n = pick<std::uint32_t>({4, 5, 7, 10});
    std::uint32_t const t = (n - 1) / 3;
    nlohmann::json      j;
    j["n"]            = n;
    j["seed"]         = below(1u << 30);
    j["gst"]          = pick<std::string>({"0", "3/2", "64/3", "5", "37/4"});
    // The tail scales with delta so fast networks do not run thousands of views.
    auto const delta  = pick<std::pair<std::string, std::string>>(
        {{"1", "27"}, {"1/10", "27/10"}, {"1/100", "27/100"}, {"1/2", "27/2"}});
    j["delta_actual"] = delta.first;
    j["network"]      = pick<std::string>({"fixed_delta", "worst_case_max_delay", "uniform_random"});
    auto const mode   = pick<std::string>({"all_zero", "two_cluster", "adversarial_spread"});
    j["offsets"]      = {{"mode", mode}};
    if (mode == "two_cluster")
    {
      j["offsets"]["gap"] = pick<std::string>({"1000", "7", "3"});
    }
    j["corruption"] = {{"count", below(t + 1)},
                       {"strategy", pick<std::string>({"silent", "crash_leader", "selective_vc",
                                                       "early_signer", "vote_stuffer",
                                                       "late_qc_relayer"})},
                       {"selection", pick<std::string>({"first_leaders", "random"})},
                       {"time", pick<std::string>({"0", "7/2", "20"})}};
    j["tail"] = delta.second;
    return j;
  }
};

}  // namespace oracle
