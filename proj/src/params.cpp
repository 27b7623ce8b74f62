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

#include "fever/params.hpp"

#include <mutex>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace fever {

std::string_view to_string(ScheduleKind kind)
{
  switch (kind)
  {
  case ScheduleKind::round_robin:
    return "round_robin";
  case ScheduleKind::random_permutations:
    return "random_permutations";
  }
  return "unknown";
}

ScheduleKind parse_schedule_kind(std::string_view text)
{
  if (text == "round_robin")
  {
    return ScheduleKind::round_robin;
  }
  if (text == "random_permutations")
  {
    return ScheduleKind::random_permutations;
  }
  throw std::invalid_argument("unknown leader schedule: '" + std::string(text) + "'");
}

struct LeaderSchedule::PermutationCache
{
  std::mutex                lock;
  std::uint32_t             n{0};
  std::mt19937_64           rng;
  std::vector<ProcessorId>  sequence;  // concatenated permutations
};

LeaderSchedule::LeaderSchedule() = default;

LeaderSchedule LeaderSchedule::round_robin()
{
  return LeaderSchedule{};
}

LeaderSchedule LeaderSchedule::random_permutations(std::uint64_t seed)
{
  LeaderSchedule s;
  s.kind_  = ScheduleKind::random_permutations;
  s.seed_  = seed;
  s.cache_ = std::make_shared<PermutationCache>();
  return s;
}

ProcessorId LeaderSchedule::leader_of_group(std::uint64_t group, std::uint32_t n) const
{
  if (kind_ == ScheduleKind::round_robin || !cache_)
  {
    return static_cast<ProcessorId>(group % n);
  }

  std::lock_guard<std::mutex> guard(cache_->lock);
  auto &cache = *cache_;
  if (cache.n != n)
  {
    cache.n = n;
    cache.sequence.clear();
    std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                      n};
    cache.rng.seed(seq);
  }
  while (cache.sequence.size() <= group)
  {
    std::vector<ProcessorId> perm(n);
    std::iota(perm.begin(), perm.end(), ProcessorId{0});
    // Fisher-Yates
    for (std::uint32_t i = n; i > 1; --i)
    {
      std::uniform_int_distribution<std::uint32_t> pick(0, i - 1);
      std::swap(perm[i - 1], perm[pick(cache.rng)]);
    }
    cache.sequence.insert(cache.sequence.end(), perm.begin(), perm.end());
  }
  return cache.sequence[group];
}

ProtocolParams ProtocolParams::make(std::uint32_t n, Time delta_cap, std::uint32_t x,
                                    std::uint32_t k)
{
  ProtocolParams p;
  p.n         = n;
  p.t         = default_fault_bound(n);
  p.k         = k;
  p.delta_cap = delta_cap;
  p.x         = x;
  p.gamma     = delta_cap * Time(x);
  return p;
}

void ProtocolParams::validate() const
{
  if (n == 0)
  {
    throw std::invalid_argument("n must be positive");
  }
  if (3 * static_cast<std::uint64_t>(t) >= n)
  {
    throw std::invalid_argument("fault bound t=" + std::to_string(t) + " must satisfy 3t < n=" +
                                std::to_string(n));
  }
  if (k < 3)
  {
    throw std::invalid_argument("k must be at least 3");
  }
  if (x < 2)
  {
    throw std::invalid_argument("x must be at least 2");
  }
  if (delta_cap <= Time(0))
  {
    throw std::invalid_argument("delta_cap must be positive");
  }
  if (gamma != delta_cap * Time(x))
  {
    throw std::invalid_argument("gamma must equal x * delta_cap");
  }
}

std::uint32_t default_fault_bound(std::uint32_t n) noexcept
{
  return n == 0 ? 0 : (n - 1) / 3;
}

bool is_initial(View v, ProtocolParams const &params) noexcept
{
  return v % params.k == 0;
}

ClockTime clock_time(View v, ProtocolParams const &params)
{
  return params.gamma * Time(TimeInt(v));
}

ProcessorId leader_of(View v, ProtocolParams const &params)
{
  return params.schedule.leader_of_group(v / params.k, params.n);
}

std::optional<View> view_at_clock(ClockTime const &c, ProtocolParams const &params)
{
  if (c < Time(0))
  {
    return std::nullopt;
  }
  Time const q = c / params.gamma;
  if (!is_integer(q))
  {
    return std::nullopt;
  }
  return static_cast<View>(q.numerator());
}

View next_initial_at_or_after(ClockTime const &c, ProtocolParams const &params)
{
  if (c <= Time(0))
  {
    return 0;
  }
  Time const span  = params.gamma * Time(params.k);
  auto const group = ceil_int(c / span);
  return static_cast<View>(group) * params.k;
}

}  // namespace fever
