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

#include "fever/offsets.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace fever {

bool check_dagger(std::span<ClockTime const> clocks, Time const &gamma, std::uint32_t t)
{
  if (clocks.empty())
  {
    return true;
  }
  if (clocks.size() < static_cast<std::size_t>(t) + 1)
  {
    return false;
  }
  std::vector<ClockTime> sorted(clocks.begin(), clocks.end());
  auto const nth = sorted.begin() + t;
  std::nth_element(sorted.begin(), nth, sorted.end(), std::greater<>{});
  ClockTime const kth = *nth;
  ClockTime const top = *std::max_element(sorted.begin(), nth + 1);
  return kth >= top - gamma;
}

bool check_dagger_brute(std::span<ClockTime const> clocks, Time const &gamma, std::uint32_t t)
{
  for (auto const &c : clocks)
  {
    std::size_t count = 0;
    for (auto const &other : clocks)
    {
      if (other >= c - gamma)
      {
        ++count;
      }
    }
    if (count < static_cast<std::size_t>(t) + 1)
    {
      return false;
    }
  }
  return true;
}

std::string_view to_string(OffsetMode mode)
{
  switch (mode)
  {
  case OffsetMode::all_zero:
    return "all_zero";
  case OffsetMode::two_cluster:
    return "two_cluster";
  case OffsetMode::adversarial_spread:
    return "adversarial_spread";
  case OffsetMode::explicit_values:
    return "explicit";
  }
  return "unknown";
}

OffsetMode parse_offset_mode(std::string_view text)
{
  for (auto mode : {OffsetMode::all_zero, OffsetMode::two_cluster, OffsetMode::adversarial_spread,
                    OffsetMode::explicit_values})
  {
    if (to_string(mode) == text)
    {
      return mode;
    }
  }
  throw std::invalid_argument("unknown offsets mode: '" + std::string(text) + "'");
}

namespace {

std::vector<ClockTime> spread_offsets(std::uint32_t n, std::uint32_t t, Time const &gamma,
                                      std::uint64_t seed, std::vector<bool> const &correct)
{
  std::mt19937_64 rng(seed);

  std::vector<ProcessorId> honest;
  for (ProcessorId i = 0; i < n; ++i)
  {
    if (correct[i])
    {
      honest.push_back(i);
    }
  }
  std::shuffle(honest.begin(), honest.end(), rng);

  std::size_t const size     = static_cast<std::size_t>(t) + 1;
  std::size_t const clusters = std::max<std::size_t>(1, honest.size() / size);

  // Levels are multiples of gamma/4, consecutive clusters 2..40 gamma apart.
  Time const                          step = gamma / Time(4);
  std::uniform_int_distribution<int> gap_pick(8, 160);
  std::vector<Time>                   levels(clusters);
  Time                                level = gamma;
  for (auto &l : levels)
  {
    l = level;
    level += step * Time(gap_pick(rng));
  }

  // Members inside a cluster lie on a gamma/8 grid within [level - gamma, level].
  Time const                          fine = gamma / Time(8);
  std::uniform_int_distribution<int> within(0, 8);
  std::vector<ClockTime>              offsets(n, ClockTime(0));
  for (std::size_t c = 0; c < clusters; ++c)
  {
    std::size_t const begin = c * size;
    std::size_t const end   = c + 1 == clusters ? honest.size() : begin + size;
    for (std::size_t i = begin; i < end; ++i)
    {
      Time off;
      if (i == begin)
      {
        off = levels[c];
      }
      else if (i == begin + 1)
      {
        off = levels[c] - gamma;
      }
      else
      {
        off = levels[c] - fine * Time(within(rng));
      }
      offsets[honest[i]] = off;
    }
  }

  Time const                                  top = levels.back();
  std::uniform_int_distribution<std::int64_t> anywhere(0, floor_int(top / fine).convert_to<std::int64_t>());
  for (ProcessorId i = 0; i < n; ++i)
  {
    if (!correct[i])
    {
      offsets[i] = fine * Time(TimeInt(anywhere(rng)));
    }
  }
  return offsets;
}

}  // namespace

std::vector<ClockTime> generate_initial_offsets(std::uint32_t n, std::uint32_t t,
                                                Time const &gamma, OffsetSpec const &spec,
                                                std::vector<bool> const &correct)
{
  if (correct.size() != n)
  {
    throw OffsetError("correctness mask has " + std::to_string(correct.size()) +
                      " entries, expected " + std::to_string(n));
  }

  std::vector<ClockTime> offsets;
  switch (spec.mode)
  {
  case OffsetMode::all_zero:
    offsets.assign(n, ClockTime(0));
    break;
  case OffsetMode::two_cluster:
    if (spec.gap < Time(0))
    {
      throw OffsetError("two_cluster gap must be non-negative");
    }
    offsets.assign(n, ClockTime(0));
    for (std::uint32_t i = n / 2; i < n; ++i)
    {
      offsets[i] = spec.gap;
    }
    break;
  case OffsetMode::adversarial_spread:
    offsets = spread_offsets(n, t, gamma, spec.seed, correct);
    break;
  case OffsetMode::explicit_values:
    if (spec.values.size() != n)
    {
      throw OffsetError("explicit offsets list has " + std::to_string(spec.values.size()) +
                        " entries, expected " + std::to_string(n));
    }
    offsets = spec.values;
    break;
  }

  std::vector<ClockTime> honest;
  for (std::uint32_t i = 0; i < n; ++i)
  {
    if (offsets[i] < ClockTime(0))
    {
      throw OffsetError("initial offsets must be non-negative");
    }
    if (correct[i])
    {
      honest.push_back(offsets[i]);
    }
  }
  if (!check_dagger(honest, gamma, t))
  {
    throw OffsetError("initial offsets of " + std::string(to_string(spec.mode)) +
                      " violate the initial synchronisation condition over correct processors");
  }
  return offsets;
}

}  // namespace fever
