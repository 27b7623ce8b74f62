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

#include "fever/params.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace fever {

/// For every clock c in the multiset, at least t+1 clocks (c itself included)
/// are >= c - gamma. Uses the order-statistic form: the (t+1)-th largest clock
/// is >= max - gamma. An empty multiset passes; a non-empty one smaller than
/// t+1 fails.
bool check_dagger(std::span<ClockTime const> clocks, Time const &gamma, std::uint32_t t);

/// Quadratic reference form that checks every clock value directly.
bool check_dagger_brute(std::span<ClockTime const> clocks, Time const &gamma, std::uint32_t t);

enum class OffsetMode
{
  all_zero,
  two_cluster,
  adversarial_spread,
  explicit_values,
};

std::string_view to_string(OffsetMode mode);
OffsetMode       parse_offset_mode(std::string_view text);

struct OffsetSpec
{
  OffsetMode             mode{OffsetMode::all_zero};
  Time                   gap{0};        // two_cluster
  std::uint64_t          seed{0};       // adversarial_spread
  std::vector<ClockTime> values;        // explicit_values

  friend bool operator==(OffsetSpec const &, OffsetSpec const &) = default;
};

class OffsetError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Non-negative initial clock offsets, one per processor.
///
/// two_cluster puts the last ceil(n/2) processors at `gap` and the rest at 0.
/// adversarial_spread shuffles the correct processors into clusters of at
/// least t+1 members placed at random, widely separated levels; each cluster
/// spans exactly gamma. Faulty processors get arbitrary offsets.
///
/// `correct[i]` marks processors that are never corrupted; the spread
/// condition is enforced over those only. Throws OffsetError when the result
/// would violate it.
std::vector<ClockTime> generate_initial_offsets(std::uint32_t n, std::uint32_t t,
                                                Time const &gamma, OffsetSpec const &spec,
                                                std::vector<bool> const &correct);

}  // namespace fever
