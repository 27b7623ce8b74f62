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

#include "fever/time.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>

namespace fever {

using View        = std::uint64_t;
using ProcessorId = std::uint32_t;

enum class ScheduleKind
{
  round_robin,
  random_permutations,
};

std::string_view to_string(ScheduleKind kind);
ScheduleKind     parse_schedule_kind(std::string_view text);

/// Maps leader groups (blocks of k consecutive views) to processors.
///
/// Round robin assigns group g to processor g mod n. Random permutations
/// concatenates successive uniformly random permutations of 0..n-1 drawn
/// from a single seeded stream; group g gets entry g of that sequence.
/// Copies share a lazily grown, mutex-protected permutation cache, so a
/// schedule can be read from several threads.
class LeaderSchedule
{
public:
  LeaderSchedule();

  static LeaderSchedule round_robin();
  static LeaderSchedule random_permutations(std::uint64_t seed);

  ScheduleKind  kind() const noexcept { return kind_; }
  std::uint64_t seed() const noexcept { return seed_; }

  ProcessorId leader_of_group(std::uint64_t group, std::uint32_t n) const;

private:
  struct PermutationCache;

  ScheduleKind                      kind_{ScheduleKind::round_robin};
  std::uint64_t                     seed_{0};
  std::shared_ptr<PermutationCache> cache_;
};

/// Global protocol constants shared by every processor.
struct ProtocolParams
{
  std::uint32_t  n{4};
  std::uint32_t  t{1};
  std::uint32_t  k{3};
  Time           delta_cap{1};  // post-GST delay bound
  Time           gamma{3};      // view duration, also the initial dispersion bound
  std::uint32_t  x{3};          // view-completion factor, gamma = x * delta_cap
  LeaderSchedule schedule{};

  /// Defaults: t = largest integer < n/3, gamma = x * delta_cap.
  static ProtocolParams make(std::uint32_t n, Time delta_cap, std::uint32_t x = 3,
                             std::uint32_t k = 3);

  /// Throws std::invalid_argument if an invariant does not hold.
  void validate() const;

  std::uint32_t vc_quorum() const noexcept { return t + 1; }
  std::uint32_t qc_quorum() const noexcept { return n - t; }
};

/// Largest integer strictly below n/3.
std::uint32_t default_fault_bound(std::uint32_t n) noexcept;

bool        is_initial(View v, ProtocolParams const &params) noexcept;
ClockTime   clock_time(View v, ProtocolParams const &params);
ProcessorId leader_of(View v, ProtocolParams const &params);

/// The view whose clock-time equals c, if c lies exactly on the schedule.
std::optional<View> view_at_clock(ClockTime const &c, ProtocolParams const &params);

/// Smallest initial view whose clock-time is >= c (c may be negative).
View next_initial_at_or_after(ClockTime const &c, ProtocolParams const &params);

}  // namespace fever
