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
#include <random>
#include <string_view>
#include <vector>

namespace fever {

enum class NetworkKind
{
  fixed_delta,           // every message takes exactly delta after stabilisation
  worst_case_max_delay,  // every message takes the full cap after stabilisation
  uniform_random,        // uniform on a grid within the permitted window, never instantaneous
};

std::string_view to_string(NetworkKind kind);
NetworkKind      parse_network_kind(std::string_view text);

/// Half-open interval [start, end) of global time during which the network is synchronous.
struct SyncInterval
{
  GlobalTime start;
  GlobalTime end;

  friend bool operator==(SyncInterval const &, SyncInterval const &) = default;
};

/// Message delay adversary for partial synchrony.
///
/// Without a synchrony schedule a message sent at s stabilises at max(gst, s).
/// With a schedule, a message sent inside an interval stabilises immediately,
/// one sent in a gap stabilises at the start of the next interval, and one
/// sent after the last interval stabilises immediately. Delivery happens at
/// most delta_cap after the stabilisation point, and at most delta after the
/// send when the send itself is synchronous.
class DelayModel
{
public:
  DelayModel(NetworkKind kind, GlobalTime gst, Time delta_cap, Time delta_actual,
             std::vector<SyncInterval> schedule = {}, std::uint32_t grid = 8);

  NetworkKind kind() const noexcept { return kind_; }

  /// Post-stabilisation delay actually applied: delta_cap for the worst-case
  /// adversary, delta otherwise.
  Time const &effective_delta() const noexcept { return effective_delta_; }

  GlobalTime stabilisation_point(GlobalTime const &send) const;

  /// Latest delivery time the model permits for a send at `send`.
  GlobalTime latest_delivery(GlobalTime const &send) const;

  /// Deterministic given the rng state. Self-addressed messages are not routed
  /// through here; they are delivered at the send time.
  GlobalTime deliver_time(GlobalTime const &send, std::mt19937_64 &rng) const;

private:
  NetworkKind               kind_;
  GlobalTime                gst_;
  Time                      delta_cap_;
  Time                      delta_actual_;
  Time                      effective_delta_;
  std::vector<SyncInterval> schedule_;
  Time                      grid_unit_;
};

/// Single-message form of DelayModel::deliver_time without a synchrony schedule.
GlobalTime schedule_delivery(NetworkKind kind, GlobalTime const &now, GlobalTime const &gst,
                             Time const &delta_cap, Time const &delta_actual,
                             std::mt19937_64 &rng);

}  // namespace fever
