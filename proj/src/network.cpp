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

#include "fever/network.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace fever {

std::string_view to_string(NetworkKind kind)
{
  switch (kind)
  {
  case NetworkKind::fixed_delta:
    return "fixed_delta";
  case NetworkKind::worst_case_max_delay:
    return "worst_case_max_delay";
  case NetworkKind::uniform_random:
    return "uniform_random";
  }
  return "unknown";
}

NetworkKind parse_network_kind(std::string_view text)
{
  for (auto kind :
       {NetworkKind::fixed_delta, NetworkKind::worst_case_max_delay, NetworkKind::uniform_random})
  {
    if (to_string(kind) == text)
    {
      return kind;
    }
  }
  throw std::invalid_argument("unknown network strategy: '" + std::string(text) + "'");
}

DelayModel::DelayModel(NetworkKind kind, GlobalTime gst, Time delta_cap, Time delta_actual,
                       std::vector<SyncInterval> schedule, std::uint32_t grid)
  : kind_{kind}
  , gst_{std::move(gst)}
  , delta_cap_{std::move(delta_cap)}
  , delta_actual_{std::move(delta_actual)}
  , schedule_{std::move(schedule)}
{
  if (delta_cap_ <= Time(0))
  {
    throw std::invalid_argument("delta_cap must be positive");
  }
  if (delta_actual_ <= Time(0) || delta_actual_ > delta_cap_)
  {
    throw std::invalid_argument("delta must satisfy 0 < delta <= delta_cap");
  }
  if (grid == 0)
  {
    throw std::invalid_argument("uniform_random grid must be positive");
  }
  for (std::size_t i = 0; i < schedule_.size(); ++i)
  {
    if (schedule_[i].end <= schedule_[i].start ||
        (i > 0 && schedule_[i].start < schedule_[i - 1].end))
    {
      throw std::invalid_argument("synchrony intervals must be non-empty, sorted and disjoint");
    }
  }
  effective_delta_ = kind_ == NetworkKind::worst_case_max_delay ? delta_cap_ : delta_actual_;
  grid_unit_       = delta_actual_ / Time(TimeInt(grid));
}

GlobalTime DelayModel::stabilisation_point(GlobalTime const &send) const
{
  if (schedule_.empty())
  {
    return std::max(gst_, send);
  }
  for (auto const &iv : schedule_)
  {
    if (send < iv.start)
    {
      return iv.start;
    }
    if (send < iv.end)
    {
      return send;
    }
  }
  return send;
}

GlobalTime DelayModel::latest_delivery(GlobalTime const &send) const
{
  GlobalTime const stab = stabilisation_point(send);
  if (stab == send)
  {
    return send + effective_delta_;
  }
  return stab + delta_cap_;
}

GlobalTime DelayModel::deliver_time(GlobalTime const &send, std::mt19937_64 &rng) const
{
  GlobalTime const stab = stabilisation_point(send);
  switch (kind_)
  {
  case NetworkKind::fixed_delta:
    return stab + delta_actual_;
  case NetworkKind::worst_case_max_delay:
    return stab + delta_cap_;
  case NetworkKind::uniform_random:
    break;
  }

  // Pick a point of the absolute grid (multiples of delta/grid) inside
  // (send, upper]; keeping times on one grid bounds the denominators. A
  // remote message never arrives at the instant it is sent.
  GlobalTime const upper = latest_delivery(send);
  TimeInt const    lo    = floor_int(send / grid_unit_) + 1;
  TimeInt const    hi    = floor_int(upper / grid_unit_);
  if (hi < lo)
  {
    return upper;
  }
  auto const span = static_cast<std::uint64_t>(hi - lo);
  std::uniform_int_distribution<std::uint64_t> pick(0, span);
  return grid_unit_ * Time(lo + TimeInt(pick(rng)));
}

GlobalTime schedule_delivery(NetworkKind kind, GlobalTime const &now, GlobalTime const &gst,
                             Time const &delta_cap, Time const &delta_actual,
                             std::mt19937_64 &rng)
{
  return DelayModel(kind, gst, delta_cap, delta_actual).deliver_time(now, rng);
}

}  // namespace fever
