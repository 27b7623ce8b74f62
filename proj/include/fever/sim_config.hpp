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

#include "fever/network.hpp"
#include "fever/offsets.hpp"
#include "fever/params.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fever {

enum class Strategy
{
  silent,           // sends nothing once corrupted
  crash_leader,     // follows the protocol but never proposes, certifies or relays certificates
  selective_vc,     // forms VCs but sends each one to a seeded subset only
  early_signer,     // at corruption signs view messages for every initial view up to the horizon
  vote_stuffer,     // at corruption signs votes for every view up to the horizon
  late_qc_relayer,  // withholds QCs and releases them to a seeded subset later
};

std::string_view to_string(Strategy s);
Strategy         parse_strategy(std::string_view text);

inline constexpr Strategy kAllStrategies[] = {Strategy::silent,       Strategy::crash_leader,
                                              Strategy::selective_vc, Strategy::early_signer,
                                              Strategy::vote_stuffer, Strategy::late_qc_relayer};

enum class Selection
{
  first_leaders,  // leaders of leader groups 0, 1, 2, ...
  random,         // uniform subset drawn from the corruption seed
};

std::string_view to_string(Selection s);
Selection        parse_selection(std::string_view text);

struct Corruption
{
  ProcessorId id{0};
  GlobalTime  time{0};
  Strategy    strategy{Strategy::silent};

  friend bool operator==(Corruption const &, Corruption const &) = default;
};

struct CorruptionSpec
{
  std::uint32_t           count{0};
  Strategy                strategy{Strategy::silent};
  Selection               selection{Selection::first_leaders};
  GlobalTime              time{0};
  std::uint64_t           seed{0};
  std::vector<Corruption> list;  // when non-empty, used verbatim instead of the fields above

  friend bool operator==(CorruptionSpec const &, CorruptionSpec const &) = default;
};

struct SimConfig
{
  ProtocolParams            params{};
  GlobalTime                gst{0};
  Time                      delta_actual{1};
  OffsetSpec                offsets{};
  CorruptionSpec            corruption{};
  NetworkKind               network{NetworkKind::fixed_delta};
  std::uint32_t             network_grid{8};
  Time                      drift_epsilon{0};
  std::vector<SyncInterval> synchrony_schedule;
  std::uint64_t             seed{0};
  std::optional<GlobalTime> horizon;  // default: gst + 3k(t+3)gamma
  bool                      stop_at_t_star{true};
  Time                      tail{0};  // extra simulated time after t* when stopping there
};

class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Everything derived from a config before the first event.
struct ResolvedRun
{
  std::vector<Corruption> corruptions;     // sorted by id
  std::vector<bool>       never_corrupted;
  std::vector<ClockTime>  offsets;         // as generated, non-negative
  std::vector<ClockTime>  initial_clocks;  // offsets shifted so the maximum is 0
  std::vector<Time>       rates;
  GlobalTime              horizon;
  View                    max_signed_view;  // upper bound for early signing strategies
};

/// Throws ConfigError on any invalid or unsatisfiable combination.
ResolvedRun resolve(SimConfig const &config);

GlobalTime default_horizon(SimConfig const &config);

/// Canonical JSON form; all times are exact strings.
nlohmann::json to_json(SimConfig const &config);

/// Accepts numbers or exact strings for times. With "delta_units": true, every
/// time field except delta_cap is a multiple of delta_cap.
SimConfig sim_config_from_json(nlohmann::json const &doc);

/// FNV-1a 64 over the canonical dump, as 16 hex digits.
std::string config_hash(SimConfig const &config);

Time           json_time(nlohmann::json const &value);
nlohmann::json time_json(Time const &t);

}  // namespace fever
