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

#include "fever/trace.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fever {

/// Words per processor per leader group in the word bound W (f* + 3) n: two
/// view messages, plus one word each of proposal, vote, VC and QC traffic for
/// each of the k views in the group.
constexpr std::uint64_t word_constant(std::uint32_t k) noexcept
{
  return 2 + 4 * static_cast<std::uint64_t>(k);
}

inline constexpr std::uint64_t kWordConstant = word_constant(3);

/// Delay multiplier in the f = 0 latency bound t* - gst <= C delta + gamma + delta_cap.
/// Measured on f = 0 runs with delta = delta_cap / 100 as the worst (latency - gamma) / delta,
/// one delta per propose, vote and QC hop.
inline constexpr std::uint64_t kResponsivenessConstant = 3;

struct Violation
{
  std::string   invariant;
  std::uint64_t seq{0};
  std::string   detail;

  friend bool operator==(Violation const &, Violation const &) = default;
};

/// The pivotal views of the latency argument.
struct SyncPoint
{
  ProcessorId         pivot{0};  // most advanced correct processor at gst, lowest id on ties
  View                v{0};      // its view at gst
  std::optional<View> v0;        // greatest initial view < v whose correct leader differs from lead(v)
  View                v1{0};     // least initial view > v with a correct leader
  std::uint32_t       f_star{0}; // faulty-led initial views strictly between v0 and v1
};

struct RunMetrics
{
  std::string               config_hash;
  std::uint64_t             seed{0};
  std::uint32_t             n{0};
  std::uint32_t             t{0};
  std::uint32_t             f{0};
  std::uint32_t             f_star{0};
  GlobalTime                gst{0};
  Time                      delta{0};
  std::optional<GlobalTime> t_star;
  std::optional<Time>       latency;
  std::uint64_t             words{0};
  View                      first_sync_view{0};
  std::vector<Violation>    violations;
};

nlohmann::json metrics_json(RunMetrics const &m);

/// Processors that are never corrupted during the run.
std::vector<bool> correct_mask(TraceHeader const &header);

/// Least time strictly after gst at which a correct leader forms a QC.
std::optional<GlobalTime> compute_t_star(Trace const &trace);

/// Words sent by processors not corrupted at send time, with send time in [from, to].
std::uint64_t count_words(Trace const &trace, GlobalTime const &from, GlobalTime const &to);

/// Words counted between gst + delta_cap and t*.
std::uint64_t count_words(Trace const &trace, GlobalTime const &t_star);

SyncPoint compute_sync_point(Trace const &trace);

/// Every per-event and per-view invariant; empty when the run conforms.
std::vector<Violation> assert_invariants(Trace const &trace);

/// Full metrics, invariants included. Depends on the trace only.
RunMetrics compute_metrics(Trace const &trace);

struct QcFormation
{
  GlobalTime  time;
  View        view;
  ProcessorId leader;
  bool        correct_leader;
};

std::vector<QcFormation> qc_formations(Trace const &trace);

/// One window in which the view-completion hypotheses hold: a correct leader
/// and at least n-t correct processors (leader included) are in view v from
/// `start` (>= gst) until they see QC(v) or until start + 3 delta, and every
/// proposal, vote and QC of view v arrives within delta of stabilisation.
struct ContractWindow
{
  View                      view{0};
  GlobalTime                start;
  GlobalTime                deadline;
  std::optional<GlobalTime> last_receipt;  // latest first sighting of QC(v) among correct processors
  bool                      satisfied{false};
};

std::vector<ContractWindow> check_contract(Trace const &trace);

}  // namespace fever
