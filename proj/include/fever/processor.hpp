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

#include "fever/certificates.hpp"
#include "fever/params.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace fever {

/// Local state of one processor running the view synchroniser.
///
/// A processor holds view 0 but has not started while its clock is below c_0.
/// It starts when the clock reaches c_0, when a VC for view 0 forwards it
/// there, or when a QC moves it to a later view. It neither signs nor
/// proposes before starting, though as a leader it still collects view
/// messages.
struct ProcessorState
{
  ProcessorId         id{0};
  View                view{0};
  ClockTime           clock{0};
  bool                started{false};
  std::optional<View> highest_qc_view;

  std::set<View>                          sent_view_msgs;
  std::map<View, std::vector<ProcessorId>> collected_view_msgs;  // sorted signer lists
  std::set<View>                          formed_vcs;
  std::set<View>                          seen_qcs;
  std::set<View>                          seen_vcs;

  friend bool operator==(ProcessorState const &, ProcessorState const &) = default;
};

namespace action {

/// `to == std::nullopt` addresses every processor, the sender included.
struct Send
{
  std::optional<ProcessorId> to;
  Payload                    payload;
};

struct ForwardClock
{
  ClockTime to;
};

struct EnterView
{
  View view;
};

struct FormVC
{
  ViewCertificate cert;
};

struct FormQC
{
  QuorumCertificate cert;
};

}  // namespace action

using Action = std::variant<action::Send, action::ForwardClock, action::EnterView, action::FormVC,
                            action::FormQC>;

struct Transition
{
  ProcessorState      state;
  std::vector<Action> actions;
  std::string         diag;  // non-empty when the input was ignored for a reportable reason
};

ProcessorState initial_state(ProcessorId id, ClockTime initial_clock);

// In-place handlers. Each appends its side effects to `out` and returns a
// diagnostic string (empty when nothing noteworthy happened). The caller must
// have validated certificates and signatures beforehand.

/// The caller has already set state.clock = c.
std::string apply_clock_reaches(ProcessorState &state, ClockTime const &c,
                                ProtocolParams const &params, std::vector<Action> &out);
std::string apply_qc(ProcessorState &state, QuorumCertificate const &qc,
                     ProtocolParams const &params, std::vector<Action> &out);
std::string apply_vc(ProcessorState &state, ViewCertificate const &vc,
                     ProtocolParams const &params, std::vector<Action> &out);
std::string apply_view_message(ProcessorState &state, ViewMessage const &m,
                               ProtocolParams const &params, std::vector<Action> &out);

// Pure wrappers returning the successor state.
Transition on_clock_reaches(ProcessorState state, ClockTime const &c, ProtocolParams const &params);
Transition on_qc(ProcessorState state, QuorumCertificate const &qc, ProtocolParams const &params);
Transition on_vc(ProcessorState state, ViewCertificate const &vc, ProtocolParams const &params);
Transition on_view_message(ProcessorState state, ViewMessage const &m,
                           ProtocolParams const &params);

}  // namespace fever
