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

#include "fever/processor.hpp"

#include <algorithm>

namespace fever {

namespace {

void enter(ProcessorState &state, View v, std::vector<Action> &out)
{
  bool const changed = state.view != v || !state.started;
  state.view         = v;
  state.started      = true;
  if (changed)
  {
    out.emplace_back(action::EnterView{v});
  }
}

void forward_to(ProcessorState &state, ClockTime const &target, std::vector<Action> &out)
{
  if (state.clock < target)
  {
    state.clock = target;
    out.emplace_back(action::ForwardClock{target});
  }
}

}  // namespace

ProcessorState initial_state(ProcessorId id, ClockTime initial_clock)
{
  ProcessorState s;
  s.id    = id;
  s.clock = std::move(initial_clock);
  return s;
}

std::string apply_clock_reaches(ProcessorState &state, ClockTime const &c,
                                ProtocolParams const &params, std::vector<Action> &out)
{
  auto const v = view_at_clock(c, params);
  if (!v || !is_initial(*v, params))
  {
    return {};
  }
  if (*v < state.view || state.sent_view_msgs.contains(*v))
  {
    return {};
  }
  enter(state, *v, out);
  state.sent_view_msgs.insert(*v);
  out.emplace_back(action::Send{leader_of(*v, params), ViewMessage{*v, state.id}});
  return {};
}

std::string apply_qc(ProcessorState &state, QuorumCertificate const &qc,
                     ProtocolParams const &params, std::vector<Action> &out)
{
  View const w = qc.view();
  if (!state.seen_qcs.insert(w).second)
  {
    return {};
  }
  if (!state.highest_qc_view || *state.highest_qc_view < w)
  {
    state.highest_qc_view = w;
  }

  ClockTime const target = clock_time(w + 1, params);
  if (w < state.view)
  {
    // Stale certificate: the clock may still be pulled forward, the view is not.
    forward_to(state, target, out);
    return {};
  }

  forward_to(state, target, out);
  enter(state, w + 1, out);
  if (state.clock == target)
  {
    apply_clock_reaches(state, target, params, out);
  }
  return {};
}

std::string apply_vc(ProcessorState &state, ViewCertificate const &vc,
                     ProtocolParams const &params, std::vector<Action> &out)
{
  View const w = vc.view();
  if (!state.seen_vcs.insert(w).second)
  {
    return {};
  }
  // A VC for the current view matters only to a processor that has not started.
  if (w < state.view || (w == state.view && state.started))
  {
    return {};
  }
  ClockTime const target = clock_time(w, params);
  forward_to(state, target, out);
  enter(state, w, out);
  if (state.clock == target)
  {
    apply_clock_reaches(state, target, params, out);
  }
  return {};
}

std::string apply_view_message(ProcessorState &state, ViewMessage const &m,
                               ProtocolParams const &params, std::vector<Action> &out)
{
  if (!is_initial(m.view, params))
  {
    return "view message for non-initial view " + std::to_string(m.view);
  }
  if (leader_of(m.view, params) != state.id)
  {
    return "view message for view " + std::to_string(m.view) + " sent to non-leader";
  }
  if (m.view < state.view)
  {
    return {};
  }

  auto &signers = state.collected_view_msgs[m.view];
  auto  pos     = std::lower_bound(signers.begin(), signers.end(), m.signer);
  if (pos != signers.end() && *pos == m.signer)
  {
    return {};
  }
  signers.insert(pos, m.signer);

  if (signers.size() == params.vc_quorum() && !state.formed_vcs.contains(m.view))
  {
    std::vector<ViewMessage> messages;
    messages.reserve(signers.size());
    for (auto s : signers)
    {
      messages.push_back(ViewMessage{m.view, s});
    }
    auto cert = form_vc(m.view, messages, params);
    state.formed_vcs.insert(m.view);
    out.emplace_back(action::FormVC{cert});
    out.emplace_back(action::Send{std::nullopt, std::move(cert)});
  }
  return {};
}

Transition on_clock_reaches(ProcessorState state, ClockTime const &c, ProtocolParams const &params)
{
  Transition tr;
  tr.diag  = apply_clock_reaches(state, c, params, tr.actions);
  tr.state = std::move(state);
  return tr;
}

Transition on_qc(ProcessorState state, QuorumCertificate const &qc, ProtocolParams const &params)
{
  Transition tr;
  tr.diag  = apply_qc(state, qc, params, tr.actions);
  tr.state = std::move(state);
  return tr;
}

Transition on_vc(ProcessorState state, ViewCertificate const &vc, ProtocolParams const &params)
{
  Transition tr;
  tr.diag  = apply_vc(state, vc, params, tr.actions);
  tr.state = std::move(state);
  return tr;
}

Transition on_view_message(ProcessorState state, ViewMessage const &m,
                           ProtocolParams const &params)
{
  Transition tr;
  tr.diag  = apply_view_message(state, m, params, tr.actions);
  tr.state = std::move(state);
  return tr;
}

}  // namespace fever
