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

#include "fever/underlying.hpp"

#include <algorithm>

namespace fever {

namespace {

void vote_if_fresh(ProcessorState const &p, StubState &stub, View v, ProtocolParams const &params,
                   std::vector<Action> &out)
{
  if (stub.voted.insert(v).second)
  {
    out.emplace_back(action::Send{leader_of(v, params), Vote{v, p.id}});
  }
}

}  // namespace

std::string stub_on_enter_view(ProcessorState const &p, StubState &stub, View v,
                               ProtocolParams const &params, std::vector<Action> &out)
{
  if (leader_of(v, params) == p.id && stub.proposed.insert(v).second)
  {
    out.emplace_back(action::Send{std::nullopt, Proposal{v, p.id}});
  }
  // Anything buffered below v can no longer be voted on.
  stub.buffered.erase(stub.buffered.begin(), stub.buffered.lower_bound(v));
  if (stub.buffered.erase(v) > 0)
  {
    vote_if_fresh(p, stub, v, params, out);
  }
  return {};
}

std::string stub_on_proposal(ProcessorState const &p, StubState &stub, Proposal const &prop,
                             ProtocolParams const &params, std::vector<Action> &out)
{
  if (prop.leader != leader_of(prop.view, params))
  {
    return "proposal for view " + std::to_string(prop.view) + " from non-leader " +
           std::to_string(prop.leader);
  }
  if (p.view < prop.view || (p.view == prop.view && !p.started))
  {
    stub.buffered.insert(prop.view);
    return {};
  }
  if (p.view == prop.view)
  {
    vote_if_fresh(p, stub, prop.view, params, out);
  }
  return {};
}

std::string stub_on_vote(ProcessorState const &p, StubState &stub, Vote const &vote,
                         ProtocolParams const &params, std::vector<Action> &out)
{
  if (leader_of(vote.view, params) != p.id)
  {
    return "vote for view " + std::to_string(vote.view) + " sent to non-leader";
  }
  auto &signers = stub.votes[vote.view];
  auto  pos     = std::lower_bound(signers.begin(), signers.end(), vote.signer);
  if (pos != signers.end() && *pos == vote.signer)
  {
    return {};
  }
  signers.insert(pos, vote.signer);

  if (signers.size() == params.qc_quorum() && !stub.formed_qcs.contains(vote.view))
  {
    std::vector<Vote> votes;
    votes.reserve(signers.size());
    for (auto s : signers)
    {
      votes.push_back(Vote{vote.view, s});
    }
    auto cert = form_qc(vote.view, votes, params);
    stub.formed_qcs.insert(vote.view);
    out.emplace_back(action::FormQC{cert});
    out.emplace_back(action::Send{std::nullopt, std::move(cert)});
  }
  return {};
}

}  // namespace fever
