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

#include "fever/processor.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace fever {

/// Per-processor memory of the propose/vote/certify round that produces QCs.
struct StubState
{
  std::set<View>                           proposed;
  std::set<View>                           voted;
  std::set<View>                           buffered;  // proposals for views not yet entered
  std::map<View, std::vector<ProcessorId>> votes;     // leader side, sorted signers
  std::set<View>                           formed_qcs;

  friend bool operator==(StubState const &, StubState const &) = default;
};

/// Leader of v broadcasts Proposal(v); any buffered proposal for v is voted on.
/// Also called for view 0 when the processor starts.
std::string stub_on_enter_view(ProcessorState const &p, StubState &stub, View v,
                               ProtocolParams const &params, std::vector<Action> &out);

/// Votes if p is inside prop.view, buffers future proposals, drops stale ones.
std::string stub_on_proposal(ProcessorState const &p, StubState &stub, Proposal const &prop,
                             ProtocolParams const &params, std::vector<Action> &out);

/// Leader side: at exactly n-t distinct votes for a view, forms and broadcasts a QC.
std::string stub_on_vote(ProcessorState const &p, StubState &stub, Vote const &vote,
                         ProtocolParams const &params, std::vector<Action> &out);

}  // namespace fever
