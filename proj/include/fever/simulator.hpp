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

#include "fever/sim_config.hpp"
#include "fever/trace.hpp"

namespace fever {

/// Runs one execution to its terminal condition and returns the full trace.
///
/// Events are processed in (time, kind, sender, recipient, insertion) order
/// with corruptions before deliveries before clock thresholds. The run stops
/// at the horizon, or, when `stop_at_t_star` is set, once every event up to
/// t* + tail has been processed. Deterministic in the config.
///
/// Throws ConfigError for invalid or unsatisfiable configurations.
Trace simulate(SimConfig const &config);

}  // namespace fever
