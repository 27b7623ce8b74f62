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

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace fever {

// Exact time arithmetic. The 128-bit checked integer throws std::overflow_error
// instead of wrapping, so a run either stays exact or fails loudly.
using TimeInt = boost::multiprecision::checked_int128_t;
using Time    = boost::rational<TimeInt>;

// Both local clock values and global (simulator) time share the representation;
// the aliases only document which one a field holds.
using ClockTime  = Time;
using GlobalTime = Time;

Time make_time(std::int64_t num, std::int64_t den = 1);

/// Parses "7", "-7/2" or a decimal such as "0.125" exactly.
/// Throws std::invalid_argument on malformed input.
Time parse_time(std::string_view text);

/// Canonical form: "n" for integers, "n/d" otherwise. parse_time(to_string(x)) == x.
std::string to_string(Time const &t);

double to_double(Time const &t);

/// Largest integer <= t.
TimeInt floor_int(Time const &t);
/// Smallest integer >= t.
TimeInt ceil_int(Time const &t);

bool is_integer(Time const &t);

}  // namespace fever
