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
#include "fever/sim_config.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fever {

inline constexpr int kTraceVersion = 1;

/// Plain-data view of a payload. For view messages and votes `signers` holds
/// the single signer; for proposals it holds the leader.
struct PayloadRecord
{
  PayloadKind              kind{PayloadKind::view_message};
  View                     view{0};
  std::vector<ProcessorId> signers;

  friend bool operator==(PayloadRecord const &, PayloadRecord const &) = default;
};

PayloadRecord record_of(Payload const &payload);

struct SentRecord
{
  ProcessorId   to{0};
  PayloadRecord payload;
  std::uint32_t words{0};
  GlobalTime    send_time{0};
  GlobalTime    deliver_time{0};

  friend bool operator==(SentRecord const &, SentRecord const &) = default;
};

/// A certificate formed while handling an event.
struct FormedRecord
{
  PayloadKind              kind{PayloadKind::quorum_certificate};
  View                     view{0};
  std::vector<ProcessorId> signers;

  friend bool operator==(FormedRecord const &, FormedRecord const &) = default;
};

/// State of one processor after an event, emitted only when it changed.
/// `clock` is the exact local clock at the event time.
struct StateDelta
{
  ProcessorId id{0};
  View        view{0};
  ClockTime   clock{0};

  friend bool operator==(StateDelta const &, StateDelta const &) = default;
};

enum class EventKind : std::uint8_t
{
  corruption,
  delivery,
  threshold,
};

std::string_view to_string(EventKind kind);

struct TraceEvent
{
  std::uint64_t                seq{0};
  GlobalTime                   time{0};
  EventKind                    kind{EventKind::delivery};
  ProcessorId                  proc{0};  // recipient, firing processor, or corrupted processor
  std::optional<ProcessorId>   sender;   // deliveries only
  std::optional<PayloadRecord> payload;  // deliveries only
  std::uint32_t                words{0};
  GlobalTime                   send_time{0};
  View                         threshold_view{0};  // threshold events only
  std::vector<SentRecord>      sent;
  std::vector<FormedRecord>    formed;
  std::vector<StateDelta>      deltas;
  std::string                  diag;

  friend bool operator==(TraceEvent const &, TraceEvent const &) = default;
};

/// Everything an observer needs to re-derive metrics without re-simulating.
struct TraceHeader
{
  SimConfig               config;
  std::string             config_hash;
  std::vector<ClockTime>  initial_clocks;
  std::vector<Time>       rates;
  std::vector<Corruption> corruptions;
  GlobalTime              horizon{0};
};

struct Trace
{
  TraceHeader             header;
  std::vector<TraceEvent> events;
  GlobalTime              end_time{0};  // events at or before this time were all processed
};

class TraceParseError : public std::runtime_error
{
public:
  TraceParseError(std::size_t line, std::string const &what);

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

nlohmann::json header_json(TraceHeader const &header);
nlohmann::json event_json(TraceEvent const &event);

/// NDJSON: a header line, one line per event, then an end line. When
/// `metrics` is given it is embedded in the end line.
void        write_trace(std::ostream &out, Trace const &trace,
                        nlohmann::json const *metrics = nullptr);
std::string trace_to_string(Trace const &trace, nlohmann::json const *metrics = nullptr);

struct ParsedTrace
{
  Trace                         trace;
  std::optional<nlohmann::json> metrics;  // as stored in the end line
};

/// Throws TraceParseError carrying the 1-based line number of the first bad line.
ParsedTrace read_trace(std::istream &in);

}  // namespace fever
