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

#include "fever/trace.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace fever {

using nlohmann::json;

PayloadRecord record_of(Payload const &payload)
{
  PayloadRecord r;
  r.kind = kind_of(payload);
  r.view = view_of(payload);
  std::visit(
      [&](auto const &p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ViewCertificate> || std::is_same_v<T, QuorumCertificate>)
        {
          r.signers.assign(p.signers().begin(), p.signers().end());
        }
        else if constexpr (std::is_same_v<T, Proposal>)
        {
          r.signers = {p.leader};
        }
        else
        {
          r.signers = {p.signer};
        }
      },
      payload);
  return r;
}

std::string_view to_string(EventKind kind)
{
  switch (kind)
  {
  case EventKind::corruption:
    return "corrupt";
  case EventKind::delivery:
    return "deliver";
  case EventKind::threshold:
    return "threshold";
  }
  return "unknown";
}

TraceParseError::TraceParseError(std::size_t line, std::string const &what)
  : std::runtime_error("trace line " + std::to_string(line) + ": " + what)
  , line_{line}
{}

namespace {

EventKind parse_event_kind(std::string const &text)
{
  for (auto k : {EventKind::corruption, EventKind::delivery, EventKind::threshold})
  {
    if (to_string(k) == text)
    {
      return k;
    }
  }
  throw std::invalid_argument("unknown event kind '" + text + "'");
}

bool single_signer(PayloadKind kind)
{
  return kind == PayloadKind::view_message || kind == PayloadKind::vote ||
         kind == PayloadKind::proposal;
}

json payload_json(PayloadRecord const &p)
{
  json j;
  j["kind"] = std::string(to_string(p.kind));
  j["view"] = p.view;
  if (p.kind == PayloadKind::proposal)
  {
    j["leader"] = p.signers.at(0);
  }
  else if (single_signer(p.kind))
  {
    j["signer"] = p.signers.at(0);
  }
  else
  {
    j["signers"] = p.signers;
  }
  return j;
}

PayloadRecord payload_from(json const &j)
{
  PayloadRecord p;
  p.kind = parse_payload_kind(j.at("kind").get<std::string>());
  p.view = j.at("view").get<View>();
  if (p.kind == PayloadKind::proposal)
  {
    p.signers = {j.at("leader").get<ProcessorId>()};
  }
  else if (single_signer(p.kind))
  {
    p.signers = {j.at("signer").get<ProcessorId>()};
  }
  else
  {
    p.signers = j.at("signers").get<std::vector<ProcessorId>>();
  }
  return p;
}

std::vector<Time> times_from(json const &arr)
{
  std::vector<Time> out;
  for (auto const &v : arr)
  {
    out.push_back(json_time(v));
  }
  return out;
}

json times_json(std::vector<Time> const &values)
{
  json arr = json::array();
  for (auto const &v : values)
  {
    arr.push_back(time_json(v));
  }
  return arr;
}

TraceHeader header_from(json const &j)
{
  if (j.at("version").get<int>() != kTraceVersion)
  {
    throw std::invalid_argument("unsupported trace version " + j.at("version").dump());
  }
  TraceHeader h;
  h.config         = sim_config_from_json(j.at("config"));
  h.config_hash    = j.at("config_hash").get<std::string>();
  h.initial_clocks = times_from(j.at("initial_clocks"));
  h.rates          = times_from(j.at("rates"));
  h.horizon        = json_time(j.at("horizon"));
  for (auto const &c : j.at("corruptions"))
  {
    h.corruptions.push_back(Corruption{c.at("id").get<ProcessorId>(), json_time(c.at("time")),
                                       parse_strategy(c.at("strategy").get<std::string>())});
  }
  auto const n = h.config.params.n;
  if (h.initial_clocks.size() != n || h.rates.size() != n)
  {
    throw std::invalid_argument("per-processor arrays do not match n");
  }
  return h;
}

TraceEvent event_from(json const &j)
{
  TraceEvent e;
  e.seq  = j.at("seq").get<std::uint64_t>();
  e.time = json_time(j.at("time"));
  e.kind = parse_event_kind(j.at("kind").get<std::string>());
  e.proc = j.at("proc").get<ProcessorId>();
  if (e.kind == EventKind::delivery)
  {
    e.sender    = j.at("sender").get<ProcessorId>();
    e.payload   = payload_from(j.at("payload"));
    e.words     = j.at("words").get<std::uint32_t>();
    e.send_time = json_time(j.at("send_time"));
  }
  if (e.kind == EventKind::threshold)
  {
    e.threshold_view = j.at("view").get<View>();
  }
  if (j.contains("sent"))
  {
    for (auto const &s : j.at("sent"))
    {
      e.sent.push_back(SentRecord{s.at("to").get<ProcessorId>(), payload_from(s.at("payload")),
                                  s.at("words").get<std::uint32_t>(), json_time(s.at("send")),
                                  json_time(s.at("deliver"))});
    }
  }
  if (j.contains("formed"))
  {
    for (auto const &f : j.at("formed"))
    {
      e.formed.push_back(FormedRecord{parse_payload_kind(f.at("kind").get<std::string>()),
                                      f.at("view").get<View>(),
                                      f.at("signers").get<std::vector<ProcessorId>>()});
    }
  }
  if (j.contains("deltas"))
  {
    for (auto const &d : j.at("deltas"))
    {
      e.deltas.push_back(StateDelta{d.at("id").get<ProcessorId>(), d.at("view").get<View>(),
                                    json_time(d.at("clock"))});
    }
  }
  if (j.contains("diag"))
  {
    e.diag = j.at("diag").get<std::string>();
  }
  return e;
}

}  // namespace

json header_json(TraceHeader const &header)
{
  json j;
  j["type"]           = "header";
  j["version"]        = kTraceVersion;
  j["config"]         = to_json(header.config);
  j["config_hash"]    = header.config_hash;
  j["initial_clocks"] = times_json(header.initial_clocks);
  j["rates"]          = times_json(header.rates);
  j["horizon"]        = time_json(header.horizon);
  j["corruptions"]    = json::array();
  for (auto const &c : header.corruptions)
  {
    j["corruptions"].push_back(
        {{"id", c.id}, {"time", time_json(c.time)}, {"strategy", to_string(c.strategy)}});
  }
  return j;
}

json event_json(TraceEvent const &e)
{
  json j;
  j["type"] = "event";
  j["seq"]  = e.seq;
  j["time"] = time_json(e.time);
  j["kind"] = std::string(to_string(e.kind));
  j["proc"] = e.proc;
  if (e.kind == EventKind::delivery)
  {
    j["sender"]    = e.sender.value_or(0);
    j["payload"]   = payload_json(e.payload.value_or(PayloadRecord{}));
    j["words"]     = e.words;
    j["send_time"] = time_json(e.send_time);
  }
  if (e.kind == EventKind::threshold)
  {
    j["view"] = e.threshold_view;
  }
  if (!e.sent.empty())
  {
    json arr = json::array();
    for (auto const &s : e.sent)
    {
      arr.push_back({{"to", s.to},
                     {"payload", payload_json(s.payload)},
                     {"words", s.words},
                     {"send", time_json(s.send_time)},
                     {"deliver", time_json(s.deliver_time)}});
    }
    j["sent"] = std::move(arr);
  }
  if (!e.formed.empty())
  {
    json arr = json::array();
    for (auto const &f : e.formed)
    {
      arr.push_back(
          {{"kind", std::string(to_string(f.kind))}, {"view", f.view}, {"signers", f.signers}});
    }
    j["formed"] = std::move(arr);
  }
  if (!e.deltas.empty())
  {
    json arr = json::array();
    for (auto const &d : e.deltas)
    {
      arr.push_back({{"id", d.id}, {"view", d.view}, {"clock", time_json(d.clock)}});
    }
    j["deltas"] = std::move(arr);
  }
  if (!e.diag.empty())
  {
    j["diag"] = e.diag;
  }
  return j;
}

void write_trace(std::ostream &out, Trace const &trace, json const *metrics)
{
  out << header_json(trace.header).dump() << '\n';
  for (auto const &e : trace.events)
  {
    out << event_json(e).dump() << '\n';
  }
  json end;
  end["type"]     = "end";
  end["end_time"] = time_json(trace.end_time);
  end["events"]   = trace.events.size();
  if (metrics != nullptr)
  {
    end["metrics"] = *metrics;
  }
  out << end.dump() << '\n';
}

std::string trace_to_string(Trace const &trace, json const *metrics)
{
  std::ostringstream out;
  write_trace(out, trace, metrics);
  return out.str();
}

ParsedTrace read_trace(std::istream &in)
{
  ParsedTrace parsed;
  std::string line;
  std::size_t lineno     = 0;
  bool        have_head  = false;
  bool        have_end   = false;

  while (std::getline(in, line))
  {
    ++lineno;
    if (line.empty())
    {
      continue;
    }
    if (have_end)
    {
      throw TraceParseError(lineno, "content after end record");
    }
    try
    {
      json const  j    = json::parse(line);
      auto const  type = j.at("type").get<std::string>();
      if (!have_head)
      {
        if (type != "header")
        {
          throw std::invalid_argument("first record must be a header");
        }
        parsed.trace.header = header_from(j);
        have_head           = true;
      }
      else if (type == "event")
      {
        auto e = event_from(j);
        if (e.seq != parsed.trace.events.size())
        {
          throw std::invalid_argument("event seq " + std::to_string(e.seq) + " out of order");
        }
        parsed.trace.events.push_back(std::move(e));
      }
      else if (type == "end")
      {
        parsed.trace.end_time = json_time(j.at("end_time"));
        if (j.at("events").get<std::size_t>() != parsed.trace.events.size())
        {
          throw std::invalid_argument("end record event count does not match");
        }
        if (j.contains("metrics"))
        {
          parsed.metrics = j.at("metrics");
        }
        have_end = true;
      }
      else
      {
        throw std::invalid_argument("unexpected record type '" + type + "'");
      }
    }
    catch (TraceParseError const &)
    {
      throw;
    }
    catch (std::exception const &e)
    {
      throw TraceParseError(lineno, e.what());
    }
  }
  if (!have_head)
  {
    throw TraceParseError(lineno + 1, "missing header record");
  }
  if (!have_end)
  {
    throw TraceParseError(lineno + 1, "missing end record (truncated trace)");
  }
  return parsed;
}

}  // namespace fever
