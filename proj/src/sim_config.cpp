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

#include "fever/sim_config.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>

namespace fever {

using nlohmann::json;

std::string_view to_string(Strategy s)
{
  switch (s)
  {
  case Strategy::silent:
    return "silent";
  case Strategy::crash_leader:
    return "crash_leader";
  case Strategy::selective_vc:
    return "selective_vc";
  case Strategy::early_signer:
    return "early_signer";
  case Strategy::vote_stuffer:
    return "vote_stuffer";
  case Strategy::late_qc_relayer:
    return "late_qc_relayer";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view text)
{
  for (auto s : kAllStrategies)
  {
    if (to_string(s) == text)
    {
      return s;
    }
  }
  throw ConfigError("unknown Byzantine strategy: '" + std::string(text) + "'");
}

std::string_view to_string(Selection s)
{
  return s == Selection::first_leaders ? "first_leaders" : "random";
}

Selection parse_selection(std::string_view text)
{
  if (text == "first_leaders")
  {
    return Selection::first_leaders;
  }
  if (text == "random")
  {
    return Selection::random;
  }
  throw ConfigError("unknown corruption selection: '" + std::string(text) + "'");
}

GlobalTime default_horizon(SimConfig const &config)
{
  auto const &p = config.params;
  return config.gst + Time(TimeInt(3 * p.k * (p.t + 3))) * p.gamma;
}

namespace {

std::vector<Corruption> resolve_corruptions(SimConfig const &config)
{
  auto const             &p    = config.params;
  auto const             &spec = config.corruption;
  std::vector<Corruption> out;

  if (!spec.list.empty())
  {
    out = spec.list;
  }
  else
  {
    if (spec.count > p.n)
    {
      throw ConfigError("cannot corrupt more processors than exist");
    }
    std::vector<ProcessorId> ids;
    if (spec.selection == Selection::first_leaders)
    {
      std::set<ProcessorId> chosen;
      for (std::uint64_t g = 0; chosen.size() < spec.count; ++g)
      {
        auto const id = p.schedule.leader_of_group(g, p.n);
        if (chosen.insert(id).second)
        {
          ids.push_back(id);
        }
      }
    }
    else
    {
      ids.resize(p.n);
      std::iota(ids.begin(), ids.end(), ProcessorId{0});
      std::mt19937_64 rng(spec.seed);
      std::shuffle(ids.begin(), ids.end(), rng);
      ids.resize(spec.count);
    }
    for (auto id : ids)
    {
      out.push_back(Corruption{id, spec.time, spec.strategy});
    }
  }

  std::sort(out.begin(), out.end(),
            [](Corruption const &a, Corruption const &b) { return a.id < b.id; });
  for (std::size_t i = 0; i < out.size(); ++i)
  {
    if (out[i].id >= p.n)
    {
      throw ConfigError("corrupted processor id " + std::to_string(out[i].id) + " out of range");
    }
    if (i > 0 && out[i].id == out[i - 1].id)
    {
      throw ConfigError("processor " + std::to_string(out[i].id) + " corrupted twice");
    }
    if (out[i].time < Time(0))
    {
      throw ConfigError("corruption time must be non-negative");
    }
  }
  if (out.size() > p.t)
  {
    throw ConfigError("f=" + std::to_string(out.size()) + " exceeds the fault bound t=" +
                      std::to_string(p.t));
  }
  return out;
}

}  // namespace

ResolvedRun resolve(SimConfig const &config)
{
  auto const &p = config.params;
  try
  {
    p.validate();
  }
  catch (std::invalid_argument const &e)
  {
    throw ConfigError(e.what());
  }
  if (config.delta_actual <= Time(0) || config.delta_actual > p.delta_cap)
  {
    throw ConfigError("delta must satisfy 0 < delta <= delta_cap");
  }
  if (config.gst < Time(0))
  {
    throw ConfigError("gst must be non-negative");
  }
  if (config.drift_epsilon < Time(0) || config.drift_epsilon >= Time(1))
  {
    throw ConfigError("drift epsilon must lie in [0, 1)");
  }
  if (config.tail < Time(0))
  {
    throw ConfigError("tail must be non-negative");
  }

  ResolvedRun r;
  r.corruptions = resolve_corruptions(config);
  r.never_corrupted.assign(p.n, true);
  for (auto const &c : r.corruptions)
  {
    r.never_corrupted[c.id] = false;
  }

  try
  {
    r.offsets = generate_initial_offsets(p.n, p.t, p.gamma, config.offsets, r.never_corrupted);
  }
  catch (OffsetError const &e)
  {
    throw ConfigError(e.what());
  }
  ClockTime const top = *std::max_element(r.offsets.begin(), r.offsets.end());
  for (auto const &o : r.offsets)
  {
    r.initial_clocks.push_back(o - top);
  }

  r.rates.assign(p.n, Time(1));
  if (config.drift_epsilon > Time(0))
  {
    std::mt19937_64                    rng(config.seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_int_distribution<int> pick(-1, 1);
    for (auto &rate : r.rates)
    {
      rate = Time(1) + config.drift_epsilon * Time(pick(rng));
    }
  }

  r.horizon = config.horizon ? *config.horizon : default_horizon(config);
  if (r.horizon < Time(0))
  {
    throw ConfigError("horizon must be non-negative");
  }
  Time const max_rate = *std::max_element(r.rates.begin(), r.rates.end());
  auto const top_view = floor_int(max_rate * r.horizon / p.gamma);
  r.max_signed_view   = static_cast<View>(top_view) + 2 * p.k;

  // Validates the delay parameters and the synchrony schedule.
  try
  {
    DelayModel(config.network, config.gst, p.delta_cap, config.delta_actual,
               config.synchrony_schedule, config.network_grid);
  }
  catch (std::invalid_argument const &e)
  {
    throw ConfigError(e.what());
  }
  return r;
}

Time json_time(json const &value)
{
  if (value.is_number_integer())
  {
    return Time(TimeInt(value.get<std::int64_t>()));
  }
  if (value.is_number())
  {
    return parse_time(value.dump());
  }
  if (value.is_string())
  {
    return parse_time(value.get<std::string>());
  }
  throw ConfigError("expected a time value, got " + value.dump());
}

json time_json(Time const &t)
{
  return to_string(t);
}

json to_json(SimConfig const &config)
{
  auto const &p = config.params;
  json        doc;
  doc["n"]               = p.n;
  doc["t"]               = p.t;
  doc["k"]               = p.k;
  doc["x"]               = p.x;
  doc["delta_cap"]       = time_json(p.delta_cap);
  doc["delta_actual"]    = time_json(config.delta_actual);
  doc["gst"]             = time_json(config.gst);
  doc["leader_schedule"] = std::string(to_string(p.schedule.kind()));
  doc["schedule_seed"]   = p.schedule.seed();

  json offsets;
  offsets["mode"] = std::string(to_string(config.offsets.mode));
  switch (config.offsets.mode)
  {
  case OffsetMode::all_zero:
    break;
  case OffsetMode::two_cluster:
    offsets["gap"] = time_json(config.offsets.gap);
    break;
  case OffsetMode::adversarial_spread:
    offsets["seed"] = config.offsets.seed;
    break;
  case OffsetMode::explicit_values:
    offsets["values"] = json::array();
    for (auto const &v : config.offsets.values)
    {
      offsets["values"].push_back(time_json(v));
    }
    break;
  }
  doc["offsets"] = offsets;

  json corruption;
  if (!config.corruption.list.empty())
  {
    corruption["list"] = json::array();
    for (auto const &c : config.corruption.list)
    {
      corruption["list"].push_back(
          {{"id", c.id}, {"time", time_json(c.time)}, {"strategy", to_string(c.strategy)}});
    }
  }
  else
  {
    corruption["count"]     = config.corruption.count;
    corruption["strategy"]  = std::string(to_string(config.corruption.strategy));
    corruption["selection"] = std::string(to_string(config.corruption.selection));
    corruption["time"]      = time_json(config.corruption.time);
    corruption["seed"]      = config.corruption.seed;
  }
  doc["corruption"] = corruption;

  doc["network"]          = {{"kind", std::string(to_string(config.network))},
                             {"grid", config.network_grid}};
  doc["drift"]            = {{"epsilon", time_json(config.drift_epsilon)}};
  doc["synchrony_schedule"] = json::array();
  for (auto const &iv : config.synchrony_schedule)
  {
    doc["synchrony_schedule"].push_back(
        {{"start", time_json(iv.start)}, {"end", time_json(iv.end)}});
  }
  doc["seed"]           = config.seed;
  doc["horizon"]        = config.horizon ? time_json(*config.horizon) : json(nullptr);
  doc["stop_at_t_star"] = config.stop_at_t_star;
  doc["tail"]           = time_json(config.tail);
  return doc;
}

namespace {

std::set<std::string> const kKnownKeys = {
    "n",       "t",        "k",         "x",           "delta_cap",          "delta_actual",
    "delta",   "gst",      "gamma",     "delta_units", "leader_schedule",    "schedule_seed",
    "offsets", "corruption", "network", "drift",       "synchrony_schedule", "seed",
    "horizon", "stop_at_t_star", "tail"};

}  // namespace

SimConfig sim_config_from_json(json const &doc)
{
  if (!doc.is_object())
  {
    throw ConfigError("config must be a JSON object");
  }
  for (auto const &[key, value] : doc.items())
  {
    if (!kKnownKeys.contains(key))
    {
      throw ConfigError("unknown config key: '" + key + "'");
    }
  }

  try
  {
    SimConfig config;
    auto     &p = config.params;
    p.n         = doc.value("n", 4u);
    p.k         = doc.value("k", 3u);
    p.x         = doc.value("x", 3u);
    p.t         = doc.contains("t") ? doc.at("t").get<std::uint32_t>() : default_fault_bound(p.n);
    p.delta_cap = doc.contains("delta_cap") ? json_time(doc.at("delta_cap")) : Time(1);
    p.gamma     = p.delta_cap * Time(TimeInt(p.x));

    bool const units = doc.value("delta_units", false);
    auto const scaled = [&](json const &v) { return units ? json_time(v) * p.delta_cap : json_time(v); };

    if (doc.contains("gamma") && scaled(doc.at("gamma")) != p.gamma)
    {
      throw ConfigError("gamma must equal x * delta_cap");
    }

    auto const schedule = doc.value("leader_schedule", std::string("round_robin"));
    if (parse_schedule_kind(schedule) == ScheduleKind::random_permutations)
    {
      p.schedule = LeaderSchedule::random_permutations(doc.value("schedule_seed", std::uint64_t{0}));
    }

    config.seed = doc.value("seed", std::uint64_t{0});
    config.gst  = doc.contains("gst") ? scaled(doc.at("gst")) : Time(0);
    if (doc.contains("delta_actual"))
    {
      config.delta_actual = scaled(doc.at("delta_actual"));
    }
    else if (doc.contains("delta"))
    {
      config.delta_actual = scaled(doc.at("delta"));
    }
    else
    {
      config.delta_actual = p.delta_cap;
    }

    if (doc.contains("offsets"))
    {
      auto const &o        = doc.at("offsets");
      config.offsets.mode  = parse_offset_mode(o.value("mode", std::string("all_zero")));
      if (o.contains("gap"))
      {
        config.offsets.gap = scaled(o.at("gap"));
      }
      config.offsets.seed = o.value("seed", config.seed);
      if (o.contains("values"))
      {
        for (auto const &v : o.at("values"))
        {
          config.offsets.values.push_back(scaled(v));
        }
      }
    }

    if (doc.contains("corruption"))
    {
      auto const &c = doc.at("corruption");
      if (c.contains("list"))
      {
        for (auto const &entry : c.at("list"))
        {
          Corruption item;
          item.id       = entry.at("id").get<ProcessorId>();
          item.time     = entry.contains("time") ? scaled(entry.at("time")) : Time(0);
          item.strategy = parse_strategy(entry.value("strategy", std::string("silent")));
          config.corruption.list.push_back(item);
        }
      }
      config.corruption.count = c.value("count", 0u);
      config.corruption.strategy =
          parse_strategy(c.value("strategy", std::string("silent")));
      config.corruption.selection =
          parse_selection(c.value("selection", std::string("first_leaders")));
      config.corruption.time = c.contains("time") ? scaled(c.at("time")) : Time(0);
      config.corruption.seed = c.value("seed", config.seed);
    }

    if (doc.contains("network"))
    {
      auto const &net = doc.at("network");
      if (net.is_string())
      {
        config.network = parse_network_kind(net.get<std::string>());
      }
      else
      {
        config.network      = parse_network_kind(net.value("kind", std::string("fixed_delta")));
        config.network_grid = net.value("grid", 8u);
      }
    }

    if (doc.contains("drift"))
    {
      auto const &d = doc.at("drift");
      config.drift_epsilon = d.contains("epsilon") ? json_time(d.at("epsilon")) : Time(0);
    }

    if (doc.contains("synchrony_schedule"))
    {
      for (auto const &iv : doc.at("synchrony_schedule"))
      {
        config.synchrony_schedule.push_back(
            SyncInterval{scaled(iv.at("start")), scaled(iv.at("end"))});
      }
    }

    if (doc.contains("horizon") && !doc.at("horizon").is_null())
    {
      config.horizon = scaled(doc.at("horizon"));
    }
    config.stop_at_t_star = doc.value("stop_at_t_star", true);
    config.tail           = doc.contains("tail") ? scaled(doc.at("tail")) : Time(0);
    return config;
  }
  catch (json::exception const &e)
  {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  catch (ConfigError const &)
  {
    throw;
  }
  catch (std::invalid_argument const &e)
  {
    throw ConfigError(e.what());
  }
}

std::string config_hash(SimConfig const &config)
{
  std::string const text = to_json(config).dump();
  std::uint64_t     h    = 0xcbf29ce484222325ull;
  for (unsigned char ch : text)
  {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace fever
