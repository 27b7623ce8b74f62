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

#include "fever/metrics.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace fever {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxViolations = 1000;

struct ProcTrack
{
  View        view{0};
  bool        started{false};  // every delta is emitted by a started processor
  GlobalTime  anchor_time{0};
  ClockTime   anchor_clock{0};
  Time        rate{1};
};

/// Rebuilds per-processor view and clock from the header and the deltas.
class Replayer
{
public:
  explicit Replayer(TraceHeader const &h)
  {
    procs_.resize(h.config.params.n);
    for (std::size_t i = 0; i < procs_.size(); ++i)
    {
      procs_[i].anchor_clock = h.initial_clocks[i];
      procs_[i].rate         = h.rates[i];
    }
  }

  ClockTime clock(ProcessorId id, GlobalTime const &time) const
  {
    auto const &p = procs_[id];
    if (p.rate == Time(1))
    {
      return p.anchor_clock + (time - p.anchor_time);
    }
    return p.anchor_clock + p.rate * (time - p.anchor_time);
  }

  void apply(StateDelta const &d, GlobalTime const &time)
  {
    auto &p        = procs_[d.id];
    p.view         = d.view;
    p.started      = true;
    p.anchor_time  = time;
    p.anchor_clock = d.clock;
  }

  ProcTrack const &operator[](ProcessorId id) const { return procs_[id]; }

private:
  std::vector<ProcTrack> procs_;
};

std::vector<std::optional<GlobalTime>> corruption_times(TraceHeader const &h)
{
  std::vector<std::optional<GlobalTime>> out(h.config.params.n);
  for (auto const &c : h.corruptions)
  {
    if (c.id < out.size())
    {
      out[c.id] = c.time;
    }
  }
  return out;
}

DelayModel delay_model(SimConfig const &cfg)
{
  return DelayModel(cfg.network, cfg.gst, cfg.params.delta_cap, cfg.delta_actual,
                    cfg.synchrony_schedule, cfg.network_grid);
}

bool unit_rates(TraceHeader const &h)
{
  return std::all_of(h.rates.begin(), h.rates.end(), [](Time const &r) { return r == Time(1); });
}

std::size_t count_correct(std::vector<ProcessorId> const &signers, std::vector<bool> const &correct)
{
  return static_cast<std::size_t>(std::count_if(signers.begin(), signers.end(), [&](ProcessorId s) {
    return s < correct.size() && correct[s];
  }));
}

bool strictly_sorted(std::vector<ProcessorId> const &signers)
{
  return std::adjacent_find(signers.begin(), signers.end(), std::greater_equal<>{}) ==
         signers.end();
}

std::string view_str(View v)
{
  return std::to_string(v);
}

}  // namespace

std::vector<bool> correct_mask(TraceHeader const &header)
{
  std::vector<bool> correct(header.config.params.n, true);
  for (auto const &c : header.corruptions)
  {
    if (c.id < correct.size())
    {
      correct[c.id] = false;
    }
  }
  return correct;
}

std::optional<GlobalTime> compute_t_star(Trace const &trace)
{
  auto const  correct = correct_mask(trace.header);
  auto const &gst     = trace.header.config.gst;
  for (auto const &e : trace.events)
  {
    if (e.time <= gst || !correct[e.proc])
    {
      continue;
    }
    for (auto const &f : e.formed)
    {
      if (f.kind == PayloadKind::quorum_certificate)
      {
        return e.time;
      }
    }
  }
  return std::nullopt;
}

std::uint64_t count_words(Trace const &trace, GlobalTime const &from, GlobalTime const &to)
{
  auto const    corrupted_at = corruption_times(trace.header);
  std::uint64_t words        = 0;
  for (auto const &e : trace.events)
  {
    for (auto const &s : e.sent)
    {
      if (s.send_time < from || s.send_time > to)
      {
        continue;
      }
      auto const &c = corrupted_at[e.proc];
      if (c && *c <= s.send_time)
      {
        continue;
      }
      words += s.words;
    }
  }
  return words;
}

std::uint64_t count_words(Trace const &trace, GlobalTime const &t_star)
{
  auto const &cfg = trace.header.config;
  return count_words(trace, cfg.gst + cfg.params.delta_cap, t_star);
}

SyncPoint compute_sync_point(Trace const &trace)
{
  auto const &h       = trace.header;
  auto const &params  = h.config.params;
  auto const &gst     = h.config.gst;
  auto const  correct = correct_mask(h);

  Replayer rp(h);
  for (auto const &e : trace.events)
  {
    if (e.time > gst)
    {
      break;
    }
    for (auto const &d : e.deltas)
    {
      rp.apply(d, e.time);
    }
  }

  SyncPoint sp;
  std::optional<ClockTime> best;
  for (ProcessorId i = 0; i < params.n; ++i)
  {
    if (!correct[i])
    {
      continue;
    }
    auto const c = rp.clock(i, gst);
    if (!best || c > *best)
    {
      best     = c;
      sp.pivot = i;
    }
  }
  sp.v = rp[sp.pivot].view;

  auto const k      = params.k;
  auto const lead_v = leader_of(sp.v, params);
  if (sp.v > 0)
  {
    for (View u = ((sp.v - 1) / k) * k;; u -= k)
    {
      auto const l = leader_of(u, params);
      if (correct[l] && l != lead_v)
      {
        sp.v0 = u;
        break;
      }
      if (u == 0)
      {
        break;
      }
    }
  }
  sp.v1 = (sp.v / k + 1) * k;
  while (!correct[leader_of(sp.v1, params)])
  {
    sp.v1 += k;
  }
  View const first = sp.v0 ? *sp.v0 + k : 0;
  for (View u = first; u < sp.v1; u += k)
  {
    if (!correct[leader_of(u, params)])
    {
      ++sp.f_star;
    }
  }
  return sp;
}

std::vector<QcFormation> qc_formations(Trace const &trace)
{
  auto const               correct = correct_mask(trace.header);
  std::vector<QcFormation> out;
  for (auto const &e : trace.events)
  {
    for (auto const &f : e.formed)
    {
      if (f.kind == PayloadKind::quorum_certificate)
      {
        out.push_back(QcFormation{e.time, f.view, e.proc, correct[e.proc]});
      }
    }
  }
  return out;
}

std::vector<Violation> assert_invariants(Trace const &trace)
{
  auto const &h       = trace.header;
  auto const &cfg     = h.config;
  auto const &params  = cfg.params;
  auto const  n       = params.n;
  auto const  k       = params.k;
  auto const  correct = correct_mask(h);

  std::vector<Violation> out;
  auto report = [&](char const *name, std::uint64_t seq, std::string detail) {
    if (out.size() < kMaxViolations)
    {
      out.push_back(Violation{name, seq, std::move(detail)});
    }
  };

  std::optional<DelayModel> delay;
  try
  {
    delay.emplace(delay_model(cfg));
  }
  catch (std::exception const &e)
  {
    report("config", 0, e.what());
    return out;
  }

  bool const equal_rates =
      std::adjacent_find(h.rates.begin(), h.rates.end(), std::not_equal_to<>{}) == h.rates.end();
  bool const no_drift    = unit_rates(h) && cfg.drift_epsilon == Time(0);
  bool const no_schedule = cfg.synchrony_schedule.empty();

  Replayer rp(h);

  auto dagger_holds = [&](GlobalTime const &time) {
    std::vector<ClockTime> clocks;
    clocks.reserve(n);
    for (ProcessorId i = 0; i < n; ++i)
    {
      if (correct[i])
      {
        clocks.push_back(rp.clock(i, time));
      }
    }
    return check_dagger(clocks, params.gamma, params.t);
  };
  if (!dagger_holds(GlobalTime(0)))
  {
    report("dagger", 0, "initial clocks violate the spread condition");
  }

  struct Entry
  {
    std::uint64_t seq;
    View          view;
  };
  std::map<View, GlobalTime>                first_entry;
  std::map<View, GlobalTime>                initial_entry;
  std::map<View, GlobalTime>                first_qc_seen;
  std::vector<std::map<View, std::uint64_t>> qc_seen_seq(n);
  std::vector<std::vector<Entry>>           entries(n);
  std::optional<View>                       max_entered;
  std::set<std::pair<ProcessorId, View>>    vm_signed, vote_signed;
  std::set<std::pair<ProcessorId, View>>    correct_vm, correct_votes;
  std::set<std::pair<ProcessorId, View>>    vc_by, qc_by;
  std::map<View, GlobalTime>                qc_formed;
  GlobalTime                                prev_time{0};

  for (ProcessorId p = 0; p < n; ++p)
  {
    if (correct[p] && h.initial_clocks[p] > clock_time(0, params))
    {
      report("first_entry", 0, "processor " + std::to_string(p) + " begins beyond c_0");
    }
  }

  auto check_vc = [&](std::vector<ProcessorId> const &signers, View view, std::uint64_t seq) {
    if (!strictly_sorted(signers) || signers.size() < params.vc_quorum())
    {
      report("vc_honesty", seq, "VC(" + view_str(view) + ") lacks t+1 distinct signers");
    }
    if (count_correct(signers, correct) < 1)
    {
      report("vc_honesty", seq, "VC(" + view_str(view) + ") has no correct signer");
    }
    if (!is_initial(view, params))
    {
      report("vc_honesty", seq, "VC for non-initial view " + view_str(view));
    }
    for (auto s : signers)
    {
      if (!vm_signed.contains({s, view}))
      {
        report("unforgeability", seq,
               "VC(" + view_str(view) + ") claims unsigned message of " + std::to_string(s));
      }
    }
  };
  auto check_qc = [&](std::vector<ProcessorId> const &signers, View view, std::uint64_t seq) {
    if (!strictly_sorted(signers) || signers.size() < params.qc_quorum())
    {
      report("qc_honesty", seq, "QC(" + view_str(view) + ") lacks n-t distinct signers");
    }
    if (count_correct(signers, correct) < static_cast<std::size_t>(params.t) + 1)
    {
      report("qc_honesty", seq, "QC(" + view_str(view) + ") has fewer than t+1 correct signers");
    }
    for (auto s : signers)
    {
      if (!vote_signed.contains({s, view}))
      {
        report("unforgeability", seq,
               "QC(" + view_str(view) + ") claims unsigned vote of " + std::to_string(s));
      }
    }
  };

  auto on_entry = [&](ProcessorId p, View w, TraceEvent const &e) {
    first_entry.try_emplace(w, e.time);
    entries[p].push_back(Entry{e.seq, w});

    // A correct processor never enters a view above an initial view whose
    // first entry happened at this same instant.
    for (auto it = initial_entry.rbegin(); it != initial_entry.rend() && it->second == e.time; ++it)
    {
      if (it->first < w)
      {
        report("first_entry", e.seq,
               "entry into view " + view_str(w) + " at the first-entry instant of view " +
                   view_str(it->first));
      }
    }

    View const lo = max_entered ? *max_entered + 1 : 0;
    if (w >= lo)
    {
      View const first_initial = ((lo + k - 1) / k) * k;
      if (first_initial <= w)
      {
        if (first_initial != w)
        {
          report("first_entry", e.seq,
                 "first entry into a view >= " + view_str(first_initial) + " is view " +
                     view_str(w));
        }
        else
        {
          initial_entry.emplace(w, e.time);
          ClockTime const cv = clock_time(w, params);
          for (ProcessorId q = 0; q < n; ++q)
          {
            if (correct[q] && rp.clock(q, e.time) > cv)
            {
              report("first_entry", e.seq,
                     "processor " + std::to_string(q) + " clock exceeds c_" + view_str(w) +
                         " at first entry");
            }
          }
        }
      }
      max_entered = w;
    }
  };

  for (std::size_t idx = 0; idx < trace.events.size(); ++idx)
  {
    auto const &e = trace.events[idx];
    if (e.seq != idx)
    {
      report("trace_order", e.seq, "sequence number out of order");
    }
    if (e.time < prev_time)
    {
      report("trace_order", e.seq, "event time decreases");
    }
    prev_time = e.time;

    if (e.kind == EventKind::delivery && e.payload && correct[e.proc])
    {
      auto const &p = *e.payload;
      if (p.kind == PayloadKind::quorum_certificate)
      {
        first_qc_seen.try_emplace(p.view, e.time);
        qc_seen_seq[e.proc].try_emplace(p.view, e.seq);
        check_qc(p.signers, p.view, e.seq);
      }
      else if (p.kind == PayloadKind::view_certificate)
      {
        check_vc(p.signers, p.view, e.seq);
      }
      if (e.send_time > e.time)
      {
        report("envelope_timing", e.seq, "delivered before it was sent");
      }
    }

    bool clock_moved = false;
    for (auto const &d : e.deltas)
    {
      if (d.id >= n)
      {
        report("trace_order", e.seq, "delta for unknown processor");
        continue;
      }
      ProcTrack const before     = rp[d.id];
      ClockTime const prev_clock = rp.clock(d.id, e.time);
      bool const      newly      = d.view != before.view || !before.started;
      if (correct[d.id])
      {
        if (d.clock < prev_clock)
        {
          report("clock_monotonicity", e.seq,
                 "clock of " + std::to_string(d.id) + " moved from " + to_string(prev_clock) +
                     " back to " + to_string(d.clock));
        }
        if (d.view < before.view)
        {
          report("view_monotonicity", e.seq,
                 "view of " + std::to_string(d.id) + " moved from " + view_str(before.view) +
                     " back to " + view_str(d.view));
        }
        clock_moved = clock_moved || d.clock != prev_clock;
      }
      rp.apply(d, e.time);
      if (correct[d.id] && newly)
      {
        on_entry(d.id, d.view, e);
      }
    }
    if ((clock_moved || !equal_rates) && !dagger_holds(e.time))
    {
      report("dagger", e.seq, "spread condition fails at " + to_string(e.time));
    }

    for (auto const &s : e.sent)
    {
      auto const &p = s.payload;
      if (p.kind == PayloadKind::view_message)
      {
        vm_signed.insert({p.signers.at(0), p.view});
      }
      else if (p.kind == PayloadKind::vote)
      {
        vote_signed.insert({p.signers.at(0), p.view});
      }

      if (s.send_time < e.time || s.deliver_time < s.send_time ||
          s.deliver_time > delay->latest_delivery(s.send_time))
      {
        report("envelope_timing", e.seq,
               "delivery at " + to_string(s.deliver_time) + " outside the window for a send at " +
                   to_string(s.send_time));
      }
      if (s.to == e.proc && s.words == 0 && s.deliver_time != s.send_time)
      {
        report("envelope_timing", e.seq, "self-delivery is not immediate");
      }
      if (!correct[e.proc])
      {
        continue;
      }
      if (s.send_time != e.time)
      {
        report("envelope_timing", e.seq, "correct processor sent in the future");
      }
      if (p.kind == PayloadKind::view_message && p.signers.at(0) == e.proc)
      {
        if (rp.clock(e.proc, e.time) != clock_time(p.view, params))
        {
          report("signing_discipline", e.seq,
                 "view message " + view_str(p.view) + " signed off its clock-time");
        }
        if (!correct_vm.insert({e.proc, p.view}).second)
        {
          report("signing_discipline", e.seq, "view message " + view_str(p.view) + " signed twice");
        }
        if (!is_initial(p.view, params))
        {
          report("signing_discipline", e.seq, "view message for non-initial view");
        }
      }
      if (p.kind == PayloadKind::vote && p.signers.at(0) == e.proc)
      {
        if (!rp[e.proc].started || rp[e.proc].view != p.view)
        {
          report("vote_discipline", e.seq, "vote for view " + view_str(p.view) + " cast outside it");
        }
        if (!correct_votes.insert({e.proc, p.view}).second)
        {
          report("vote_discipline", e.seq, "vote for view " + view_str(p.view) + " cast twice");
        }
      }
    }

    for (auto const &f : e.formed)
    {
      if (f.kind == PayloadKind::view_certificate)
      {
        check_vc(f.signers, f.view, e.seq);
        if (correct[e.proc] && !vc_by.insert({e.proc, f.view}).second)
        {
          report("vc_uniqueness", e.seq, "second VC for view " + view_str(f.view));
        }
      }
      else if (f.kind == PayloadKind::quorum_certificate)
      {
        check_qc(f.signers, f.view, e.seq);
        if (correct[e.proc] && !qc_by.insert({e.proc, f.view}).second)
        {
          report("qc_uniqueness", e.seq, "second QC for view " + view_str(f.view));
        }
        if (!is_initial(f.view, params))
        {
          auto prev = qc_formed.find(f.view - 1);
          if (prev == qc_formed.end() || prev->second > e.time)
          {
            report("sequential_qc", e.seq,
                   "QC(" + view_str(f.view) + ") formed before QC(" + view_str(f.view - 1) + ")");
          }
        }
        qc_formed.try_emplace(f.view, e.time);
      }
    }
  }

  std::uint64_t const end_seq = trace.events.size();
  Time const          gamma   = params.gamma;

  if (no_drift)
  {
    for (auto const &[v, tv] : initial_entry)
    {
      GlobalTime predicted = tv + Time(TimeInt(k)) * gamma;
      for (View j = 0; j < k; ++j)
      {
        if (auto it = first_qc_seen.find(v + j); it != first_qc_seen.end())
        {
          predicted = std::min(predicted, it->second + Time(TimeInt(k - 1 - j)) * gamma);
        }
      }
      auto actual = first_entry.find(v + k);
      if (actual != first_entry.end())
      {
        if (actual->second != predicted)
        {
          report("entry_time", end_seq,
                 "first entry into " + view_str(v + k) + " at " + to_string(actual->second) +
                     ", expected " + to_string(predicted));
        }
      }
      else if (predicted <= trace.end_time)
      {
        report("entry_time", end_seq,
               "no entry into " + view_str(v + k) + " by " + to_string(trace.end_time) +
                   ", expected at " + to_string(predicted));
      }
    }
  }

  if (no_drift && no_schedule)
  {
    for (auto const &[v, tv] : initial_entry)
    {
      if (tv < cfg.gst || !correct[leader_of(v, params)])
      {
        continue;
      }
      for (ProcessorId p = 0; p < n; ++p)
      {
        if (!correct[p])
        {
          continue;
        }
        auto it = std::find_if(entries[p].begin(), entries[p].end(),
                               [&](Entry const &en) { return en.view >= v + k; });
        if (it == entries[p].end())
        {
          continue;
        }
        for (View w = v; w + 2 < v + k; ++w)
        {
          auto seen = qc_seen_seq[p].find(w);
          if (seen == qc_seen_seq[p].end() || seen->second > it->seq)
          {
            report("qc_visibility", it->seq,
                   "processor " + std::to_string(p) + " entered " + view_str(it->view) +
                       " without QC(" + view_str(w) + ")");
          }
        }
      }
    }

    // Run-level bounds.
    auto const          t_star = compute_t_star(trace);
    auto const          sp     = compute_sync_point(trace);
    std::uint64_t const W      = word_constant(k);
    Time const          bound  = Time(TimeInt(k * (sp.f_star + 3))) * gamma;
    if (t_star)
    {
      if (*t_star - cfg.gst > bound)
      {
        report("latency_bound", end_seq,
               "latency " + to_string(*t_star - cfg.gst) + " exceeds " + to_string(bound));
      }
      auto const words = count_words(trace, *t_star);
      if (words > W * (sp.f_star + 3) * n)
      {
        report("word_bound", end_seq,
               std::to_string(words) + " words exceed " + std::to_string(W * (sp.f_star + 3) * n));
      }
    }
    else if (trace.end_time >= cfg.gst + bound)
    {
      report("latency_bound", end_seq, "no correct-leader QC after gst within the bound");
    }

    Time const delta = delay->effective_delta();
    Time const C     = Time(TimeInt(kResponsivenessConstant));
    if (h.corruptions.empty() && delta * Time(10) <= params.delta_cap)
    {
      Time const resp = C * delta + gamma + params.delta_cap;
      if (t_star ? *t_star - cfg.gst > resp : trace.end_time >= cfg.gst + resp)
      {
        report("responsiveness", end_seq, "f = 0 latency exceeds C delta + gamma + delta_cap");
      }
    }

    if (t_star)
    {
      std::map<View, GlobalTime> group_first;  // initial view -> first correct-leader QC
      for (auto const &qc : qc_formations(trace))
      {
        if (qc.correct_leader && qc.time >= *t_star)
        {
          group_first.try_emplace((qc.view / k) * k, qc.time);
        }
      }
      for (auto const &[v, a] : group_first)
      {
        // Skip late formations for groups that correct processors had already left.
        auto later = first_entry.lower_bound(v + k);
        if (std::any_of(later, first_entry.end(), [&](auto const &fe) { return fe.second < a; }))
        {
          continue;
        }
        View          next = v + k;
        std::uint32_t f    = 0;
        while (!correct[leader_of(next, params)])
        {
          ++f;
          next += k;
        }
        Time const limit = Time(TimeInt(k * (f + 1))) * gamma + C * delta;
        auto       b     = group_first.find(next);
        if (b == group_first.end())
        {
          if (trace.end_time >= a + limit)
          {
            report("post_sync_latency", end_seq,
                   "no QC in leader group of view " + view_str(next) + " within the bound");
          }
          continue;
        }
        if (b->second - a > limit)
        {
          report("post_sync_latency", end_seq,
                 "views " + view_str(v) + " to " + view_str(next) + " took " +
                     to_string(b->second - a));
        }
        auto const words = count_words(trace, a, b->second);
        if (words > W * (f + 1) * n)
        {
          report("post_sync_words", end_seq,
                 "views " + view_str(v) + " to " + view_str(next) + " used " +
                     std::to_string(words) + " words");
        }
      }
    }
  }
  return out;
}

RunMetrics compute_metrics(Trace const &trace)
{
  auto const &h   = trace.header;
  auto const &cfg = h.config;

  RunMetrics m;
  m.config_hash = h.config_hash;
  m.seed        = cfg.seed;
  m.n           = cfg.params.n;
  m.t           = cfg.params.t;
  m.f           = static_cast<std::uint32_t>(h.corruptions.size());
  m.gst         = cfg.gst;
  m.delta       = cfg.delta_actual;
  m.t_star      = compute_t_star(trace);
  m.f_star      = compute_sync_point(trace).f_star;
  if (m.t_star)
  {
    m.latency = *m.t_star - cfg.gst;
    m.words   = count_words(trace, *m.t_star);
    for (auto const &qc : qc_formations(trace))
    {
      if (qc.correct_leader && qc.time == *m.t_star)
      {
        m.first_sync_view = qc.view;
        break;
      }
    }
  }
  else
  {
    m.words = count_words(trace, cfg.gst + cfg.params.delta_cap, trace.end_time);
  }
  m.violations = assert_invariants(trace);
  return m;
}

json metrics_json(RunMetrics const &m)
{
  json j;
  j["config_hash"]      = m.config_hash;
  j["seed"]             = m.seed;
  j["n"]                = m.n;
  j["t"]                = m.t;
  j["f"]                = m.f;
  j["f_star"]           = m.f_star;
  j["gst"]              = time_json(m.gst);
  j["delta"]            = time_json(m.delta);
  j["t_star"]           = m.t_star ? time_json(*m.t_star) : json(nullptr);
  j["latency"]          = m.latency ? time_json(*m.latency) : json(nullptr);
  j["words"]            = m.words;
  j["first_sync_view"]  = m.first_sync_view;
  j["violations_count"] = m.violations.size();
  json list             = json::array();
  for (std::size_t i = 0; i < m.violations.size() && i < 20; ++i)
  {
    list.push_back({{"invariant", m.violations[i].invariant},
                    {"seq", m.violations[i].seq},
                    {"detail", m.violations[i].detail}});
  }
  j["violations"] = std::move(list);
  return j;
}

std::vector<ContractWindow> check_contract(Trace const &trace)
{
  auto const &h       = trace.header;
  auto const &cfg     = h.config;
  auto const &params  = cfg.params;
  auto const  n       = params.n;
  auto const  quorum  = params.qc_quorum();
  auto const  correct = correct_mask(h);
  auto const  delay   = delay_model(cfg);
  Time const  delta   = delay.effective_delta();

  // Views whose proposal, vote or QC traffic from correct senders was slower than delta.
  std::set<View>                                      slow_views;
  std::map<View, std::vector<std::optional<GlobalTime>>> sighting;
  for (auto const &e : trace.events)
  {
    if (correct[e.proc])
    {
      for (auto const &s : e.sent)
      {
        auto const kind = s.payload.kind;
        if ((kind == PayloadKind::proposal || kind == PayloadKind::vote ||
             kind == PayloadKind::quorum_certificate) &&
            s.deliver_time > delay.stabilisation_point(s.send_time) + delta)
        {
          slow_views.insert(s.payload.view);
        }
      }
    }
    if (e.kind == EventKind::delivery && e.payload && correct[e.proc] &&
        e.payload->kind == PayloadKind::quorum_certificate)
    {
      auto &row = sighting[e.payload->view];
      row.resize(n);
      if (!row[e.proc])
      {
        row[e.proc] = e.time;
      }
    }
  }
  auto seen_by = [&](View v, ProcessorId p, GlobalTime const &time) {
    auto it = sighting.find(v);
    return it != sighting.end() && it->second[p] && *it->second[p] <= time;
  };

  struct Open
  {
    GlobalTime            start;
    std::set<ProcessorId> members;
    bool                  valid{true};
  };
  std::map<View, std::set<ProcessorId>> in_view;
  std::map<View, Open>                  windows;
  Replayer                              rp(h);

  auto try_open = [&](View v, GlobalTime const &time) {
    if (windows.contains(v))
    {
      return;
    }
    auto const leader = leader_of(v, params);
    auto it           = in_view.find(v);
    if (!correct[leader] || it == in_view.end() || it->second.size() < quorum ||
        !it->second.contains(leader))
    {
      return;
    }
    windows.emplace(v, Open{time, it->second, true});
  };

  bool past_gst = false;
  for (auto const &e : trace.events)
  {
    if (!past_gst && e.time >= cfg.gst)
    {
      past_gst = true;
      for (auto const &[v, members] : in_view)
      {
        try_open(v, cfg.gst);
      }
    }
    std::vector<View> touched;
    for (auto const &d : e.deltas)
    {
      if (!correct[d.id])
      {
        rp.apply(d, e.time);
        continue;
      }
      auto const before = rp[d.id];
      if (before.started && before.view != d.view)
      {
        in_view[before.view].erase(d.id);
        auto w = windows.find(before.view);
        if (w != windows.end() && w->second.members.contains(d.id) &&
            e.time < w->second.start + delta * Time(3) && !seen_by(before.view, d.id, e.time))
        {
          w->second.members.erase(d.id);
          if (w->second.members.size() < quorum ||
              d.id == leader_of(before.view, params))
          {
            w->second.valid = false;
          }
        }
      }
      in_view[d.view].insert(d.id);
      touched.push_back(d.view);
      rp.apply(d, e.time);
    }
    if (past_gst)
    {
      for (auto v : touched)
      {
        try_open(v, e.time);
      }
    }
  }
  if (!past_gst && trace.end_time >= cfg.gst)
  {
    for (auto const &[v, members] : in_view)
    {
      try_open(v, cfg.gst);
    }
  }

  std::vector<ContractWindow> out;
  for (auto const &[v, w] : windows)
  {
    GlobalTime const deadline = w.start + delta * Time(3);
    if (!w.valid || slow_views.contains(v) || deadline > trace.end_time)
    {
      continue;
    }
    ContractWindow cw;
    cw.view      = v;
    cw.start     = w.start;
    cw.deadline  = deadline;
    cw.satisfied = true;
    for (ProcessorId p = 0; p < n; ++p)
    {
      if (!correct[p])
      {
        continue;
      }
      auto it = sighting.find(v);
      if (it == sighting.end() || !it->second[p])
      {
        cw.satisfied = false;
        continue;
      }
      GlobalTime const when = *it->second[p];
      if (!cw.last_receipt || when > *cw.last_receipt)
      {
        cw.last_receipt = when;
      }
      if (when > deadline)
      {
        cw.satisfied = false;
      }
    }
    out.push_back(cw);
  }
  return out;
}

}  // namespace fever
