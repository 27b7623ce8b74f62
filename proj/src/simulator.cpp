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

#include "fever/simulator.hpp"

#include "fever/processor.hpp"
#include "fever/underlying.hpp"

#include <deque>
#include <memory>
#include <queue>
#include <random>
#include <set>

namespace fever {

namespace {

using PayloadPtr = std::shared_ptr<Payload const>;

struct SimEvent
{
  GlobalTime    time;
  EventKind     kind;
  ProcessorId   sender;
  ProcessorId   recipient;
  std::uint64_t counter;
  // Delivery
  PayloadPtr    payload;
  GlobalTime    send_time;
  std::uint32_t words{0};
  // Threshold
  View          view{0};
  std::uint64_t generation{0};
};

int priority(EventKind kind)
{
  switch (kind)
  {
  case EventKind::corruption:
    return 0;
  case EventKind::delivery:
    return 1;
  case EventKind::threshold:
    return 2;
  }
  return 3;
}

struct Later
{
  bool operator()(SimEvent const &a, SimEvent const &b) const
  {
    if (a.time != b.time)
    {
      return a.time > b.time;
    }
    if (a.kind != b.kind)
    {
      return priority(a.kind) > priority(b.kind);
    }
    if (a.sender != b.sender)
    {
      return a.sender > b.sender;
    }
    if (a.recipient != b.recipient)
    {
      return a.recipient > b.recipient;
    }
    return a.counter > b.counter;
  }
};

struct Node
{
  ProcessorState st;
  StubState      stub;
  GlobalTime     anchor_time{0};
  ClockTime      anchor_clock{0};
  Time           rate{1};
  std::uint64_t  threshold_gen{0};
  bool           corrupted{false};
  Strategy       strategy{Strategy::silent};
  std::vector<ProcessorId> subset;
  std::set<View>           relayed_qcs;
};

class Simulation
{
public:
  explicit Simulation(SimConfig const &config)
    : config_{config}
    , params_{config.params}
    , resolved_{resolve(config)}
    , delay_{config.network, config.gst, params_.delta_cap, config.delta_actual,
             config.synchrony_schedule, config.network_grid}
    , net_rng_{config.seed}
    , adv_rng_{config.seed ^ 0xa5a5a5a5deadbeefull}
  {
    trace_.header.config         = config;
    trace_.header.config_hash    = config_hash(config);
    trace_.header.initial_clocks = resolved_.initial_clocks;
    trace_.header.rates          = resolved_.rates;
    trace_.header.corruptions    = resolved_.corruptions;
    trace_.header.horizon        = resolved_.horizon;

    nodes_.resize(params_.n);
    for (ProcessorId i = 0; i < params_.n; ++i)
    {
      auto &node        = nodes_[i];
      node.st           = initial_state(i, resolved_.initial_clocks[i]);
      node.anchor_clock = resolved_.initial_clocks[i];
      node.rate         = resolved_.rates[i];
    }
  }

  Trace run()
  {
    for (auto const &c : resolved_.corruptions)
    {
      SimEvent ev;
      ev.time      = c.time;
      ev.kind      = EventKind::corruption;
      ev.sender    = c.id;
      ev.recipient = c.id;
      ev.counter   = counter_++;
      queue_.push(std::move(ev));
    }
    for (ProcessorId i = 0; i < params_.n; ++i)
    {
      schedule_threshold(i, GlobalTime(0));
    }

    GlobalTime limit = resolved_.horizon;
    while (!queue_.empty())
    {
      if (queue_.top().time > limit)
      {
        break;
      }
      SimEvent ev = queue_.top();
      queue_.pop();
      if (ev.kind == EventKind::threshold && ev.generation != nodes_[ev.recipient].threshold_gen)
      {
        continue;
      }
      process(ev);
      if (config_.stop_at_t_star && t_star_)
      {
        limit = std::min(limit, *t_star_ + config_.tail);
      }
    }
    trace_.end_time = limit;
    return std::move(trace_);
  }

private:
  ClockTime clock_at(Node const &node, GlobalTime const &time) const
  {
    if (node.rate == Time(1))
    {
      return node.anchor_clock + (time - node.anchor_time);
    }
    return node.anchor_clock + node.rate * (time - node.anchor_time);
  }

  void schedule_threshold(ProcessorId id, GlobalTime const &now)
  {
    auto &node = nodes_[id];
    ++node.threshold_gen;
    if (node.corrupted && node.strategy == Strategy::silent)
    {
      return;
    }
    ClockTime const c = clock_at(node, now);
    View            v = next_initial_at_or_after(c, params_);
    if (clock_time(v, params_) == c && (node.st.sent_view_msgs.contains(v) || v < node.st.view))
    {
      v += params_.k;
    }
    while (v < node.st.view)
    {
      v += params_.k;
    }
    SimEvent ev;
    ev.time       = now + (clock_time(v, params_) - c) / node.rate;
    ev.kind       = EventKind::threshold;
    ev.sender     = id;
    ev.recipient  = id;
    ev.counter    = counter_++;
    ev.view       = v;
    ev.generation = node.threshold_gen;
    queue_.push(std::move(ev));
  }

  bool corrupted(ProcessorId id) const { return nodes_[id].corrupted; }

  void process(SimEvent const &ev)
  {
    auto &node = nodes_[ev.recipient];

    TraceEvent rec;
    rec.seq  = trace_.events.size();
    rec.time = ev.time;
    rec.kind = ev.kind;
    rec.proc = ev.recipient;
    if (ev.kind == EventKind::delivery)
    {
      rec.sender    = ev.sender;
      rec.payload   = record_of(*ev.payload);
      rec.words     = ev.words;
      rec.send_time = ev.send_time;
    }
    if (ev.kind == EventKind::threshold)
    {
      rec.threshold_view = ev.view;
    }

    View const before_view    = node.st.view;
    bool const before_started = node.st.started;
    forwarded_             = false;
    current_               = &rec;

    std::vector<Action> actions;
    switch (ev.kind)
    {
    case EventKind::corruption:
      corrupt(ev.recipient, ev.time);
      break;
    case EventKind::threshold:
      node.st.clock = clock_time(ev.view, params_);
      rec.diag      = apply_clock_reaches(node.st, node.st.clock, params_, actions);
      break;
    case EventKind::delivery:
      if (!(node.corrupted && node.strategy == Strategy::silent))
      {
        node.st.clock = clock_at(node, ev.time);
        rec.diag      = deliver(ev.recipient, *ev.payload, ev.time, actions);
      }
      break;
    }
    run_actions(ev.recipient, ev.time, std::move(actions));

    if (forwarded_ || node.st.view != before_view || node.st.started != before_started)
    {
      rec.deltas.push_back(StateDelta{ev.recipient, node.st.view, clock_at(node, ev.time)});
    }
    if (forwarded_ || ev.kind == EventKind::threshold)
    {
      schedule_threshold(ev.recipient, ev.time);
    }
    current_ = nullptr;
    trace_.events.push_back(std::move(rec));
  }

  std::string deliver(ProcessorId id, Payload const &payload, GlobalTime const &now,
                      std::vector<Action> &actions)
  {
    auto &node = nodes_[id];
    return std::visit(
        [&](auto const &p) -> std::string {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, ViewMessage>)
          {
            if (!validate_view_message(p, ledger_))
            {
              return "rejected unsigned view message";
            }
            return apply_view_message(node.st, p, params_, actions);
          }
          else if constexpr (std::is_same_v<T, ViewCertificate>)
          {
            if (!validate_vc(p, ledger_))
            {
              return "rejected view certificate with unrecorded signatures";
            }
            return apply_vc(node.st, p, params_, actions);
          }
          else if constexpr (std::is_same_v<T, QuorumCertificate>)
          {
            if (!validate_qc(p, ledger_))
            {
              return "rejected quorum certificate with unrecorded signatures";
            }
            if (node.corrupted && node.strategy == Strategy::late_qc_relayer &&
                node.relayed_qcs.insert(p.view()).second)
            {
              release_later(id, Payload{p}, now);
            }
            return apply_qc(node.st, p, params_, actions);
          }
          else if constexpr (std::is_same_v<T, Proposal>)
          {
            return stub_on_proposal(node.st, node.stub, p, params_, actions);
          }
          else
          {
            if (!validate_vote(p, ledger_))
            {
              return "rejected unsigned vote";
            }
            return stub_on_vote(node.st, node.stub, p, params_, actions);
          }
        },
        payload);
  }

  void corrupt(ProcessorId id, GlobalTime const &now)
  {
    auto &node = nodes_[id];
    for (auto const &c : resolved_.corruptions)
    {
      if (c.id == id)
      {
        node.strategy = c.strategy;
      }
    }
    node.corrupted = true;

    if (node.strategy == Strategy::silent)
    {
      ++node.threshold_gen;
      return;
    }
    if (node.strategy == Strategy::selective_vc || node.strategy == Strategy::late_qc_relayer)
    {
      std::bernoulli_distribution coin(0.5);
      for (ProcessorId i = 0; i < params_.n; ++i)
      {
        if (i != id && coin(adv_rng_))
        {
          node.subset.push_back(i);
        }
      }
    }
    if (node.strategy == Strategy::early_signer)
    {
      for (View v = 0; v <= resolved_.max_signed_view; v += params_.k)
      {
        send(id, leader_of(v, params_), std::make_shared<Payload const>(ViewMessage{v, id}), now,
             now);
      }
    }
    if (node.strategy == Strategy::vote_stuffer)
    {
      for (View v = 0; v <= resolved_.max_signed_view; ++v)
      {
        send(id, leader_of(v, params_), std::make_shared<Payload const>(Vote{v, id}), now, now);
      }
    }
  }

  /// Sends `payload` from `from` to the node's seeded subset after a hold in [delta_cap, 2 gamma].
  void release_later(ProcessorId from, Payload payload, GlobalTime const &now)
  {
    Time const                                  unit = params_.delta_cap / Time(4);
    auto const                                  top  = floor_int((params_.gamma * Time(2) - params_.delta_cap) / unit);
    std::uniform_int_distribution<std::int64_t> pick(0, top.convert_to<std::int64_t>());
    GlobalTime const release = now + params_.delta_cap + unit * Time(TimeInt(pick(adv_rng_)));
    auto const       shared  = std::make_shared<Payload const>(std::move(payload));
    for (auto to : nodes_[from].subset)
    {
      send(from, to, shared, release, now);
    }
  }

  void send(ProcessorId from, ProcessorId to, PayloadPtr const &payload, GlobalTime const &send_time,
            GlobalTime const &now)
  {
    std::visit(
        [&](auto const &p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, ViewMessage>)
          {
            ledger_.record_view_message(p.signer, p.view);
          }
          else if constexpr (std::is_same_v<T, Vote>)
          {
            ledger_.record_vote(p.signer, p.view);
          }
        },
        *payload);

    SimEvent ev;
    ev.kind      = EventKind::delivery;
    ev.sender    = from;
    ev.recipient = to;
    ev.counter   = counter_++;
    ev.payload   = payload;
    ev.send_time = send_time;
    if (to == from && send_time == now)
    {
      ev.time  = send_time;
      ev.words = 0;
    }
    else
    {
      ev.time  = delay_.deliver_time(send_time, net_rng_);
      ev.words = kWordsPerPayload;
    }
    current_->sent.push_back(
        SentRecord{to, record_of(*payload), ev.words, ev.send_time, ev.time});
    queue_.push(std::move(ev));
  }

  void run_actions(ProcessorId id, GlobalTime const &now, std::vector<Action> initial)
  {
    auto                &node = nodes_[id];
    std::deque<Action>   work(std::make_move_iterator(initial.begin()),
                              std::make_move_iterator(initial.end()));
    bool const           byz  = node.corrupted;

    while (!work.empty())
    {
      Action act = std::move(work.front());
      work.pop_front();

      if (auto *s = std::get_if<action::Send>(&act))
      {
        auto const kind = kind_of(s->payload);
        bool const cert = kind == PayloadKind::view_certificate ||
                          kind == PayloadKind::quorum_certificate;
        if (byz && node.strategy == Strategy::crash_leader &&
            (cert || kind == PayloadKind::proposal))
        {
          continue;
        }
        auto const shared = std::make_shared<Payload const>(std::move(s->payload));
        if (byz && node.strategy == Strategy::selective_vc &&
            kind == PayloadKind::view_certificate)
        {
          send(id, id, shared, now, now);
          for (auto to : node.subset)
          {
            send(id, to, shared, now, now);
          }
          continue;
        }
        if (byz && node.strategy == Strategy::late_qc_relayer &&
            kind == PayloadKind::quorum_certificate)
        {
          send(id, id, shared, now, now);
          if (node.relayed_qcs.insert(view_of(*shared)).second)
          {
            release_later(id, *shared, now);
          }
          continue;
        }
        if (s->to)
        {
          send(id, *s->to, shared, now, now);
        }
        else
        {
          for (ProcessorId to = 0; to < params_.n; ++to)
          {
            send(id, to, shared, now, now);
          }
        }
      }
      else if (auto *f = std::get_if<action::ForwardClock>(&act))
      {
        node.anchor_time  = now;
        node.anchor_clock = f->to;
        forwarded_        = true;
      }
      else if (auto *e = std::get_if<action::EnterView>(&act))
      {
        std::vector<Action> more;
        auto diag = stub_on_enter_view(node.st, node.stub, e->view, params_, more);
        note(diag);
        for (auto &a : more)
        {
          work.push_back(std::move(a));
        }
      }
      else if (auto *vc = std::get_if<action::FormVC>(&act))
      {
        if (byz && node.strategy == Strategy::crash_leader)
        {
          continue;
        }
        current_->formed.push_back(FormedRecord{PayloadKind::view_certificate, vc->cert.view(),
                                                {vc->cert.signers().begin(),
                                                 vc->cert.signers().end()}});
      }
      else if (auto *qc = std::get_if<action::FormQC>(&act))
      {
        if (byz && node.strategy == Strategy::crash_leader)
        {
          continue;
        }
        current_->formed.push_back(FormedRecord{PayloadKind::quorum_certificate, qc->cert.view(),
                                                {qc->cert.signers().begin(),
                                                 qc->cert.signers().end()}});
        if (resolved_.never_corrupted[id] && now > config_.gst && !t_star_)
        {
          t_star_ = now;
        }
      }
    }
  }

  void note(std::string const &diag)
  {
    if (!diag.empty())
    {
      if (!current_->diag.empty())
      {
        current_->diag += "; ";
      }
      current_->diag += diag;
    }
  }

  SimConfig const      &config_;
  ProtocolParams const &params_;
  ResolvedRun           resolved_;
  DelayModel            delay_;
  std::mt19937_64       net_rng_;
  std::mt19937_64       adv_rng_;
  SignatureLedger       ledger_;
  std::vector<Node>     nodes_;
  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> queue_;
  std::uint64_t         counter_{0};
  std::optional<GlobalTime> t_star_;
  Trace                 trace_;
  TraceEvent           *current_{nullptr};
  bool                  forwarded_{false};
};

}  // namespace

Trace simulate(SimConfig const &config)
{
  return Simulation(config).run();
}

}  // namespace fever
