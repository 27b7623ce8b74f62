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

#include "fever/certificates.hpp"

#include <algorithm>
#include <string>

namespace fever {

namespace {

template <typename Signed>
std::vector<ProcessorId> distinct_signers(View view, std::span<Signed const> items,
                                          std::string_view what)
{
  std::vector<ProcessorId> signers;
  signers.reserve(items.size());
  for (auto const &item : items)
  {
    if (item.view != view)
    {
      throw CertificateError(std::string(what) + " for view " + std::to_string(item.view) +
                             " cannot certify view " + std::to_string(view));
    }
    signers.push_back(item.signer);
  }
  std::sort(signers.begin(), signers.end());
  if (std::adjacent_find(signers.begin(), signers.end()) != signers.end())
  {
    throw CertificateError("duplicate signer in " + std::string(what) + " set");
  }
  return signers;
}

}  // namespace

ViewCertificate form_vc(View view, std::span<ViewMessage const> messages,
                        ProtocolParams const &params)
{
  if (!is_initial(view, params))
  {
    throw CertificateError("view certificate requested for non-initial view " +
                           std::to_string(view));
  }
  auto signers = distinct_signers(view, messages, "view message");
  if (signers.size() < params.vc_quorum())
  {
    throw CertificateError("view certificate needs " + std::to_string(params.vc_quorum()) +
                           " distinct signers, got " + std::to_string(signers.size()));
  }
  return ViewCertificate(view, std::move(signers));
}

QuorumCertificate form_qc(View view, std::span<Vote const> votes, ProtocolParams const &params)
{
  auto signers = distinct_signers(view, votes, "vote");
  if (signers.size() < params.qc_quorum())
  {
    throw CertificateError("quorum certificate needs " + std::to_string(params.qc_quorum()) +
                           " distinct signers, got " + std::to_string(signers.size()));
  }
  return QuorumCertificate(view, std::move(signers));
}

std::string_view to_string(PayloadKind kind)
{
  switch (kind)
  {
  case PayloadKind::view_message:
    return "view";
  case PayloadKind::view_certificate:
    return "vc";
  case PayloadKind::quorum_certificate:
    return "qc";
  case PayloadKind::proposal:
    return "proposal";
  case PayloadKind::vote:
    return "vote";
  }
  return "unknown";
}

PayloadKind parse_payload_kind(std::string_view text)
{
  for (auto kind : {PayloadKind::view_message, PayloadKind::view_certificate,
                    PayloadKind::quorum_certificate, PayloadKind::proposal, PayloadKind::vote})
  {
    if (to_string(kind) == text)
    {
      return kind;
    }
  }
  throw std::invalid_argument("unknown payload kind: '" + std::string(text) + "'");
}

PayloadKind kind_of(Payload const &payload) noexcept
{
  return static_cast<PayloadKind>(payload.index());
}

View view_of(Payload const &payload) noexcept
{
  return std::visit(
      [](auto const &p) -> View {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ViewCertificate> || std::is_same_v<T, QuorumCertificate>)
        {
          return p.view();
        }
        else
        {
          return p.view;
        }
      },
      payload);
}

std::uint64_t SignatureLedger::key(bool vote, ProcessorId signer, View view) noexcept
{
  // 1 bit kind, 15 bits signer, 48 bits view; ample for any simulated run.
  return (static_cast<std::uint64_t>(vote) << 63) |
         (static_cast<std::uint64_t>(signer & 0x7fffu) << 48) | (view & 0xffffffffffffull);
}

void SignatureLedger::record_view_message(ProcessorId signer, View view)
{
  entries_.insert(key(false, signer, view));
}

void SignatureLedger::record_vote(ProcessorId signer, View view)
{
  entries_.insert(key(true, signer, view));
}

bool SignatureLedger::has_view_message(ProcessorId signer, View view) const
{
  return entries_.contains(key(false, signer, view));
}

bool SignatureLedger::has_vote(ProcessorId signer, View view) const
{
  return entries_.contains(key(true, signer, view));
}

bool validate_view_message(ViewMessage const &message, SignatureLedger const &ledger)
{
  return ledger.has_view_message(message.signer, message.view);
}

bool validate_vote(Vote const &vote, SignatureLedger const &ledger)
{
  return ledger.has_vote(vote.signer, vote.view);
}

bool validate_vc(ViewCertificate const &vc, SignatureLedger const &ledger)
{
  return std::all_of(vc.signers().begin(), vc.signers().end(),
                     [&](ProcessorId s) { return ledger.has_view_message(s, vc.view()); });
}

bool validate_qc(QuorumCertificate const &qc, SignatureLedger const &ledger)
{
  return std::all_of(qc.signers().begin(), qc.signers().end(),
                     [&](ProcessorId s) { return ledger.has_vote(s, qc.view()); });
}

}  // namespace fever
