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

#include "fever/params.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

namespace fever {

/// A single processor's signature on an initial view number.
struct ViewMessage
{
  View        view{0};
  ProcessorId signer{0};

  friend bool operator==(ViewMessage const &, ViewMessage const &) = default;
};

/// Leader proposal in the underlying protocol. Carries no block content.
struct Proposal
{
  View        view{0};
  ProcessorId leader{0};

  friend bool operator==(Proposal const &, Proposal const &) = default;
};

struct Vote
{
  View        view{0};
  ProcessorId signer{0};

  friend bool operator==(Vote const &, Vote const &) = default;
};

class CertificateError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

class ViewCertificate;
class QuorumCertificate;

/// Aggregates the view messages of at least t+1 distinct signers.
/// Throws CertificateError on a short quorum, duplicate signers, a view
/// mismatch or a non-initial view.
ViewCertificate form_vc(View view, std::span<ViewMessage const> messages,
                        ProtocolParams const &params);

/// Aggregates the votes of at least n-t distinct signers.
QuorumCertificate form_qc(View view, std::span<Vote const> votes, ProtocolParams const &params);

/// Threshold signature over t+1 view messages. Only form_vc can build one.
class ViewCertificate
{
public:
  View                         view() const noexcept { return view_; }
  std::span<ProcessorId const> signers() const noexcept { return signers_; }

  friend bool operator==(ViewCertificate const &, ViewCertificate const &) = default;

private:
  ViewCertificate(View view, std::vector<ProcessorId> signers)
    : view_{view}
    , signers_{std::move(signers)}
  {}

  friend ViewCertificate form_vc(View, std::span<ViewMessage const>, ProtocolParams const &);

  View                     view_;
  std::vector<ProcessorId> signers_;  // sorted, distinct
};

/// Threshold signature over n-t votes. Only form_qc can build one.
class QuorumCertificate
{
public:
  View                         view() const noexcept { return view_; }
  std::span<ProcessorId const> signers() const noexcept { return signers_; }

  friend bool operator==(QuorumCertificate const &, QuorumCertificate const &) = default;

private:
  QuorumCertificate(View view, std::vector<ProcessorId> signers)
    : view_{view}
    , signers_{std::move(signers)}
  {}

  friend QuorumCertificate form_qc(View, std::span<Vote const>, ProtocolParams const &);

  View                     view_;
  std::vector<ProcessorId> signers_;  // sorted, distinct
};

using Payload = std::variant<ViewMessage, ViewCertificate, QuorumCertificate, Proposal, Vote>;

enum class PayloadKind : std::uint8_t
{
  view_message,
  view_certificate,
  quorum_certificate,
  proposal,
  vote,
};

std::string_view to_string(PayloadKind kind);
PayloadKind      parse_payload_kind(std::string_view text);

PayloadKind kind_of(Payload const &payload) noexcept;
View        view_of(Payload const &payload) noexcept;

/// Every payload is one word on the wire; threshold signatures do not grow with n.
constexpr std::uint32_t kWordsPerPayload = 1;

/// Append-only record of every signature produced in a run.
///
/// Correct processors sign only through protocol rules; corrupted ones may add
/// entries for any view at any time. Certificates are checked against this
/// record, so a signature that was never produced cannot be claimed.
class SignatureLedger
{
public:
  void record_view_message(ProcessorId signer, View view);
  void record_vote(ProcessorId signer, View view);

  bool has_view_message(ProcessorId signer, View view) const;
  bool has_vote(ProcessorId signer, View view) const;

  std::size_t size() const noexcept { return entries_.size(); }

private:
  static std::uint64_t key(bool vote, ProcessorId signer, View view) noexcept;

  std::unordered_set<std::uint64_t> entries_;
};

bool validate_view_message(ViewMessage const &message, SignatureLedger const &ledger);
bool validate_vote(Vote const &vote, SignatureLedger const &ledger);
bool validate_vc(ViewCertificate const &vc, SignatureLedger const &ledger);
bool validate_qc(QuorumCertificate const &qc, SignatureLedger const &ledger);

}  // namespace fever
