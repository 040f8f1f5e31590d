#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "uberledger/ledger.hpp"
#include "uberledger/trust.hpp"
#include "uberledger/types.hpp"

namespace uberledger {

/// A connector holding one account on each ledger it serves.
struct Facilitator {
  std::string name;
  std::map<LedgerId, AccountId> accounts;
  Amount fee_bid{1};

  bool serves(const LedgerId& a, const LedgerId& b) const {
    return a != b && accounts.contains(a) && accounts.contains(b);
  }
  const AccountId& account_on(const LedgerId& l) const { return accounts.at(l); }

  bool operator==(const Facilitator&) const = default;
};

/// Facilitators from `all` holding accounts on both ledgers, in input order.
std::vector<Facilitator> eligible_facilitators(std::span<const Facilitator> all,
                                               const LedgerId& source, const LedgerId& dest);

struct GroupParams {
  std::uint32_t n = 4;
  std::uint32_t f = 1;

  /// 2f + 1 matching attestations.
  std::uint32_t quorum() const { return 2 * f + 1; }
  bool satisfies_bound() const { return static_cast<std::uint64_t>(n) >= 3ULL * f + 1; }
};

enum class Verdict { yes, no };

std::string_view to_string(Verdict v);

struct TransferRequest {
  std::string id;
  AccountId payer;  // source ledger
  AccountId payee;  // destination ledger
  Amount amount_src;
  Amount amount_dst;
  Amount fee_total;
  Tick expiry = 0;

  const LedgerId& source() const { return payer.ledger; }
  const LedgerId& dest() const { return payee.ledger; }
};

enum class Phase { proposed, escrowed, attested, released, forfeited };

std::string_view to_string(Phase p);

/// Proposed->Escrowed->Attested->Released, and Proposed|Escrowed|Attested->Forfeited.
bool is_allowed_transition(Phase from, Phase to);
inline bool is_terminal(Phase p) { return p == Phase::released || p == Phase::forfeited; }

struct TransferState {
  TransferRequest request;
  std::vector<Facilitator> group;  // sorted by name
  GroupParams params;
  Phase phase = Phase::proposed;
  std::map<std::string, Verdict> attestations;
  std::string escrow_id;
  /// True while source funds sit in escrow with no release or refund submitted.
  bool escrow_outstanding = false;
  std::vector<std::pair<std::string, Amount>> fee_shares;
  std::string note;  // why the transfer was forfeited, if it was
  std::vector<Phase> trace{Phase::proposed};

  bool is_member(const std::string& name) const;
  std::size_t yes_count() const;
  std::size_t no_count() const;
};

class InterchainError : public std::runtime_error {
 public:
  enum class Code {
    bound_violation,
    insufficient_candidates,
    malformed_request,
    wrong_phase,
    non_member,
    premature_settle,
    ledger_rejected,
  };

  InterchainError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

/// Throws bound_violation unless n >= 3f + 1 and n > 0.
void check_group_params(const GroupParams& params);

/// Samples exactly params.n distinct candidates without replacement with
/// probability proportional to selection weight (trust over fee bid).
/// Deterministic in `seed`. Falls back to uniform draws once every remaining
/// candidate has zero weight. The result is sorted by name.
std::vector<Facilitator> form_group(std::span<const Facilitator> candidates,
                                    const GlobalTrustVector<double>& trust,
                                    const GroupParams& params, std::uint64_t seed);

TransferState initiate(TransferRequest request, std::vector<Facilitator> group,
                       const GroupParams& params, Tick now);

/// Locks amount_src + fee_total on the source ledger. Insufficient funds
/// forfeit the transfer with nothing locked.
void escrow_lock(TransferState& state, Ledger& source);

/// Records first-per-member verdicts, then moves to Attested once yes-count
/// reaches the quorum, or to Forfeited once the quorum is unreachable.
void collect_attestations(TransferState& state,
                          std::span<const std::pair<std::string, Verdict>> verdicts);

/// Member refusing to pay its destination share (absconding).
using PaymentRefusal = std::function<bool(const Facilitator&)>;

/// Releases both legs when attested before expiry, otherwise refunds the
/// escrow. A Forfeited state whose escrow is still outstanding is refunded
/// and stays Forfeited.
void settle(TransferState& state, Ledger& source, Ledger& dest, Tick now,
            const PaymentRefusal& refuses = {});

/// `total` split into `parts` equal integer shares; the first
/// total % parts shares carry one extra unit.
std::vector<Amount> split_equally(Amount total, std::size_t parts);

}  // namespace uberledger
