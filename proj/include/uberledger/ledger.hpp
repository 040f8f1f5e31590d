#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "uberledger/digest.hpp"
#include "uberledger/types.hpp"

namespace uberledger {

enum class TxKind : std::uint8_t {
  transfer = 0,
  escrow_lock = 1,
  escrow_release = 2,
  escrow_refund = 3,
  coinbase = 4,
};

std::string_view to_string(TxKind k);
std::optional<TxKind> tx_kind_from_string(std::string_view s);

/// Reserved account names. User accounts may not start with '$'.
inline constexpr std::string_view kMintAccount = "$mint";
inline constexpr std::string_view kEscrowAccount = "$escrow";
inline constexpr std::string_view kFeeSinkAccount = "$fees";

bool is_reserved_account_name(std::string_view name);

/// A transfer of `amount` from `payer` to `payee` on one ledger.
///
/// `ref` names the escrow for the three escrow kinds and is a free-form
/// cross-reference (usually a transfer id) otherwise. `expiry` is meaningful
/// for escrow-lock only and must be zero for every other kind.
struct Transaction {
  AccountId payer;
  Amount amount;
  AccountId payee;
  Amount fee;
  std::uint64_t seq = 0;
  TxKind kind = TxKind::transfer;
  std::string ref;
  Tick expiry = 0;

  bool operator==(const Transaction&) const = default;
};

void encode(CanonicalEncoder& enc, const Transaction& tx);

struct Block {
  std::uint64_t height = 0;
  Digest prev_hash{};
  Tick timestamp = 0;
  std::vector<Transaction> txs;
  Digest hash{};

  bool operator==(const Block&) const = default;
};

Digest compute_block_hash(std::uint64_t height, const Digest& prev_hash, Tick timestamp,
                          std::span<const Transaction> txs);

struct Escrow {
  AccountId owner;
  Amount amount;
  Tick expiry = 0;

  bool operator==(const Escrow&) const = default;
};

enum class TxStatus {
  accepted,
  insufficient_funds,
  bad_sequence,
  cross_ledger,
  unknown_payer,
  unknown_escrow,
  malformed,
};

std::string_view to_string(TxStatus s);

class LedgerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// First failed check found by chain verification.
struct ChainViolation {
  std::uint64_t height = 0;
  std::string reason;
};

/// Balance state reached by applying a transaction sequence from genesis.
struct LedgerState {
  std::map<AccountId, Amount> balances;
  std::map<AccountId, std::uint64_t> next_seq;
  std::map<std::string, Escrow> escrows;
  std::set<std::string> closed_escrows;
  Amount supply;

  bool operator==(const LedgerState&) const = default;
};

/// One consensus network: an append-only hash-chained block sequence plus the
/// balance state it implies. Mutations must be externally serialized.
class Ledger {
 public:
  /// Builds a height-0 chain with one coinbase per allocation.
  static Ledger genesis(LedgerId id, std::span<const std::pair<AccountId, Amount>> allocations,
                        Tick timestamp = 0);

  /// Reassembles a ledger from persisted parts without checking them; use
  /// verify_chain afterwards.
  static Ledger restore(LedgerId id, std::vector<Block> chain, LedgerState state);

  /// Admits `tx` to the pending set if it is valid against the sealed state
  /// with every already-pending transaction applied in admission order.
  TxStatus apply_transaction(const Transaction& tx);

  /// Applies pending transactions, refunds expired escrows, appends a block.
  const Block& seal_block(Tick timestamp);

  Amount balance_of(const AccountId& account) const;

  /// Balance with pending transactions applied.
  Amount pending_balance_of(const AccountId& account) const;
  std::uint64_t pending_next_seq(const AccountId& account) const;
  /// Unreleased escrow amount with pending transactions applied; zero when unknown.
  Amount pending_escrow_amount(const std::string& escrow_id) const;
  /// Sealed escrow, if currently open.
  std::optional<Escrow> escrow(const std::string& escrow_id) const;

  // Builders that fill in the sequence number and reserved accounts, then admit.
  TxStatus submit_transfer(const AccountId& payer, const AccountId& payee, Amount amount,
                           Amount fee = Amount{0}, std::string ref = {});
  TxStatus lock_escrow(const AccountId& owner, Amount amount, std::string escrow_id, Tick expiry);
  TxStatus release_escrow(const std::string& escrow_id, const AccountId& payee, Amount amount);
  /// Refunds whatever remains in the escrow to its owner.
  TxStatus refund_escrow(const std::string& escrow_id);

  const LedgerId& id() const { return id_; }
  const std::vector<Block>& chain() const { return chain_; }
  const Block& tip() const { return chain_.back(); }
  const std::vector<Transaction>& pending() const { return pending_; }
  const LedgerState& state() const { return sealed_; }
  Amount supply() const { return sealed_.supply; }

  AccountId mint_account() const { return {id_, std::string(kMintAccount)}; }
  AccountId escrow_account() const { return {id_, std::string(kEscrowAccount)}; }
  AccountId fee_sink() const { return {id_, std::string(kFeeSinkAccount)}; }

  /// Σ balances + Σ open escrows over the sealed state.
  Amount circulating() const;

 private:
  Ledger() = default;

  LedgerId id_;
  std::vector<Block> chain_;
  LedgerState sealed_;
  LedgerState shadow_;  // sealed_ with pending_ applied
  std::vector<Transaction> pending_;
};

/// Checks a transaction against `state`. Coinbase is never valid here.
TxStatus validate(const LedgerState& state, const LedgerId& ledger, const Transaction& tx);

/// Applies a transaction already accepted by validate().
void apply(LedgerState& state, const Transaction& tx);

/// Refund transactions for escrows expiring at or before `timestamp`, in
/// escrow-id order, continuing the escrow account's sequence.
std::vector<Transaction> expiry_refunds(const LedgerState& state, const LedgerId& ledger,
                                        Tick timestamp);

/// nullopt when every block invariant holds and replay from genesis
/// reproduces the ledger's state; otherwise the first violation.
std::optional<ChainViolation> verify_chain(const Ledger& ledger);

}  // namespace uberledger
