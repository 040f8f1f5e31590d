#include "uberledger/ledger.hpp"

#include <algorithm>

namespace uberledger {

namespace {

constexpr std::string_view kKindNames[] = {"transfer", "escrow-lock", "escrow-release",
                                           "escrow-refund", "coinbase"};

std::uint64_t seq_of(const LedgerState& s, const AccountId& a) {
  auto it = s.next_seq.find(a);
  return it == s.next_seq.end() ? 0 : it->second;
}

Amount balance_in(const LedgerState& s, const AccountId& a) {
  auto it = s.balances.find(a);
  return it == s.balances.end() ? Amount{0} : it->second;
}

bool well_labelled(const AccountId& a) { return is_valid_label(a.ledger) && is_valid_label(a.name); }

// amount + fee, or nullopt on overflow.
std::optional<Amount> debit_of(const Transaction& tx) {
  try {
    return tx.amount + tx.fee;
  } catch (const AmountError&) {
    return std::nullopt;
  }
}

}  // namespace

std::string_view to_string(TxKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

std::optional<TxKind> tx_kind_from_string(std::string_view s) {
  for (std::size_t i = 0; i < std::size(kKindNames); ++i) {
    if (kKindNames[i] == s) return static_cast<TxKind>(i);
  }
  return std::nullopt;
}

std::string_view to_string(TxStatus s) {
  switch (s) {
    case TxStatus::accepted: return "accepted";
    case TxStatus::insufficient_funds: return "insufficient-funds";
    case TxStatus::bad_sequence: return "bad-sequence";
    case TxStatus::cross_ledger: return "cross-ledger";
    case TxStatus::unknown_payer: return "unknown-payer";
    case TxStatus::unknown_escrow: return "unknown-escrow";
    case TxStatus::malformed: return "malformed";
  }
  return "?";
}

bool is_reserved_account_name(std::string_view name) { return !name.empty() && name.front() == '$'; }

void encode(CanonicalEncoder& enc, const Transaction& tx) {
  enc.u8(static_cast<std::uint8_t>(tx.kind))
      .str(tx.payer.ledger)
      .str(tx.payer.name)
      .u64(tx.amount.value())
      .str(tx.payee.ledger)
      .str(tx.payee.name)
      .u64(tx.fee.value())
      .u64(tx.seq)
      .str(tx.ref)
      .u64(tx.expiry);
}

Digest compute_block_hash(std::uint64_t height, const Digest& prev_hash, Tick timestamp,
                          std::span<const Transaction> txs) {
  CanonicalEncoder enc;
  enc.u64(height).digest(prev_hash).u64(timestamp);
  enc.u32(static_cast<std::uint32_t>(txs.size()));
  for (const auto& tx : txs) encode(enc, tx);
  return enc.hash();
}

TxStatus validate(const LedgerState& state, const LedgerId& ledger, const Transaction& tx) {
  if (!well_labelled(tx.payer) || !well_labelled(tx.payee)) return TxStatus::malformed;
  if (tx.payer.ledger != ledger || tx.payee.ledger != ledger) return TxStatus::cross_ledger;

  switch (tx.kind) {
    case TxKind::coinbase:
      return TxStatus::malformed;

    case TxKind::transfer:
    case TxKind::escrow_lock: {
      if (is_reserved_account_name(tx.payer.name)) return TxStatus::malformed;
      if (tx.kind == TxKind::transfer) {
        if (is_reserved_account_name(tx.payee.name) || tx.expiry != 0) return TxStatus::malformed;
      } else {
        if (tx.payee.name != kEscrowAccount || !is_valid_label(tx.ref) || tx.expiry == 0 ||
            tx.amount.value() == 0) {
          return TxStatus::malformed;
        }
        if (state.escrows.contains(tx.ref) || state.closed_escrows.contains(tx.ref)) {
          return TxStatus::malformed;
        }
      }
      if (!state.balances.contains(tx.payer)) return TxStatus::unknown_payer;
      if (tx.seq != seq_of(state, tx.payer)) return TxStatus::bad_sequence;
      auto debit = debit_of(tx);
      if (!debit || balance_in(state, tx.payer) < *debit) return TxStatus::insufficient_funds;
      return TxStatus::accepted;
    }

    case TxKind::escrow_release:
    case TxKind::escrow_refund: {
      if (tx.payer.name != kEscrowAccount || is_reserved_account_name(tx.payee.name) ||
          tx.fee.value() != 0 || tx.expiry != 0 || tx.amount.value() == 0) {
        return TxStatus::malformed;
      }
      auto it = state.escrows.find(tx.ref);
      if (it == state.escrows.end()) return TxStatus::unknown_escrow;
      if (tx.kind == TxKind::escrow_refund && tx.payee != it->second.owner) return TxStatus::malformed;
      if (tx.seq != seq_of(state, tx.payer)) return TxStatus::bad_sequence;
      if (it->second.amount < tx.amount) return TxStatus::insufficient_funds;
      return TxStatus::accepted;
    }
  }
  return TxStatus::malformed;
}

void apply(LedgerState& state, const Transaction& tx) {
  ++state.next_seq[tx.payer];
  switch (tx.kind) {
    case TxKind::coinbase:
      state.balances[tx.payee] += tx.amount;
      state.supply += tx.amount;
      break;
    case TxKind::transfer:
    case TxKind::escrow_lock:
      state.balances[tx.payer] -= tx.amount + tx.fee;
      if (tx.fee.value() > 0) state.balances[{tx.payer.ledger, std::string(kFeeSinkAccount)}] += tx.fee;
      if (tx.kind == TxKind::transfer) {
        state.balances[tx.payee] += tx.amount;
      } else {
        state.escrows[tx.ref] = Escrow{tx.payer, tx.amount, tx.expiry};
      }
      break;
    case TxKind::escrow_release:
    case TxKind::escrow_refund: {
      auto& esc = state.escrows.at(tx.ref);
      esc.amount -= tx.amount;
      state.balances[tx.payee] += tx.amount;
      if (esc.amount.value() == 0) {
        state.escrows.erase(tx.ref);
        state.closed_escrows.insert(tx.ref);
      }
      break;
    }
  }
}

std::vector<Transaction> expiry_refunds(const LedgerState& state, const LedgerId& ledger,
                                        Tick timestamp) {
  std::vector<Transaction> out;
  const AccountId escrow_acct{ledger, std::string(kEscrowAccount)};
  std::uint64_t seq = seq_of(state, escrow_acct);
  for (const auto& [id, esc] : state.escrows) {
    if (esc.expiry > timestamp || esc.amount.value() == 0) continue;
    out.push_back(Transaction{escrow_acct, esc.amount, esc.owner, Amount{0}, seq++,
                              TxKind::escrow_refund, id, 0});
  }
  return out;
}

Ledger Ledger::genesis(LedgerId id, std::span<const std::pair<AccountId, Amount>> allocations,
                       Tick timestamp) {
  require_valid_label(id, "ledger id");
  if (allocations.empty()) throw LedgerError("genesis: empty allocation");

  Ledger l;
  l.id_ = id;
  Block g;
  g.height = 0;
  g.timestamp = timestamp;
  const AccountId mint{id, std::string(kMintAccount)};
  std::set<AccountId> seen;
  for (const auto& [acct, amount] : allocations) {
    if (acct.ledger != id) {
      throw LedgerError("genesis: account " + acct.to_string() + " belongs to a foreign ledger");
    }
    require_valid_label(acct.name, "account name");
    if (is_reserved_account_name(acct.name)) {
      throw LedgerError("genesis: account name " + acct.name + " is reserved");
    }
    if (!seen.insert(acct).second) {
      throw LedgerError("genesis: duplicate account " + acct.to_string());
    }
    Transaction cb{mint, amount, acct, Amount{0}, g.txs.size(), TxKind::coinbase, {}, 0};
    apply(l.sealed_, cb);
    g.txs.push_back(std::move(cb));
  }
  g.hash = compute_block_hash(g.height, g.prev_hash, g.timestamp, g.txs);
  l.chain_.push_back(std::move(g));
  l.shadow_ = l.sealed_;
  return l;
}

Ledger Ledger::restore(LedgerId id, std::vector<Block> chain, LedgerState state) {
  if (chain.empty()) throw LedgerError("restore: empty chain");
  Ledger l;
  l.id_ = std::move(id);
  l.chain_ = std::move(chain);
  l.sealed_ = std::move(state);
  l.shadow_ = l.sealed_;
  return l;
}

TxStatus Ledger::apply_transaction(const Transaction& tx) {
  auto status = validate(shadow_, id_, tx);
  if (status == TxStatus::accepted) {
    apply(shadow_, tx);
    pending_.push_back(tx);
  }
  return status;
}

const Block& Ledger::seal_block(Tick timestamp) {
  if (timestamp <= tip().timestamp) {
    throw LedgerError("seal_block: timestamp " + std::to_string(timestamp) +
                      " not after tip timestamp " + std::to_string(tip().timestamp));
  }
  Block b;
  b.height = tip().height + 1;
  b.prev_hash = tip().hash;
  b.timestamp = timestamp;
  b.txs = std::move(pending_);
  pending_.clear();

  LedgerState next = sealed_;
  for (const auto& tx : b.txs) apply(next, tx);
  for (auto& refund : expiry_refunds(next, id_, timestamp)) {
    apply(next, refund);
    b.txs.push_back(std::move(refund));
  }
  b.hash = compute_block_hash(b.height, b.prev_hash, b.timestamp, b.txs);

  sealed_ = std::move(next);
  shadow_ = sealed_;
  chain_.push_back(std::move(b));
  return chain_.back();
}

Amount Ledger::balance_of(const AccountId& account) const { return balance_in(sealed_, account); }

Amount Ledger::pending_balance_of(const AccountId& account) const {
  return balance_in(shadow_, account);
}

std::uint64_t Ledger::pending_next_seq(const AccountId& account) const {
  return seq_of(shadow_, account);
}

Amount Ledger::pending_escrow_amount(const std::string& escrow_id) const {
  auto it = shadow_.escrows.find(escrow_id);
  return it == shadow_.escrows.end() ? Amount{0} : it->second.amount;
}

std::optional<Escrow> Ledger::escrow(const std::string& escrow_id) const {
  auto it = sealed_.escrows.find(escrow_id);
  if (it == sealed_.escrows.end()) return std::nullopt;
  return it->second;
}

TxStatus Ledger::submit_transfer(const AccountId& payer, const AccountId& payee, Amount amount,
                                 Amount fee, std::string ref) {
  return apply_transaction(Transaction{payer, amount, payee, fee, pending_next_seq(payer),
                                       TxKind::transfer, std::move(ref), 0});
}

TxStatus Ledger::lock_escrow(const AccountId& owner, Amount amount, std::string escrow_id,
                             Tick expiry) {
  return apply_transaction(Transaction{owner, amount, escrow_account(), Amount{0},
                                       pending_next_seq(owner), TxKind::escrow_lock,
                                       std::move(escrow_id), expiry});
}

TxStatus Ledger::release_escrow(const std::string& escrow_id, const AccountId& payee,
                                Amount amount) {
  return apply_transaction(Transaction{escrow_account(), amount, payee, Amount{0},
                                       pending_next_seq(escrow_account()),
                                       TxKind::escrow_release, escrow_id, 0});
}

TxStatus Ledger::refund_escrow(const std::string& escrow_id) {
  auto it = shadow_.escrows.find(escrow_id);
  if (it == shadow_.escrows.end()) return TxStatus::unknown_escrow;
  return apply_transaction(Transaction{escrow_account(), it->second.amount, it->second.owner,
                                       Amount{0}, pending_next_seq(escrow_account()),
                                       TxKind::escrow_refund, escrow_id, 0});
}

Amount Ledger::circulating() const {
  Amount total{0};
  for (const auto& [_, b] : sealed_.balances) total += b;
  for (const auto& [_, e] : sealed_.escrows) total += e.amount;
  return total;
}

namespace {

std::optional<std::string> check_genesis_tx(const LedgerState& st, const LedgerId& id,
                                            const Transaction& tx, std::uint64_t index) {
  if (tx.kind != TxKind::coinbase) return "non-coinbase transaction in genesis";
  if (tx.payer != AccountId{id, std::string(kMintAccount)}) return "coinbase payer is not the mint";
  if (tx.seq != index) return "coinbase sequence out of order";
  if (tx.payee.ledger != id || !is_valid_label(tx.payee.name) ||
      is_reserved_account_name(tx.payee.name)) {
    return "coinbase payee invalid";
  }
  if (tx.fee.value() != 0 || !tx.ref.empty() || tx.expiry != 0) return "coinbase carries extra fields";
  if (st.balances.contains(tx.payee)) return "duplicate genesis allocation";
  return std::nullopt;
}

}  // namespace

std::optional<ChainViolation> verify_chain(const Ledger& ledger) {
  const auto& chain = ledger.chain();
  if (chain.empty()) return ChainViolation{0, "empty chain"};

  LedgerState st;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const Block& b = chain[i];
    const Digest expected_prev = i == 0 ? kZeroDigest : chain[i - 1].hash;
    if (b.prev_hash != expected_prev) return ChainViolation{i, "prev_hash mismatch"};
    if (b.height != i) return ChainViolation{i, "height mismatch"};
    if (i > 0 && b.timestamp <= chain[i - 1].timestamp) {
      return ChainViolation{i, "non-monotonic timestamp"};
    }
    if (compute_block_hash(b.height, b.prev_hash, b.timestamp, b.txs) != b.hash) {
      return ChainViolation{i, "hash mismatch"};
    }

    for (std::size_t k = 0; k < b.txs.size(); ++k) {
      const auto& tx = b.txs[k];
      if (i == 0) {
        if (auto why = check_genesis_tx(st, ledger.id(), tx, k)) return ChainViolation{i, *why};
      } else {
        auto status = validate(st, ledger.id(), tx);
        if (status != TxStatus::accepted) {
          return ChainViolation{i, "transaction " + std::to_string(k) + " invalid on replay: " +
                                       std::string(to_string(status))};
        }
      }
      apply(st, tx);
    }
    if (i == 0 && b.txs.empty()) return ChainViolation{0, "genesis without allocations"};
    if (i > 0 && !expiry_refunds(st, ledger.id(), b.timestamp).empty()) {
      return ChainViolation{i, "expired escrow not refunded"};
    }
  }

  if (st != ledger.state()) {
    return ChainViolation{chain.size() - 1, "replayed state differs from recorded state"};
  }
  return std::nullopt;
}

}  // namespace uberledger
