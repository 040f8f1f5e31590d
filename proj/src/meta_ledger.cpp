#include "uberledger/meta_ledger.hpp"

#include <algorithm>

namespace uberledger {

std::string_view to_string(Outcome o) { return o == Outcome::released ? "Released" : "Forfeited"; }

std::string_view to_string(Attestation a) {
  switch (a) {
    case Attestation::yes: return "yes";
    case Attestation::no: return "no";
    case Attestation::absent: return "absent";
  }
  return "?";
}

std::optional<Outcome> outcome_from_string(std::string_view s) {
  if (s == "Released") return Outcome::released;
  if (s == "Forfeited") return Outcome::forfeited;
  return std::nullopt;
}

std::optional<Attestation> attestation_from_string(std::string_view s) {
  if (s == "yes") return Attestation::yes;
  if (s == "no") return Attestation::no;
  if (s == "absent") return Attestation::absent;
  return std::nullopt;
}

std::optional<std::string> record_defect(const OutcomeRecord& r) {
  if (!is_valid_label(r.transfer_id)) return "invalid transfer id";
  if (!is_valid_label(r.source_ledger) || !is_valid_label(r.dest_ledger)) return "invalid ledger id";
  if (r.source_ledger == r.dest_ledger) return "source and destination ledgers coincide";
  if (r.payer.ledger != r.source_ledger || !is_valid_label(r.payer.name)) return "payer not on source ledger";
  if (r.payee.ledger != r.dest_ledger || !is_valid_label(r.payee.name)) return "payee not on destination ledger";
  if (r.outcome != Outcome::released && r.outcome != Outcome::forfeited) return "unknown outcome";
  if (r.verdicts.empty()) return "no verdicts";
  for (std::size_t i = 0; i < r.verdicts.size(); ++i) {
    const auto& v = r.verdicts[i];
    if (!is_valid_label(v.facilitator)) return "invalid facilitator name";
    if (v.attested != Attestation::yes && v.attested != Attestation::no &&
        v.attested != Attestation::absent) {
      return "unknown attestation";
    }
    if (i > 0 && !(r.verdicts[i - 1].facilitator < v.facilitator)) {
      return "verdicts not strictly sorted by facilitator";
    }
  }
  if (r.outcome == Outcome::forfeited) {
    if (!r.fee_shares.empty()) return "forfeited record carries fee shares";
    return std::nullopt;
  }
  Amount sum{0};
  for (std::size_t i = 0; i < r.fee_shares.size(); ++i) {
    const auto& s = r.fee_shares[i];
    if (i > 0 && !(r.fee_shares[i - 1].facilitator < s.facilitator)) {
      return "fee shares not strictly sorted by facilitator";
    }
    const bool member = std::any_of(r.verdicts.begin(), r.verdicts.end(),
                                    [&](const VerdictEntry& v) { return v.facilitator == s.facilitator; });
    if (!member) return "fee share for non-member " + s.facilitator;
    try {
      sum += s.amount;
    } catch (const AmountError&) {
      return "fee shares overflow";
    }
  }
  if (sum != r.fee_total) return "fee shares do not sum to fee_total";
  return std::nullopt;
}

OutcomeRecord make_outcome_record(const TransferState& state, Tick tick) {
  if (!is_terminal(state.phase)) {
    throw MetaLedgerError("make_outcome_record: transfer " + state.request.id + " is not terminal");
  }
  const auto& req = state.request;
  OutcomeRecord r;
  r.transfer_id = req.id;
  r.source_ledger = req.source();
  r.dest_ledger = req.dest();
  r.payer = req.payer;
  r.payee = req.payee;
  r.amount_src = req.amount_src;
  r.amount_dst = req.amount_dst;
  r.fee_total = req.fee_total;
  r.outcome = state.phase == Phase::released ? Outcome::released : Outcome::forfeited;
  r.tick = tick;
  for (const auto& m : state.group) {
    auto it = state.attestations.find(m.name);
    Attestation a = Attestation::absent;
    if (it != state.attestations.end()) a = it->second == Verdict::yes ? Attestation::yes : Attestation::no;
    r.verdicts.push_back({m.name, a});
  }
  std::sort(r.verdicts.begin(), r.verdicts.end(),
            [](const auto& a, const auto& b) { return a.facilitator < b.facilitator; });
  if (r.outcome == Outcome::released) {
    for (const auto& [name, amount] : state.fee_shares) r.fee_shares.push_back({name, amount});
    std::sort(r.fee_shares.begin(), r.fee_shares.end(),
              [](const auto& a, const auto& b) { return a.facilitator < b.facilitator; });
  }
  return r;
}

void encode(CanonicalEncoder& enc, const OutcomeRecord& r) {
  enc.str(r.transfer_id)
      .str(r.source_ledger)
      .str(r.dest_ledger)
      .str(r.payer.ledger)
      .str(r.payer.name)
      .str(r.payee.ledger)
      .str(r.payee.name)
      .u64(r.amount_src.value())
      .u64(r.amount_dst.value())
      .u64(r.fee_total.value())
      .u8(static_cast<std::uint8_t>(r.outcome));
  enc.u32(static_cast<std::uint32_t>(r.verdicts.size()));
  for (const auto& v : r.verdicts) enc.str(v.facilitator).u8(static_cast<std::uint8_t>(v.attested));
  enc.u32(static_cast<std::uint32_t>(r.fee_shares.size()));
  for (const auto& s : r.fee_shares) enc.str(s.facilitator).u64(s.amount.value());
  enc.u64(r.tick);
}

Digest compute_meta_block_hash(std::uint64_t height, const Digest& prev_hash, Tick timestamp,
                               std::span<const OutcomeRecord> records) {
  CanonicalEncoder enc;
  enc.u64(height).digest(prev_hash).u64(timestamp);
  enc.u32(static_cast<std::uint32_t>(records.size()));
  for (const auto& r : records) encode(enc, r);
  return enc.hash();
}

MetaLedger::MetaLedger(Tick genesis_timestamp) {
  MetaBlock g;
  g.timestamp = genesis_timestamp;
  g.hash = compute_meta_block_hash(0, g.prev_hash, g.timestamp, g.records);
  chain_.push_back(std::move(g));
}

MetaLedger MetaLedger::restore(std::vector<MetaBlock> chain) {
  if (chain.empty()) throw MetaLedgerError("restore: empty meta chain");
  MetaLedger m;
  m.chain_ = std::move(chain);
  for (const auto& b : m.chain_) {
    for (const auto& r : b.records) m.ids_.insert(r.transfer_id);
  }
  return m;
}

void MetaLedger::record_outcome(OutcomeRecord record) {
  if (auto why = record_defect(record)) {
    throw MetaLedgerError("record_outcome: " + record.transfer_id + ": " + *why);
  }
  if (ids_.contains(record.transfer_id)) {
    throw MetaLedgerError("record_outcome: duplicate transfer id " + record.transfer_id);
  }
  ids_.insert(record.transfer_id);
  pending_.push_back(std::move(record));
}

const MetaBlock& MetaLedger::seal(Tick timestamp) {
  if (timestamp <= tip().timestamp) {
    throw MetaLedgerError("seal: timestamp " + std::to_string(timestamp) +
                          " not after tip timestamp " + std::to_string(tip().timestamp));
  }
  MetaBlock b;
  b.height = tip().height + 1;
  b.prev_hash = tip().hash;
  b.timestamp = timestamp;
  b.records = std::move(pending_);
  pending_.clear();
  b.hash = compute_meta_block_hash(b.height, b.prev_hash, b.timestamp, b.records);
  chain_.push_back(std::move(b));
  return chain_.back();
}

const OutcomeRecord* MetaLedger::find(const std::string& transfer_id) const {
  for (const auto& b : chain_) {
    for (const auto& r : b.records) {
      if (r.transfer_id == transfer_id) return &r;
    }
  }
  for (const auto& r : pending_) {
    if (r.transfer_id == transfer_id) return &r;
  }
  return nullptr;
}

std::vector<const OutcomeRecord*> MetaLedger::sealed_records() const {
  std::vector<const OutcomeRecord*> out;
  for (const auto& b : chain_) {
    for (const auto& r : b.records) out.push_back(&r);
  }
  return out;
}

std::size_t MetaLedger::sealed_record_count() const {
  std::size_t n = 0;
  for (const auto& b : chain_) n += b.records.size();
  return n;
}

std::optional<ChainViolation> verify_meta_chain(const MetaLedger& meta) {
  const auto& chain = meta.chain();
  if (chain.empty()) return ChainViolation{0, "empty meta chain"};
  std::set<std::string> seen;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const auto& b = chain[i];
    const Digest expected_prev = i == 0 ? kZeroDigest : chain[i - 1].hash;
    if (b.prev_hash != expected_prev) return ChainViolation{i, "prev_hash mismatch"};
    if (b.height != i) return ChainViolation{i, "height mismatch"};
    if (i > 0 && b.timestamp <= chain[i - 1].timestamp) {
      return ChainViolation{i, "non-monotonic timestamp"};
    }
    if (compute_meta_block_hash(b.height, b.prev_hash, b.timestamp, b.records) != b.hash) {
      return ChainViolation{i, "hash mismatch"};
    }
    for (const auto& r : b.records) {
      if (auto why = record_defect(r)) return ChainViolation{i, "malformed record " + r.transfer_id + ": " + *why};
      if (!seen.insert(r.transfer_id).second) {
        return ChainViolation{i, "duplicate transfer id " + r.transfer_id};
      }
    }
  }
  return std::nullopt;
}

namespace vocab {

std::string term(std::string_view local) {
  std::string s(kNamespace);
  s += local;
  return s;
}

std::string account_iri(const AccountId& a) { return term("account/" + a.ledger + "/" + a.name); }
std::string ledger_iri(const LedgerId& l) { return term("ledger/" + l); }
std::string facilitator_iri(std::string_view name) { return term("facilitator/" + std::string(name)); }
std::string transfer_iri(std::string_view id) { return term("transfer/" + std::string(id)); }
std::string verdict_iri(std::string_view id, std::string_view facilitator) {
  return term("transfer/" + std::string(id) + "/verdict/" + std::string(facilitator));
}
std::string outcome_iri(Outcome o) { return term(to_string(o)); }

}  // namespace vocab

std::vector<rdf::Triple> to_triples(const OutcomeRecord& r) {
  using rdf::Iri;
  using rdf::integer_literal;
  const Iri t{vocab::transfer_iri(r.transfer_id)};
  auto p = [](std::string_view local) { return Iri{vocab::term(local)}; };

  std::vector<rdf::Triple> out;
  out.reserve(9 + 2 * r.verdicts.size() + r.fee_shares.size());
  out.push_back({t, p("hasPayer"), Iri{vocab::account_iri(r.payer)}});
  out.push_back({t, p("hasPayee"), Iri{vocab::account_iri(r.payee)}});
  out.push_back({t, p("hasSourceLedger"), Iri{vocab::ledger_iri(r.source_ledger)}});
  out.push_back({t, p("hasDestLedger"), Iri{vocab::ledger_iri(r.dest_ledger)}});
  out.push_back({t, p("hasAmountSrc"), integer_literal(r.amount_src.value())});
  out.push_back({t, p("hasAmountDst"), integer_literal(r.amount_dst.value())});
  out.push_back({t, p("hasFee"), integer_literal(r.fee_total.value())});
  out.push_back({t, p("hasOutcome"), Iri{vocab::outcome_iri(r.outcome)}});
  out.push_back({t, p("atTick"), integer_literal(r.tick)});
  for (const auto& v : r.verdicts) {
    const Iri vr{vocab::verdict_iri(r.transfer_id, v.facilitator)};
    out.push_back({vr, p("byFacilitator"), Iri{vocab::facilitator_iri(v.facilitator)}});
    out.push_back({vr, p("attested"), rdf::string_literal(std::string(to_string(v.attested)))});
  }
  for (const auto& s : r.fee_shares) {
    out.push_back({Iri{vocab::verdict_iri(r.transfer_id, s.facilitator)}, p("feeShare"),
                   integer_literal(s.amount.value())});
  }
  return out;
}

std::vector<rdf::Triple> meta_triples(const MetaLedger& meta) {
  std::vector<rdf::Triple> out;
  for (const auto* r : meta.sealed_records()) {
    auto ts = to_triples(*r);
    out.insert(out.end(), std::make_move_iterator(ts.begin()), std::make_move_iterator(ts.end()));
  }
  return out;
}

std::vector<HistoryEntry> facilitator_history(const MetaLedger& meta, const std::string& facilitator) {
  std::vector<HistoryEntry> out;
  for (const auto* r : meta.sealed_records()) {
    for (const auto& v : r->verdicts) {
      if (v.facilitator == facilitator) out.push_back({r->transfer_id, v.attested, r->outcome, r->tick});
    }
  }
  return out;
}

}  // namespace uberledger
