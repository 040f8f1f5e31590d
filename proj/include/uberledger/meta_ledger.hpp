#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uberledger/digest.hpp"
#include "uberledger/interchain.hpp"
#include "uberledger/ledger.hpp"
#include "uberledger/ntriples.hpp"
#include "uberledger/types.hpp"

namespace uberledger {

enum class Outcome : std::uint8_t { released = 0, forfeited = 1 };
enum class Attestation : std::uint8_t { yes = 0, no = 1, absent = 2 };

std::string_view to_string(Outcome o);
std::string_view to_string(Attestation a);
std::optional<Outcome> outcome_from_string(std::string_view s);
std::optional<Attestation> attestation_from_string(std::string_view s);

struct VerdictEntry {
  std::string facilitator;
  Attestation attested = Attestation::absent;
  bool operator==(const VerdictEntry&) const = default;
};

struct FeeShare {
  std::string facilitator;
  Amount amount;
  bool operator==(const FeeShare&) const = default;
};

/// Immutable account of one finished transfer and every group member's
/// verdict. Verdicts and fee shares are sorted by facilitator name.
struct OutcomeRecord {
  std::string transfer_id;
  LedgerId source_ledger;
  LedgerId dest_ledger;
  AccountId payer;
  AccountId payee;
  Amount amount_src;
  Amount amount_dst;
  Amount fee_total;
  Outcome outcome = Outcome::forfeited;
  std::vector<VerdictEntry> verdicts;
  std::vector<FeeShare> fee_shares;
  Tick tick = 0;

  bool operator==(const OutcomeRecord&) const = default;
};

/// nullopt when well-formed, otherwise the first broken invariant.
std::optional<std::string> record_defect(const OutcomeRecord& r);

/// Record for a terminal transfer; members without a verdict are absent.
OutcomeRecord make_outcome_record(const TransferState& state, Tick tick);

void encode(CanonicalEncoder& enc, const OutcomeRecord& r);

struct MetaBlock {
  std::uint64_t height = 0;
  Digest prev_hash{};
  Tick timestamp = 0;
  std::vector<OutcomeRecord> records;
  Digest hash{};

  bool operator==(const MetaBlock&) const = default;
};

Digest compute_meta_block_hash(std::uint64_t height, const Digest& prev_hash, Tick timestamp,
                               std::span<const OutcomeRecord> records);

class MetaLedgerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The meta-chain: a single sequencer appends OutcomeRecords and seals them
/// into hash-chained MetaBlocks. Height 0 is an empty genesis block.
class MetaLedger {
 public:
  explicit MetaLedger(Tick genesis_timestamp = 0);

  static MetaLedger restore(std::vector<MetaBlock> chain);

  /// Buffers a record for the next seal. Throws on duplicate transfer id or
  /// malformed record.
  void record_outcome(OutcomeRecord record);

  const MetaBlock& seal(Tick timestamp);

  /// Sealed record first, then pending.
  const OutcomeRecord* find(const std::string& transfer_id) const;

  const std::vector<MetaBlock>& chain() const { return chain_; }
  const MetaBlock& tip() const { return chain_.back(); }
  const std::vector<OutcomeRecord>& pending() const { return pending_; }

  /// All sealed records in chain order.
  std::vector<const OutcomeRecord*> sealed_records() const;
  std::size_t sealed_record_count() const;

 private:
  std::vector<MetaBlock> chain_;
  std::vector<OutcomeRecord> pending_;
  std::set<std::string> ids_;
};

std::optional<ChainViolation> verify_meta_chain(const MetaLedger& meta);

namespace vocab {
inline constexpr std::string_view kNamespace = "http://uberledger.example/ns#";

std::string term(std::string_view local);  // kNamespace + local
std::string account_iri(const AccountId& a);
std::string ledger_iri(const LedgerId& l);
std::string facilitator_iri(std::string_view name);
std::string transfer_iri(std::string_view transfer_id);
std::string verdict_iri(std::string_view transfer_id, std::string_view facilitator);
std::string outcome_iri(Outcome o);
}  // namespace vocab

/// 9 + 2 * |verdicts| + |fee_shares| triples, no blank nodes.
std::vector<rdf::Triple> to_triples(const OutcomeRecord& r);

/// Triples for every sealed record.
std::vector<rdf::Triple> meta_triples(const MetaLedger& meta);

struct HistoryEntry {
  std::string transfer_id;
  Attestation attested = Attestation::absent;
  Outcome outcome = Outcome::forfeited;
  Tick tick = 0;
  bool operator==(const HistoryEntry&) const = default;
};

/// Every sealed verdict cast by `facilitator`, in meta-chain order.
std::vector<HistoryEntry> facilitator_history(const MetaLedger& meta, const std::string& facilitator);

}  // namespace uberledger
