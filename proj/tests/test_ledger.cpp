#include <doctest.h>

#include <map>
#include <vector>

#include "uberledger/ledger.hpp"
#include "uberledger/rng.hpp"

using namespace uberledger;

namespace {

const AccountId alice{"L1", "alice"};
const AccountId bob{"L1", "bob"};
const AccountId carol{"L1", "carol"};

Ledger basic_ledger() {
  const std::vector<std::pair<AccountId, Amount>> alloc{{alice, Amount{100}}, {bob, Amount{0}}};
  return Ledger::genesis("L1", alloc);
}

Transaction pay(const AccountId& from, const AccountId& to, std::uint64_t amount, std::uint64_t fee,
                std::uint64_t seq) {
  return Transaction{from, Amount{amount}, to, Amount{fee}, seq, TxKind::transfer, {}, 0};
}

// Supply check straight from the definition.
std::uint64_t circulating(const Ledger& l) {
  std::uint64_t total = 0;
  for (const auto& [_, b] : l.state().balances) total += b.value();
  for (const auto& [_, e] : l.state().escrows) total += e.amount.value();
  return total;
}

}  // namespace

TEST_CASE("genesis allocates balances and fixes supply") {
  auto l = basic_ledger();
  CHECK(l.balance_of(alice).value() == 100);
  CHECK(l.balance_of(bob).value() == 0);
  CHECK(l.supply().value() == 100);
  CHECK(l.chain().size() == 1);
  CHECK(l.tip().height == 0);
  CHECK(l.tip().prev_hash == kZeroDigest);
  CHECK(l.tip().txs.size() == 2);
  CHECK(l.tip().txs[0].kind == TxKind::coinbase);
  CHECK_FALSE(verify_chain(l).has_value());
}

TEST_CASE("genesis rejects empty, foreign and duplicate allocations") {
  std::vector<std::pair<AccountId, Amount>> none;
  CHECK_THROWS_AS(Ledger::genesis("L1", none), LedgerError);
  std::vector<std::pair<AccountId, Amount>> foreign{{{"L2", "carol"}, Amount{5}}};
  CHECK_THROWS_AS(Ledger::genesis("L1", foreign), LedgerError);
  std::vector<std::pair<AccountId, Amount>> dup{{alice, Amount{1}}, {alice, Amount{2}}};
  CHECK_THROWS_AS(Ledger::genesis("L1", dup), LedgerError);
  std::vector<std::pair<AccountId, Amount>> reserved{{{"L1", "$mint"}, Amount{1}}};
  CHECK_THROWS_AS(Ledger::genesis("L1", reserved), LedgerError);
}

TEST_CASE("transfer with fee seals into exact balances") {
  auto l = basic_ledger();
  CHECK(l.apply_transaction(pay(alice, bob, 30, 1, 0)) == TxStatus::accepted);
  CHECK(l.balance_of(alice).value() == 100);  // unchanged until sealing
  l.seal_block(7);
  CHECK(l.balance_of(alice).value() == 69);
  CHECK(l.balance_of(bob).value() == 30);
  CHECK(l.balance_of(l.fee_sink()).value() == 1);
  CHECK(circulating(l) == 100);
}

TEST_CASE("replayed sequence number is rejected") {
  auto l = basic_ledger();
  const auto tx = pay(alice, bob, 10, 0, 0);
  CHECK(l.apply_transaction(tx) == TxStatus::accepted);
  CHECK(l.apply_transaction(tx) == TxStatus::bad_sequence);
  l.seal_block(1);
  CHECK(l.apply_transaction(tx) == TxStatus::bad_sequence);
  CHECK(l.apply_transaction(pay(alice, bob, 10, 0, 5)) == TxStatus::bad_sequence);  // gap
}

TEST_CASE("admission errors") {
  auto l = basic_ledger();
  CHECK(l.apply_transaction(pay(alice, bob, 200, 0, 0)) == TxStatus::insufficient_funds);
  CHECK(l.apply_transaction(pay(alice, {"L2", "bob"}, 1, 0, 0)) == TxStatus::cross_ledger);
  CHECK(l.apply_transaction(pay(carol, bob, 1, 0, 0)) == TxStatus::unknown_payer);
  auto cb = pay(alice, bob, 1, 0, 0);
  cb.kind = TxKind::coinbase;
  CHECK(l.apply_transaction(cb) == TxStatus::malformed);
  CHECK(l.release_escrow("nope", bob, Amount{1}) == TxStatus::unknown_escrow);
}

TEST_CASE("pending debits count against later admissions") {
  auto l = basic_ledger();
  CHECK(l.apply_transaction(pay(alice, bob, 60, 0, 0)) == TxStatus::accepted);
  CHECK(l.apply_transaction(pay(alice, bob, 60, 0, 1)) == TxStatus::insufficient_funds);
  CHECK(l.apply_transaction(pay(alice, bob, 40, 0, 1)) == TxStatus::accepted);
  l.seal_block(1);
  CHECK(l.balance_of(alice).value() == 0);
  CHECK(l.balance_of(bob).value() == 100);
}

TEST_CASE("seal_block extends the chain and rejects non-monotonic time") {
  auto l = basic_ledger();
  l.submit_transfer(alice, bob, Amount{1});
  l.submit_transfer(alice, bob, Amount{2});
  const auto genesis_hash = l.tip().hash;
  const Block& b = l.seal_block(7);
  CHECK(b.height == 1);
  CHECK(b.txs.size() == 2);
  CHECK(b.prev_hash == genesis_hash);
  CHECK(b.hash == compute_block_hash(b.height, b.prev_hash, b.timestamp, b.txs));
  CHECK_THROWS_AS(l.seal_block(7), LedgerError);
  CHECK_THROWS_AS(l.seal_block(3), LedgerError);
  CHECK(l.pending().empty());
  l.seal_block(8);  // empty blocks advance time
  CHECK(l.tip().txs.empty());
}

TEST_CASE("expired escrow is refunded in the sealing block") {
  auto l = basic_ledger();
  CHECK(l.lock_escrow(alice, Amount{44}, "x1", 5) == TxStatus::accepted);
  l.seal_block(2);
  CHECK(l.balance_of(alice).value() == 56);
  REQUIRE(l.escrow("x1").has_value());
  CHECK(l.escrow("x1")->amount.value() == 44);
  CHECK(circulating(l) == 100);

  const Block& b = l.seal_block(9);
  REQUIRE(b.txs.size() == 1);
  CHECK(b.txs[0].kind == TxKind::escrow_refund);
  CHECK(b.txs[0].payee == alice);
  CHECK(l.balance_of(alice).value() == 100);
  CHECK_FALSE(l.escrow("x1").has_value());
  CHECK_FALSE(verify_chain(l).has_value());

  // Replay oracle: re-derive balances by hand from the sealed transactions.
  std::map<AccountId, std::int64_t> replay;
  for (const auto& blk : l.chain()) {
    for (const auto& tx : blk.txs) {
      if (tx.kind == TxKind::coinbase || tx.kind == TxKind::escrow_release || tx.kind == TxKind::escrow_refund) {
        replay[tx.payee] += static_cast<std::int64_t>(tx.amount.value());
      } else {
        replay[tx.payer] -= static_cast<std::int64_t>(tx.amount.value() + tx.fee.value());
        if (tx.kind == TxKind::transfer) replay[tx.payee] += static_cast<std::int64_t>(tx.amount.value());
      }
    }
  }
  CHECK(replay[alice] == 100);
  CHECK(replay[bob] == 0);
}

TEST_CASE("escrow ids are single-use and releases cannot exceed the escrow") {
  auto l = basic_ledger();
  CHECK(l.lock_escrow(alice, Amount{10}, "e", 50) == TxStatus::accepted);
  CHECK(l.lock_escrow(alice, Amount{10}, "e", 50) == TxStatus::malformed);
  CHECK(l.release_escrow("e", bob, Amount{11}) == TxStatus::insufficient_funds);
  CHECK(l.release_escrow("e", bob, Amount{10}) == TxStatus::accepted);
  l.seal_block(1);
  CHECK(l.balance_of(bob).value() == 10);
  CHECK(l.lock_escrow(alice, Amount{1}, "e", 50) == TxStatus::malformed);
}

TEST_CASE("verify_chain on an untampered 10-block chain") {
  auto l = basic_ledger();
  for (Tick t = 1; t <= 9; ++t) l.submit_transfer(alice, bob, Amount{t});
  for (Tick t = 1; t <= 9; ++t) {
    l.submit_transfer(alice, bob, Amount{1});
    l.seal_block(t);
  }
  CHECK(l.chain().size() == 10);
  CHECK_FALSE(verify_chain(l).has_value());
}

TEST_CASE("verify_chain locates tampering") {
  auto l = basic_ledger();
  for (Tick t = 1; t <= 9; ++t) {
    l.submit_transfer(alice, bob, Amount{1});
    l.seal_block(t);
  }

  SUBCASE("flipped amount -> hash mismatch at that height") {
    auto chain = l.chain();
    chain[4].txs[0].amount = Amount{2};
    auto v = verify_chain(Ledger::restore("L1", chain, l.state()));
    REQUIRE(v.has_value());
    CHECK(v->height == 4);
    CHECK(v->reason == "hash mismatch");
  }
  SUBCASE("reordered blocks -> prev_hash mismatch at first reordered height") {
    auto chain = l.chain();
    std::swap(chain[3], chain[5]);
    auto v = verify_chain(Ledger::restore("L1", chain, l.state()));
    REQUIRE(v.has_value());
    CHECK(v->height == 3);
    CHECK(v->reason == "prev_hash mismatch");
  }
  SUBCASE("recorded state that replay cannot reproduce") {
    auto st = l.state();
    st.balances[bob] = Amount{1000};
    auto v = verify_chain(Ledger::restore("L1", l.chain(), st));
    REQUIRE(v.has_value());
    CHECK(v->height == 9);
  }
  SUBCASE("rehashed forgery still fails replay") {
    auto chain = l.chain();
    chain.back().txs[0].amount = Amount{10'000};
    auto& b = chain.back();
    b.hash = compute_block_hash(b.height, b.prev_hash, b.timestamp, b.txs);
    auto v = verify_chain(Ledger::restore("L1", chain, l.state()));
    REQUIRE(v.has_value());
    CHECK(v->height == 9);
  }
}

TEST_CASE("balance_of unknown account is zero") {
  auto l = basic_ledger();
  CHECK(l.balance_of({"L1", "nobody"}).value() == 0);
  l.submit_transfer(alice, bob, Amount{30});
  l.seal_block(1);
  CHECK(l.balance_of(bob).value() == 30);
}

TEST_CASE("property: random operation sequences conserve supply, replay exactly and never double-spend") {
  const std::vector<AccountId> users{alice, bob, carol};
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    CAPTURE(seed);
    SplitMix64 rng(seed);
    std::vector<std::pair<AccountId, Amount>> alloc;
    for (const auto& u : users) alloc.emplace_back(u, Amount{rng.between(0, 500)});
    auto l = Ledger::genesis("L1", alloc);
    const auto supply = l.supply();
    std::vector<std::string> escrows;
    Tick t = 0;
    for (int step = 0; step < 120; ++step) {
      const auto& payer = users[rng.below(users.size())];
      const auto& payee = users[rng.below(users.size())];
      switch (rng.below(6)) {
        case 0:
        case 1:
          l.submit_transfer(payer, payee, Amount{rng.between(0, 200)}, Amount{rng.between(0, 3)});
          break;
        case 2: {
          // Deliberate replay of an arbitrary sequence number.
          l.apply_transaction(pay(payer, payee, rng.between(0, 50), 0, rng.below(8)));
          break;
        }
        case 3: {
          std::string id = "e" + std::to_string(step);
          if (l.lock_escrow(payer, Amount{rng.between(1, 100)}, id, t + rng.between(1, 10)) == TxStatus::accepted) {
            escrows.push_back(id);
          }
          break;
        }
        case 4:
          if (!escrows.empty()) {
            const auto& id = escrows[rng.below(escrows.size())];
            if (rng.below(2) == 0) {
              l.release_escrow(id, payee, Amount{rng.between(1, 60)});
            } else {
              l.refund_escrow(id);
            }
          }
          break;
        case 5:
          l.seal_block(t += rng.between(1, 3));
          CHECK(l.circulating() == supply);
          break;
      }
    }
    l.seal_block(t + 1);
    CHECK(l.circulating() == supply);
    CHECK(circulating(l) == supply.value());
    CHECK_FALSE(verify_chain(l).has_value());

    // Double-spend exclusion and total order over sealed transactions.
    std::set<std::pair<AccountId, std::uint64_t>> seen;
    Tick prev_ts = 0;
    for (const auto& b : l.chain()) {
      if (b.height > 0) CHECK(b.timestamp > prev_ts);
      prev_ts = b.timestamp;
      for (const auto& tx : b.txs) CHECK(seen.insert({tx.payer, tx.seq}).second);
    }
  }
}
