#include "uberledger/snapshot.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace uberledger {

using nlohmann::json;

namespace {

json account_json(const AccountId& a) { return json::array({a.ledger, a.name}); }

AccountId account_from(const json& j) { return {j.at(0).get<std::string>(), j.at(1).get<std::string>()}; }

json tx_json(const Transaction& tx) {
  return {{"kind", to_string(tx.kind)},       {"payer", account_json(tx.payer)},
          {"amount", tx.amount.value()},      {"payee", account_json(tx.payee)},
          {"fee", tx.fee.value()},            {"seq", tx.seq},
          {"ref", tx.ref},                    {"expiry", tx.expiry}};
}

Transaction tx_from(const json& j) {
  auto kind = tx_kind_from_string(j.at("kind").get<std::string>());
  if (!kind) throw SnapshotError("unknown transaction kind " + j.at("kind").dump());
  return Transaction{account_from(j.at("payer")), Amount{j.at("amount").get<std::uint64_t>()},
                     account_from(j.at("payee")), Amount{j.at("fee").get<std::uint64_t>()},
                     j.at("seq").get<std::uint64_t>(), *kind, j.at("ref").get<std::string>(),
                     j.at("expiry").get<Tick>()};
}

json ledger_json(const Ledger& l) {
  json blocks = json::array();
  for (const auto& b : l.chain()) {
    json txs = json::array();
    for (const auto& tx : b.txs) txs.push_back(tx_json(tx));
    blocks.push_back({{"height", b.height},
                      {"prev_hash", to_hex(b.prev_hash)},
                      {"timestamp", b.timestamp},
                      {"txs", std::move(txs)},
                      {"hash", to_hex(b.hash)}});
  }
  const auto& st = l.state();
  json balances = json::array();
  for (const auto& [a, amt] : st.balances) balances.push_back({account_json(a), amt.value()});
  json seqs = json::array();
  for (const auto& [a, s] : st.next_seq) seqs.push_back({account_json(a), s});
  json escrows = json::array();
  for (const auto& [id, e] : st.escrows) {
    escrows.push_back({{"id", id}, {"owner", account_json(e.owner)}, {"amount", e.amount.value()}, {"expiry", e.expiry}});
  }
  return {{"id", l.id()},
          {"chain", std::move(blocks)},
          {"state",
           {{"balances", std::move(balances)},
            {"next_seq", std::move(seqs)},
            {"escrows", std::move(escrows)},
            {"closed_escrows", st.closed_escrows},
            {"supply", st.supply.value()}}}};
}

Ledger ledger_from(const json& j) {
  std::vector<Block> chain;
  for (const auto& jb : j.at("chain")) {
    Block b;
    b.height = jb.at("height").get<std::uint64_t>();
    b.prev_hash = digest_from_hex(jb.at("prev_hash").get<std::string>());
    b.timestamp = jb.at("timestamp").get<Tick>();
    for (const auto& jt : jb.at("txs")) b.txs.push_back(tx_from(jt));
    b.hash = digest_from_hex(jb.at("hash").get<std::string>());
    chain.push_back(std::move(b));
  }
  const auto& js = j.at("state");
  LedgerState st;
  for (const auto& e : js.at("balances")) st.balances[account_from(e.at(0))] = Amount{e.at(1).get<std::uint64_t>()};
  for (const auto& e : js.at("next_seq")) st.next_seq[account_from(e.at(0))] = e.at(1).get<std::uint64_t>();
  for (const auto& e : js.at("escrows")) {
    st.escrows[e.at("id").get<std::string>()] =
        Escrow{account_from(e.at("owner")), Amount{e.at("amount").get<std::uint64_t>()}, e.at("expiry").get<Tick>()};
  }
  st.closed_escrows = js.at("closed_escrows").get<std::set<std::string>>();
  st.supply = Amount{js.at("supply").get<std::uint64_t>()};
  return Ledger::restore(j.at("id").get<std::string>(), std::move(chain), std::move(st));
}

json record_json(const OutcomeRecord& r) {
  json verdicts = json::array();
  for (const auto& v : r.verdicts) verdicts.push_back({v.facilitator, to_string(v.attested)});
  json shares = json::array();
  for (const auto& s : r.fee_shares) shares.push_back({s.facilitator, s.amount.value()});
  return {{"transfer_id", r.transfer_id},
          {"source_ledger", r.source_ledger},
          {"dest_ledger", r.dest_ledger},
          {"payer", account_json(r.payer)},
          {"payee", account_json(r.payee)},
          {"amount_src", r.amount_src.value()},
          {"amount_dst", r.amount_dst.value()},
          {"fee_total", r.fee_total.value()},
          {"outcome", to_string(r.outcome)},
          {"verdicts", std::move(verdicts)},
          {"fee_shares", std::move(shares)},
          {"tick", r.tick}};
}

OutcomeRecord record_from(const json& j) {
  OutcomeRecord r;
  r.transfer_id = j.at("transfer_id").get<std::string>();
  r.source_ledger = j.at("source_ledger").get<std::string>();
  r.dest_ledger = j.at("dest_ledger").get<std::string>();
  r.payer = account_from(j.at("payer"));
  r.payee = account_from(j.at("payee"));
  r.amount_src = Amount{j.at("amount_src").get<std::uint64_t>()};
  r.amount_dst = Amount{j.at("amount_dst").get<std::uint64_t>()};
  r.fee_total = Amount{j.at("fee_total").get<std::uint64_t>()};
  auto outcome = outcome_from_string(j.at("outcome").get<std::string>());
  if (!outcome) throw SnapshotError("unknown outcome in record " + r.transfer_id);
  r.outcome = *outcome;
  for (const auto& v : j.at("verdicts")) {
    auto a = attestation_from_string(v.at(1).get<std::string>());
    if (!a) throw SnapshotError("unknown attestation in record " + r.transfer_id);
    r.verdicts.push_back({v.at(0).get<std::string>(), *a});
  }
  for (const auto& s : j.at("fee_shares")) {
    r.fee_shares.push_back({s.at(0).get<std::string>(), Amount{s.at(1).get<std::uint64_t>()}});
  }
  r.tick = j.at("tick").get<Tick>();
  return r;
}

}  // namespace

std::string snapshot_to_string(const World& world) {
  json ledgers = json::array();
  for (const auto& [_, l] : world.ledgers) ledgers.push_back(ledger_json(l));

  json meta = json::array();
  for (const auto& b : world.meta.chain()) {
    json records = json::array();
    for (const auto& r : b.records) records.push_back(record_json(r));
    meta.push_back({{"height", b.height},
                    {"prev_hash", to_hex(b.prev_hash)},
                    {"timestamp", b.timestamp},
                    {"records", std::move(records)},
                    {"hash", to_hex(b.hash)}});
  }

  json facs = json::array();
  for (const auto& f : world.facilitators) {
    json accounts = json::array();
    for (const auto& [_, a] : f.accounts) accounts.push_back(account_json(a));
    auto b = world.behaviors.find(f.name);
    facs.push_back({{"name", f.name},
                    {"accounts", std::move(accounts)},
                    {"fee_bid", f.fee_bid.value()},
                    {"behavior", b == world.behaviors.end() ? "honest" : to_string(b->second)}});
  }

  json trust = json::array();
  for (std::size_t i = 0; i < world.trust.ids.size(); ++i) {
    trust.push_back({world.trust.ids[i], world.trust.t(static_cast<Eigen::Index>(i))});
  }

  json doc = {{"format", "uberledger-world/1"},
              {"clock", world.clock},
              {"ledgers", std::move(ledgers)},
              {"meta_chain", std::move(meta)},
              {"facilitators", std::move(facs)},
              {"trust", {{"entries", std::move(trust)},
                         {"iterations", world.trust.iterations},
                         {"converged", world.trust.converged}}},
              {"epoch_iterations", world.epoch_iterations}};
  return doc.dump(1) + "\n";
}

World snapshot_from_string(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("format") != "uberledger-world/1") throw SnapshotError("unsupported snapshot format");
    World w;
    w.clock = doc.at("clock").get<Tick>();
    for (const auto& jl : doc.at("ledgers")) {
      auto l = ledger_from(jl);
      auto id = l.id();
      w.ledgers.emplace(std::move(id), std::move(l));
    }
    std::vector<MetaBlock> meta;
    for (const auto& jb : doc.at("meta_chain")) {
      MetaBlock b;
      b.height = jb.at("height").get<std::uint64_t>();
      b.prev_hash = digest_from_hex(jb.at("prev_hash").get<std::string>());
      b.timestamp = jb.at("timestamp").get<Tick>();
      for (const auto& jr : jb.at("records")) b.records.push_back(record_from(jr));
      b.hash = digest_from_hex(jb.at("hash").get<std::string>());
      meta.push_back(std::move(b));
    }
    w.meta = MetaLedger::restore(std::move(meta));
    for (const auto& jf : doc.at("facilitators")) {
      Facilitator f{jf.at("name").get<std::string>(), {}, Amount{jf.at("fee_bid").get<std::uint64_t>()}};
      for (const auto& ja : jf.at("accounts")) {
        auto a = account_from(ja);
        f.accounts.emplace(a.ledger, a);
      }
      auto model = fault_model_from_string(jf.at("behavior").get<std::string>());
      if (!model) throw SnapshotError("unknown behavior for facilitator " + f.name);
      w.behaviors.emplace(f.name, *model);
      w.facilitators.push_back(std::move(f));
    }
    const auto& jt = doc.at("trust");
    const auto& entries = jt.at("entries");
    w.trust.t.resize(static_cast<Eigen::Index>(entries.size()));
    for (std::size_t i = 0; i < entries.size(); ++i) {
      w.trust.ids.push_back(entries[i].at(0).get<std::string>());
      w.trust.t(static_cast<Eigen::Index>(i)) = entries[i].at(1).get<double>();
    }
    w.trust.iterations = jt.at("iterations").get<std::size_t>();
    w.trust.converged = jt.at("converged").get<bool>();
    w.epoch_iterations = doc.at("epoch_iterations").get<std::vector<std::size_t>>();
    return w;
  } catch (const json::exception& e) {
    throw SnapshotError(std::string("malformed snapshot: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw SnapshotError(std::string("malformed snapshot: ") + e.what());
  } catch (const LedgerError& e) {
    throw SnapshotError(std::string("malformed snapshot: ") + e.what());
  } catch (const MetaLedgerError& e) {
    throw SnapshotError(std::string("malformed snapshot: ") + e.what());
  }
}

void save_snapshot(const World& world, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw SnapshotError("cannot write " + file.string());
  out << snapshot_to_string(world);
  if (!out) throw SnapshotError("write failed for " + file.string());
}

World load_snapshot(const std::filesystem::path& path) {
  std::filesystem::path file = path;
  std::error_code ec;
  if (std::filesystem::is_directory(path, ec)) file = path / kSnapshotFile;
  std::ifstream in(file, std::ios::binary);
  if (!in) throw SnapshotError("no snapshot found at " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return snapshot_from_string(ss.str());
}

}  // namespace uberledger
