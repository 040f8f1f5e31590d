#include <doctest.h>

#include <sstream>

#include "uberledger/reputation.hpp"
#include "uberledger/scenario_config.hpp"
#include "uberledger/simulator.hpp"
#include "uberledger/snapshot.hpp"

using namespace uberledger;

namespace {

std::string config_text(const std::vector<std::string>& behaviors, std::uint64_t transfers, std::uint64_t seed = 1,
                        std::uint32_t n = 4, std::uint32_t f = 1) {
  std::ostringstream o;
  o << "seed = " << seed << "\n\n";
  o << "[ledger]\nid = L1\naccount = alice:100000\naccount = carol:100000\n\n";
  o << "[ledger]\nid = L2\naccount = bob:100000\naccount = dave:100000\n\n";
  for (std::size_t i = 0; i < behaviors.size(); ++i) {
    o << "[facilitator]\nname = f" << i + 1 << "\nledgers = L1,L2\nfund = 100000\nfee_bid = " << 1 + i % 3
      << "\nbehavior = " << behaviors[i] << "\n\n";
  }
  o << "[group]\nn = " << n << "\nf = " << f << "\n\n";
  o << "[reputation]\ndamping = 0.15\nepoch = 10\n\n";
  o << "[workload]\ntransfers = " << transfers << "\namount_min = 10\namount_max = 500\nrate = 2/1\n";
  return o.str();
}

}  // namespace

TEST_CASE("scenario parsing") {
  const auto cfg = parse_scenario(config_text({"honest", "crash", "false-attest", "collude:r1", "abscond"}, 7, 42));
  CHECK(cfg.seed == 42);
  REQUIRE(cfg.ledgers.size() == 2);
  CHECK(cfg.ledgers[0].accounts[1] == std::pair<std::string, Amount>{"carol", Amount{100000}});
  REQUIRE(cfg.facilitators.size() == 5);
  CHECK(cfg.facilitators[3].fault == FaultModel{Behavior::collude, "r1"});
  CHECK(cfg.facilitators[1].fee_bid.value() == 2);
  CHECK(cfg.workload.rate_num == 2);
  CHECK(cfg.workload.transfers == 7);
  CHECK(effective_pretrusted(cfg).size() == 5);
  CHECK_NOTHROW(validate(cfg));
}

TEST_CASE("scenario errors") {
  auto kind_of = [](const std::string& text) {
    try {
      validate(parse_scenario(text));
    } catch (const ConfigError& e) {
      return e.kind();
    }
    FAIL("expected ConfigError");
    return ConfigError::Kind::io;
  };
  const auto base = config_text({"honest", "honest", "honest", "honest"}, 5);
  CHECK(kind_of(base + "bogus line\n") == ConfigError::Kind::syntax);
  CHECK(kind_of(base + "[nonsense]\n") == ConfigError::Kind::syntax);
  CHECK(kind_of(config_text({"honest", "honest", "honest"}, 5, 1, 3, 1)) == ConfigError::Kind::bound_violation);
  CHECK(kind_of(config_text({"honest", "honest", "honest"}, 5)) == ConfigError::Kind::invalid);  // too few
  CHECK(kind_of(config_text({"honest", "honest", "honest", "sleepy"}, 5)) == ConfigError::Kind::syntax);
  try {
    load_scenario("/nonexistent/dir/x.conf");
    FAIL("expected io error");
  } catch (const ConfigError& e) {
    CHECK(e.kind() == ConfigError::Kind::io);
    CHECK(std::string(e.what()).find("/nonexistent/dir/x.conf") != std::string::npos);
  }
}

TEST_CASE("fault models print and parse") {
  for (const char* s : {"honest", "crash", "false-attest", "abscond", "collude:ring"}) {
    const auto m = fault_model_from_string(s);
    REQUIRE(m.has_value());
    CHECK(to_string(*m) == s);
  }
  CHECK_FALSE(fault_model_from_string("collude:").has_value());
  CHECK_FALSE(fault_model_from_string("evil").has_value());
}

TEST_CASE("behavior verdicts") {
  const TransferRequest tr{"t", {"L1", "alice"}, {"L2", "bob"}, Amount{1}, Amount{1}, Amount{0}, 5};
  const RingContext none;
  CHECK(behavior_verdict({Behavior::honest, ""}, Verdict::yes, tr, none) == Attestation::yes);
  CHECK(behavior_verdict({Behavior::honest, ""}, Verdict::no, tr, none) == Attestation::no);
  CHECK(behavior_verdict({Behavior::false_attest, ""}, Verdict::yes, tr, none) == Attestation::no);
  CHECK(behavior_verdict({Behavior::false_attest, ""}, Verdict::no, tr, none) == Attestation::yes);
  CHECK(behavior_verdict({Behavior::crash, ""}, Verdict::yes, tr, none) == Attestation::absent);
  CHECK(behavior_verdict({Behavior::abscond, ""}, Verdict::no, tr, none) == Attestation::yes);

  RingContext majority{{"f1", "f2", "f3"}, {"f1", "f2", "f3", "f4"}};
  CHECK(behavior_verdict({Behavior::collude, "r"}, Verdict::no, tr, majority) == Attestation::yes);
  RingContext minority{{"f1", "f2"}, {"f1", "f2", "f3", "f4"}};
  CHECK(behavior_verdict({Behavior::collude, "r"}, Verdict::yes, tr, minority) == Attestation::no);
  RingContext payer_mate{{"f1", "alice"}, {"f1", "f2", "f3", "f4"}};
  CHECK(behavior_verdict({Behavior::collude, "r"}, Verdict::no, tr, payer_mate) == Attestation::yes);
}

TEST_CASE("all-honest run releases every transfer and conserves supply") {
  const auto r = run_scenario(parse_scenario(config_text({"honest", "honest", "honest", "honest", "honest"}, 50)));
  CHECK(r.metrics.released == 50);
  CHECK(r.metrics.forfeited == 0);
  for (const auto& [id, ok] : r.metrics.conserved) CHECK(ok);
  CHECK(audit_atomicity(r.world).empty());
  for (const auto& [id, l] : r.world.ledgers) CHECK_FALSE(verify_chain(l).has_value());
  CHECK_FALSE(verify_meta_chain(r.world.meta).has_value());

  std::uint64_t selections = 0;
  for (const auto& f : r.metrics.facilitators) selections += f.selections;
  CHECK(selections == 4 * 50);
  CHECK(r.world.trust.t.sum() == doctest::Approx(1.0));
}

TEST_CASE("f crashed members per group still release everything") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = run_scenario(parse_scenario(config_text({"honest", "crash", "honest", "honest"}, 30, seed)));
    CHECK(r.metrics.released == 30);
    CHECK(r.metrics.forfeited == 0);
    const auto h = facilitator_history(r.world.meta, "f2");
    for (const auto& e : h) CHECK(e.attested == Attestation::absent);
  }
}

TEST_CASE("fault-heavy runs stay atomic and conserved") {
  const std::vector<std::string> mix{"honest", "honest", "false-attest", "abscond", "crash", "collude:r", "collude:r"};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = run_scenario(parse_scenario(config_text(mix, 40, seed)));
    CHECK(r.metrics.released + r.metrics.forfeited == 40);
    for (const auto& [id, ok] : r.metrics.conserved) CHECK(ok);
    CHECK(audit_atomicity(r.world).empty());
  }
}

TEST_CASE("runs are deterministic and metrics are recomputable from the snapshot") {
  const auto cfg = parse_scenario(config_text({"honest", "false-attest", "honest", "crash", "honest"}, 25, 9));
  const auto a = run_scenario(cfg);
  const auto b = run_scenario(cfg);
  std::ostringstream ca, cb;
  write_metrics_csv(ca, a.metrics);
  write_metrics_csv(cb, b.metrics);
  CHECK(ca.str() == cb.str());
  CHECK(rdf::serialize_ntriples(meta_triples(a.world.meta)) == rdf::serialize_ntriples(meta_triples(b.world.meta)));

  const World restored = snapshot_from_string(snapshot_to_string(a.world));
  CHECK(collect_metrics(restored) == a.metrics);
  CHECK(snapshot_to_string(restored) == snapshot_to_string(a.world));

  auto other = cfg;
  other.seed = 10;
  std::ostringstream cc;
  write_metrics_csv(cc, run_scenario(other).metrics);
  CHECK(cc.str() != ca.str());
}

TEST_CASE("metrics csv layout") {
  const auto r = run_scenario(parse_scenario(config_text({"honest", "honest", "honest", "honest"}, 3)));
  std::ostringstream o;
  write_metrics_csv(o, r.metrics);
  const auto text = o.str();
  CHECK(text.rfind("scope,subject,metric,value\nrun,all,released,3\nrun,all,forfeited,0\n", 0) == 0);
  CHECK(text.find("ledger,L1,conserved,true\n") != std::string::npos);
  CHECK(text.find("facilitator,f1,selections,3\n") != std::string::npos);
}

TEST_CASE("snapshot rejects malformed input") {
  CHECK_THROWS_AS(snapshot_from_string("not json"), SnapshotError);
  CHECK_THROWS_AS(snapshot_from_string("{}"), SnapshotError);
  CHECK_THROWS_AS(snapshot_from_string(R"({"format":"something-else/9"})"), SnapshotError);
  CHECK_THROWS_AS(load_snapshot("/no/such/snapshot/dir"), SnapshotError);

  const auto r = run_scenario(parse_scenario(config_text({"honest", "honest", "honest", "honest"}, 2)));
  auto text = snapshot_to_string(r.world);
  const auto pos = text.find("\"honest\"");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 8, "\"sneaky\"");
  CHECK_THROWS_AS(snapshot_from_string(text), SnapshotError);
}

TEST_CASE("atomicity audit flags a record that disagrees with its ledger legs") {
  auto r = run_scenario(parse_scenario(config_text({"honest", "honest", "honest", "honest"}, 5)));
  REQUIRE(audit_atomicity(r.world).empty());
  auto chain = r.world.meta.chain();
  for (auto& b : chain) {
    if (b.records.empty()) continue;
    b.records[0].outcome = Outcome::forfeited;
    b.records[0].fee_shares.clear();
    break;
  }
  r.world.meta = MetaLedger::restore(chain);
  CHECK(audit_atomicity(r.world).size() == 1);
}
