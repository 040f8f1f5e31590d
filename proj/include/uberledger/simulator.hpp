#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "uberledger/interchain.hpp"
#include "uberledger/ledger.hpp"
#include "uberledger/meta_ledger.hpp"
#include "uberledger/scenario_config.hpp"
#include "uberledger/trust.hpp"

namespace uberledger {

/// Everything a third party needs to audit a run: the chains, the
/// facilitators with their configured behavior, and the trust in force at
/// the end of the run.
struct World {
  std::map<LedgerId, Ledger> ledgers;
  MetaLedger meta;
  std::vector<Facilitator> facilitators;
  std::map<std::string, FaultModel> behaviors;
  GlobalTrustVector<double> trust;
  std::vector<std::size_t> epoch_iterations;
  Tick clock = 0;
};

struct FacilitatorMetrics {
  std::string name;
  std::string behavior;
  std::uint64_t selections = 0;
  std::uint64_t consistent = 0;
  std::uint64_t inconsistent = 0;
  Amount fees_earned{0};
  std::uint64_t trust_ppb = 0;

  bool operator==(const FacilitatorMetrics&) const = default;
};

struct Metrics {
  std::uint64_t released = 0;
  std::uint64_t forfeited = 0;
  std::map<LedgerId, bool> conserved;
  std::vector<FacilitatorMetrics> facilitators;  // sorted by name
  std::vector<std::size_t> epoch_iterations;

  bool operator==(const Metrics&) const = default;
};

struct RunResult {
  Metrics metrics;
  World world;
};

/// Members of the voter's collusion ring and of the transfer's group.
struct RingContext {
  std::set<std::string> ring_members;
  std::vector<std::string> group;
};

/// Verdict a facilitator with behavior `model` casts when an honest
/// facilitator would cast `honest`.
Attestation behavior_verdict(const FaultModel& model, Verdict honest, const TransferRequest& transfer,
                             const RingContext& ring);

/// Executes the scenario deterministically. Throws ConfigError before any
/// execution when the config is invalid.
RunResult run_scenario(const ScenarioConfig& config);

/// Metrics derived only from the world's chains, meta-ledger and trust.
Metrics collect_metrics(const World& world);

/// Transfers whose ledger legs disagree with their recorded outcome, one
/// message each. Empty when every transfer is all-or-nothing.
std::vector<std::string> audit_atomicity(const World& world);

/// `scope,subject,metric,value` rows in a fixed order.
void write_metrics_csv(std::ostream& out, const Metrics& m);

}  // namespace uberledger
