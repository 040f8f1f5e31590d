#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uberledger/interchain.hpp"
#include "uberledger/trust.hpp"
#include "uberledger/types.hpp"

namespace uberledger {

enum class Behavior { honest, crash, false_attest, abscond, collude };

/// Behavior of one facilitator. `ring` is set for colluders only.
struct FaultModel {
  Behavior behavior = Behavior::honest;
  std::string ring;

  bool operator==(const FaultModel&) const = default;
};

std::string to_string(const FaultModel& m);
/// honest | crash | false-attest | abscond | collude:<ring>
std::optional<FaultModel> fault_model_from_string(std::string_view s);

struct LedgerSpec {
  LedgerId id;
  std::vector<std::pair<std::string, Amount>> accounts;
};

struct FacilitatorSpec {
  std::string name;
  std::vector<LedgerId> ledgers;
  Amount fund{0};  // genesis balance on each served ledger
  Amount fee_bid{1};
  FaultModel fault;
};

struct WorkloadSpec {
  std::uint64_t transfers = 0;
  std::uint64_t amount_min = 1;
  std::uint64_t amount_max = 1;
  std::uint64_t rate_num = 1;  // amount_dst = amount_src * rate_num / rate_den
  std::uint64_t rate_den = 1;
  Tick expiry_window = 4;
  Tick seal_interval = 1;
};

struct ScenarioConfig {
  std::uint64_t seed = 0;
  std::vector<LedgerSpec> ledgers;
  std::vector<FacilitatorSpec> facilitators;
  GroupParams group;
  ReputationParams<double> reputation;  // empty pretrusted means every facilitator
  std::uint64_t epoch = 10;            // transfers between trust recomputations
  WorkloadSpec workload;
};

class ConfigError : public std::runtime_error {
 public:
  enum class Kind { syntax, invalid, bound_violation, io };

  ConfigError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Parses the sectioned `key = value` format; see docs/scenario-format.md.
ScenarioConfig parse_scenario(std::string_view text);
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Throws ConfigError describing the first invalid setting.
void validate(const ScenarioConfig& config);

/// Pretrusted set with the every-facilitator default applied.
std::set<std::string> effective_pretrusted(const ScenarioConfig& config);

}  // namespace uberledger
