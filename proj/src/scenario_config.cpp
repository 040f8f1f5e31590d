#include "uberledger/scenario_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace uberledger {

namespace {

using Kind = ConfigError::Kind;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  while (!s.empty()) {
    const auto comma = s.find(',');
    auto item = trim(s.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

class Reader {
 public:
  explicit Reader(std::size_t line) : line_(line) {}

  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError(Kind::syntax, "line " + std::to_string(line_) + ": " + why);
  }

  std::uint64_t u64(std::string_view v) const {
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) fail("expected an unsigned integer, got '" + std::string(v) + "'");
    return out;
  }

  double real(std::string_view v) const {
    double out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) fail("expected a number, got '" + std::string(v) + "'");
    return out;
  }

  std::string label(std::string_view v) const {
    if (!is_valid_label(v)) fail("invalid identifier '" + std::string(v) + "'");
    return std::string(v);
  }

 private:
  std::size_t line_;
};

enum class Section { top, ledger, facilitator, group, reputation, workload };

}  // namespace

std::string to_string(const FaultModel& m) {
  switch (m.behavior) {
    case Behavior::honest: return "honest";
    case Behavior::crash: return "crash";
    case Behavior::false_attest: return "false-attest";
    case Behavior::abscond: return "abscond";
    case Behavior::collude: return "collude:" + m.ring;
  }
  return "?";
}

std::optional<FaultModel> fault_model_from_string(std::string_view s) {
  if (s == "honest") return FaultModel{Behavior::honest, {}};
  if (s == "crash") return FaultModel{Behavior::crash, {}};
  if (s == "false-attest") return FaultModel{Behavior::false_attest, {}};
  if (s == "abscond") return FaultModel{Behavior::abscond, {}};
  constexpr std::string_view prefix = "collude:";
  if (s.starts_with(prefix) && is_valid_label(s.substr(prefix.size()))) {
    return FaultModel{Behavior::collude, std::string(s.substr(prefix.size()))};
  }
  return std::nullopt;
}

ScenarioConfig parse_scenario(std::string_view text) {
  ScenarioConfig cfg;
  Section section = Section::top;
  std::set<Section> seen_singletons;
  std::size_t line_no = 0;

  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view raw = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);

    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto line = trim(raw);
    if (line.empty()) continue;
    const Reader rd(line_no);

    if (line.front() == '[') {
      if (line.back() != ']') rd.fail("unterminated section header");
      const auto name = trim(line.substr(1, line.size() - 2));
      static const std::map<std::string_view, Section> kSections{
          {"ledger", Section::ledger},         {"facilitator", Section::facilitator},
          {"group", Section::group},           {"reputation", Section::reputation},
          {"workload", Section::workload}};
      auto it = kSections.find(name);
      if (it == kSections.end()) rd.fail("unknown section [" + std::string(name) + "]");
      section = it->second;
      if (section == Section::ledger) cfg.ledgers.emplace_back();
      if (section == Section::facilitator) cfg.facilitators.emplace_back();
      if ((section == Section::group || section == Section::reputation || section == Section::workload) &&
          !seen_singletons.insert(section).second) {
        rd.fail("section [" + std::string(name) + "] given twice");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) rd.fail("expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (value.empty()) rd.fail("empty value for '" + std::string(key) + "'");
    auto unknown = [&] { rd.fail("unknown key '" + std::string(key) + "'"); };

    switch (section) {
      case Section::top:
        if (key == "seed") cfg.seed = rd.u64(value);
        else unknown();
        break;

      case Section::ledger: {
        auto& l = cfg.ledgers.back();
        if (key == "id") {
          l.id = rd.label(value);
        } else if (key == "account") {
          const auto colon = value.rfind(':');
          if (colon == std::string_view::npos) rd.fail("account must be name:amount");
          l.accounts.emplace_back(rd.label(trim(value.substr(0, colon))),
                                  Amount{rd.u64(trim(value.substr(colon + 1)))});
        } else {
          unknown();
        }
        break;
      }

      case Section::facilitator: {
        auto& f = cfg.facilitators.back();
        if (key == "name") f.name = rd.label(value);
        else if (key == "ledgers") {
          for (auto& id : split_list(value)) f.ledgers.push_back(rd.label(id));
        } else if (key == "fund") f.fund = Amount{rd.u64(value)};
        else if (key == "fee_bid") f.fee_bid = Amount{rd.u64(value)};
        else if (key == "behavior") {
          auto m = fault_model_from_string(value);
          if (!m) rd.fail("unknown behavior '" + std::string(value) + "'");
          f.fault = *m;
        } else {
          unknown();
        }
        break;
      }

      case Section::group:
        if (key == "n") cfg.group.n = static_cast<std::uint32_t>(rd.u64(value));
        else if (key == "f") cfg.group.f = static_cast<std::uint32_t>(rd.u64(value));
        else unknown();
        break;

      case Section::reputation:
        if (key == "damping") cfg.reputation.damping = rd.real(value);
        else if (key == "pretrusted") {
          for (auto& id : split_list(value)) cfg.reputation.pretrusted.insert(rd.label(id));
        } else if (key == "newcomer_prior") cfg.reputation.newcomer_prior = rd.real(value);
        else if (key == "tolerance") cfg.reputation.tolerance = rd.real(value);
        else if (key == "max_iters") cfg.reputation.max_iters = rd.u64(value);
        else if (key == "epoch") cfg.epoch = rd.u64(value);
        else unknown();
        break;

      case Section::workload: {
        auto& w = cfg.workload;
        if (key == "transfers") w.transfers = rd.u64(value);
        else if (key == "amount_min") w.amount_min = rd.u64(value);
        else if (key == "amount_max") w.amount_max = rd.u64(value);
        else if (key == "rate") {
          const auto slash = value.find('/');
          if (slash == std::string_view::npos) rd.fail("rate must be num/den");
          w.rate_num = rd.u64(trim(value.substr(0, slash)));
          w.rate_den = rd.u64(trim(value.substr(slash + 1)));
        } else if (key == "expiry_window") w.expiry_window = rd.u64(value);
        else if (key == "seal_interval") w.seal_interval = rd.u64(value);
        else unknown();
        break;
      }
    }
  }
  validate(cfg);
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(Kind::io, "cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::set<std::string> effective_pretrusted(const ScenarioConfig& config) {
  if (!config.reputation.pretrusted.empty()) return config.reputation.pretrusted;
  std::set<std::string> all;
  for (const auto& f : config.facilitators) all.insert(f.name);
  return all;
}

void validate(const ScenarioConfig& cfg) {
  auto invalid = [](const std::string& why) { return ConfigError(Kind::invalid, why); };

  if (cfg.group.n == 0 || !cfg.group.satisfies_bound()) {
    throw ConfigError(Kind::bound_violation,
                      "bound-violation: group n=" + std::to_string(cfg.group.n) + " < 3f+1 with f=" +
                          std::to_string(cfg.group.f));
  }
  if (cfg.ledgers.size() < 2) throw invalid("at least two [ledger] sections are required");

  std::set<LedgerId> ledger_ids;
  for (const auto& l : cfg.ledgers) {
    if (l.id.empty()) throw invalid("[ledger] without id");
    if (!ledger_ids.insert(l.id).second) throw invalid("duplicate ledger id " + l.id);
    if (l.accounts.empty()) throw invalid("ledger " + l.id + " has no accounts");
    std::set<std::string> names;
    for (const auto& [name, _] : l.accounts) {
      if (is_reserved_account_name(name)) throw invalid("account name " + name + " is reserved");
      if (!names.insert(name).second) throw invalid("duplicate account " + l.id + "/" + name);
    }
  }

  std::set<std::string> fac_names;
  for (const auto& f : cfg.facilitators) {
    if (f.name.empty()) throw invalid("[facilitator] without name");
    if (is_reserved_account_name(f.name)) throw invalid("facilitator name " + f.name + " is reserved");
    if (!fac_names.insert(f.name).second) throw invalid("duplicate facilitator " + f.name);
    if (f.fee_bid.value() == 0) throw invalid("facilitator " + f.name + " has a zero fee_bid");
    std::set<LedgerId> served;
    for (const auto& l : f.ledgers) {
      if (!ledger_ids.contains(l)) throw invalid("facilitator " + f.name + " references unknown ledger " + l);
      if (!served.insert(l).second) throw invalid("facilitator " + f.name + " lists ledger " + l + " twice");
    }
  }
  for (const auto& l : cfg.ledgers) {
    for (const auto& [name, _] : l.accounts) {
      if (fac_names.contains(name)) {
        throw invalid("account " + l.id + "/" + name + " collides with a facilitator account");
      }
    }
  }
  for (const auto& a : cfg.ledgers) {
    for (const auto& b : cfg.ledgers) {
      if (a.id == b.id) continue;
      std::size_t eligible = 0;
      for (const auto& f : cfg.facilitators) {
        const bool sa = std::find(f.ledgers.begin(), f.ledgers.end(), a.id) != f.ledgers.end();
        const bool sb = std::find(f.ledgers.begin(), f.ledgers.end(), b.id) != f.ledgers.end();
        if (sa && sb) ++eligible;
      }
      if (eligible < cfg.group.n) {
        throw invalid("only " + std::to_string(eligible) + " facilitators serve " + a.id + "->" + b.id +
                      ", need n=" + std::to_string(cfg.group.n));
      }
    }
  }

  auto rep = cfg.reputation;
  rep.pretrusted = effective_pretrusted(cfg);
  try {
    rep.validate();
  } catch (const std::invalid_argument& e) {
    throw invalid(e.what());
  }
  for (const auto& p : rep.pretrusted) {
    if (!fac_names.contains(p)) throw invalid("pretrusted facilitator " + p + " is not configured");
  }
  if (cfg.epoch == 0) throw invalid("epoch must be positive");

  const auto& w = cfg.workload;
  if (w.transfers == 0) throw invalid("workload transfers must be positive");
  if (w.amount_min == 0 || w.amount_min > w.amount_max) throw invalid("need 1 <= amount_min <= amount_max");
  if (w.rate_num == 0 || w.rate_den == 0) throw invalid("rate terms must be positive");
  if (w.expiry_window == 0 || w.seal_interval == 0) throw invalid("expiry_window and seal_interval must be positive");
}

}  // namespace uberledger
