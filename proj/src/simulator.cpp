#include "uberledger/simulator.hpp"

#include <algorithm>
#include <cstdio>

#include "uberledger/reputation.hpp"
#include "uberledger/rng.hpp"

namespace uberledger {

namespace {

struct InFlight {
  TransferState state;
  bool gathered = false;
};

std::string transfer_name(std::uint64_t index) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "t%06llu", static_cast<unsigned long long>(index));
  return buf;
}

class Simulation {
 public:
  explicit Simulation(const ScenarioConfig& cfg)
      : cfg_(cfg),
        workload_(derive_stream_seed(cfg.seed, "workload")),
        selection_(derive_stream_seed(cfg.seed, "selection")) {
    rep_ = cfg.reputation;
    rep_.pretrusted = effective_pretrusted(cfg);

    for (const auto& f : cfg.facilitators) {
      Facilitator fac{f.name, {}, f.fee_bid};
      for (const auto& l : f.ledgers) fac.accounts.emplace(l, AccountId{l, f.name});
      world_.facilitators.push_back(std::move(fac));
      world_.behaviors.emplace(f.name, f.fault);
      trust_ids_.push_back(f.name);
      if (f.fault.behavior == Behavior::collude) rings_[f.fault.ring].insert(f.name);
    }
    std::sort(trust_ids_.begin(), trust_ids_.end());

    for (const auto& spec : cfg.ledgers) {
      std::vector<std::pair<AccountId, Amount>> alloc;
      auto& users = users_[spec.id];
      for (const auto& [name, amount] : spec.accounts) {
        alloc.emplace_back(AccountId{spec.id, name}, amount);
        users.push_back(AccountId{spec.id, name});
      }
      for (const auto& f : cfg.facilitators) {
        if (std::find(f.ledgers.begin(), f.ledgers.end(), spec.id) != f.ledgers.end()) {
          alloc.emplace_back(AccountId{spec.id, f.name}, f.fund);
        }
      }
      world_.ledgers.emplace(spec.id, Ledger::genesis(spec.id, alloc, 0));
      ledger_order_.push_back(spec.id);
    }
  }

  World run() {
    recompute_trust();
    const auto& wl = cfg_.workload;
    std::uint64_t issued = 0;
    Tick clock = 0;
    while (issued < wl.transfers || !in_flight_.empty()) {
      ++clock;
      if (issued < wl.transfers) {
        if (issued > 0 && issued % cfg_.epoch == 0) recompute_trust();
        propose(issued++, clock);
      }
      if (clock % wl.seal_interval == 0) {
        for (auto& [_, l] : world_.ledgers) l.seal_block(clock);
        advance(clock);
        world_.meta.seal(clock);
      }
    }
    // Settlement legs submitted at the last seal still need a block.
    ++clock;
    for (auto& [_, l] : world_.ledgers) l.seal_block(clock);
    world_.meta.seal(clock);
    world_.clock = clock;
    return std::move(world_);
  }

 private:
  void recompute_trust() {
    auto local = local_trust(world_.meta, trust_ids_, rep_);
    world_.trust = global_trust(local, rep_);
    world_.epoch_iterations.push_back(world_.trust.iterations);
  }

  void propose(std::uint64_t index, Tick clock) {
    const auto& wl = cfg_.workload;
    const std::size_t L = ledger_order_.size();
    const auto src_i = workload_.below(L);
    auto dst_i = workload_.below(L - 1);
    if (dst_i >= src_i) ++dst_i;
    const LedgerId& src_id = ledger_order_[src_i];
    const LedgerId& dst_id = ledger_order_[dst_i];
    const auto& payers = users_.at(src_id);
    const auto& payees = users_.at(dst_id);
    const auto payer_start = workload_.below(payers.size());
    const AccountId payee = payees[workload_.below(payees.size())];
    const std::uint64_t amount = workload_.between(wl.amount_min, wl.amount_max);
    const std::uint64_t amount_dst = std::max<std::uint64_t>(1, amount * wl.rate_num / wl.rate_den);

    auto candidates = eligible_facilitators(world_.facilitators, src_id, dst_id);
    auto group = form_group(candidates, world_.trust, cfg_.group, selection_.next());
    Amount fee{0};
    for (const auto& m : group) fee += m.fee_bid;

    Ledger& src = world_.ledgers.at(src_id);
    AccountId payer = payers[payer_start];
    for (std::size_t k = 0; k < payers.size(); ++k) {
      const auto& cand = payers[(payer_start + k) % payers.size()];
      if (src.pending_balance_of(cand) >= Amount{amount} + fee) {
        payer = cand;
        break;
      }
    }

    TransferRequest req{transfer_name(index + 1), payer, payee, Amount{amount}, Amount{amount_dst}, fee,
                        clock + wl.expiry_window};
    InFlight f{initiate(std::move(req), std::move(group), cfg_.group, clock)};
    escrow_lock(f.state, src);
    if (is_terminal(f.state.phase)) {
      world_.meta.record_outcome(make_outcome_record(f.state, clock));
    } else {
      in_flight_.push_back(std::move(f));
    }
  }

  void advance(Tick clock) {
    const PaymentRefusal absconds = [this](const Facilitator& m) {
      return world_.behaviors.at(m.name).behavior == Behavior::abscond;
    };
    for (auto& f : in_flight_) {
      auto& s = f.state;
      Ledger& src = world_.ledgers.at(s.request.source());
      Ledger& dst = world_.ledgers.at(s.request.dest());
      if (!f.gathered && s.phase == Phase::escrowed) {
        gather(s, src);
        f.gathered = true;
      }
      const bool decided = s.phase == Phase::attested || (s.phase == Phase::forfeited && s.escrow_outstanding);
      const bool expired = s.phase == Phase::escrowed && clock >= s.request.expiry;
      if (decided || expired) settle(s, src, dst, clock, absconds);
      if (is_terminal(s.phase)) world_.meta.record_outcome(make_outcome_record(s, clock));
    }
    std::erase_if(in_flight_, [](const InFlight& f) { return is_terminal(f.state.phase); });
  }

  void gather(TransferState& s, const Ledger& src) {
    const auto& r = s.request;
    const auto esc = src.escrow(s.escrow_id);
    const bool intact = esc && esc->owner == r.payer && esc->amount == r.amount_src + r.fee_total;
    const Verdict honest = intact ? Verdict::yes : Verdict::no;

    RingContext ctx;
    for (const auto& m : s.group) ctx.group.push_back(m.name);
    std::vector<std::pair<std::string, Verdict>> verdicts;
    for (const auto& m : s.group) {
      const auto& model = world_.behaviors.at(m.name);
      ctx.ring_members = model.behavior == Behavior::collude ? rings_.at(model.ring) : std::set<std::string>{};
      const auto a = behavior_verdict(model, honest, r, ctx);
      if (a != Attestation::absent) verdicts.emplace_back(m.name, a == Attestation::yes ? Verdict::yes : Verdict::no);
    }
    collect_attestations(s, verdicts);
  }

  const ScenarioConfig& cfg_;
  ReputationParams<double> rep_;
  SplitMix64 workload_;
  SplitMix64 selection_;
  World world_;
  std::vector<std::string> trust_ids_;
  std::vector<LedgerId> ledger_order_;
  std::map<LedgerId, std::vector<AccountId>> users_;
  std::map<std::string, std::set<std::string>> rings_;
  std::vector<InFlight> in_flight_;
};

}  // namespace

Attestation behavior_verdict(const FaultModel& model, Verdict honest, const TransferRequest& transfer,
                             const RingContext& ring) {
  const auto as = [](Verdict v) { return v == Verdict::yes ? Attestation::yes : Attestation::no; };
  switch (model.behavior) {
    case Behavior::honest: return as(honest);
    case Behavior::crash: return Attestation::absent;
    case Behavior::false_attest: return honest == Verdict::yes ? Attestation::no : Attestation::yes;
    case Behavior::abscond: return Attestation::yes;
    case Behavior::collude: {
      const bool payer_mate = ring.ring_members.contains(transfer.payer.name);
      const auto mates = std::count_if(ring.group.begin(), ring.group.end(),
                                       [&](const std::string& g) { return ring.ring_members.contains(g); });
      const bool majority = static_cast<std::size_t>(mates) * 2 > ring.group.size();
      return payer_mate || majority ? Attestation::yes : Attestation::no;
    }
  }
  return Attestation::absent;
}

RunResult run_scenario(const ScenarioConfig& config) {
  validate(config);
  World world = Simulation(config).run();
  Metrics m = collect_metrics(world);
  return {std::move(m), std::move(world)};
}

Metrics collect_metrics(const World& world) {
  Metrics m;
  std::map<std::string, FacilitatorMetrics> per;
  for (const auto& f : world.facilitators) {
    auto& fm = per[f.name];
    fm.name = f.name;
    auto b = world.behaviors.find(f.name);
    fm.behavior = b == world.behaviors.end() ? "unknown" : to_string(b->second);
    fm.trust_ppb = scaled_trust(world.trust.trust_of(f.name));
  }
  for (const auto* r : world.meta.sealed_records()) {
    (r->outcome == Outcome::released ? m.released : m.forfeited) += 1;
    for (const auto& v : r->verdicts) {
      auto& fm = per[v.facilitator];
      fm.name = v.facilitator;
      ++fm.selections;
      (is_consistent(v.attested, r->outcome) ? fm.consistent : fm.inconsistent) += 1;
    }
    for (const auto& s : r->fee_shares) per[s.facilitator].fees_earned += s.amount;
  }
  for (auto& [_, fm] : per) m.facilitators.push_back(std::move(fm));
  for (const auto& [id, l] : world.ledgers) m.conserved[id] = l.circulating() == l.supply();
  m.epoch_iterations = world.epoch_iterations;
  return m;
}

std::vector<std::string> audit_atomicity(const World& world) {
  struct Legs {
    Amount locked, released, refunded, paid;
  };
  std::map<std::pair<LedgerId, std::string>, Legs> legs;
  for (const auto& [id, l] : world.ledgers) {
    for (const auto& b : l.chain()) {
      for (const auto& tx : b.txs) {
        if (tx.ref.empty()) continue;
        auto& g = legs[{id, tx.ref}];
        switch (tx.kind) {
          case TxKind::escrow_lock: g.locked += tx.amount; break;
          case TxKind::escrow_release: g.released += tx.amount; break;
          case TxKind::escrow_refund: g.refunded += tx.amount; break;
          case TxKind::transfer: g.paid += tx.amount; break;
          case TxKind::coinbase: break;
        }
      }
    }
  }

  std::vector<std::string> problems;
  for (const auto* r : world.meta.sealed_records()) {
    const auto src = legs[{r->source_ledger, r->transfer_id}];
    const auto dst = legs[{r->dest_ledger, r->transfer_id}];
    const Amount debit = r->amount_src + r->fee_total;
    bool ok = false;
    if (r->outcome == Outcome::released) {
      ok = src.locked == debit && src.released == debit && src.refunded.value() == 0 && src.paid.value() == 0 &&
           dst.paid == r->amount_dst;
    } else {
      ok = (src.locked.value() == 0 || src.locked == debit) && src.refunded == src.locked &&
           src.released.value() == 0 && dst.paid.value() == 0;
    }
    if (!ok) {
      problems.push_back(r->transfer_id + " " + std::string(to_string(r->outcome)) + ": locked=" +
                         std::to_string(src.locked.value()) + " released=" + std::to_string(src.released.value()) +
                         " refunded=" + std::to_string(src.refunded.value()) +
                         " paid=" + std::to_string(dst.paid.value()));
    }
  }
  return problems;
}

void write_metrics_csv(std::ostream& out, const Metrics& m) {
  out << "scope,subject,metric,value\n";
  out << "run,all,released," << m.released << '\n';
  out << "run,all,forfeited," << m.forfeited << '\n';
  for (const auto& [id, ok] : m.conserved) out << "ledger," << id << ",conserved," << (ok ? "true" : "false") << '\n';
  for (const auto& f : m.facilitators) {
    out << "facilitator," << f.name << ",behavior," << f.behavior << '\n';
    out << "facilitator," << f.name << ",selections," << f.selections << '\n';
    out << "facilitator," << f.name << ",consistent," << f.consistent << '\n';
    out << "facilitator," << f.name << ",inconsistent," << f.inconsistent << '\n';
    out << "facilitator," << f.name << ",fees_earned," << f.fees_earned.value() << '\n';
    out << "facilitator," << f.name << ",trust_ppb," << f.trust_ppb << '\n';
  }
  for (std::size_t i = 0; i < m.epoch_iterations.size(); ++i) {
    out << "epoch," << i << ",iterations," << m.epoch_iterations[i] << '\n';
  }
}

}  // namespace uberledger
