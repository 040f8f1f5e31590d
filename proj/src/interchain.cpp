#include "uberledger/interchain.hpp"

#include <algorithm>
#include <set>

#include "uberledger/rng.hpp"

namespace uberledger {

namespace {

using Code = InterchainError::Code;

void transition(TransferState& s, Phase to) {
  if (!is_allowed_transition(s.phase, to)) {
    throw InterchainError(Code::wrong_phase, "transfer " + s.request.id + ": illegal transition " +
                                                 std::string(to_string(s.phase)) + " -> " +
                                                 std::string(to_string(to)));
  }
  s.phase = to;
  s.trace.push_back(to);
}

void forfeit(TransferState& s, Ledger& source, std::string why) {
  if (s.phase != Phase::forfeited) transition(s, Phase::forfeited);
  if (s.note.empty()) s.note = std::move(why);
  if (s.escrow_outstanding) {
    // A refund can only fail if the ledger already returned the funds at expiry.
    if (source.pending_escrow_amount(s.escrow_id).value() > 0) source.refund_escrow(s.escrow_id);
    s.escrow_outstanding = false;
  }
}

}  // namespace

std::string_view to_string(Verdict v) { return v == Verdict::yes ? "yes" : "no"; }

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::proposed: return "Proposed";
    case Phase::escrowed: return "Escrowed";
    case Phase::attested: return "Attested";
    case Phase::released: return "Released";
    case Phase::forfeited: return "Forfeited";
  }
  return "?";
}

bool is_allowed_transition(Phase from, Phase to) {
  switch (to) {
    case Phase::escrowed: return from == Phase::proposed;
    case Phase::attested: return from == Phase::escrowed;
    case Phase::released: return from == Phase::attested;
    case Phase::forfeited: return !is_terminal(from);
    case Phase::proposed: return false;
  }
  return false;
}

bool TransferState::is_member(const std::string& name) const {
  return std::any_of(group.begin(), group.end(), [&](const Facilitator& f) { return f.name == name; });
}

std::size_t TransferState::yes_count() const {
  return static_cast<std::size_t>(std::count_if(attestations.begin(), attestations.end(),
                                                [](const auto& kv) { return kv.second == Verdict::yes; }));
}

std::size_t TransferState::no_count() const { return attestations.size() - yes_count(); }

std::vector<Facilitator> eligible_facilitators(std::span<const Facilitator> all,
                                               const LedgerId& source, const LedgerId& dest) {
  std::vector<Facilitator> out;
  std::copy_if(all.begin(), all.end(), std::back_inserter(out),
               [&](const Facilitator& f) { return f.serves(source, dest); });
  return out;
}

void check_group_params(const GroupParams& params) {
  if (params.n == 0 || !params.satisfies_bound()) {
    throw InterchainError(Code::bound_violation,
                          "group bound violated: n=" + std::to_string(params.n) +
                              " < 3f+1=" + std::to_string(3ULL * params.f + 1));
  }
}

std::vector<Facilitator> form_group(std::span<const Facilitator> candidates,
                                    const GlobalTrustVector<double>& trust,
                                    const GroupParams& params, std::uint64_t seed) {
  check_group_params(params);
  std::vector<Facilitator> pool(candidates.begin(), candidates.end());
  std::sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  if (std::adjacent_find(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
        return a.name == b.name;
      }) != pool.end()) {
    throw InterchainError(Code::insufficient_candidates, "form_group: duplicate candidate names");
  }
  if (pool.size() < params.n) {
    throw InterchainError(Code::insufficient_candidates,
                          "form_group: " + std::to_string(pool.size()) + " candidates for n=" +
                              std::to_string(params.n));
  }

  std::vector<std::string> names;
  std::vector<Amount> bids;
  for (const auto& f : pool) {
    names.push_back(f.name);
    bids.push_back(f.fee_bid);
  }
  const VectorX<double> w = selection_weights(trust, names, bids);
  std::vector<double> weight(w.data(), w.data() + w.size());

  SplitMix64 rng(seed);
  std::vector<Facilitator> chosen;
  chosen.reserve(params.n);
  while (chosen.size() < params.n) {
    double total = 0;
    for (double x : weight) total += x;
    std::size_t pick = 0;
    if (total > 0) {
      const double u = rng.uniform() * total;
      double acc = 0;
      pick = weight.size();
      for (std::size_t i = 0; i < weight.size(); ++i) {
        if (weight[i] <= 0) continue;
        acc += weight[i];
        pick = i;
        if (u < acc) break;
      }
    } else {
      pick = static_cast<std::size_t>(rng.below(pool.size()));
    }
    chosen.push_back(std::move(pool[pick]));
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    weight.erase(weight.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  std::sort(chosen.begin(), chosen.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return chosen;
}

TransferState initiate(TransferRequest request, std::vector<Facilitator> group,
                       const GroupParams& params, Tick now) {
  check_group_params(params);
  auto malformed = [&](const std::string& why) {
    return InterchainError(Code::malformed_request, "transfer " + request.id + ": " + why);
  };
  if (!is_valid_label(request.id)) throw malformed("invalid transfer id");
  if (!is_valid_label(request.payer.ledger) || !is_valid_label(request.payer.name) ||
      !is_valid_label(request.payee.ledger) || !is_valid_label(request.payee.name)) {
    throw malformed("invalid account label");
  }
  if (request.payer.ledger == request.payee.ledger) throw malformed("payer and payee share a ledger");
  if (request.amount_dst.value() == 0) throw malformed("amount_dst must be positive");
  if (request.expiry <= now) throw malformed("expiry is not in the future");
  if (group.size() != params.n) throw malformed("group size differs from n");

  std::sort(group.begin(), group.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  for (std::size_t i = 0; i < group.size(); ++i) {
    if (i > 0 && group[i].name == group[i - 1].name) throw malformed("duplicate group member");
    if (!group[i].serves(request.source(), request.dest())) {
      throw malformed("member " + group[i].name + " lacks accounts on both ledgers");
    }
  }

  TransferState s;
  s.escrow_id = request.id;
  s.request = std::move(request);
  s.group = std::move(group);
  s.params = params;
  return s;
}

void escrow_lock(TransferState& state, Ledger& source) {
  if (state.phase != Phase::proposed) {
    throw InterchainError(Code::wrong_phase, "escrow_lock: transfer " + state.request.id + " is " +
                                                 std::string(to_string(state.phase)));
  }
  if (source.id() != state.request.source()) {
    throw InterchainError(Code::malformed_request, "escrow_lock: wrong source ledger " + source.id());
  }
  const auto& r = state.request;
  Amount locked;
  try {
    locked = r.amount_src + r.fee_total;
  } catch (const AmountError&) {
    throw InterchainError(Code::malformed_request, "escrow_lock: amount overflow");
  }
  if (source.pending_balance_of(r.payer) < locked) {
    forfeit(state, source, "insufficient-funds");
    return;
  }
  auto status = source.lock_escrow(r.payer, locked, state.escrow_id, r.expiry);
  if (status != TxStatus::accepted) {
    throw InterchainError(Code::ledger_rejected,
                          "escrow_lock: ledger rejected lock: " + std::string(to_string(status)));
  }
  state.escrow_outstanding = true;
  transition(state, Phase::escrowed);
}

void collect_attestations(TransferState& state,
                          std::span<const std::pair<std::string, Verdict>> verdicts) {
  if (state.phase != Phase::escrowed) {
    throw InterchainError(Code::wrong_phase, "collect_attestations: transfer " + state.request.id +
                                                 " is " + std::string(to_string(state.phase)));
  }
  for (const auto& [who, _] : verdicts) {
    if (!state.is_member(who)) {
      throw InterchainError(Code::non_member, "verdict from non-member " + who);
    }
  }
  for (const auto& [who, v] : verdicts) state.attestations.emplace(who, v);

  const std::size_t quorum = state.params.quorum();
  if (state.yes_count() >= quorum) {
    transition(state, Phase::attested);
  } else if (state.no_count() > state.params.n - quorum) {
    transition(state, Phase::forfeited);
    state.note = "quorum unreachable";
  }
}

std::vector<Amount> split_equally(Amount total, std::size_t parts) {
  if (parts == 0) throw std::invalid_argument("split_equally: zero parts");
  const std::uint64_t base = total.value() / parts;
  const std::uint64_t extra = total.value() % parts;
  std::vector<Amount> out;
  out.reserve(parts);
  for (std::size_t i = 0; i < parts; ++i) out.emplace_back(base + (i < extra ? 1 : 0));
  return out;
}

void settle(TransferState& state, Ledger& source, Ledger& dest, Tick now,
            const PaymentRefusal& refuses) {
  const auto& r = state.request;
  if (source.id() != r.source() || dest.id() != r.dest()) {
    throw InterchainError(Code::malformed_request, "settle: ledgers do not match the request");
  }
  if (state.phase == Phase::forfeited && state.escrow_outstanding) {
    forfeit(state, source, "quorum unreachable");
    return;
  }
  if (state.phase != Phase::escrowed && state.phase != Phase::attested) {
    throw InterchainError(Code::wrong_phase, "settle: transfer " + r.id + " is " +
                                                 std::string(to_string(state.phase)));
  }
  if (now >= r.expiry) {
    forfeit(state, source, "expired");
    return;
  }
  if (state.phase == Phase::escrowed) {
    throw InterchainError(Code::premature_settle,
                          "settle: transfer " + r.id + " not attested and not yet expired");
  }

  const std::size_t n = state.group.size();
  const auto dst_shares = split_equally(r.amount_dst, n);
  const auto src_shares = split_equally(r.amount_src, n);
  const auto fee_shares = split_equally(r.fee_total, n);

  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = state.group[i];
    if (refuses && refuses(m)) {
      forfeit(state, source, "destination payment refused by " + m.name);
      return;
    }
    if (dest.pending_balance_of(m.account_on(r.dest())) < dst_shares[i]) {
      forfeit(state, source, "destination pool underfunded at " + m.name);
      return;
    }
  }
  if (source.pending_escrow_amount(state.escrow_id) != r.amount_src + r.fee_total) {
    forfeit(state, source, "escrow not intact");
    return;
  }

  auto must = [&](TxStatus s, const char* leg) {
    if (s != TxStatus::accepted) {
      throw std::logic_error(std::string("settle: prechecked ") + leg +
                             " leg rejected: " + std::string(to_string(s)));
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = state.group[i];
    if (dst_shares[i].value() > 0) {
      must(dest.submit_transfer(m.account_on(r.dest()), r.payee, dst_shares[i], Amount{0}, r.id),
           "destination");
    }
  }
  state.fee_shares.clear();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = state.group[i];
    const Amount payout = src_shares[i] + fee_shares[i];
    if (payout.value() > 0) {
      must(source.release_escrow(state.escrow_id, m.account_on(r.source()), payout), "source");
    }
    state.fee_shares.emplace_back(m.name, fee_shares[i]);
  }
  state.escrow_outstanding = false;
  transition(state, Phase::released);
}

}  // namespace uberledger
