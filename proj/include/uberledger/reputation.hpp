#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "uberledger/meta_ledger.hpp"
#include "uberledger/ntriples.hpp"
#include "uberledger/trust.hpp"

namespace uberledger {

/// A verdict agrees with the recorded outcome when yes meets Released or no
/// meets Forfeited. Absence never agrees.
inline bool is_consistent(Attestation a, Outcome o) {
  return (a == Attestation::yes && o == Outcome::released) ||
         (a == Attestation::no && o == Outcome::forfeited);
}

/// s(i, j) = (shared transfers where j agreed with the outcome) minus (shared
/// transfers where j disagreed or stayed silent). Includes the diagonal,
/// which normalize_scores later discards.
template <typename Scalar = double>
MatrixX<Scalar> raw_scores(std::span<const OutcomeRecord* const> records,
                           std::span<const std::string> ids) {
  std::map<std::string, Eigen::Index> index;
  for (std::size_t i = 0; i < ids.size(); ++i) index.emplace(ids[i], static_cast<Eigen::Index>(i));

  const auto k = static_cast<Eigen::Index>(ids.size());
  MatrixX<Scalar> s = MatrixX<Scalar>::Zero(k, k);
  std::vector<std::pair<Eigen::Index, Scalar>> present;
  for (const OutcomeRecord* r : records) {
    present.clear();
    for (const auto& v : r->verdicts) {
      auto it = index.find(v.facilitator);
      if (it == index.end()) continue;
      present.emplace_back(it->second, is_consistent(v.attested, r->outcome) ? Scalar(1) : Scalar(-1));
    }
    for (const auto& [i, _] : present) {
      for (const auto& [j, score] : present) s(i, j) += score;
    }
  }
  return s;
}

/// Local trust over `facilitators` from every sealed record in `meta`.
template <typename Scalar = double>
LocalTrustMatrix<Scalar> local_trust(const MetaLedger& meta, std::vector<std::string> facilitators,
                                     const ReputationParams<Scalar>& params) {
  if (facilitators.empty()) throw std::invalid_argument("local_trust: no facilitators");
  const auto records = meta.sealed_records();
  const auto p = pretrust_distribution<Scalar>(facilitators, params.pretrusted);
  const auto s = raw_scores<Scalar>(records, facilitators);
  return normalize_scores<Scalar>(std::move(facilitators), s, p);
}

/// Trust in parts per billion, rounded to nearest.
std::uint64_t scaled_trust(double t);

/// One `<facilitator> hasTrustScore "ppb"^^xsd:integer` triple per entry.
std::vector<rdf::Triple> trust_triples(const GlobalTrustVector<double>& trust);

}  // namespace uberledger
