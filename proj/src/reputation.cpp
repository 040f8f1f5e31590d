#include "uberledger/reputation.hpp"

#include <cmath>

namespace uberledger {

std::uint64_t scaled_trust(double t) {
  if (!(t > 0)) return 0;
  return static_cast<std::uint64_t>(std::llround(t * 1e9));
}

std::vector<rdf::Triple> trust_triples(const GlobalTrustVector<double>& trust) {
  std::vector<rdf::Triple> out;
  const rdf::Iri predicate{vocab::term("hasTrustScore")};
  for (std::size_t i = 0; i < trust.ids.size(); ++i) {
    out.push_back({rdf::Iri{vocab::facilitator_iri(trust.ids[i])}, predicate,
                   rdf::integer_literal(scaled_trust(trust.t(static_cast<Eigen::Index>(i))))});
  }
  return out;
}

}  // namespace uberledger
