#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "uberledger/types.hpp"

namespace uberledger {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar = double>
struct ReputationParams {
  Scalar damping = Scalar(0.15);
  std::set<std::string> pretrusted;
  Scalar newcomer_prior = Scalar(0.5);
  Scalar tolerance = Scalar(1e-9);
  std::size_t max_iters = 1000;

  void validate() const {
    if (pretrusted.empty()) throw std::invalid_argument("reputation: pretrusted set is empty");
    if (!(damping >= 0 && damping <= 1)) throw std::invalid_argument("reputation: damping outside [0,1]");
    if (!(tolerance > 0)) throw std::invalid_argument("reputation: tolerance must be positive");
    if (max_iters == 0) throw std::invalid_argument("reputation: max_iters must be positive");
    if (!(newcomer_prior >= 0 && newcomer_prior < 1)) {
      throw std::invalid_argument("reputation: newcomer_prior outside [0,1)");
    }
  }
};

/// Row-stochastic matrix; c(i, j) is the normalized trust of ids[i] in ids[j].
template <typename Scalar = double>
struct LocalTrustMatrix {
  std::vector<std::string> ids;
  MatrixX<Scalar> c;
};

template <typename Scalar = double>
struct GlobalTrustVector {
  std::vector<std::string> ids;
  VectorX<Scalar> t;
  std::size_t iterations = 0;
  bool converged = true;

  std::optional<std::size_t> index_of(const std::string& id) const {
    auto it = std::find(ids.begin(), ids.end(), id);
    if (it == ids.end()) return std::nullopt;
    return static_cast<std::size_t>(it - ids.begin());
  }

  /// Trust of `id`, zero when absent.
  Scalar trust_of(const std::string& id) const {
    auto i = index_of(id);
    return i ? t(static_cast<Eigen::Index>(*i)) : Scalar(0);
  }
};

/// Uniform distribution over the members of `pretrusted` that appear in `ids`.
template <typename Scalar = double>
VectorX<Scalar> pretrust_distribution(std::span<const std::string> ids,
                                      const std::set<std::string>& pretrusted) {
  VectorX<Scalar> p = VectorX<Scalar>::Zero(static_cast<Eigen::Index>(ids.size()));
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (pretrusted.contains(ids[i])) {
      p(static_cast<Eigen::Index>(i)) = Scalar(1);
      ++hits;
    }
  }
  if (hits == 0) throw std::invalid_argument("reputation: no pretrusted peer among the facilitators");
  return p / Scalar(hits);
}

/// Turns raw pairwise scores into a local trust matrix: the diagonal is
/// ignored, negatives clamp to zero, each row is normalized, and rows with
/// no positive evidence fall back to `pretrust`.
template <typename Scalar>
LocalTrustMatrix<Scalar> normalize_scores(std::vector<std::string> ids, const MatrixX<Scalar>& raw,
                                          const VectorX<Scalar>& pretrust) {
  const auto k = static_cast<Eigen::Index>(ids.size());
  if (raw.rows() != k || raw.cols() != k || pretrust.size() != k) {
    throw std::invalid_argument("reputation: score matrix shape does not match ids");
  }
  LocalTrustMatrix<Scalar> out{std::move(ids), raw.cwiseMax(Scalar(0))};
  out.c.diagonal().setZero();
  for (Eigen::Index i = 0; i < k; ++i) {
    const Scalar sum = out.c.row(i).sum();
    if (sum > 0) {
      out.c.row(i) /= sum;
    } else {
      out.c.row(i) = pretrust.transpose();
    }
  }
  return out;
}

/// Damped power iteration t <- (1 - damping) c^T t + damping p, started at
/// the pre-trust vector p and stopped when the max-norm change drops below
/// params.tolerance. Each step costs O(nonzeros of c).
template <typename Scalar>
GlobalTrustVector<Scalar> global_trust(const LocalTrustMatrix<Scalar>& local,
                                       const ReputationParams<Scalar>& params) {
  params.validate();
  const VectorX<Scalar> p = pretrust_distribution<Scalar>(local.ids, params.pretrusted);
  const Scalar carry = Scalar(1) - params.damping;

  GlobalTrustVector<Scalar> out{local.ids, p, 0, false};
  VectorX<Scalar> next(p.size());
  while (out.iterations < params.max_iters) {
    next.noalias() = carry * (local.c.transpose() * out.t);
    next += params.damping * p;
    const Scalar delta = (next - out.t).cwiseAbs().maxCoeff();
    out.t.swap(next);
    ++out.iterations;
    if (delta < params.tolerance) {
      out.converged = true;
      break;
    }
  }

  const Scalar sum = out.t.sum();
  const Scalar slack = Scalar(64) * std::numeric_limits<Scalar>::epsilon();
  if (sum > 0 && std::abs(sum - Scalar(1)) > slack) out.t /= sum;
  return out;
}

/// weight(j) = t(j) / bid(j), normalized to sum 1. Facilitators unknown to
/// `trust` weigh zero. All weights are zero when no candidate has trust.
template <typename Scalar>
VectorX<Scalar> selection_weights(const GlobalTrustVector<Scalar>& trust,
                                  std::span<const std::string> candidates,
                                  std::span<const Amount> fee_bids) {
  if (candidates.size() != fee_bids.size()) {
    throw std::invalid_argument("selection_weights: one bid per candidate required");
  }
  VectorX<Scalar> w(static_cast<Eigen::Index>(candidates.size()));
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    if (fee_bids[j].value() == 0) {
      throw std::invalid_argument("selection_weights: zero fee bid from " + candidates[j]);
    }
    w(static_cast<Eigen::Index>(j)) =
        trust.trust_of(candidates[j]) / static_cast<Scalar>(fee_bids[j].value());
  }
  const Scalar sum = w.sum();
  if (sum > 0) w /= sum;
  return w;
}

/// Inserts `id` with trust newcomer_prior times the smallest positive
/// incumbent trust, then renormalizes.
template <typename Scalar>
GlobalTrustVector<Scalar> admit_newcomer(const GlobalTrustVector<Scalar>& trust, const std::string& id,
                                         const ReputationParams<Scalar>& params) {
  if (trust.index_of(id)) throw std::invalid_argument("admit_newcomer: duplicate id " + id);
  if (!(params.newcomer_prior >= 0 && params.newcomer_prior < 1)) {
    throw std::invalid_argument("admit_newcomer: newcomer_prior outside [0,1)");
  }
  Scalar floor = Scalar(0);
  for (Eigen::Index i = 0; i < trust.t.size(); ++i) {
    const Scalar v = trust.t(i);
    if (v > 0 && (floor == 0 || v < floor)) floor = v;
  }

  GlobalTrustVector<Scalar> out = trust;
  out.ids.push_back(id);
  out.t.conservativeResize(trust.t.size() + 1);
  out.t(trust.t.size()) = params.newcomer_prior * floor;
  const Scalar sum = out.t.sum();
  if (sum > 0) out.t /= sum;
  return out;
}

}  // namespace uberledger
