#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "sybilshare/core.hpp"

namespace sybilshare {

// H_n = sum_{i=1..n} 1/i, H_0 = 0.
double harmonic(std::size_t n);

struct HarmonicTable {
  explicit HarmonicTable(std::size_t n);
  double operator[](std::size_t k) const { return h_[k]; }
  std::size_t size() const { return h_.size(); }

 private:
  std::vector<double> h_;
};

enum class MechanismId { vcg, shapley, potential, optimal_sybil_proof, hybrid };

std::string_view to_string(MechanismId id);
std::optional<MechanismId> parse_mechanism(std::string_view name);

// Serves everyone iff the bid total strictly exceeds c; winners pay their
// externality max{0, c - sum of the others' bids}. Can run a deficit.
Outcome run_vcg(const BidVector& bids, Money c);

// Largest k (bids sorted descending) with b_(k) >= C([k])/k; the top k are
// served and split C([k]) equally. Budget balanced by construction.
Outcome run_shapley(const BidVector& bids, const CostFunction& cost);

// Surplus maximizer for sum(bids in S) - H_|S|, ties toward the larger set;
// winners pay the two-bracket marginal difference, recomputing the maximizer
// with their own bid zeroed. Stated for unit cost only.
Outcome run_potential(const BidVector& bids, Money c);

// Serve everyone bidding at least c/2 (at least two of them), a single
// bidder only if it covers c alone.
Outcome run_optimal_sybil_proof(const BidVector& bids, Money c);

// Surplus-maximizing set, then drop low bidders until all pass
// C(S*)/|S| where the numerator stays at the original maximizer size;
// winners pay the minimum bid at which they would still win.
Outcome run_hybrid(const BidVector& bids, const CostFunction& cost);

struct Mechanism {
  std::string name;
  CostFunction cost;
  std::function<Outcome(const BidVector&)> run;
};

// Binds a catalog mechanism to a cost function. Rejects incompatible pairs:
// vcg and osp need a constant cost, potential needs constant cost 1.
Mechanism make_mechanism(MechanismId id, const CostFunction& cost);

// Non-excludable baseline: serves all iff every bid covers the equal share
// c/n (each winner pays c/n), otherwise serves nobody. Used by the welfare
// comparisons as the all-or-none reference point.
Mechanism make_all_or_none_baseline(Money c);

}  // namespace sybilshare
