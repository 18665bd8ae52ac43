#pragma once

#include "sybilshare/analysis.hpp"

namespace sybilshare {

// pi(S) = C(S) + sum of valuations outside S.
Money social_cost(const CostFunction& cost, const std::vector<char>& served,
                  const ValuationProfile& v);
Money social_cost(const CostFunction& cost, const std::vector<std::size_t>& served,
                  const ValuationProfile& v);

struct OptimalAllocation {
  std::vector<std::size_t> served;
  Money cost = 0;
};

// Minimizes pi over prefixes of agents sorted by descending valuation; a
// swap argument makes prefixes optimal for symmetric costs (the tests check
// this against a full 2^n scan).
OptimalAllocation optimal_allocation(const CostFunction& cost, const ValuationProfile& v);

// Social cost of the Sybil extension: winners lifted to the agent level S',
// scored as C(S') + sum of valuations outside S'.
Money sybil_social_cost(const Mechanism& mech, const ValuationProfile& v,
                        const SybilProfile& reports);

struct WelfareScore {
  std::vector<std::size_t> allocation;  // served agents
  Money social = 0;
  Money optimal = 0;
  double ratio = 1.0;
  bool infinite = false;  // pi* = 0 with pi > 0: consumer sovereignty failure
};

// Runs the mechanism on truthful bids and scores against the optimum.
// ratio = 1 whenever pi = 0 (then pi* = 0 as well).
WelfareScore approx_ratio(const Mechanism& mech, const ValuationProfile& v);

struct WorstCase {
  double ratio = 1.0;
  ValuationProfile witness;
  std::vector<ValuationProfile> infinite_witnesses;  // reported separately
  std::uint64_t cases_examined = 0;
  double elapsed_ms = 0;
};

// Max of approx_ratio over all n-agent profiles drawn from the grid values
// (witness points included); profiles are enumerated as non-increasing
// tuples, which is exhaustive up to agent anonymity.
WorstCase worst_case_ratio(const Mechanism& mech, std::size_t n, const Grid& grid,
                           Exec exec = Exec::parallel);

// Discretized z-form representatives of the strategy set B(v): first entry
// v, entry l drawn from step multiples (plus the bound itself) within
// [0, min(v/l, f(1)/l)], entries non-increasing.
struct StrategySet {
  Money valuation = 0;
  Money step = 0;
  std::vector<std::vector<Money>> strategies;
};

StrategySet enumerate_B(Money v, const CostFunction& cost, Money step, std::size_t max_ids);

// z_1 = v, z_l = min{b_l, v/l, f(1)/l}: the dominating B(v) representative.
std::vector<Money> canonical_z(std::vector<Money> bids, Money v, const CostFunction& cost);

// Exhausts b in the product of enumerate_B(v_i); violated iff some strategy
// profile pushes the Sybil social cost above the truthful Shapley social
// cost by more than kUtilityTol. The witness reuses DeviationWitness with
// utilities holding (truthful pi, sybil pi).
CheckReport check_swi_shapley(const CostFunction& cost, const ValuationProfile& v, Money step,
                              std::size_t max_ids, Exec exec = Exec::parallel);

struct BestResponse {
  std::vector<Money> strategy;
  Money utility = 0;
  std::uint64_t strategies_examined = 0;
};

// Exhaustive max over enumerate_B(valuation) against a fixed opponent
// profile (a point-mass belief); ties resolved toward fewer identities,
// then the lexicographically smaller bid list.
BestResponse best_response(const Mechanism& mech, Money valuation, const SybilProfile& opponents,
                           Money step, std::size_t max_ids);

}  // namespace sybilshare
