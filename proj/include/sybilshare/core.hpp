#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace sybilshare {

using Money = double;

// Absolute tolerance for money comparisons. Every grid used by the search
// drivers has step >= 0.01, so this sits far below anything meaningful.
inline constexpr Money kMoneyTol = 1e-9;

// Tolerance for utility-gap verdicts in the checkers: above accumulated
// float error, below the smallest gain expressible on a 0.01 grid.
inline constexpr Money kUtilityTol = 1e-7;

inline bool money_ge(Money a, Money b, Money tol = kMoneyTol) { return a >= b - tol; }
inline bool money_gt(Money a, Money b, Money tol = kMoneyTol) { return a > b + tol; }
inline bool money_eq(Money a, Money b, Money tol = kMoneyTol) { return std::fabs(a - b) <= tol; }

using BidVector = std::vector<Money>;
using ValuationProfile = std::vector<Money>;

// One finite bid list per true agent. An empty list means the agent
// abstains and is normalized to a single zero bid before flattening.
using SybilProfile = std::vector<std::vector<Money>>;

enum class CostKind { constant, concave };

// Tables define f(0..len-1) and extend past their last entry at the final
// value (a zero marginal cost), up to max_cardinality().
inline constexpr std::size_t kDefaultMaxCardinality = 64;

// Service cost as a function of how many identities are served: either a
// flat charge for any non-empty set, or a table for symmetric concave costs.
class CostFunction {
 public:
  CostFunction() = default;  // Constant(1)
  static CostFunction constant(Money c);
  static CostFunction concave(std::vector<Money> table);

  CostKind kind() const { return kind_; }
  bool is_constant() const { return kind_ == CostKind::constant; }
  Money constant_cost() const;
  const std::vector<Money>& table() const;
  std::size_t max_cardinality() const;
  std::string kind_name() const { return is_constant() ? "constant" : "concave"; }

 private:
  CostKind kind_ = CostKind::constant;
  Money c_ = 1.0;
  std::vector<Money> table_;
};

// C(S) for |S| = k. Zero for the empty set regardless of kind. Throws
// std::out_of_range above max_cardinality() for table-backed costs.
Money cost_of(const CostFunction& cost, std::size_t k);

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Reports every violated invariant (non-positive c, f(0) != 0, non-monotone
// table, non-concave increments) instead of stopping at the first.
ValidationReport validate_cost_function(const CostFunction& cost);

struct Outcome {
  std::vector<char> winner;
  std::vector<Money> payment;

  std::size_t size() const { return winner.size(); }
  bool wins(std::size_t i) const { return winner[i] != 0; }
  std::size_t winner_count() const;
  Money total_payment() const;
  std::vector<std::size_t> winner_indices() const;
};

// NPT, IR and losers-pay-nothing. Every mechanism run passes through this;
// a throw here is a mechanism bug, not bad input.
void require_outcome_invariants(const BidVector& bids, const Outcome& out);

}  // namespace sybilshare
