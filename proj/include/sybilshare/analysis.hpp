#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "sybilshare/sybil.hpp"
#include "sybilshare/threads.hpp"

namespace sybilshare {

// Exhaustive searches refuse to enumerate beyond this many identities.
inline constexpr std::size_t kExhaustiveIdentityCap = 12;

// Off-grid extremal valuations sit at 1/i - delta; the grids are always
// augmented with these points because the worst cases live just below the
// mechanism thresholds for generic steps.
inline constexpr Money kWitnessDelta = 1e-6;

struct Grid {
  Money step = 0.05;
  Money max_value = 1.0;
  std::size_t max_sybils = 3;
  std::size_t max_agents = 3;

  void require_valid() const;  // throws std::invalid_argument

  // Step multiples in [0, max_value] plus the witness points, descending.
  std::vector<Money> values() const;
};

enum class Verdict { pass, violated };
std::string_view to_string(Verdict v);

struct DeviationWitness {
  ValuationProfile valuations;  // deviator first, opponents after
  std::size_t deviator = 0;
  SybilProfile reports;  // per-agent bid lists actually submitted
  Money truthful_utility = 0;
  Money deviant_utility = 0;
};

// Violated verdicts carry a witness that replays: re-evaluating the reports
// reproduces the utility gap. The witness is the first hit in a fixed
// enumeration order (values descending, then multiset rank), independent of
// the worker count. cases_examined counts cases up to and including the hit,
// or the whole space on a pass.
struct CheckReport {
  Verdict verdict = Verdict::pass;
  std::optional<DeviationWitness> witness;
  std::uint64_t cases_examined = 0;
  double elapsed_ms = 0;
  std::string note;
};

// Enumerates valuation profiles (deviator value x opponent multisets, all on
// the grid) and single-identity misreports; violated iff some misreport
// beats truth-telling by more than kUtilityTol.
CheckReport check_truthful(const Mechanism& mech, const Grid& grid, Exec exec = Exec::parallel);

// Same profile space, but the deviator submits 1..max_sybils identity bids
// drawn from the grid plus the special points {v, v/2, v/3, 1, 1+step}.
CheckReport check_sybil_proof(const Mechanism& mech, const Grid& grid, Exec exec = Exec::parallel);

struct MonotonicityViolation : std::runtime_error {
  MonotonicityViolation(Money win_at, Money lose_at);
  Money winning_bid;
  Money losing_bid;
};

// Myerson threshold: the infimum bid at which `identity` wins against the
// fixed others, found by bisection on [0, max(others) + cost + 1]. Returns
// nullopt if the identity never wins up to that bound. Throws
// MonotonicityViolation when a coarse scan finds a non-monotone win region.
std::optional<Money> threshold_payment(const Mechanism& mech, std::size_t identity,
                                       const BidVector& others, Money tol = 1e-9);

// Random grid pairs b <= b'; asserts winners(b) is a subset of winners(b'),
// and optionally that per-winner payments do not increase (Shapley).
CheckReport check_strong_monotonic(const Mechanism& mech, std::size_t samples, const Grid& grid,
                                   bool payments_non_increasing = false,
                                   std::uint64_t seed = 0x5eed0001u, Exec exec = Exec::parallel);

enum class BudgetClass { balanced, surplus, deficit };
std::string_view to_string(BudgetClass c);

struct BudgetReport {
  BudgetClass worst = BudgetClass::balanced;
  std::uint64_t balanced_cases = 0;
  std::uint64_t surplus_cases = 0;
  std::uint64_t deficit_cases = 0;
  std::optional<BidVector> worst_example;
  std::uint64_t cases_examined = 0;
  double elapsed_ms = 0;
};

// Classifies sum(payments) against C(winners) on every grid profile and
// aggregates the worst case (deficit > surplus > balanced).
BudgetReport check_budget(const Mechanism& mech, const Grid& grid, Exec exec = Exec::parallel);

// Random profiles: permutations must permute the outcome (compared as
// multisets to quotient over equal-bid tie-breaking, exactly when bids are
// distinct), and appending zero bids must not change the outcome restricted
// to the original identities.
CheckReport check_anonymity_consistency(const Mechanism& mech, std::size_t samples,
                                        std::uint64_t seed = 0x5eed0002u,
                                        Exec exec = Exec::parallel);

}  // namespace sybilshare
