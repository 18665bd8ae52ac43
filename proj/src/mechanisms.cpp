#include "sybilshare/mechanisms.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace sybilshare {

double harmonic(std::size_t n) {
  double h = 0;
  for (std::size_t i = 1; i <= n; ++i) h += 1.0 / double(i);
  return h;
}

HarmonicTable::HarmonicTable(std::size_t n) : h_(n + 1, 0.0) {
  for (std::size_t i = 1; i <= n; ++i) h_[i] = h_[i - 1] + 1.0 / double(i);
}

std::string_view to_string(MechanismId id) {
  switch (id) {
    case MechanismId::vcg: return "vcg";
    case MechanismId::shapley: return "shapley";
    case MechanismId::potential: return "potential";
    case MechanismId::optimal_sybil_proof: return "osp";
    case MechanismId::hybrid: return "hybrid";
  }
  return "?";
}

std::optional<MechanismId> parse_mechanism(std::string_view name) {
  if (name == "vcg") return MechanismId::vcg;
  if (name == "shapley") return MechanismId::shapley;
  if (name == "potential") return MechanismId::potential;
  if (name == "osp" || name == "optimal-sybil-proof") return MechanismId::optimal_sybil_proof;
  if (name == "hybrid") return MechanismId::hybrid;
  return std::nullopt;
}

namespace {

// Descending by bid, equal bids in identity order.
std::vector<std::size_t> descending_order(const BidVector& bids) {
  std::vector<std::size_t> idx(bids.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return bids[a] > bids[b]; });
  return idx;
}

// Largest prefix maximizing surplus(k); values within kMoneyTol count as a
// tie and resolve toward the larger set.
template <class Surplus>
std::size_t argmax_prefix(std::size_t n, Surplus&& surplus, double* best_value = nullptr) {
  double best = 0.0;  // k = 0 scores zero
  std::size_t best_k = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double value = surplus(k);
    if (value > best + kMoneyTol) {
      best = value;
      best_k = k;
    } else if (value >= best - kMoneyTol) {
      best = std::max(best, value);
      best_k = k;
    }
  }
  if (best_value) *best_value = best;
  return best_k;
}

Money snap_tiny(Money p) { return std::fabs(p) < 1e-12 ? 0.0 : p; }

}  // namespace

Outcome run_vcg(const BidVector& bids, Money c) {
  if (!(c > 0)) throw std::invalid_argument("vcg: cost must be positive");
  const std::size_t n = bids.size();
  Outcome out{std::vector<char>(n, 0), std::vector<Money>(n, 0.0)};
  const Money total = std::accumulate(bids.begin(), bids.end(), Money{0});
  if (money_gt(total, c)) {  // an exact tie stays unfunded
    for (std::size_t i = 0; i < n; ++i) {
      out.winner[i] = 1;
      out.payment[i] = std::max(0.0, c - (total - bids[i]));
    }
  }
  require_outcome_invariants(bids, out);
  return out;
}

Outcome run_shapley(const BidVector& bids, const CostFunction& cost) {
  const std::size_t n = bids.size();
  Outcome out{std::vector<char>(n, 0), std::vector<Money>(n, 0.0)};
  if (n == 0) return out;
  const auto order = descending_order(bids);
  std::size_t k = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    if (money_ge(bids[order[i - 1]], cost_of(cost, i) / double(i))) k = i;
  }
  if (k > 0) {
    const Money share = cost_of(cost, k) / double(k);
    for (std::size_t i = 0; i < k; ++i) {
      out.winner[order[i]] = 1;
      out.payment[order[i]] = share;
    }
  }
  require_outcome_invariants(bids, out);
  return out;
}

Outcome run_potential(const BidVector& bids, Money c) {
  if (!money_eq(c, 1.0)) throw std::invalid_argument("potential mechanism is stated for unit cost");
  const std::size_t n = bids.size();
  Outcome out{std::vector<char>(n, 0), std::vector<Money>(n, 0.0)};
  if (n == 0) return out;

  const HarmonicTable h(n);
  const auto order = descending_order(bids);
  std::vector<Money> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + bids[order[i]];

  const std::size_t star =
      argmax_prefix(n, [&](std::size_t k) { return prefix[k] - h[k]; });
  if (star == 0) {
    require_outcome_invariants(bids, out);
    return out;
  }
  for (std::size_t i = 0; i < star; ++i) out.winner[order[i]] = 1;

  // p_i = [max surplus with b_i zeroed] - [surplus of S* minus i's bid]
  BidVector zeroed(n);
  for (std::size_t pos = 0; pos < star; ++pos) {
    const std::size_t i = order[pos];
    zeroed = bids;
    zeroed[i] = 0.0;
    std::sort(zeroed.begin(), zeroed.end(), std::greater<>());
    double acc = 0.0, best = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      acc += zeroed[k - 1];
      best = std::max(best, acc - h[k]);
    }
    const double without_i = (prefix[star] - bids[i]) - h[star];
    out.payment[i] = snap_tiny(best - without_i);
  }
  require_outcome_invariants(bids, out);
  return out;
}

Outcome run_optimal_sybil_proof(const BidVector& bids, Money c) {
  if (!(c > 0)) throw std::invalid_argument("osp: cost must be positive");
  const std::size_t n = bids.size();
  Outcome out{std::vector<char>(n, 0), std::vector<Money>(n, 0.0)};
  if (n == 0) return out;
  const auto order = descending_order(bids);
  const Money half = c / 2.0;
  std::size_t k = 0;
  while (k < n && money_ge(bids[order[k]], half)) ++k;
  if (k >= 2) {
    for (std::size_t i = 0; i < k; ++i) {
      out.winner[order[i]] = 1;
      out.payment[order[i]] = half;
    }
  } else if (k == 1 && money_ge(bids[order[0]], c)) {
    out.winner[order[0]] = 1;
    out.payment[order[0]] = c;
  }
  require_outcome_invariants(bids, out);
  return out;
}

namespace {

std::vector<char> hybrid_winners(const BidVector& bids, const CostFunction& cost) {
  const std::size_t n = bids.size();
  std::vector<char> winner(n, 0);
  if (n == 0) return winner;
  const auto order = descending_order(bids);
  std::vector<Money> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + bids[order[i]];

  const std::size_t star =
      argmax_prefix(n, [&](std::size_t k) { return prefix[k] - cost_of(cost, k); });
  if (star == 0) return winner;

  // The numerator stays at C(S*) while the set shrinks; only the lowest
  // bidder can violate a uniform threshold, so the set stays a prefix.
  const Money numerator = cost_of(cost, star);
  std::size_t s = star;
  while (s > 0 && !money_ge(bids[order[s - 1]], numerator / double(s))) --s;
  for (std::size_t i = 0; i < s; ++i) winner[order[i]] = 1;
  return winner;
}

}  // namespace

Outcome run_hybrid(const BidVector& bids, const CostFunction& cost) {
  const std::size_t n = bids.size();
  Outcome out{hybrid_winners(bids, cost), std::vector<Money>(n, 0.0)};

  // Threshold payments: minimum bid at which the winner keeps winning.
  BidVector probe = bids;
  for (std::size_t i = 0; i < n; ++i) {
    if (!out.winner[i]) continue;
    probe[i] = 0.0;
    if (hybrid_winners(probe, cost)[i]) {
      out.payment[i] = 0.0;
    } else {
      Money lo = 0.0, hi = bids[i];
      for (int iter = 0; iter < 60; ++iter) {
        const Money mid = 0.5 * (lo + hi);
        probe[i] = mid;
        if (hybrid_winners(probe, cost)[i]) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      out.payment[i] = hi;
    }
    probe[i] = bids[i];
  }
  require_outcome_invariants(bids, out);
  return out;
}

Mechanism make_mechanism(MechanismId id, const CostFunction& cost) {
  const auto validation = validate_cost_function(cost);
  if (!validation.ok()) {
    std::string msg = "invalid cost function:";
    for (const auto& v : validation.violations) msg += " " + v + ";";
    throw std::invalid_argument(msg);
  }
  Mechanism mech;
  mech.name = std::string(to_string(id));
  mech.cost = cost;
  switch (id) {
    case MechanismId::vcg: {
      if (!cost.is_constant()) throw std::invalid_argument("vcg requires a constant cost");
      const Money c = cost.constant_cost();
      mech.run = [c](const BidVector& b) { return run_vcg(b, c); };
      break;
    }
    case MechanismId::shapley:
      mech.run = [cost](const BidVector& b) { return run_shapley(b, cost); };
      break;
    case MechanismId::potential: {
      if (!cost.is_constant() || !money_eq(cost.constant_cost(), 1.0)) {
        throw std::invalid_argument("potential requires constant cost 1");
      }
      mech.run = [](const BidVector& b) { return run_potential(b, 1.0); };
      break;
    }
    case MechanismId::optimal_sybil_proof: {
      if (!cost.is_constant()) throw std::invalid_argument("osp requires a constant cost");
      const Money c = cost.constant_cost();
      mech.run = [c](const BidVector& b) { return run_optimal_sybil_proof(b, c); };
      break;
    }
    case MechanismId::hybrid:
      mech.run = [cost](const BidVector& b) { return run_hybrid(b, cost); };
      break;
  }
  return mech;
}

Mechanism make_all_or_none_baseline(Money c) {
  if (!(c > 0)) throw std::invalid_argument("baseline: cost must be positive");
  Mechanism mech;
  mech.name = "all-or-none";
  mech.cost = CostFunction::constant(c);
  mech.run = [c](const BidVector& bids) {
    const std::size_t n = bids.size();
    Outcome out{std::vector<char>(n, 0), std::vector<Money>(n, 0.0)};
    if (n == 0) return out;
    const Money share = c / double(n);
    bool all = true;
    for (Money b : bids) all = all && money_ge(b, share);
    if (all) {
      for (std::size_t i = 0; i < n; ++i) {
        out.winner[i] = 1;
        out.payment[i] = share;
      }
    }
    require_outcome_invariants(bids, out);
    return out;
  };
  return mech;
}

}  // namespace sybilshare
