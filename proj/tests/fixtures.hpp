#pragma once

// Deliberately flawed mechanisms used to prove the checkers can fail.

#include "sybilshare/mechanisms.hpp"

namespace fixtures {

// Shapley allocation but winners pay their own bid: truthful agents strictly
// above threshold prefer shading down.
inline sybilshare::Mechanism first_price_shapley(const sybilshare::CostFunction& cost) {
  sybilshare::Mechanism mech;
  mech.name = "first-price-shapley";
  mech.cost = cost;
  mech.run = [cost](const sybilshare::BidVector& bids) {
    sybilshare::Outcome out = sybilshare::run_shapley(bids, cost);
    for (std::size_t i = 0; i < bids.size(); ++i) {
      if (out.wins(i)) out.payment[i] = bids[i];
    }
    sybilshare::require_outcome_invariants(bids, out);
    return out;
  };
  return mech;
}

// Serves everybody whenever anyone bids, charging nothing: breaks consumer
// sovereignty scoring (positive social cost against a zero optimum).
inline sybilshare::Mechanism always_serve(sybilshare::Money c) {
  sybilshare::Mechanism mech;
  mech.name = "always-serve";
  mech.cost = sybilshare::CostFunction::constant(c);
  mech.run = [](const sybilshare::BidVector& bids) {
    sybilshare::Outcome out{std::vector<char>(bids.size(), 1),
                            std::vector<sybilshare::Money>(bids.size(), 0.0)};
    return out;
  };
  return mech;
}

}  // namespace fixtures
