#include "sybilshare/sybil.hpp"

#include <cmath>
#include <stdexcept>

namespace sybilshare {

SybilProfile normalized(SybilProfile profile) {
  for (auto& list : profile) {
    if (list.empty()) list.push_back(0.0);
  }
  return profile;
}

std::pair<BidVector, OwnerMap> flatten(const SybilProfile& profile) {
  BidVector bids;
  OwnerMap owners;
  owners.block.reserve(profile.size());
  for (std::size_t a = 0; a < profile.size(); ++a) {
    const std::size_t first = bids.size();
    if (profile[a].empty()) {
      bids.push_back(0.0);
      owners.owner.push_back(a);
    } else {
      for (Money b : profile[a]) {
        if (!(b >= 0.0) || !std::isfinite(b)) {
          throw std::invalid_argument("sybil profile bids must be non-negative and finite");
        }
        bids.push_back(b);
        owners.owner.push_back(a);
      }
    }
    owners.block.emplace_back(first, bids.size());
  }
  return {std::move(bids), std::move(owners)};
}

SybilOutcome run_sybil_extension(const Mechanism& mech, const SybilProfile& profile) {
  auto [bids, owners] = flatten(profile);
  SybilOutcome out;
  out.identities = mech.run(bids);
  out.owners = std::move(owners);
  const std::size_t agents = out.owners.agent_count();
  out.served.assign(agents, 0);
  out.total_payment.assign(agents, 0.0);
  for (std::size_t a = 0; a < agents; ++a) {
    const auto [first, last] = out.owners.block[a];
    for (std::size_t j = first; j < last; ++j) {
      if (out.identities.wins(j)) out.served[a] = 1;
      out.total_payment[a] += out.identities.payment[j];
    }
  }
  return out;
}

Money agent_utility(Money valuation, const SybilOutcome& out, std::size_t agent) {
  if (agent >= out.owners.agent_count()) throw std::out_of_range("agent index out of range");
  return (out.agent_served(agent) ? valuation : 0.0) - out.total_payment[agent];
}

}  // namespace sybilshare
