#pragma once

#include <utility>

#include "sybilshare/mechanisms.hpp"

namespace sybilshare {

struct OwnerMap {
  std::vector<std::size_t> owner;                          // identity -> agent
  std::vector<std::pair<std::size_t, std::size_t>> block;  // agent -> [first, last)

  std::size_t agent_count() const { return block.size(); }
  std::size_t identity_count() const { return owner.size(); }
};

// Empty per-agent lists become a single zero bid.
SybilProfile normalized(SybilProfile profile);

// Concatenates bid lists in agent order. Throws std::invalid_argument on
// negative or non-finite bids.
std::pair<BidVector, OwnerMap> flatten(const SybilProfile& profile);

struct SybilOutcome {
  std::vector<char> served;          // agent has some winning identity
  std::vector<Money> total_payment;  // summed over the agent's identities
  Outcome identities;
  OwnerMap owners;

  bool agent_served(std::size_t a) const { return served[a] != 0; }
};

// Flatten, run the base mechanism on all identities, aggregate per agent.
SybilOutcome run_sybil_extension(const Mechanism& mech, const SybilProfile& profile);

Money agent_utility(Money valuation, const SybilOutcome& out, std::size_t agent);

}  // namespace sybilshare
