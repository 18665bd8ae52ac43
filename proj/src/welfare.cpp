#include "sybilshare/welfare.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "enumeration.hpp"

namespace sybilshare {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

Money social_cost(const CostFunction& cost, const std::vector<char>& served,
                  const ValuationProfile& v) {
  if (served.size() != v.size()) throw std::invalid_argument("social_cost: size mismatch");
  std::size_t k = 0;
  Money excluded = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (served[i]) {
      ++k;
    } else {
      excluded += v[i];
    }
  }
  return cost_of(cost, k) + excluded;
}

Money social_cost(const CostFunction& cost, const std::vector<std::size_t>& served,
                  const ValuationProfile& v) {
  std::vector<char> mask(v.size(), 0);
  for (std::size_t i : served) {
    if (i >= v.size()) throw std::out_of_range("social_cost: agent index out of range");
    mask[i] = 1;
  }
  return social_cost(cost, mask, v);
}

OptimalAllocation optimal_allocation(const CostFunction& cost, const ValuationProfile& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });

  Money total = 0;
  for (Money x : v) total += x;

  // Prefixes of the sorted valuations; serving anything else can only swap a
  // served agent for a higher-value excluded one.
  Money best = total;  // k = 0
  std::size_t best_k = 0;
  Money prefix = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    prefix += v[order[k - 1]];
    const Money pi = cost_of(cost, k) + (total - prefix);
    if (pi < best - kMoneyTol) {
      best = pi;
      best_k = k;
    }
  }
  OptimalAllocation out;
  out.cost = best;
  out.served.assign(order.begin(), order.begin() + std::ptrdiff_t(best_k));
  std::sort(out.served.begin(), out.served.end());
  return out;
}

Money sybil_social_cost(const Mechanism& mech, const ValuationProfile& v,
                        const SybilProfile& reports) {
  if (reports.size() != v.size()) throw std::invalid_argument("sybil_social_cost: size mismatch");
  const SybilOutcome out = run_sybil_extension(mech, reports);
  return social_cost(mech.cost, out.served, v);
}

WelfareScore approx_ratio(const Mechanism& mech, const ValuationProfile& v) {
  const Outcome out = mech.run(v);
  WelfareScore score;
  score.allocation = out.winner_indices();
  score.social = social_cost(mech.cost, out.winner, v);
  score.optimal = optimal_allocation(mech.cost, v).cost;
  if (score.social < score.optimal - kMoneyTol) {
    throw std::logic_error("approx_ratio: social cost below the optimum");
  }
  if (score.optimal > kMoneyTol) {
    score.ratio = score.social / score.optimal;
  } else if (score.social <= kMoneyTol) {
    score.ratio = 1.0;
  } else {
    score.ratio = std::numeric_limits<double>::infinity();
    score.infinite = true;
  }
  return score;
}

WorstCase worst_case_ratio(const Mechanism& mech, std::size_t n, const Grid& grid, Exec exec) {
  grid.require_valid();
  if (n > kExhaustiveIdentityCap) {
    throw std::invalid_argument("worst_case_ratio: n exceeds the exhaustive cap");
  }
  const auto start = Clock::now();
  const std::vector<Money> values = grid.values();
  const detail::MultisetSpace space(values.size(), n);

  auto profile_at = [&](std::uint64_t g, ValuationProfile& v) {
    std::size_t idx[kExhaustiveIdentityCap];
    space.unrank(g, idx);
    v.resize(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = values[idx[j]];
  };

  // One pass: track the max finite ratio (ties toward the smaller rank) and
  // collect infinite ratios, which mark consumer-sovereignty failures and are
  // reported on the side.
  struct Local {
    double best = -std::numeric_limits<double>::infinity();
    std::uint64_t best_at = detail::kNoHit;
    std::vector<std::uint64_t> infinite;
  };
  auto visit = [&](Local& acc, std::uint64_t g, ValuationProfile& v) {
    profile_at(g, v);
    const WelfareScore score = approx_ratio(mech, v);
    if (score.infinite) {
      if (acc.infinite.size() < 16) acc.infinite.push_back(g);
      return;
    }
    if (score.ratio > acc.best || (score.ratio == acc.best && g < acc.best_at)) {
      acc.best = score.ratio;
      acc.best_at = g;
    }
  };
  auto merge = [](Local& into, const Local& from) {
    if (from.best > into.best || (from.best == into.best && from.best_at < into.best_at)) {
      into.best = from.best;
      into.best_at = from.best_at;
    }
    into.infinite.insert(into.infinite.end(), from.infinite.begin(), from.infinite.end());
  };

  Local acc;
#ifdef _OPENMP
  if (exec == Exec::parallel && space.total > 1024) {
#pragma omp parallel num_threads(worker_count())
    {
      Local local;
      ValuationProfile v;
#pragma omp for schedule(dynamic, 256) nowait
      for (long long g = 0; g < static_cast<long long>(space.total); ++g) {
        visit(local, std::uint64_t(g), v);
      }
#pragma omp critical(sybilshare_wc)
      merge(acc, local);
    }
  } else
#else
  (void)exec;
#endif
  {
    ValuationProfile v;
    for (std::uint64_t g = 0; g < space.total; ++g) visit(acc, g, v);
  }

  WorstCase wc;
  wc.cases_examined = space.total;
  if (acc.best_at != detail::kNoHit) {
    wc.ratio = acc.best;
    profile_at(acc.best_at, wc.witness);
  }
  std::sort(acc.infinite.begin(), acc.infinite.end());
  if (acc.infinite.size() > 16) acc.infinite.resize(16);
  for (std::uint64_t g : acc.infinite) {
    ValuationProfile v;
    profile_at(g, v);
    wc.infinite_witnesses.push_back(v);
  }
  wc.elapsed_ms = ms_since(start);
  return wc;
}

StrategySet enumerate_B(Money v, const CostFunction& cost, Money step, std::size_t max_ids) {
  if (!(step > 0)) throw std::invalid_argument("enumerate_B: step must be positive");
  if (max_ids < 1) throw std::invalid_argument("enumerate_B: max_ids must be at least 1");
  if (!(v >= 0)) throw std::invalid_argument("enumerate_B: valuation must be non-negative");

  const Money f1 = cost_of(cost, 1);
  StrategySet set;
  set.valuation = v;
  set.step = step;

  // Per-level menus: step multiples within [0, min(v/l, f(1)/l)] plus the
  // bound itself (the canonical z value).
  std::vector<std::vector<Money>> menu(max_ids + 1);
  for (std::size_t l = 2; l <= max_ids; ++l) {
    const Money bound = std::min(v / double(l), f1 / double(l));
    auto& m = menu[l];
    for (std::size_t i = 0;; ++i) {
      const Money x = step * double(i);
      if (x > bound + kMoneyTol) break;
      m.push_back(x);
    }
    if (m.empty() || std::fabs(m.back() - bound) > 1e-12) m.push_back(bound);
    std::sort(m.begin(), m.end(), std::greater<>());
    m.erase(std::unique(m.begin(), m.end(),
                        [](Money a, Money b) { return std::fabs(a - b) <= 1e-12; }),
            m.end());
  }

  std::vector<Money> current{v};
  auto extend = [&](auto&& self, std::size_t level) -> void {
    set.strategies.push_back(current);
    if (level > max_ids) return;
    for (Money x : menu[level]) {
      if (x > current.back() + kMoneyTol) continue;  // keep the z-form sorted
      current.push_back(x);
      self(self, level + 1);
      current.pop_back();
    }
  };
  extend(extend, 2);
  return set;
}

std::vector<Money> canonical_z(std::vector<Money> bids, Money v, const CostFunction& cost) {
  std::sort(bids.begin(), bids.end(), std::greater<>());
  const Money f1 = cost_of(cost, 1);
  std::vector<Money> z(bids.size());
  if (!bids.empty()) z[0] = v;
  for (std::size_t l = 1; l < bids.size(); ++l) {
    const double rank = double(l + 1);
    z[l] = std::min(bids[l], std::min(v / rank, f1 / rank));
  }
  return z;
}

CheckReport check_swi_shapley(const CostFunction& cost, const ValuationProfile& v, Money step,
                              std::size_t max_ids, Exec exec) {
  const auto start = Clock::now();
  if (v.size() > 4) {
    throw std::invalid_argument("check_swi_shapley: exhaustive mode supports at most 4 agents");
  }
  const Mechanism shapley = make_mechanism(MechanismId::shapley, cost);

  const Outcome truthful = shapley.run(v);
  const Money truthful_pi = social_cost(cost, truthful.winner, v);

  std::vector<StrategySet> sets;
  sets.reserve(v.size());
  std::uint64_t total = v.empty() ? 0 : 1;
  for (Money vi : v) {
    sets.push_back(enumerate_B(vi, cost, step, max_ids));
    total *= sets.back().strategies.size();
  }

  const std::size_t n = v.size();
  auto sybil_pi_at = [&](std::uint64_t g, SybilProfile* capture) {
    std::size_t served_count = 0;
    Money excluded = 0;
    std::uint64_t rest = g;
    // Decode the mixed-radix strategy choice and run the flat profile.
    thread_local BidVector flat;
    thread_local std::vector<std::size_t> first;
    flat.clear();
    first.resize(n + 1);
    for (std::size_t a = 0; a < n; ++a) {
      const auto& strategies = sets[a].strategies;
      const std::size_t pick = std::size_t(rest % strategies.size());
      rest /= strategies.size();
      first[a] = flat.size();
      flat.insert(flat.end(), strategies[pick].begin(), strategies[pick].end());
      if (capture) capture->push_back(strategies[pick]);
    }
    first[n] = flat.size();
    const Outcome out = shapley.run(flat);
    for (std::size_t a = 0; a < n; ++a) {
      bool served = false;
      for (std::size_t j = first[a]; j < first[a + 1]; ++j) served = served || out.wins(j);
      if (served) {
        ++served_count;
      } else {
        excluded += v[a];
      }
    }
    return cost_of(cost, served_count) + excluded;
  };

  const std::uint64_t hit = detail::scan_first_hit(total, exec, [&](std::uint64_t g) {
    return sybil_pi_at(g, nullptr) > truthful_pi + kUtilityTol;
  });

  CheckReport report;
  report.cases_examined = total == 0 ? 0 : std::min<std::uint64_t>(hit + 1, total);
  report.note = "sybil social cost vs truthful social cost";
  const Money f1 = cost_of(cost, 1);
  if (!money_eq(f1, 1.0)) {
    report.note += "; strategy bounds scaled by f(1) = " + std::to_string(f1);
  }
  if (hit < total) {
    report.verdict = Verdict::violated;
    DeviationWitness w;
    w.valuations = v;
    const Money pi = sybil_pi_at(hit, &w.reports);
    w.truthful_utility = truthful_pi;
    w.deviant_utility = pi;
    report.witness = w;
  }
  report.elapsed_ms = ms_since(start);
  return report;
}

BestResponse best_response(const Mechanism& mech, Money valuation, const SybilProfile& opponents,
                           Money step, std::size_t max_ids) {
  const StrategySet set = enumerate_B(valuation, mech.cost, step, max_ids);
  BestResponse best;
  best.strategies_examined = set.strategies.size();

  SybilProfile profile;
  profile.push_back({});
  for (const auto& opp : opponents) profile.push_back(opp);

  bool have = false;
  for (const auto& strategy : set.strategies) {
    profile[0] = strategy;
    const SybilOutcome out = run_sybil_extension(mech, profile);
    const Money u = agent_utility(valuation, out, 0);
    if (!have || u > best.utility + kUtilityTol) {
      best.strategy = strategy;
      best.utility = u;
      have = true;
    } else if (u >= best.utility - kUtilityTol) {
      // Tie: prefer fewer identities, then the lexicographically smaller list.
      best.utility = std::max(best.utility, u);
      if (strategy.size() < best.strategy.size() ||
          (strategy.size() == best.strategy.size() &&
           std::lexicographical_compare(strategy.begin(), strategy.end(), best.strategy.begin(),
                                        best.strategy.end()))) {
        best.strategy = strategy;
      }
    }
  }
  return best;
}

}  // namespace sybilshare
