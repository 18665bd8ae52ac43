#include "sybilshare/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "enumeration.hpp"

namespace sybilshare {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void sort_desc_dedup(std::vector<Money>& v) {
  std::sort(v.begin(), v.end(), std::greater<>());
  v.erase(std::unique(v.begin(), v.end(),
                      [](Money a, Money b) { return std::fabs(a - b) <= 1e-12; }),
          v.end());
}

}  // namespace

void Grid::require_valid() const {
  if (!(step > 0)) throw std::invalid_argument("grid: step must be positive");
  if (step > max_value + kMoneyTol) throw std::invalid_argument("grid: step exceeds max_value");
  if (max_sybils < 1) throw std::invalid_argument("grid: max_sybils must be at least 1");
  if (max_agents < 1) throw std::invalid_argument("grid: max_agents must be at least 1");
  if (max_sybils * max_agents > kExhaustiveIdentityCap) {
    throw std::invalid_argument("grid: max_sybils * max_agents exceeds the exhaustive cap of " +
                                std::to_string(kExhaustiveIdentityCap) + " identities");
  }
}

std::vector<Money> Grid::values() const {
  require_valid();
  std::vector<Money> v;
  for (std::size_t i = 0;; ++i) {
    const Money x = step * double(i);
    if (x > max_value + kMoneyTol) break;
    v.push_back(x);
  }
  for (int d = 1; d <= 8; ++d) {
    const Money w = 1.0 / double(d) - kWitnessDelta;
    if (w > 0 && w <= max_value + kMoneyTol) v.push_back(w);
  }
  sort_desc_dedup(v);
  return v;
}

std::string_view to_string(Verdict v) { return v == Verdict::pass ? "pass" : "violated"; }

std::string_view to_string(BudgetClass c) {
  switch (c) {
    case BudgetClass::balanced: return "budget-balanced";
    case BudgetClass::surplus: return "no-deficit";
    case BudgetClass::deficit: return "deficit";
  }
  return "?";
}

MonotonicityViolation::MonotonicityViolation(Money win_at, Money lose_at)
    : std::runtime_error("non-monotone win region: wins at bid " + std::to_string(win_at) +
                         " but loses at bid " + std::to_string(lose_at)),
      winning_bid(win_at),
      losing_bid(lose_at) {}

namespace {

// Valuation profiles factored as (deviator value, multiset of opponents),
// concatenated over n = 1..max_agents. Exhaustive up to opponent anonymity.
struct ProfileSpace {
  std::vector<Money> values;
  struct Block {
    std::size_t n = 1;
    detail::MultisetSpace opponents;
    std::uint64_t cases = 0;
    std::uint64_t offset = 0;
  };
  std::vector<Block> blocks;
  std::uint64_t total = 0;

  ProfileSpace(std::vector<Money> vals, std::size_t max_agents) : values(std::move(vals)) {
    std::uint64_t off = 0;
    for (std::size_t n = 1; n <= max_agents; ++n) {
      Block b;
      b.n = n;
      b.opponents = detail::MultisetSpace(values.size(), n - 1);
      b.cases = values.size() * b.opponents.total;
      b.offset = off;
      off += b.cases;
      blocks.push_back(b);
    }
    total = off;
  }

  struct Case {
    std::size_t n = 1;
    Money deviator = 0;
    std::vector<Money> opponents;
  };

  Case decode(std::uint64_t g) const {
    for (const Block& b : blocks) {
      if (g < b.offset + b.cases) {
        const std::uint64_t local = g - b.offset;
        Case c;
        c.n = b.n;
        c.deviator = values[std::size_t(local / b.opponents.total)];
        std::size_t idx[kExhaustiveIdentityCap];
        b.opponents.unrank(local % b.opponents.total, idx);
        c.opponents.resize(b.n - 1);
        for (std::size_t j = 0; j + 1 < b.n; ++j) c.opponents[j] = values[idx[j]];
        return c;
      }
    }
    throw std::out_of_range("profile index out of range");
  }
};

// Bid values a deviator may place on each identity: the valuation grid plus
// the knife-edge points the counterexample profiles use.
std::vector<Money> deviation_values(const std::vector<Money>& grid_values, Money v, Money step) {
  std::vector<Money> d = grid_values;
  d.push_back(v);
  d.push_back(v / 2.0);
  d.push_back(v / 3.0);
  d.push_back(1.0);
  d.push_back(1.0 + step);
  sort_desc_dedup(d);
  return d;
}

struct DeviationScan {
  Verdict verdict = Verdict::pass;
  std::uint64_t outer_hit = detail::kNoHit;
  std::uint64_t cases_examined = 0;
  DeviationWitness witness;
};

// Shared engine for the truthfulness and Sybil-proofness checks; they differ
// only in how many identities the deviator may use.
DeviationScan scan_deviations(const Mechanism& mech, const Grid& grid, std::size_t max_sybils,
                              Exec exec) {
  const ProfileSpace space(grid.values(), grid.max_agents);

  auto truthful_utility = [&](const ProfileSpace::Case& c) {
    BidVector bids(c.n);
    bids[0] = c.deviator;
    for (std::size_t j = 0; j + 1 < c.n; ++j) bids[j + 1] = c.opponents[j];
    const Outcome out = mech.run(bids);
    return (out.wins(0) ? c.deviator : 0.0) - out.payment[0];
  };

  // First violating deviation within an outer case, in rank order over the
  // concatenated k = 1..max_sybils multiset spaces.
  struct InnerResult {
    bool violated = false;
    std::uint64_t rank = 0;
    std::vector<Money> deviation;
    Money truthful = 0, deviant = 0;
  };

  auto scan_inner = [&](const ProfileSpace::Case& c) {
    InnerResult res;
    res.truthful = truthful_utility(c);
    const std::vector<Money> dev_values = deviation_values(space.values, c.deviator, grid.step);
    BidVector bids;
    std::size_t idx[kExhaustiveIdentityCap];
    std::uint64_t rank = 0;
    for (std::size_t k = 1; k <= max_sybils; ++k) {
      const detail::MultisetSpace sybils(dev_values.size(), k);
      for (std::uint64_t r = 0; r < sybils.total; ++r, ++rank) {
        sybils.unrank(r, idx);
        bids.resize(k + c.n - 1);
        for (std::size_t j = 0; j < k; ++j) bids[j] = dev_values[idx[j]];
        for (std::size_t j = 0; j + 1 < c.n; ++j) bids[k + j] = c.opponents[j];
        const Outcome out = mech.run(bids);
        bool served = false;
        Money paid = 0;
        for (std::size_t j = 0; j < k; ++j) {
          served = served || out.wins(j);
          paid += out.payment[j];
        }
        const Money u = (served ? c.deviator : 0.0) - paid;
        if (u > res.truthful + kUtilityTol) {
          res.violated = true;
          res.rank = rank;
          res.deviation.assign(bids.begin(), bids.begin() + std::ptrdiff_t(k));
          res.deviant = u;
          return res;
        }
      }
    }
    return res;
  };

  auto inner_size = [&](const ProfileSpace::Case& c) {
    const std::vector<Money> dev_values = deviation_values(space.values, c.deviator, grid.step);
    std::uint64_t t = 0;
    for (std::size_t k = 1; k <= max_sybils; ++k) {
      t += detail::MultisetSpace(dev_values.size(), k).total;
    }
    return t;
  };

  const std::uint64_t hit = detail::scan_first_hit(space.total, exec, [&](std::uint64_t g) {
    return scan_inner(space.decode(g)).violated;
  });

  DeviationScan scan;
  if (hit < space.total) {
    const ProfileSpace::Case c = space.decode(hit);
    const InnerResult inner = scan_inner(c);
    scan.verdict = Verdict::violated;
    scan.outer_hit = hit;
    scan.witness.valuations.push_back(c.deviator);
    scan.witness.valuations.insert(scan.witness.valuations.end(), c.opponents.begin(),
                                   c.opponents.end());
    scan.witness.deviator = 0;
    scan.witness.reports.push_back(inner.deviation);
    for (Money o : c.opponents) scan.witness.reports.push_back({o});
    scan.witness.truthful_utility = inner.truthful;
    scan.witness.deviant_utility = inner.deviant;
    // examined = every case strictly before the hit plus the hit's own rank
    for (std::uint64_t g = 0; g < hit; ++g) {
      scan.cases_examined += inner_size(space.decode(g));
    }
    scan.cases_examined += inner.rank + 1;
  } else {
    for (std::uint64_t g = 0; g < space.total; ++g) {
      scan.cases_examined += inner_size(space.decode(g));
    }
  }
  return scan;
}

CheckReport report_from_scan(const DeviationScan& scan, double elapsed, std::string note) {
  CheckReport report;
  report.verdict = scan.verdict;
  if (scan.verdict == Verdict::violated) report.witness = scan.witness;
  report.cases_examined = scan.cases_examined;
  report.elapsed_ms = elapsed;
  report.note = std::move(note);
  return report;
}

}  // namespace

CheckReport check_truthful(const Mechanism& mech, const Grid& grid, Exec exec) {
  const auto start = Clock::now();
  const DeviationScan scan = scan_deviations(mech, grid, 1, exec);
  return report_from_scan(scan, ms_since(start), "single-identity misreports");
}

CheckReport check_sybil_proof(const Mechanism& mech, const Grid& grid, Exec exec) {
  const auto start = Clock::now();
  const DeviationScan scan = scan_deviations(mech, grid, grid.max_sybils, exec);
  return report_from_scan(scan, ms_since(start), "multi-identity deviations");
}

std::optional<Money> threshold_payment(const Mechanism& mech, std::size_t identity,
                                       const BidVector& others, Money tol) {
  if (!(tol > 0)) throw std::invalid_argument("threshold_payment: tol must be positive");
  if (identity > others.size()) throw std::out_of_range("threshold_payment: identity out of range");

  BidVector full(others.size() + 1, 0.0);
  for (std::size_t i = 0; i < others.size(); ++i) full[i < identity ? i : i + 1] = others[i];
  auto wins_at = [&](Money t) {
    full[identity] = t;
    return mech.run(full).wins(identity);
  };

  Money max_other = 0;
  for (Money b : others) max_other = std::max(max_other, b);
  const Money hi0 = max_other + cost_of(mech.cost, std::max<std::size_t>(full.size(), 1)) + 1.0;

  // Opportunistic monotonicity check before trusting the bisection.
  constexpr int kScanPoints = 48;
  bool seen_win = false;
  Money last_win = 0;
  for (int j = 0; j <= kScanPoints; ++j) {
    const Money t = hi0 * double(j) / double(kScanPoints);
    if (wins_at(t)) {
      seen_win = true;
      last_win = t;
    } else if (seen_win) {
      throw MonotonicityViolation(last_win, t);
    }
  }

  if (!wins_at(hi0)) return std::nullopt;
  if (wins_at(0.0)) return 0.0;
  Money lo = 0.0, hi = hi0;
  for (int iter = 0; iter < 60 && (hi - lo) > tol * 0.25; ++iter) {
    const Money mid = 0.5 * (lo + hi);
    if (wins_at(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

CheckReport check_strong_monotonic(const Mechanism& mech, std::size_t samples, const Grid& grid,
                                   bool payments_non_increasing, std::uint64_t seed, Exec exec) {
  grid.require_valid();
  const auto start = Clock::now();
  const auto steps = std::size_t(std::floor(grid.max_value / grid.step + kMoneyTol));

  auto draw_pair = [&](std::uint64_t s, BidVector& b, BidVector& b2) {
    std::mt19937_64 rng(splitmix64(seed ^ (s + 1)));
    const std::size_t n = 1 + std::size_t(rng() % grid.max_agents);
    b.resize(n);
    b2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto lo = std::size_t(rng() % (steps + 1));
      const auto up = std::size_t(rng() % (steps - lo + 1));
      b[i] = grid.step * double(lo);
      b2[i] = grid.step * double(lo + up);
    }
  };

  auto violates = [&](std::uint64_t s) {
    BidVector b, b2;
    draw_pair(s, b, b2);
    const Outcome o1 = mech.run(b);
    const Outcome o2 = mech.run(b2);
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (o1.wins(i) && !o2.wins(i)) return true;
      if (payments_non_increasing && o1.wins(i) && o2.wins(i) &&
          o2.payment[i] > o1.payment[i] + kMoneyTol) {
        return true;
      }
    }
    return false;
  };

  const std::uint64_t hit = detail::scan_first_hit(samples, exec, violates);
  CheckReport report;
  report.cases_examined = std::min<std::uint64_t>(hit + 1, samples);
  report.elapsed_ms = ms_since(start);
  report.note = "random b <= b' pairs";
  if (hit < samples) {
    report.verdict = Verdict::violated;
    BidVector b, b2;
    draw_pair(hit, b, b2);
    DeviationWitness w;
    w.valuations = b;
    for (Money x : b2) w.reports.push_back({x});
    report.witness = w;
  }
  return report;
}

BudgetReport check_budget(const Mechanism& mech, const Grid& grid, Exec exec) {
  const auto start = Clock::now();
  const std::vector<Money> values = grid.values();

  struct Block {
    detail::MultisetSpace space;
    std::uint64_t offset;
  };
  std::vector<Block> blocks;
  std::uint64_t total = 0;
  for (std::size_t n = 1; n <= grid.max_agents; ++n) {
    blocks.push_back({detail::MultisetSpace(values.size(), n), total});
    total += blocks.back().space.total;
  }

  auto decode = [&](std::uint64_t g, BidVector& bids) {
    for (const Block& b : blocks) {
      if (g < b.offset + b.space.total) {
        std::size_t idx[kExhaustiveIdentityCap];
        b.space.unrank(g - b.offset, idx);
        bids.resize(b.space.k);
        for (std::size_t j = 0; j < b.space.k; ++j) bids[j] = values[idx[j]];
        return;
      }
    }
    throw std::out_of_range("budget profile index out of range");
  };

  auto classify = [&](std::uint64_t g, BidVector& bids) {
    decode(g, bids);
    const Outcome out = mech.run(bids);
    const Money cost = cost_of(mech.cost, out.winner_count());
    const Money paid = out.total_payment();
    if (money_eq(paid, cost)) return BudgetClass::balanced;
    return paid > cost ? BudgetClass::surplus : BudgetClass::deficit;
  };

  struct Accum {
    std::uint64_t bal = 0, sur = 0, def = 0;
    std::uint64_t first_def = detail::kNoHit, first_sur = detail::kNoHit;
  };
  auto account = [](Accum& a, BudgetClass c, std::uint64_t g) {
    switch (c) {
      case BudgetClass::balanced: ++a.bal; break;
      case BudgetClass::surplus:
        ++a.sur;
        a.first_sur = std::min(a.first_sur, g);
        break;
      case BudgetClass::deficit:
        ++a.def;
        a.first_def = std::min(a.first_def, g);
        break;
    }
  };

  Accum acc;
#ifdef _OPENMP
  if (exec == Exec::parallel && total > 1024) {
#pragma omp parallel num_threads(worker_count())
    {
      Accum local;
      BidVector bids;
#pragma omp for schedule(dynamic, 256) nowait
      for (long long g = 0; g < static_cast<long long>(total); ++g) {
        account(local, classify(std::uint64_t(g), bids), std::uint64_t(g));
      }
#pragma omp critical(sybilshare_budget)
      {
        acc.bal += local.bal;
        acc.sur += local.sur;
        acc.def += local.def;
        acc.first_def = std::min(acc.first_def, local.first_def);
        acc.first_sur = std::min(acc.first_sur, local.first_sur);
      }
    }
  } else
#else
  (void)exec;
#endif
  {
    BidVector bids;
    for (std::uint64_t g = 0; g < total; ++g) account(acc, classify(g, bids), g);
  }

  BudgetReport report;
  report.balanced_cases = acc.bal;
  report.surplus_cases = acc.sur;
  report.deficit_cases = acc.def;
  report.cases_examined = total;
  report.elapsed_ms = ms_since(start);
  if (acc.def > 0) {
    report.worst = BudgetClass::deficit;
  } else if (acc.sur > 0) {
    report.worst = BudgetClass::surplus;
  } else {
    report.worst = BudgetClass::balanced;
  }
  const std::uint64_t at = acc.def > 0 ? acc.first_def : acc.first_sur;
  if (at != detail::kNoHit) {
    BidVector bids;
    decode(at, bids);
    report.worst_example = bids;
  }
  return report;
}

CheckReport check_anonymity_consistency(const Mechanism& mech, std::size_t samples,
                                        std::uint64_t seed, Exec exec) {
  const auto start = Clock::now();

  auto draw = [&](std::uint64_t s, BidVector& bids, std::vector<std::size_t>& perm,
                  std::size_t& pad) {
    std::mt19937_64 rng(splitmix64(seed ^ (s + 1)));
    const std::size_t n = 1 + std::size_t(rng() % 6);
    bids.resize(n);
    std::uniform_real_distribution<double> uni(0.0, 1.5);
    const bool snapped = (rng() & 1) != 0;  // grid-valued half to exercise ties
    for (auto& b : bids) {
      b = snapped ? 0.05 * double(rng() % 31) : uni(rng);
    }
    perm.resize(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    pad = 1 + std::size_t(rng() % 2);
  };

  auto violates = [&](std::uint64_t s) {
    BidVector bids;
    std::vector<std::size_t> perm;
    std::size_t pad = 0;
    draw(s, bids, perm, pad);
    const std::size_t n = bids.size();
    const Outcome base = mech.run(bids);

    BidVector permuted(n);
    for (std::size_t j = 0; j < n; ++j) permuted[j] = bids[perm[j]];
    const Outcome shuffled = mech.run(permuted);

    bool distinct = true;
    for (std::size_t i = 0; i < n && distinct; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (money_eq(bids[i], bids[j], 1e-12)) {
          distinct = false;
          break;
        }
      }
    }
    if (distinct) {
      for (std::size_t j = 0; j < n; ++j) {
        if (shuffled.wins(j) != base.wins(perm[j])) return true;
        if (!money_eq(shuffled.payment[j], base.payment[perm[j]])) return true;
      }
    } else {
      // Equal bids may swap identities under the stable tie-break; compare
      // the (bid, win, payment) multisets instead.
      using Entry = std::tuple<Money, char, Money>;
      std::vector<Entry> a(n), b(n);
      for (std::size_t j = 0; j < n; ++j) {
        a[j] = {bids[j], base.winner[j], base.payment[j]};
        b[j] = {permuted[j], shuffled.winner[j], shuffled.payment[j]};
      }
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      for (std::size_t j = 0; j < n; ++j) {
        if (!money_eq(std::get<0>(a[j]), std::get<0>(b[j]))) return true;
        if (std::get<1>(a[j]) != std::get<1>(b[j])) return true;
        if (!money_eq(std::get<2>(a[j]), std::get<2>(b[j]))) return true;
      }
    }

    BidVector padded = bids;
    padded.resize(n + pad, 0.0);
    const Outcome grown = mech.run(padded);
    for (std::size_t j = 0; j < n; ++j) {
      if (grown.wins(j) != base.wins(j)) return true;
      if (!money_eq(grown.payment[j], base.payment[j])) return true;
    }
    return false;
  };

  const std::uint64_t hit = detail::scan_first_hit(samples, exec, violates);
  CheckReport report;
  report.cases_examined = std::min<std::uint64_t>(hit + 1, samples);
  report.elapsed_ms = ms_since(start);
  report.note = "permutation equivariance and zero-padding consistency";
  if (hit < samples) {
    report.verdict = Verdict::violated;
    BidVector bids;
    std::vector<std::size_t> perm;
    std::size_t pad = 0;
    draw(hit, bids, perm, pad);
    DeviationWitness w;
    w.valuations = bids;
    report.witness = w;
  }
  return report;
}

}  // namespace sybilshare
