// Acceptance suite: one pass/fail line per criterion. Exits nonzero when any
// criterion fails. Runtime budgets are part of the criteria and enforced.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sybilshare/json_io.hpp"
#include "sybilshare/welfare.hpp"

using namespace sybilshare;

namespace {

using Clock = std::chrono::steady_clock;

struct Criterion {
  int id;
  std::string label;
  bool pass = true;
  double elapsed_s = 0;
  std::vector<std::string> details;
};

struct Gate {
  Criterion& c;
  void require(bool ok, const std::string& what) {
    c.pass = c.pass && ok;
    c.details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void expect_close(const std::string& what, double expected, double observed, double tol) {
    const bool ok = std::fabs(expected - observed) <= tol;
    std::ostringstream line;
    line << what << ": expected " << format_number(expected) << ", observed "
         << format_number(observed) << ", tol " << format_number(tol);
    require(ok, line.str());
  }
  void expect_between(const std::string& what, double lo, double value, double hi) {
    std::ostringstream line;
    line << what << ": " << format_number(value) << " in [" << format_number(lo) << ", "
         << format_number(hi) << "]";
    require(value >= lo && value <= hi, line.str());
  }
};

const CostFunction kUnit = CostFunction::constant(1.0);

Criterion criterion1() {
  Criterion c{1, "vcg sybil counterexample: v=(1/3,1/3), deviation (1/3,1,1)"};
  Gate g{c};
  const auto start = Clock::now();
  const auto vcg = make_mechanism(MechanismId::vcg, kUnit);
  const double v = 1.0 / 3;
  const auto truthful = run_sybil_extension(vcg, {{v}, {v}});
  g.expect_close("truthful utility", 0.0, agent_utility(v, truthful, 0), 1e-9);
  const auto deviant = run_sybil_extension(vcg, {{v, 1.0, 1.0}, {v}});
  g.expect_close("sybil utility", v, agent_utility(v, deviant, 0), 1e-9);
  c.elapsed_s = std::chrono::duration<double>(Clock::now() - start).count();
  g.require(c.elapsed_s < 1.0, "runtime under 1 s");
  return c;
}

Criterion criterion2() {
  Criterion c{2, "shapley sybil counterexample at eps=0.01: 0.01 vs 0.51"};
  Gate g{c};
  const auto start = Clock::now();
  const auto shapley = make_mechanism(MechanismId::shapley, kUnit);
  const double eps = 0.01, v1 = 1 + eps, rest = 1.0 / 3 - eps;
  const auto truthful = run_sybil_extension(shapley, {{v1}, {rest}, {rest}});
  g.expect_close("truthful utility", 0.01, agent_utility(v1, truthful, 0), 1e-9);
  const auto deviant = run_sybil_extension(shapley, {{0.25, 0.25}, {rest}, {rest}});
  g.expect_close("split utility", 0.51, agent_utility(v1, deviant, 0), 1e-9);
  c.elapsed_s = std::chrono::duration<double>(Clock::now() - start).count();
  g.require(c.elapsed_s < 1.0, "runtime under 1 s");
  return c;
}

Criterion criterion3() {
  Criterion c{3, "potential sybil counterexample at n=4: payment 1/5-2eps, utility -> 4/5"};
  Gate g{c};
  const auto start = Clock::now();
  const auto potential = make_mechanism(MechanismId::potential, kUnit);
  double prev_gap = std::numeric_limits<double>::infinity();
  for (const double eps : {1e-3, 1e-5}) {
    const double v1 = 1 + eps;
    const SybilProfile reports{{v1, v1}, {0.5 - eps}, {1.0 / 3 - eps}, {0.25 - eps}};
    const auto out = run_sybil_extension(potential, reports);
    g.expect_close("sybil identity payment at eps=" + format_number(eps), 0.2 - 2 * eps,
                   out.identities.payment[1], 1e-9);
    const double utility = agent_utility(v1, out, 0);
    g.require(utility > 0, "sybil utility positive at eps=" + format_number(eps) + " (" +
                               format_number(utility) + ")");
    g.expect_close("utility near 1 - 1/5 at eps=" + format_number(eps), 0.8, utility, 1e-2);
    const double gap = std::fabs(utility - 0.8);
    g.require(gap <= prev_gap + 1e-12, "monotone approach at eps=" + format_number(eps));
    prev_gap = gap;
  }
  c.elapsed_s = std::chrono::duration<double>(Clock::now() - start).count();
  g.require(c.elapsed_s < 1.0, "runtime under 1 s");
  return c;
}

Criterion criterion4() {
  Criterion c{4, "sybil-proofness search: vcg/shapley/potential violated, osp passes"};
  Gate g{c};
  const auto start = Clock::now();
  const Grid grid{0.05, 1.0, 3, 3};
  for (const auto id : {MechanismId::vcg, MechanismId::shapley, MechanismId::potential}) {
    const auto mech = make_mechanism(id, kUnit);
    const auto report = check_sybil_proof(mech, grid);
    std::ostringstream what;
    what << mech.name << " violated";
    if (report.witness) {
      what << " (gain "
           << format_number(report.witness->deviant_utility - report.witness->truthful_utility)
           << " at v=";
      for (std::size_t i = 0; i < report.witness->valuations.size(); ++i) {
        what << (i ? "," : "") << format_number(report.witness->valuations[i]);
      }
      what << ")";
    }
    g.require(report.verdict == Verdict::violated, what.str());

    if (report.witness) {  // the witness must replay
      SybilProfile truthful;
      for (Money v : report.witness->valuations) truthful.push_back({v});
      const auto base = run_sybil_extension(mech, truthful);
      const auto dev = run_sybil_extension(mech, report.witness->reports);
      const double replayed =
          agent_utility(report.witness->valuations[0], dev, 0) -
          agent_utility(report.witness->valuations[0], base, 0);
      g.require(replayed > kUtilityTol, mech.name + " witness replays with gain " +
                                            format_number(replayed));
    }
  }
  const auto osp = make_mechanism(MechanismId::optimal_sybil_proof, kUnit);
  const auto report = check_sybil_proof(osp, grid);
  g.require(report.verdict == Verdict::pass,
            "osp passes (" + std::to_string(report.cases_examined) + " cases)");
  c.elapsed_s = std::chrono::duration<double>(Clock::now() - start).count();
  g.require(c.elapsed_s < 300.0, "runtime under 5 min");
  return c;
}

Criterion sweep_criterion(int id, MechanismId mech_id, const std::string& label,
                          double (*target)(std::size_t)) {
  Criterion c{id, label};
  Gate g{c};
  const auto start = Clock::now();
  const auto mech = make_mechanism(mech_id, kUnit);
  const Grid grid{0.05, 1.0, 1, 1};
  for (std::size_t n = 2; n <= 6; ++n) {
    const auto wc = worst_case_ratio(mech, n, grid);
    g.expect_between("n=" + std::to_string(n), target(n) - 0.01, wc.ratio, target(n) + 1e-7);
  }
  c.elapsed_s = std::chrono::duration<double>(Clock::now() - start).count();
  g.require(c.elapsed_s < 120.0, "runtime under 2 min");
  return c;
}

Criterion criterion7() {
  Criterion c{7, "swi for shapley: all B-strategy profiles, 0.1 valuation grid, n <= 3"};
  Gate g{c};
  const auto start = Clock::now();
  const auto table = CostFunction::concave({0, 1, 1.4, 1.7, 1.9});
  std::uint64_t profiles = 0, cases = 0, violations = 0;
  for (const auto& cost : {kUnit, table}) {
    for (std::size_t n = 1; n <= 3; ++n) {
      std::vector<std::size_t> pick(n, 0);
      while (true) {
        ValuationProfile v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = 0.1 * double(pick[i]);
        const auto report = check_swi_shapley(cost, v, 0.05, 3);
        ++profiles;
        cases += report.cases_examined;
        violations += report.verdict == Verdict::violated ? 1 : 0;
        std::size_t pos = 0;
        while (pos < n && pick[pos] == 12) {
          pick[pos] = 0;
          ++pos;
        }
        if (pos == n) break;
        ++pick[pos];
      }
    }
    const double eps = 0.01;
    const auto prop = check_swi_shapley(cost, {1 + eps, 1.0 / 3 - eps, 1.0 / 3 - eps}, 0.05, 3);
    ++profiles;
    cases += prop.cases_examined;
    violations += prop.verdict == Verdict::violated ? 1 : 0;
  }
  g.require(violations == 0, "zero violations over " + std::to_string(profiles) +
                                 " valuation profiles / " + std::to_string(cases) +
                                 " strategy profiles");
  c.elapsed_s = std::chrono::duration<double>(Clock::now() - start).count();
  g.require(c.elapsed_s < 600.0, "runtime under 10 min");
  return c;
}

Criterion criterion8() {
  Criterion c{8, "myerson equivalence: winner payments are threshold payments"};
  Gate g{c};
  const auto start = Clock::now();
  std::mt19937_64 rng(0xacce8);
  std::uniform_real_distribution<double> uni(0.0, 1.5);
  const std::vector<Mechanism> mechs = {
      make_mechanism(MechanismId::vcg, kUnit),
      make_mechanism(MechanismId::shapley, kUnit),
      make_mechanism(MechanismId::potential, kUnit),
      make_mechanism(MechanismId::optimal_sybil_proof, kUnit),
  };
  for (const auto& mech : mechs) {
    double worst = 0;
    std::uint64_t winners = 0;
    bool monotone = true, matched = true;
    for (int trial = 0; trial < 200; ++trial) {
      BidVector b(1 + rng() % 4);
      for (auto& x : b) x = uni(rng);
      const auto out = mech.run(b);
      for (std::size_t i = 0; i < b.size(); ++i) {
        if (!out.wins(i)) continue;
        ++winners;
        BidVector others;
        for (std::size_t j = 0; j < b.size(); ++j) {
          if (j != i) others.push_back(b[j]);
        }
        try {
          const auto t = threshold_payment(mech, i, others, 1e-9);
          if (!t) {
            matched = false;
            continue;
          }
          worst = std::max(worst, std::fabs(*t - out.payment[i]));
          matched = matched && std::fabs(*t - out.payment[i]) <= 1e-6;
        } catch (const MonotonicityViolation&) {
          monotone = false;
        }
      }
    }
    g.require(matched && monotone, mech.name + ": " + std::to_string(winners) +
                                       " winners, worst |payment - threshold| = " +
                                       format_number(worst) + ", no straddle");
  }
  c.elapsed_s = std::chrono::duration<double>(Clock::now() - start).count();
  g.require(c.elapsed_s < 60.0, "runtime under 1 min");
  return c;
}

Criterion criterion9() {
  Criterion c{9, "hybrid winners are always shapley winners"};
  Gate g{c};
  const auto start = Clock::now();
  std::mt19937_64 rng(0xacce9);
  std::uniform_real_distribution<double> uni(0.0, 1.5);
  const std::vector<CostFunction> costs = {kUnit, CostFunction::concave({0, 1, 1.4, 1.7, 1.9}),
                                           CostFunction::concave({0, 1, 1.5, 1.8})};
  std::uint64_t checked = 0;
  bool contained = true;
  for (int trial = 0; trial < 500; ++trial) {
    BidVector b(1 + rng() % 5);
    for (auto& x : b) x = uni(rng);
    for (const auto& cost : costs) {
      const auto hybrid = run_hybrid(b, cost);
      const auto shapley = run_shapley(b, cost);
      for (std::size_t i = 0; i < b.size(); ++i) {
        if (hybrid.wins(i)) contained = contained && shapley.wins(i);
      }
      ++checked;
    }
  }
  g.require(contained, "containment on " + std::to_string(checked) + " runs");
  c.elapsed_s = std::chrono::duration<double>(Clock::now() - start).count();
  g.require(c.elapsed_s < 60.0, "runtime under 1 min");
  return c;
}

Criterion criterion10() {
  Criterion c{10, "axiom suite on random profiles"};
  Gate g{c};
  const auto start = Clock::now();
  const Grid grid{0.05, 1.5, 2, 6};
  const std::vector<MechanismId> ids = {MechanismId::vcg, MechanismId::shapley,
                                        MechanismId::potential, MechanismId::optimal_sybil_proof,
                                        MechanismId::hybrid};
  // NPT and IR are asserted inside every run; a violation throws.
  std::mt19937_64 rng(0xacce10);
  std::uniform_real_distribution<double> uni(0.0, 1.5);
  for (const auto id : ids) {
    const auto mech = make_mechanism(id, kUnit);
    bool clean = true;
    Money worst_gap = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      BidVector b(1 + rng() % 6);
      for (auto& x : b) x = uni(rng);
      const auto out = mech.run(b);  // throws on any NPT/IR breach
      const Money cost = cost_of(mech.cost, out.winner_count());
      const Money paid = out.total_payment();
      if (id == MechanismId::shapley) {
        clean = clean && money_eq(paid, cost);
        worst_gap = std::max(worst_gap, std::fabs(paid - cost));
      } else if (id == MechanismId::optimal_sybil_proof || id == MechanismId::potential) {
        clean = clean && paid >= cost - kMoneyTol;
        worst_gap = std::max(worst_gap, std::max(0.0, cost - paid));
      }
    }
    g.require(clean, mech.name + ": NPT/IR on 1000 profiles, budget gap " +
                         format_number(worst_gap));
    const auto anon = check_anonymity_consistency(mech, 1000, 0xacce10 + std::uint64_t(id));
    g.require(anon.verdict == Verdict::pass, mech.name + ": anonymity + zero-padding on 1000");
  }
  const auto mono =
      check_strong_monotonic(make_mechanism(MechanismId::shapley, kUnit), 500, grid, true);
  g.require(mono.verdict == Verdict::pass, "shapley strong monotonicity on 500 pairs");
  c.elapsed_s = std::chrono::duration<double>(Clock::now() - start).count();
  g.require(c.elapsed_s < 60.0, "runtime under 1 min");
  return c;
}

Criterion criterion11() {
  Criterion c{11, "universal lower bound: witness consequences only"};
  Gate g{c};
  const auto start = Clock::now();
  c.details.push_back(
      "note: the (n+1)/2 lower bound quantifies over every individually rational,"
      " anonymous, truthful, sybil-proof mechanism; no finite test can cover that"
      " space, so the suite checks its witness consequences instead");
  // consequence 1: the implemented no-deficit sybil-proof mechanism sits at (n+1)/2
  const auto osp = make_mechanism(MechanismId::optimal_sybil_proof, kUnit);
  const Grid grid{0.05, 1.0, 1, 1};
  for (std::size_t n : {3u, 5u}) {
    const auto wc = worst_case_ratio(osp, n, grid);
    g.expect_between("osp n=" + std::to_string(n), (double(n) + 1) / 2 - 0.01, wc.ratio,
                     (double(n) + 1) / 2 + 1e-7);
  }
  // consequence 2: the all-or-none baseline loses n - 1 + 1/n at its witness
  for (std::size_t n : {3u, 5u}) {
    const auto baseline = make_all_or_none_baseline(1.0);
    ValuationProfile v(n, 1.0 - 1e-6);
    v[n - 1] = 1.0 / double(n) - 1e-6;
    const auto score = approx_ratio(baseline, v);
    const double bound = double(n) - 1 + 1.0 / double(n) - 0.01;
    g.require(score.ratio >= bound, "all-or-none baseline n=" + std::to_string(n) + ": ratio " +
                                        format_number(score.ratio) + " >= " +
                                        format_number(bound));
  }
  c.elapsed_s = std::chrono::duration<double>(Clock::now() - start).count();
  return c;
}

}  // namespace

int main() {
  std::vector<Criterion> results;
  results.push_back(criterion1());
  results.push_back(criterion2());
  results.push_back(criterion3());
  results.push_back(criterion4());
  results.push_back(sweep_criterion(5, MechanismId::shapley,
                                    "shapley worst case matches H_n for n=2..6",
                                    [](std::size_t n) { return harmonic(n); }));
  results.push_back(sweep_criterion(6, MechanismId::optimal_sybil_proof,
                                    "osp worst case matches (n+1)/2 for n=2..6",
                                    [](std::size_t n) { return (double(n) + 1) / 2; }));
  results.push_back(criterion7());
  results.push_back(criterion8());
  results.push_back(criterion9());
  results.push_back(criterion10());
  results.push_back(criterion11());

  int failures = 0;
  for (const auto& c : results) {
    std::printf("%s criterion %2d: %s (%.2f s)\n", c.pass ? "PASS" : "FAIL", c.id,
                c.label.c_str(), c.elapsed_s);
    for (const auto& d : c.details) std::printf("        %s\n", d.c_str());
    failures += c.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", int(results.size()) - failures, results.size());
  return failures == 0 ? 0 : 1;
}
