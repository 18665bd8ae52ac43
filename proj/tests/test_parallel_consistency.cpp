// The OpenMP drivers must reproduce the serial reference bit for bit:
// same verdicts, same witnesses, same counts, same extrema.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sybilshare/welfare.hpp"

using namespace sybilshare;

namespace {
const CostFunction kUnit = CostFunction::constant(1.0);

void check_same(const CheckReport& a, const CheckReport& b) {
  CHECK(a.verdict == b.verdict);
  CHECK(a.cases_examined == b.cases_examined);
  REQUIRE(a.witness.has_value() == b.witness.has_value());
  if (a.witness) {
    CHECK(a.witness->valuations == b.witness->valuations);
    CHECK(a.witness->deviator == b.witness->deviator);
    CHECK(a.witness->reports == b.witness->reports);
    CHECK(a.witness->truthful_utility == b.witness->truthful_utility);
    CHECK(a.witness->deviant_utility == b.witness->deviant_utility);
  }
}
}  // namespace

TEST_CASE("check_sybil_proof: serial == parallel (violated and pass)") {
  {
    const auto mech = make_mechanism(MechanismId::vcg, kUnit);
    const Grid grid{0.2, 1.0, 3, 2};
    check_same(check_sybil_proof(mech, grid, Exec::serial),
               check_sybil_proof(mech, grid, Exec::parallel));
  }
  {
    const auto mech = make_mechanism(MechanismId::optimal_sybil_proof, kUnit);
    const Grid grid{0.2, 1.0, 2, 3};
    check_same(check_sybil_proof(mech, grid, Exec::serial),
               check_sybil_proof(mech, grid, Exec::parallel));
  }
}

TEST_CASE("check_truthful: serial == parallel") {
  const auto mech = make_mechanism(MechanismId::shapley, kUnit);
  const Grid grid{0.1, 1.0, 3, 3};
  check_same(check_truthful(mech, grid, Exec::serial),
             check_truthful(mech, grid, Exec::parallel));
}

TEST_CASE("worst_case_ratio: serial == parallel") {
  const Grid grid{0.05, 1.0, 1, 1};
  for (const auto id : {MechanismId::shapley, MechanismId::optimal_sybil_proof}) {
    const auto mech = make_mechanism(id, kUnit);
    const auto s = worst_case_ratio(mech, 4, grid, Exec::serial);
    const auto p = worst_case_ratio(mech, 4, grid, Exec::parallel);
    CHECK(s.ratio == p.ratio);  // bitwise: the same profile must win
    CHECK(s.witness == p.witness);
    CHECK(s.cases_examined == p.cases_examined);
    CHECK(s.infinite_witnesses == p.infinite_witnesses);
  }
}

TEST_CASE("check_swi_shapley: serial == parallel") {
  const ValuationProfile v{1.01, 1.0 / 3 - 0.01, 1.0 / 3 - 0.01};
  check_same(check_swi_shapley(kUnit, v, 0.05, 3, Exec::serial),
             check_swi_shapley(kUnit, v, 0.05, 3, Exec::parallel));
}

TEST_CASE("check_budget and the random-sample checks: serial == parallel") {
  const auto mech = make_mechanism(MechanismId::vcg, kUnit);
  const Grid grid{0.1, 1.0, 3, 3};
  const auto s = check_budget(mech, grid, Exec::serial);
  const auto p = check_budget(mech, grid, Exec::parallel);
  CHECK(s.worst == p.worst);
  CHECK(s.balanced_cases == p.balanced_cases);
  CHECK(s.surplus_cases == p.surplus_cases);
  CHECK(s.deficit_cases == p.deficit_cases);
  CHECK(s.worst_example == p.worst_example);

  const auto shapley = make_mechanism(MechanismId::shapley, kUnit);
  check_same(check_strong_monotonic(shapley, 400, grid, true, 0x5eed77, Exec::serial),
             check_strong_monotonic(shapley, 400, grid, true, 0x5eed77, Exec::parallel));
  check_same(check_anonymity_consistency(shapley, 400, 0x5eed78, Exec::serial),
             check_anonymity_consistency(shapley, 400, 0x5eed78, Exec::parallel));
}
