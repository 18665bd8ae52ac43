// Times the serial reference drivers against the OpenMP ones on the three
// heavy search kernels and verifies they produce identical results.

#include <chrono>
#include <cstdio>
#include <string>

#include "sybilshare/json_io.hpp"
#include "sybilshare/welfare.hpp"

using namespace sybilshare;

namespace {

using Clock = std::chrono::steady_clock;

template <class Fn>
double time_s(Fn&& fn) {
  const auto start = Clock::now();
  fn();
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void row(const char* name, double serial, double parallel, bool same) {
  std::printf("%-28s %10.3f s %10.3f s %8.2fx   %s\n", name, serial, parallel,
              serial / parallel, same ? "results identical" : "RESULTS DIFFER");
}

}  // namespace

int main() {
  const auto unit = CostFunction::constant(1.0);
  std::printf("%-28s %12s %12s %9s\n", "kernel", "serial", "openmp", "speedup");
  std::printf("workers: %d\n", worker_count());

  {
    const auto osp = make_mechanism(MechanismId::optimal_sybil_proof, unit);
    const Grid grid{0.1, 1.0, 3, 3};
    CheckReport a, b;
    const double ts = time_s([&] { a = check_sybil_proof(osp, grid, Exec::serial); });
    const double tp = time_s([&] { b = check_sybil_proof(osp, grid, Exec::parallel); });
    row("check_sybil_proof (osp)", ts, tp,
        a.verdict == b.verdict && a.cases_examined == b.cases_examined);
  }
  {
    const auto shapley = make_mechanism(MechanismId::shapley, unit);
    const Grid grid{0.04, 1.0, 1, 1};
    WorstCase a, b;
    const double ts = time_s([&] { a = worst_case_ratio(shapley, 6, grid, Exec::serial); });
    const double tp = time_s([&] { b = worst_case_ratio(shapley, 6, grid, Exec::parallel); });
    row("worst_case_ratio (n=6)", ts, tp, a.ratio == b.ratio && a.witness == b.witness);
  }
  {
    const ValuationProfile v{1.2, 1.2, 1.2};
    CheckReport a, b;
    const double ts = time_s([&] { a = check_swi_shapley(unit, v, 0.03, 3, Exec::serial); });
    const double tp = time_s([&] { b = check_swi_shapley(unit, v, 0.03, 3, Exec::parallel); });
    row("check_swi_shapley", ts, tp,
        a.verdict == b.verdict && a.cases_examined == b.cases_examined);
  }
  return 0;
}
