#include "sybilshare/core.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace sybilshare {

CostFunction CostFunction::constant(Money c) {
  CostFunction f;
  f.kind_ = CostKind::constant;
  f.c_ = c;
  return f;
}

CostFunction CostFunction::concave(std::vector<Money> table) {
  CostFunction f;
  f.kind_ = CostKind::concave;
  f.table_ = std::move(table);
  return f;
}

Money CostFunction::constant_cost() const {
  if (!is_constant()) throw std::logic_error("constant_cost() on a table-backed cost function");
  return c_;
}

const std::vector<Money>& CostFunction::table() const {
  if (is_constant()) throw std::logic_error("table() on a constant cost function");
  return table_;
}

std::size_t CostFunction::max_cardinality() const {
  if (is_constant()) return std::numeric_limits<std::size_t>::max();
  if (table_.empty()) return 0;
  return std::max(kDefaultMaxCardinality, table_.size() - 1);
}

Money cost_of(const CostFunction& cost, std::size_t k) {
  if (k == 0) return 0.0;
  if (cost.is_constant()) return cost.constant_cost();
  const auto& f = cost.table();
  if (f.empty()) throw std::out_of_range("cost_of: empty cost table");
  if (k > cost.max_cardinality()) throw std::out_of_range("cost_of: cardinality beyond table range");
  return f[std::min(k, f.size() - 1)];
}

ValidationReport validate_cost_function(const CostFunction& cost) {
  ValidationReport report;
  char buf[160];
  if (cost.is_constant()) {
    const Money c = cost.constant_cost();
    if (!std::isfinite(c)) {
      report.violations.push_back("constant cost must be finite");
    } else if (!(c > 0)) {
      std::snprintf(buf, sizeof buf, "constant cost must be positive, got %g", c);
      report.violations.push_back(buf);
    }
    return report;
  }

  const auto& f = cost.table();
  if (f.empty()) {
    report.violations.push_back("cost table must not be empty");
    return report;
  }
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (!std::isfinite(f[k])) {
      std::snprintf(buf, sizeof buf, "f(%zu) must be finite", k);
      report.violations.push_back(buf);
      return report;
    }
  }
  if (std::fabs(f[0]) > kMoneyTol) {
    std::snprintf(buf, sizeof buf, "f(0) must be 0, got %g", f[0]);
    report.violations.push_back(buf);
  }
  for (std::size_t k = 1; k < f.size(); ++k) {
    if (f[k] < f[k - 1] - kMoneyTol) {
      std::snprintf(buf, sizeof buf, "monotonicity: f(%zu) = %g < f(%zu) = %g", k, f[k], k - 1,
                    f[k - 1]);
      report.violations.push_back(buf);
    }
  }
  for (std::size_t k = 2; k < f.size(); ++k) {
    const Money inc = f[k] - f[k - 1];
    const Money prev = f[k - 1] - f[k - 2];
    if (inc > prev + kMoneyTol) {
      std::snprintf(buf, sizeof buf, "concavity: increment %g > %g at k = %zu", inc, prev, k);
      report.violations.push_back(buf);
    }
  }
  return report;
}

std::size_t Outcome::winner_count() const {
  std::size_t n = 0;
  for (char w : winner) n += (w != 0);
  return n;
}

Money Outcome::total_payment() const {
  Money total = 0;
  for (Money p : payment) total += p;
  return total;
}

std::vector<std::size_t> Outcome::winner_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < winner.size(); ++i) {
    if (winner[i]) out.push_back(i);
  }
  return out;
}

void require_outcome_invariants(const BidVector& bids, const Outcome& out) {
  if (out.winner.size() != bids.size() || out.payment.size() != bids.size()) {
    throw std::logic_error("outcome size mismatch");
  }
  for (std::size_t i = 0; i < bids.size(); ++i) {
    const Money p = out.payment[i];
    if (!(p >= -kMoneyTol)) {
      throw std::logic_error("outcome violates NPT: negative payment");
    }
    if (!out.wins(i) && std::fabs(p) > kMoneyTol) {
      throw std::logic_error("outcome charges a losing identity");
    }
    if (out.wins(i) && p > bids[i] + kMoneyTol) {
      throw std::logic_error("outcome violates IR: payment above bid");
    }
  }
}

}  // namespace sybilshare
