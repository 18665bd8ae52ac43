#pragma once

#include <string>

#include "sybilshare/welfare.hpp"

namespace sybilshare {

// Shortest decimal form that round-trips, capped at 12 significant digits.
// Locale independent; file outputs stay byte-stable across runs.
std::string format_number(double v);

std::string cost_to_json(const CostFunction& cost);

// Accepts {"kind":"constant","c":1.0} or {"kind":"concave","f":[0,1,1.5]}.
// Throws std::invalid_argument with line context on malformed input.
CostFunction cost_from_json_text(const std::string& text);

std::string outcome_to_json(const std::string& mechanism, const BidVector& bids,
                            const Outcome& out);
std::string check_report_to_json(const std::string& check, const std::string& mechanism,
                                 const CheckReport& report);
std::string budget_report_to_json(const std::string& mechanism, const BudgetReport& report);
std::string worst_case_to_json(const std::string& mechanism, std::size_t n, const WorstCase& wc);

struct SweepRow {
  std::size_t n = 0;
  std::string mechanism;
  std::string cost_kind;
  double ratio = 1.0;
  ValuationProfile witness;
  double runtime_ms = 0;
};

// Header: n,mechanism,cost_kind,ratio,witness,runtime_ms. The witness column
// joins the profile with semicolons.
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace sybilshare
