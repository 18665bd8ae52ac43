#include "sybilshare/json_io.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace sybilshare {

namespace {

int significant_digits(const char* s, std::size_t len) {
  int digits = 0;
  bool leading = true;
  for (std::size_t i = 0; i < len; ++i) {
    const char c = s[i];
    if (c == 'e' || c == 'E') break;
    if (c < '0' || c > '9') continue;
    if (leading && c == '0') continue;
    leading = false;
    ++digits;
  }
  return digits;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);  // shortest round-trip
  if (significant_digits(buf, std::size_t(res.ptr - buf)) <= 12) {
    return std::string(buf, res.ptr);
  }
  res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

namespace {

void append_escaped(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
}

void append_array(std::string& out, const std::vector<Money>& xs) {
  out += '[';
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += format_number(xs[i]);
  }
  out += ']';
}

void append_lists(std::string& out, const SybilProfile& lists) {
  out += '[';
  for (std::size_t i = 0; i < lists.size(); ++i) {
    if (i) out += ',';
    append_array(out, lists[i]);
  }
  out += ']';
}

}  // namespace

std::string cost_to_json(const CostFunction& cost) {
  std::string out = "{\"kind\":";
  if (cost.is_constant()) {
    out += "\"constant\",\"c\":" + format_number(cost.constant_cost());
  } else {
    out += "\"concave\",\"f\":";
    append_array(out, cost.table());
  }
  out += '}';
  return out;
}

CostFunction cost_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("cost json: ") + e.what());
  }
  if (!j.is_object() || !j.contains("kind")) {
    throw std::invalid_argument("cost json: expected an object with a \"kind\" field");
  }
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "constant") {
    if (!j.contains("c")) throw std::invalid_argument("cost json: constant kind needs \"c\"");
    return CostFunction::constant(j["c"].get<double>());
  }
  if (kind == "concave") {
    if (!j.contains("f") || !j["f"].is_array()) {
      throw std::invalid_argument("cost json: concave kind needs an \"f\" array");
    }
    return CostFunction::concave(j["f"].get<std::vector<double>>());
  }
  throw std::invalid_argument("cost json: unknown kind \"" + kind + "\"");
}

std::string outcome_to_json(const std::string& mechanism, const BidVector& bids,
                            const Outcome& out) {
  std::string s = "{\"mechanism\":";
  append_escaped(s, mechanism);
  s += ",\"bids\":";
  append_array(s, bids);
  s += ",\"winners\":[";
  bool first = true;
  for (std::size_t i : out.winner_indices()) {
    if (!first) s += ',';
    s += std::to_string(i);
    first = false;
  }
  s += "],\"payments\":";
  append_array(s, out.payment);
  s += ",\"total_payment\":" + format_number(out.total_payment());
  s += '}';
  return s;
}

std::string check_report_to_json(const std::string& check, const std::string& mechanism,
                                 const CheckReport& report) {
  std::string s = "{\"check\":";
  append_escaped(s, check);
  s += ",\"mechanism\":";
  append_escaped(s, mechanism);
  s += ",\"verdict\":\"";
  s += to_string(report.verdict);
  s += '"';
  if (report.witness) {
    const auto& w = *report.witness;
    s += ",\"witness\":{\"valuations\":";
    append_array(s, w.valuations);
    s += ",\"deviator\":" + std::to_string(w.deviator);
    s += ",\"reports\":";
    append_lists(s, w.reports);
    s += ",\"utilities\":{\"truthful\":" + format_number(w.truthful_utility);
    s += ",\"deviating\":" + format_number(w.deviant_utility) + "}}";
  }
  s += ",\"cases_examined\":" + std::to_string(report.cases_examined);
  s += ",\"elapsed_ms\":" + format_number(report.elapsed_ms);
  if (!report.note.empty()) {
    s += ",\"note\":";
    append_escaped(s, report.note);
  }
  s += '}';
  return s;
}

std::string budget_report_to_json(const std::string& mechanism, const BudgetReport& report) {
  std::string s = "{\"check\":\"budget\",\"mechanism\":";
  append_escaped(s, mechanism);
  s += ",\"worst\":\"";
  s += to_string(report.worst);
  s += "\",\"balanced_cases\":" + std::to_string(report.balanced_cases);
  s += ",\"no_deficit_cases\":" + std::to_string(report.surplus_cases);
  s += ",\"deficit_cases\":" + std::to_string(report.deficit_cases);
  if (report.worst_example) {
    s += ",\"worst_example\":";
    append_array(s, *report.worst_example);
  }
  s += ",\"cases_examined\":" + std::to_string(report.cases_examined);
  s += ",\"elapsed_ms\":" + format_number(report.elapsed_ms);
  s += '}';
  return s;
}

std::string worst_case_to_json(const std::string& mechanism, std::size_t n, const WorstCase& wc) {
  std::string s = "{\"mode\":\"worst-case\",\"mechanism\":";
  append_escaped(s, mechanism);
  s += ",\"n\":" + std::to_string(n);
  s += ",\"ratio\":" + format_number(wc.ratio);
  s += ",\"witness\":";
  append_array(s, wc.witness);
  s += ",\"infinite_witnesses\":";
  append_lists(s, wc.infinite_witnesses);
  s += ",\"cases_examined\":" + std::to_string(wc.cases_examined);
  s += ",\"elapsed_ms\":" + format_number(wc.elapsed_ms);
  s += '}';
  return s;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "n,mechanism,cost_kind,ratio,witness,runtime_ms\n";
  for (const auto& row : rows) {
    out += std::to_string(row.n) + ',' + row.mechanism + ',' + row.cost_kind + ',';
    out += format_number(row.ratio) + ',';
    for (std::size_t i = 0; i < row.witness.size(); ++i) {
      if (i) out += ';';
      out += format_number(row.witness[i]);
    }
    out += ',' + format_number(row.runtime_ms) + '\n';
  }
  return out;
}

}  // namespace sybilshare
