// Command-line front end: single mechanism runs, axiom checks, worst-case
// sweeps, SWI verification and the canned reproduction cases.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "sybilshare/json_io.hpp"

namespace ss = sybilshare;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;

struct RunConfig {
  std::string mode;  // run | check-truthful | check-sybil | worst-case | swi | reproduce
  std::string mechanism = "shapley";
  ss::CostFunction cost = ss::CostFunction::constant(1.0);
  std::vector<double> bids;
  std::vector<double> valuations;
  std::size_t n = 3;
  double step = 0.05;
  double max_value = 1.0;
  std::size_t max_sybils = 3;
  std::size_t max_agents = 3;
  std::string case_id;
  std::string out_path;
  bool serial = false;
};

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

// "constant:1" or "concave:0,1,1.5"
ss::CostFunction parse_cost_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "constant") {
    return ss::CostFunction::constant(rest.empty() ? 1.0 : std::stod(rest));
  }
  if (kind == "concave") {
    return ss::CostFunction::concave(parse_number_list(rest));
  }
  throw std::invalid_argument("cost spec must be constant:<c> or concave:<f0,f1,...>");
}

void load_config(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config parse error: " + std::string(e.what()));
  }
  if (j.contains("mode")) cfg.mode = j["mode"].get<std::string>();
  if (j.contains("mechanism")) cfg.mechanism = j["mechanism"].get<std::string>();
  if (j.contains("cost")) cfg.cost = ss::cost_from_json_text(j["cost"].dump());
  if (j.contains("bids")) cfg.bids = j["bids"].get<std::vector<double>>();
  if (j.contains("v")) cfg.valuations = j["v"].get<std::vector<double>>();
  if (j.contains("n")) cfg.n = j["n"].get<std::size_t>();
  if (j.contains("step")) cfg.step = j["step"].get<double>();
  if (j.contains("max_value")) cfg.max_value = j["max_value"].get<double>();
  if (j.contains("max_sybils")) cfg.max_sybils = j["max_sybils"].get<std::size_t>();
  if (j.contains("max_agents")) cfg.max_agents = j["max_agents"].get<std::size_t>();
  if (j.contains("case")) cfg.case_id = j["case"].get<std::string>();
  if (j.contains("out")) cfg.out_path = j["out"].get<std::string>();
}

void write_output(const std::string& path, const std::string& payload) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << payload;
}

ss::Mechanism build_mechanism(const RunConfig& cfg) {
  const auto id = ss::parse_mechanism(cfg.mechanism);
  if (!id) throw std::invalid_argument("unknown mechanism '" + cfg.mechanism + "'");
  return ss::make_mechanism(*id, cfg.cost);
}

ss::Exec exec_of(const RunConfig& cfg) { return cfg.serial ? ss::Exec::serial : ss::Exec::parallel; }

std::string profile_str(const std::vector<double>& xs) {
  std::string s = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ", ";
    s += ss::format_number(xs[i]);
  }
  return s + "]";
}

int cmd_run(const RunConfig& cfg) {
  const ss::Mechanism mech = build_mechanism(cfg);
  const ss::Outcome out = mech.run(cfg.bids);
  std::cout << mech.name << ": winners " << out.winner_count() << "/" << cfg.bids.size()
            << ", payments " << profile_str(out.payment) << ", total "
            << ss::format_number(out.total_payment()) << "\n";
  write_output(cfg.out_path, ss::outcome_to_json(mech.name, cfg.bids, out) + "\n");
  return kExitOk;
}

int cmd_check(const RunConfig& cfg, const std::string& property) {
  const ss::Mechanism mech = build_mechanism(cfg);
  const ss::Grid grid{cfg.step, cfg.max_value, cfg.max_sybils, cfg.max_agents};
  grid.require_valid();
  ss::CheckReport report;
  std::string name;
  if (property == "truthful") {
    name = "check-truthful";
    report = ss::check_truthful(mech, grid, exec_of(cfg));
  } else if (property == "sybil") {
    name = "check-sybil";
    report = ss::check_sybil_proof(mech, grid, exec_of(cfg));
  } else {
    throw std::invalid_argument("check property must be truthful or sybil");
  }
  std::cout << name << " " << mech.name << ": " << ss::to_string(report.verdict) << " ("
            << report.cases_examined << " cases, " << ss::format_number(report.elapsed_ms)
            << " ms)";
  if (report.witness) {
    std::cout << " witness v=" << profile_str(report.witness->valuations) << " gain "
              << ss::format_number(report.witness->deviant_utility -
                                   report.witness->truthful_utility);
  }
  std::cout << "\n";
  write_output(cfg.out_path, ss::check_report_to_json(name, mech.name, report) + "\n");
  return report.verdict == ss::Verdict::pass ? kExitOk : kExitViolation;
}

int cmd_worst_case(const RunConfig& cfg) {
  const ss::Mechanism mech = build_mechanism(cfg);
  const ss::Grid grid{cfg.step, cfg.max_value, cfg.max_sybils, cfg.max_agents};
  const ss::WorstCase wc = ss::worst_case_ratio(mech, cfg.n, grid, exec_of(cfg));
  std::cout << "worst-case " << mech.name << " n=" << cfg.n << ": ratio "
            << ss::format_number(wc.ratio) << " witness " << profile_str(wc.witness) << "\n";
  if (!cfg.out_path.empty()) {
    if (cfg.out_path.size() > 4 && cfg.out_path.substr(cfg.out_path.size() - 4) == ".csv") {
      std::vector<ss::SweepRow> rows{{cfg.n, mech.name, mech.cost.kind_name(), wc.ratio,
                                      wc.witness, wc.elapsed_ms}};
      write_output(cfg.out_path, ss::sweep_csv(rows));
    } else {
      write_output(cfg.out_path, ss::worst_case_to_json(mech.name, cfg.n, wc) + "\n");
    }
  }
  return kExitOk;
}

int cmd_swi(const RunConfig& cfg) {
  const ss::CheckReport report =
      ss::check_swi_shapley(cfg.cost, cfg.valuations, cfg.step, cfg.max_sybils, exec_of(cfg));
  std::cout << "swi shapley " << cfg.cost.kind_name() << " v=" << profile_str(cfg.valuations)
            << ": " << ss::to_string(report.verdict) << " (" << report.cases_examined
            << " strategy profiles)\n";
  write_output(cfg.out_path, ss::check_report_to_json("swi", "shapley", report) + "\n");
  return report.verdict == ss::Verdict::pass ? kExitOk : kExitViolation;
}

// ---------------------------------------------------------------------------
// Canned reproduction cases. Each prints expected vs observed and fails on
// any mismatch beyond the stated tolerance.

struct CaseCheck {
  bool ok = true;
  void expect(const std::string& what, double expected, double observed, double tol) {
    const bool good = std::fabs(expected - observed) <= tol;
    std::cout << "  " << what << ": expected " << ss::format_number(expected) << ", observed "
              << ss::format_number(observed) << " -> " << (good ? "ok" : "MISMATCH") << "\n";
    ok = ok && good;
  }
  void expect_true(const std::string& what, bool cond) {
    std::cout << "  " << what << " -> " << (cond ? "ok" : "MISMATCH") << "\n";
    ok = ok && cond;
  }
};

int case_vcg_sybil() {
  std::cout << "vcg-sybil: two agents at v = 1/3; one splits into (1/3, 1, 1)\n";
  CaseCheck check;
  const auto mech = ss::make_mechanism(ss::MechanismId::vcg, ss::CostFunction::constant(1.0));
  const double v = 1.0 / 3.0;
  const auto truthful = ss::run_sybil_extension(mech, {{v}, {v}});
  check.expect("truthful utility", 0.0, ss::agent_utility(v, truthful, 0), 1e-9);
  const auto deviant = ss::run_sybil_extension(mech, {{v, 1.0, 1.0}, {v}});
  check.expect("sybil utility", v, ss::agent_utility(v, deviant, 0), 1e-9);
  check.expect_true("other agent served for free",
                    deviant.agent_served(1) && std::fabs(deviant.total_payment[1]) <= 1e-9);
  return check.ok ? kExitOk : kExitViolation;
}

int case_shapley_sybil() {
  std::cout << "shapley-sybil: v = (1+e, 1/3-e, 1/3-e) at e = 0.01; split (1/4, 1/4)\n";
  CaseCheck check;
  const auto mech = ss::make_mechanism(ss::MechanismId::shapley, ss::CostFunction::constant(1.0));
  const double eps = 0.01;
  const double v1 = 1.0 + eps, rest = 1.0 / 3.0 - eps;
  const auto truthful = ss::run_sybil_extension(mech, {{v1}, {rest}, {rest}});
  check.expect("truthful utility", 0.01, ss::agent_utility(v1, truthful, 0), 1e-9);
  const auto deviant = ss::run_sybil_extension(mech, {{0.25, 0.25}, {rest}, {rest}});
  check.expect("sybil utility", 0.51, ss::agent_utility(v1, deviant, 0), 1e-9);
  check.expect("sybil total payment", 0.5, deviant.total_payment[0], 1e-9);
  return check.ok ? kExitOk : kExitViolation;
}

int case_potential_sybil() {
  std::cout << "potential-sybil: v = (1+e, 1/2-e, 1/3-e, 1/4-e) plus a (1+e) sybil\n";
  CaseCheck check;
  const auto mech = ss::make_mechanism(ss::MechanismId::potential, ss::CostFunction::constant(1.0));
  double prev_gap = std::numeric_limits<double>::infinity();
  for (const double eps : {1e-3, 1e-5}) {
    const double v1 = 1.0 + eps;
    ss::SybilProfile reports{{v1, v1}, {0.5 - eps}, {1.0 / 3.0 - eps}, {0.25 - eps}};
    const auto out = ss::run_sybil_extension(mech, reports);
    const double sybil_payment = out.identities.payment[1];
    std::cout << " eps = " << ss::format_number(eps) << ":\n";
    check.expect("sybil identity payment (1/5 - 2e)", 0.2 - 2 * eps, sybil_payment, 1e-9);
    const double utility = ss::agent_utility(v1, out, 0);
    check.expect_true("sybil strategy utility positive", utility > 0);
    const double gap = std::fabs(utility - (1.0 - 0.2));
    check.expect("utility approaches 1 - 1/5", 1.0 - 0.2, utility, 1e-2);
    check.expect_true("approach is monotone", gap <= prev_gap);
    prev_gap = gap;
  }
  return check.ok ? kExitOk : kExitViolation;
}

int case_worst_case(ss::MechanismId id, double target, const char* label) {
  std::cout << label << ": n = 5 sweep on a 0.05 grid\n";
  CaseCheck check;
  const auto mech = ss::make_mechanism(id, ss::CostFunction::constant(1.0));
  const ss::Grid grid{0.05, 1.0, 1, 1};
  const ss::WorstCase wc = ss::worst_case_ratio(mech, 5, grid);
  std::cout << "  witness " << profile_str(wc.witness) << "\n";
  check.expect_true("ratio within [target - 0.01, target + 1e-7]",
                    wc.ratio >= target - 0.01 && wc.ratio <= target + 1e-7);
  check.expect("ratio", target, wc.ratio, 0.01);
  return check.ok ? kExitOk : kExitViolation;
}

int case_swi_shapley() {
  std::cout << "swi-shapley: v = (1+e, 1/3-e, 1/3-e) at e = 0.01, step 0.05, up to 3 identities\n";
  CaseCheck check;
  const double eps = 0.01;
  const ss::ValuationProfile v{1.0 + eps, 1.0 / 3.0 - eps, 1.0 / 3.0 - eps};
  const auto cost = ss::CostFunction::constant(1.0);
  const auto report = ss::check_swi_shapley(cost, v, 0.05, 3);
  check.expect_true("no strategy profile raises the social cost", report.verdict == ss::Verdict::pass);

  // The profitable split itself lowers the social cost: more agents served.
  const auto mech = ss::make_mechanism(ss::MechanismId::shapley, cost);
  const double truthful_pi = ss::social_cost(cost, mech.run(v).winner, v);
  const double sybil_pi = ss::sybil_social_cost(mech, v, {{1.0 + eps, 0.25}, {v[1]}, {v[2]}});
  check.expect_true("profitable split lowers social cost", sybil_pi < truthful_pi - 0.5);
  return check.ok ? kExitOk : kExitViolation;
}

int case_nonexcludable_baseline() {
  std::cout << "nonexcludable-baseline: all-or-none equal shares, witness at (1-e,...,1/n-e,...)\n";
  CaseCheck check;
  const std::size_t n = 5;
  const auto mech = ss::make_all_or_none_baseline(1.0);
  ss::ValuationProfile v(n, 1.0 - 1e-6);
  v[n - 1] = 1.0 / double(n) - 1e-6;
  const auto score = ss::approx_ratio(mech, v);
  const double bound = double(n) - 1.0 + 1.0 / double(n) - 0.01;
  std::cout << "  ratio " << ss::format_number(score.ratio) << "\n";
  check.expect_true("ratio at least n - 1 + 1/n - 0.01", score.ratio >= bound);
  return check.ok ? kExitOk : kExitViolation;
}

int cmd_reproduce(const std::string& case_id) {
  using Runner = int (*)();
  struct Entry {
    const char* id;
    Runner run;
  };
  static const Entry entries[] = {
      {"vcg-sybil", case_vcg_sybil},
      {"shapley-sybil", case_shapley_sybil},
      {"potential-sybil", case_potential_sybil},
      {"osp-worst-case",
       [] { return case_worst_case(ss::MechanismId::optimal_sybil_proof, 3.0, "osp-worst-case"); }},
      {"shapley-worst-case",
       [] {
         return case_worst_case(ss::MechanismId::shapley, ss::harmonic(5), "shapley-worst-case");
       }},
      {"swi-shapley", case_swi_shapley},
      {"nonexcludable-baseline", case_nonexcludable_baseline},
  };
  if (case_id == "all") {
    int rc = kExitOk;
    for (const auto& e : entries) rc = std::max(rc, e.run());
    return rc;
  }
  for (const auto& e : entries) {
    if (case_id == e.id) return e.run();
  }
  std::cerr << "unknown case '" << case_id << "'; known cases:";
  for (const auto& e : entries) std::cerr << " " << e.id;
  std::cerr << " all\n";
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cost-sharing mechanisms, sybil extensions and welfare analysis"};
  app.require_subcommand(0, 1);

  RunConfig cfg;
  std::string config_path, cost_spec, bids_spec, v_spec, property = "sybil";
  app.add_option("--config", config_path, "JSON config file (mode selects the analysis)");

  // Flags are parsed into a stash so that an explicit flag wins over the
  // config file, which in turn wins over the defaults.
  RunConfig stash = cfg;
  std::vector<CLI::App*> subs;
  auto add_common = [&](CLI::App* sub) {
    subs.push_back(sub);
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--mechanism", stash.mechanism, "vcg|shapley|potential|osp|hybrid");
    sub->add_option("--cost", cost_spec, "constant:<c> or concave:<f0,f1,...>");
    sub->add_option("--step", stash.step, "grid step");
    sub->add_option("--max-value", stash.max_value, "grid maximum");
    sub->add_option("--max-sybils", stash.max_sybils, "identities per deviating agent");
    sub->add_option("--max-agents", stash.max_agents, "agents in exhaustive profiles");
    sub->add_option("--n", stash.n, "number of agents");
    sub->add_option("--out", stash.out_path, "report file (json, or csv for sweeps)");
    sub->add_flag("--serial", stash.serial, "force the serial reference driver");
  };

  CLI::App* run = app.add_subcommand("run", "run one mechanism on a bid vector");
  add_common(run);
  run->add_option("--bids", bids_spec, "comma-separated bids");

  CLI::App* check = app.add_subcommand("check", "exhaustive truthfulness / sybil-proofness check");
  add_common(check);
  CLI::Option* property_opt = check->add_option("--property", property, "truthful|sybil");

  CLI::App* worst = app.add_subcommand("worst-case", "worst-case approximation ratio sweep");
  add_common(worst);

  CLI::App* swi = app.add_subcommand("swi", "sybil welfare invariance check for shapley");
  add_common(swi);
  swi->add_option("--v", v_spec, "comma-separated true valuations");

  CLI::App* repro = app.add_subcommand("reproduce", "run a named reproduction case");
  std::string case_id = "all";
  repro->add_option("case", case_id, "case id or 'all'");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (!config_path.empty()) load_config(config_path, cfg);
    for (CLI::App* sub : subs) {
      if (!sub->parsed()) continue;
      if (sub->count("--mechanism")) cfg.mechanism = stash.mechanism;
      if (sub->count("--step")) cfg.step = stash.step;
      if (sub->count("--max-value")) cfg.max_value = stash.max_value;
      if (sub->count("--max-sybils")) cfg.max_sybils = stash.max_sybils;
      if (sub->count("--max-agents")) cfg.max_agents = stash.max_agents;
      if (sub->count("--n")) cfg.n = stash.n;
      if (sub->count("--out")) cfg.out_path = stash.out_path;
      if (sub->count("--serial")) cfg.serial = stash.serial;
    }
    if (!cost_spec.empty()) cfg.cost = parse_cost_spec(cost_spec);
    if (!bids_spec.empty()) cfg.bids = parse_number_list(bids_spec);
    if (!v_spec.empty()) cfg.valuations = parse_number_list(v_spec);

    if (repro->parsed()) return cmd_reproduce(cfg.case_id.empty() ? case_id : cfg.case_id);
    if (run->parsed()) return cmd_run(cfg);
    if (check->parsed()) {
      if (property_opt->count() == 0) {
        if (cfg.mode == "check-truthful") property = "truthful";
        if (cfg.mode == "check-sybil") property = "sybil";
      }
      return cmd_check(cfg, property);
    }
    if (worst->parsed()) return cmd_worst_case(cfg);
    if (swi->parsed()) return cmd_swi(cfg);

    // config-only dispatch (mode came from the file)
    if (cfg.mode == "run") return cmd_run(cfg);
    if (cfg.mode == "check-truthful") return cmd_check(cfg, "truthful");
    if (cfg.mode == "check-sybil") return cmd_check(cfg, "sybil");
    if (cfg.mode == "worst-case") return cmd_worst_case(cfg);
    if (cfg.mode == "swi") return cmd_swi(cfg);
    if (cfg.mode == "reproduce") return cmd_reproduce(cfg.case_id);
    std::cerr << "no mode selected\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
