#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>

#include "scgfd/scgfd.hpp"

namespace {

using namespace scgfd;

struct Options {
  std::string graph;
  std::string cause;
  std::string effect;
  int gamma = 0;
  int gamma_max = 1;
  std::string mediators;
  int max_set_size = 2;
  int window = 8;
  std::size_t max_candidates = 20000;
  std::uint64_t seed = 0;
  int trials = 100;
  int cardinality = 2;
  double tol = 1e-9;
  bool json = false;
  std::string format = "text";
  std::string bx = "general";
  bool demonstrate = false;
  std::size_t demo_limit = 5;
};

SeriesSet split_mediators(const std::string &text) {
  SeriesSet out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto b = item.find_first_not_of(" \t");
    auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    out.insert(item.substr(b, e - b + 1));
  }
  return out;
}

EffectQuery query_of(const Options &o) { return {o.cause, o.effect, o.gamma, o.gamma_max}; }

std::string set_text(const SeriesSet &s) {
  std::string out = "{";
  for (const auto &v : s) out += (out.size() > 1 ? ", " : "") + v;
  return out + "}";
}

void print_report_text(std::ostream &os, const CriterionReport &r) {
  os << "mediators " << set_text(r.mediators) << ": "
     << (r.satisfied ? "criterion satisfied" : "criterion not satisfied") << "\n";
  os << "  condition 1 (interception): " << (r.condition1 ? "holds" : "fails") << "\n";
  os << "  condition 2 (no active back-door path from the cause): "
     << (r.condition2 ? "holds" : "fails") << "\n";
  os << "  condition 3 (back-door paths to the effect blocked by the cause): "
     << (r.condition3 ? "holds" : "fails") << "\n";
  os << "  condition 4: " << variant_label(r.variant);
  if (r.holding_variants.size() > 1) {
    os << " (holding:";
    for (Variant v : r.holding_variants) os << " " << variant_label(v);
    os << ")";
  }
  os << "\n";
  if (r.degenerate) os << "  note: no active directed path from cause to effect\n";
  for (const auto &w : r.witnesses) {
    os << "  witness for condition " << w.condition << ": ";
    if (w.path) os << to_string(*w.path);
    else if (!w.cycle.empty()) {
      for (std::size_t i = 0; i < w.cycle.size(); ++i) os << (i ? " -> " : "") << w.cycle[i];
    }
    os << " (" << w.note << ")\n";
  }
}

bool want_json(const Options &o) { return o.json || o.format == "json"; }

int run_check(const Options &o) {
  Scg g = load_scg_file(o.graph);
  CriterionReport r = check_front_door(g, split_mediators(o.mediators), query_of(o));
  if (want_json(o)) std::cout << criterion_report_json(r) << "\n";
  else print_report_text(std::cout, r);
  return r.satisfied ? 0 : 1;
}

int run_search(const Options &o) {
  Scg g = load_scg_file(o.graph);
  auto hits = search_front_door_sets(g, query_of(o), o.max_set_size);
  if (want_json(o)) {
    std::cout << search_result_json(hits) << "\n";
  } else {
    if (hits.empty()) std::cout << "no mediator set of size <= " << o.max_set_size << " qualifies\n";
    for (const auto &h : hits)
      std::cout << set_text(h.mediators) << " variant " << variant_label(h.report.variant)
                << (h.report.degenerate ? " (no active directed path)" : "") << "\n";
  }
  return hits.empty() ? 1 : 0;
}

int run_formula(const Options &o) {
  Scg g = load_scg_file(o.graph);
  SeriesSet w = split_mediators(o.mediators);
  EffectQuery q = query_of(o);
  CriterionReport r = check_front_door(g, w, q);
  if (!r.satisfied) {
    print_report_text(std::cerr, r);
    return 1;
  }
  BxForm form = o.bx == "reduced" ? BxForm::reduced : BxForm::general;
  EstimandAst ast = build_estimand(make_front_door_sets(g, w, q, form, r.variant), q);
  std::cout << render_estimand(ast, want_json(o) ? RenderFormat::json : RenderFormat::text) << "\n";
  return 0;
}

int run_verify(const Options &o) {
  Scg g = load_scg_file(o.graph);
  SeriesSet w = split_mediators(o.mediators);
  EffectQuery q = query_of(o);
  CriterionReport r = check_front_door(g, w, q);
  if (!r.satisfied) {
    print_report_text(std::cerr, r);
    if (o.demonstrate) {
      auto demos = demonstrate_backdoors(g, w, q, o.window, o.max_candidates, o.demo_limit);
      for (const auto &d : demos)
        std::cout << "candidate " << d.candidate_index << ": " << d.path
                  << (d.unblockable ? "  [every non-collider descends from the cause]" : "")
                  << "\n";
    }
    return 1;
  }
  VerificationReport rep = verify_front_door_lemmas(g, w, q, o.window, o.max_candidates);
  if (want_json(o)) {
    std::cout << verification_report_json(rep) << "\n";
  } else {
    std::cout << "candidates checked: " << rep.candidates_checked
              << (rep.truncated ? " (truncated)" : "") << "\n";
    std::cout << "violations: " << rep.violations.size() << "\n";
    for (const auto &v : rep.violations)
      std::cout << "  candidate " << v.candidate_index << " [" << v.lemma << "] " << v.path << "\n";
    std::cout << "candidates where the factors do not compose: " << rep.composition_failures.size()
              << "\n";
    for (const auto &v : rep.composition_failures)
      std::cout << "  candidate " << v.candidate_index << " " << v.path << "\n";
  }
  return rep.violations.empty() ? 0 : 1;
}

int run_simulate(const Options &o, bool window_given) {
  Scg g = load_scg_file(o.graph);
  SeriesSet w = split_mediators(o.mediators);
  EffectQuery q = query_of(o);
  CriterionReport r = check_front_door(g, w, q);
  if (!r.satisfied) {
    print_report_text(std::cerr, r);
    return 1;
  }
  int window = window_given ? o.window : 2 * (q.gamma + q.gamma_max) + 2;
  BxForm form = o.bx == "reduced" ? BxForm::reduced : BxForm::general;
  EstimandAst ast = build_estimand(make_front_door_sets(g, w, q, form, r.variant), q);
  CandidateEnumeration e = enumerate_candidates(g, q.gamma_max, o.max_candidates);
  std::vector<CompareReport> reports;
  bool all = true;
  for (int i = 0; i < o.trials; ++i) {
    reports.push_back(run_trial(ast, e, q, window, o.cardinality, o.seed + i, o.tol));
    all = all && reports.back().pass;
  }
  if (want_json(o)) {
    std::cout << compare_reports_json(reports) << "\n";
  } else {
    double worst = 0.0;
    for (const auto &c : reports) {
      std::cout << "seed " << c.seed << " candidate " << c.candidate_index << " max_abs_error "
                << c.max_abs_error << (c.pass ? " pass" : " FAIL") << "\n";
      worst = std::max(worst, c.max_abs_error);
    }
    std::cout << "worst error " << worst << " over " << reports.size() << " trials\n";
  }
  return all ? 0 : 1;
}

int run_dot(const Options &o) {
  std::cout << to_dot(load_scg_file(o.graph));
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  Options o;
  CLI::App app{"scgfd: front-door style estimands on summary causal graphs"};
  app.require_subcommand(1);

  auto add_graph = [&](CLI::App *sub) {
    sub->add_option("--graph", o.graph, "Graph file")->required()->check(CLI::ExistingFile);
  };
  auto add_query = [&](CLI::App *sub) {
    add_graph(sub);
    sub->add_option("--cause", o.cause, "Cause series")->required();
    sub->add_option("--effect", o.effect, "Effect series")->required();
    sub->add_option("--gamma", o.gamma, "Lag between cause and effect")->required()->check(CLI::NonNegativeNumber);
    sub->add_option("--gamma-max", o.gamma_max, "Maximal lag of the model")->capture_default_str();
    sub->add_flag("--json", o.json, "JSON output");
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  };
  auto add_mediators = [&](CLI::App *sub) {
    sub->add_option("--mediators", o.mediators, "Comma-separated mediator series")->required();
  };
  auto add_bx = [&](CLI::App *sub) {
    sub->add_option("--bx", o.bx, "Cause-side adjustment set")->check(CLI::IsMember({"general", "reduced"}))->capture_default_str();
  };

  auto *check = app.add_subcommand("check", "Decide the criterion for a mediator set");
  add_query(check);
  add_mediators(check);

  auto *search = app.add_subcommand("search", "List qualifying mediator sets");
  add_query(search);
  search->add_option("--max-set-size", o.max_set_size, "Largest set size")->capture_default_str()->check(CLI::PositiveNumber);

  auto *formula = app.add_subcommand("formula", "Print the do-free estimand");
  add_query(formula);
  add_mediators(formula);
  add_bx(formula);

  auto *verify = app.add_subcommand("verify", "Check the adjustment sets in every candidate window");
  add_query(verify);
  add_mediators(verify);
  verify->add_option("--window", o.window, "Window length")->capture_default_str();
  verify->add_option("--max-candidates", o.max_candidates, "Candidate cap")->capture_default_str();
  verify->add_flag("--demonstrate", o.demonstrate, "Show back-door paths when the criterion fails");

  auto *simulate = app.add_subcommand("simulate", "Compare the estimand with simulated ground truth");
  add_query(simulate);
  add_mediators(simulate);
  add_bx(simulate);
  auto *window_opt = simulate->add_option("--window", o.window, "Window length (default 2 (gamma + gamma_max) + 2)");
  simulate->add_option("--max-candidates", o.max_candidates, "Candidate cap")->capture_default_str();
  simulate->add_option("--seed", o.seed, "First seed")->capture_default_str();
  simulate->add_option("--trials", o.trials, "Number of seeds")->capture_default_str();
  simulate->add_option("--cardinality", o.cardinality, "States per variable")->capture_default_str();
  simulate->add_option("--tol", o.tol, "Tolerance")->capture_default_str();

  auto *dot = app.add_subcommand("dot", "Print the graph in Graphviz format");
  add_graph(dot);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e, std::cerr, std::cerr);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*check) return run_check(o);
    if (*search) return run_search(o);
    if (*formula) return run_formula(o);
    if (*verify) return run_verify(o);
    if (*simulate) return run_simulate(o, window_opt->count() > 0);
    if (*dot) return run_dot(o);
  } catch (const scgfd::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
