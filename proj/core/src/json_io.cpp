#include "scgfd/json_io.hpp"

#include <nlohmann/json.hpp>

namespace scgfd {

using ojson = nlohmann::ordered_json;

namespace {

ojson series_list(const SeriesSet &s) {
  auto out = ojson::array();
  for (const auto &v : s) out.push_back(v);
  return out;
}

ojson query_object(const EffectQuery &q) {
  ojson j;
  j["cause"] = q.cause;
  j["effect"] = q.effect;
  j["gamma"] = q.gamma;
  j["gamma_max"] = q.gamma_max;
  return j;
}

ojson criterion_object(const CriterionReport &r) {
  ojson j;
  j["satisfied"] = r.satisfied;
  j["mediators"] = series_list(r.mediators);
  ojson c;
  c["1"] = r.condition1;
  c["2"] = r.condition2;
  c["3"] = r.condition3;
  c["4"] = r.variant != Variant::none;
  j["conditions"] = c;
  j["variant"] = variant_label(r.variant);
  auto holding = ojson::array();
  for (Variant v : r.holding_variants) holding.push_back(variant_label(v));
  j["holding_variants"] = holding;
  j["degenerate"] = r.degenerate;
  auto wits = ojson::array();
  for (const auto &w : r.witnesses) {
    ojson o;
    o["condition"] = w.condition;
    if (w.path) o["path"] = to_string(*w.path);
    if (!w.cycle.empty()) o["cycle"] = w.cycle;
    o["note"] = w.note;
    wits.push_back(o);
  }
  j["witnesses"] = wits;
  return j;
}

ojson compare_object(const CompareReport &r) {
  ojson j;
  j["seed"] = r.seed;
  j["candidate_index"] = r.candidate_index;
  j["max_abs_error"] = r.max_abs_error;
  j["pass"] = r.pass;
  return j;
}

}  // namespace

std::string query_json(const EffectQuery &q) { return query_object(q).dump(); }

std::string criterion_report_json(const CriterionReport &r) { return criterion_object(r).dump(); }

std::string search_result_json(const std::vector<SearchHit> &hits) {
  auto out = ojson::array();
  for (const auto &h : hits) out.push_back(criterion_object(h.report));
  return out.dump();
}

std::string verification_report_json(const VerificationReport &r) {
  ojson j;
  j["scg"] = r.scg.serialize();
  j["query"] = query_object(r.query);
  j["mediators"] = series_list(r.mediators);
  j["window"] = r.window_length;
  j["candidates_checked"] = r.candidates_checked;
  j["truncated"] = r.truncated;
  j["checks"] = r.checks;
  auto list = [](const std::vector<Violation> &in) {
    auto vs = ojson::array();
    for (const auto &v : in) {
      ojson o;
      o["candidate_index"] = v.candidate_index;
      o["lemma"] = v.lemma;
      o["path"] = v.path;
      vs.push_back(o);
    }
    return vs;
  };
  j["violations"] = list(r.violations);
  j["composition_failures"] = list(r.composition_failures);
  return j.dump();
}

std::string compare_report_json(const CompareReport &r) { return compare_object(r).dump(); }

std::string compare_reports_json(const std::vector<CompareReport> &rs) {
  auto out = ojson::array();
  for (const auto &r : rs) out.push_back(compare_object(r));
  return out.dump();
}

}  // namespace scgfd
