#include "scgfd/estimand.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>

#include "scgfd/errors.hpp"
#include <nlohmann/json.hpp>

namespace scgfd {

namespace {

void add_offsets(MicroSet &out, const SeriesSet &series, int base, int lo, int hi) {
  // Adds (B, base - l) for lo <= l <= hi.
  for (const auto &b : series)
    for (int l = lo; l <= hi; ++l) out.insert({b, base - l});
}

SeriesSet set_minus(const SeriesSet &a, const SeriesSet &b) {
  SeriesSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

SeriesSet set_and(const SeriesSet &a, const SeriesSet &b) {
  SeriesSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

SeriesSet set_or(const SeriesSet &a, const SeriesSet &b) {
  SeriesSet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

void check_mediators(const Scg &g, const SeriesSet &w, const EffectQuery &q) {
  validate_query(g, q);
  for (const auto &v : w) g.index_of(v);
  if (w.count(q.cause) || w.count(q.effect))
    throw PreconditionError("mediators overlap cause or effect");
}

std::vector<VarRef> refs(const MicroSet &s) {
  std::vector<VarRef> out;
  for (const auto &v : s) out.push_back({v, false});
  return out;
}

}  // namespace

MicroSet mediator_instances(const SeriesSet &w, const EffectQuery &q) {
  validate_query(q);
  MicroSet out;
  for (const auto &s : w)
    for (int l = 0; l <= q.gamma; ++l) out.insert({s, -q.gamma + l});
  return out;
}

MicroSet build_bx(const Scg &g, const SeriesSet &w, const EffectQuery &q, Variant variant) {
  check_mediators(g, w, q);
  auto holding = holding_variants(g, q);
  if (std::find(holding.begin(), holding.end(), variant) == holding.end())
    throw PreconditionError(std::string("variant ") + variant_label(variant) +
                            " does not hold for the cause");
  const SeriesId &x = q.cause;
  const int gamma = q.gamma, gmax = q.gamma_max;
  SeriesSet anc_x = scg_ancestors(g, x), desc_x = scg_descendants(g, x);
  SeriesSet anc_w = w.empty() ? SeriesSet{} : scg_ancestors(g, w);
  MicroSet out;
  switch (variant) {
    case Variant::no_cycle:
      add_offsets(out, scg_parents(g, x), -gamma, 0, gmax);
      add_offsets(out, set_and(anc_w, desc_x), -gamma, 1, gmax);
      for (int l = 1; l <= gamma; ++l) out.insert({x, -gamma + l});
      break;
    case Variant::self_loop_only:
      add_offsets(out, scg_parents(g, x), -gamma, 0, gmax);
      add_offsets(out, {x}, -gamma, 1, gmax);
      break;
    case Variant::gamma_zero:
      add_offsets(out, set_minus(anc_x, desc_x), 0, 0, gmax);
      add_offsets(out, set_and(set_or(anc_x, anc_w), desc_x), 0, 1, gmax);
      break;
    case Variant::none: throw PreconditionError("no variant given");
  }
  out.erase({x, -gamma});
  return out;
}

MicroSet build_theorem_bx(const Scg &g, const SeriesSet &w, const EffectQuery &q) {
  check_mediators(g, w, q);
  const SeriesId &x = q.cause;
  const int gamma = q.gamma, gmax = q.gamma_max;
  SeriesSet anc_x = scg_ancestors(g, x), desc_x = scg_descendants(g, x);
  SeriesSet anc_w = w.empty() ? SeriesSet{} : scg_ancestors(g, w);
  MicroSet out;
  add_offsets(out, set_minus(anc_x, desc_x), -gamma, 0, gmax);
  add_offsets(out, set_and(set_or(anc_x, anc_w), desc_x), -gamma, 1, gmax);
  if (cycles_containing(g, x).kind == CycleKind::none)
    for (int l = 1; l <= gamma; ++l) out.insert({x, -gamma + l});
  out.erase({x, -gamma});
  return out;
}

MicroSet build_bf(const Scg &g, const SeriesSet &w, const EffectQuery &q) {
  check_mediators(g, w, q);
  MicroSet out;
  if (!w.empty()) {
    SeriesSet anc_w = scg_ancestors(g, w), desc_w = scg_descendants(g, w);
    add_offsets(out, set_minus(anc_w, desc_w), -q.gamma, -q.gamma, q.gamma_max);
    add_offsets(out, set_and(anc_w, desc_w), -q.gamma, 1, q.gamma_max);
  }
  out.erase({q.cause, -q.gamma});
  return out;
}

FrontDoorSets make_front_door_sets(const Scg &g, const SeriesSet &w, const EffectQuery &q,
                                   BxForm form, Variant variant) {
  FrontDoorSets s;
  if (variant == Variant::none) {
    auto holding = holding_variants(g, q);
    if (holding.empty()) throw PreconditionError("no Condition 4 variant holds");
    variant = holding.front();
  }
  s.variant = variant;
  s.f = mediator_instances(w, q);
  s.bx = form == BxForm::general ? build_theorem_bx(g, w, q) : build_bx(g, w, q, variant);
  s.bf = build_bf(g, w, q);
  return s;
}

EstimandAst build_estimand(const FrontDoorSets &sets, const EffectQuery &q) {
  validate_query(q);
  MicroVertex cause{q.cause, -q.gamma}, effect{q.effect, 0};
  for (const auto &v : sets.bx)
    if (sets.f.count(v)) throw PreconditionError("B^x overlaps the mediator instances");
  if (sets.bx.count(cause) || sets.bf.count(cause))
    throw PreconditionError("adjustment set contains the cause vertex");

  EstimandAst ast;
  ast.cause = cause;
  ast.effect = effect;
  ast.outer_sum.assign(sets.f.begin(), sets.f.end());
  ast.degenerate = sets.f.empty();

  ast.factor1.cond = refs(sets.f);
  ast.factor1.given.push_back({cause, false});
  for (const auto &r : refs(sets.bx)) ast.factor1.given.push_back(r);
  ast.factor1.marginal_sum = refs(sets.bx);

  ast.factor2.cond.push_back({effect, false});
  ast.factor2.given = refs(sets.f);
  for (const auto &r : refs(sets.bf)) ast.factor2.given.push_back(r);
  ast.factor2.given.push_back({cause, true});
  ast.factor2.marginal_sum = refs(sets.bf);
  ast.factor2.marginal_sum.push_back({cause, true});
  return ast;
}

std::string render_var(const VarRef &v) {
  std::string name;
  for (char c : v.v.series) name += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (v.primed) name += "'";
  if (v.v.offset == 0) return name + "_t";
  std::string t = v.v.offset < 0 ? "t-" + std::to_string(-v.v.offset)
                                 : "t+" + std::to_string(v.v.offset);
  return name + "_{" + t + "}";
}

namespace {

std::string join_vars(const std::vector<VarRef> &vs) {
  std::string out;
  for (std::size_t i = 0; i < vs.size(); ++i) out += (i ? "," : "") + render_var(vs[i]);
  return out;
}

std::string render_factor_text(const ProbFactor &f) {
  std::string out;
  if (!f.marginal_sum.empty()) out += "Σ_{" + join_vars(f.marginal_sum) + "} ";
  if (f.cond.empty()) out += "1";
  else if (f.given.empty()) out += "P(" + join_vars(f.cond) + ")";
  else out += "P(" + join_vars(f.cond) + " | " + join_vars(f.given) + ")";
  if (!f.marginal_sum.empty()) out += " P(" + join_vars(f.marginal_sum) + ")";
  return out;
}

std::string ref_code(const VarRef &r) { return encode(r.v) + (r.primed ? "'" : ""); }

VarRef parse_ref(const std::string &code) {
  if (!code.empty() && code.back() == '\'') return {decode_micro_vertex(code.substr(0, code.size() - 1)), true};
  return {decode_micro_vertex(code), false};
}

nlohmann::ordered_json json_list(const std::vector<VarRef> &vs) {
  auto out = nlohmann::ordered_json::array();
  for (const auto &v : vs) out.push_back(ref_code(v));
  return out;
}

nlohmann::ordered_json json_factor(const ProbFactor &f) {
  nlohmann::ordered_json j;
  j["cond"] = json_list(f.cond);
  j["given"] = json_list(f.given);
  j["marginal_sum"] = json_list(f.marginal_sum);
  return j;
}

std::vector<VarRef> parse_list(const nlohmann::json &j) {
  std::vector<VarRef> out;
  for (const auto &e : j) out.push_back(parse_ref(e.get<std::string>()));
  return out;
}

ProbFactor parse_factor(const nlohmann::json &j) {
  return {parse_list(j.at("cond")), parse_list(j.at("given")), parse_list(j.at("marginal_sum"))};
}

}  // namespace

nlohmann::ordered_json estimand_to_json(const EstimandAst &ast) {
  nlohmann::ordered_json j;
  std::vector<VarRef> outer;
  for (const auto &v : ast.outer_sum) outer.push_back({v, false});
  j["outer_sum"] = json_list(outer);
  j["factor1"] = json_factor(ast.factor1);
  j["factor2"] = json_factor(ast.factor2);
  j["cause"] = encode(ast.cause);
  j["effect"] = encode(ast.effect);
  j["degenerate"] = ast.degenerate;
  return j;
}

EstimandAst parse_estimand_json(const std::string &text) {
  try {
    auto j = nlohmann::json::parse(text);
    EstimandAst ast;
    for (const auto &r : parse_list(j.at("outer_sum"))) {
      if (r.primed) throw PreconditionError("primed variable in outer sum");
      ast.outer_sum.push_back(r.v);
    }
    ast.factor1 = parse_factor(j.at("factor1"));
    ast.factor2 = parse_factor(j.at("factor2"));
    ast.cause = decode_micro_vertex(j.at("cause").get<std::string>());
    ast.effect = decode_micro_vertex(j.at("effect").get<std::string>());
    ast.degenerate = j.value("degenerate", ast.outer_sum.empty());
    return ast;
  } catch (const nlohmann::json::exception &e) {
    throw PreconditionError(std::string("malformed estimand JSON: ") + e.what());
  }
}

std::string render_estimand(const EstimandAst &ast, RenderFormat format) {
  if (format == RenderFormat::json) return estimand_to_json(ast).dump();
  std::string out = "P(" + render_var({ast.effect, false}) + " | do(" +
                    render_var({ast.cause, false}) + ")) = ";
  if (!ast.outer_sum.empty()) {
    std::vector<VarRef> outer;
    for (const auto &v : ast.outer_sum) outer.push_back({v, false});
    out += "Σ_{" + join_vars(outer) + "} ";
  }
  out += render_factor_text(ast.factor1) + " " + render_factor_text(ast.factor2);
  return out;
}

namespace {

// Assigns a dense slot to every distinct variable reference of the estimand.
class SlotTable {
 public:
  int slot(const VarRef &r) {
    std::string key = ref_code(r);
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    int id = static_cast<int>(refs_.size());
    index_.emplace(key, id);
    refs_.push_back(r);
    return id;
  }
  const std::vector<VarRef> &refs() const { return refs_; }

 private:
  std::map<std::string, int> index_;
  std::vector<VarRef> refs_;
};

struct Term {
  // Table over the distinct micro vertices of the term, and the slot that
  // supplies each one's value.
  std::optional<JointDistribution> table;
  std::vector<int> slots;
  std::vector<std::size_t> strides;

  double lookup(const std::vector<int> &values) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < slots.size(); ++i) idx += strides[i] * values[slots[i]];
    return table->probabilities()[idx];
  }
};

Term make_term(const std::vector<VarRef> &vars, const JointDistribution &joint, SlotTable &slots) {
  Term t;
  std::vector<MicroVertex> micro;
  for (const auto &r : vars) {
    if (!joint.contains(r.v))
      throw EvaluationError("variable " + encode(r.v) + " missing from the joint distribution");
    for (const auto &m : micro)
      if (m == r.v) throw EvaluationError("variable " + encode(r.v) + " appears twice in one term");
    micro.push_back(r.v);
    t.slots.push_back(slots.slot(r));
  }
  t.table = joint.marginal(micro);
  std::size_t stride = 1;
  for (int c : t.table->cards()) {
    t.strides.push_back(stride);
    stride *= static_cast<std::size_t>(c);
  }
  return t;
}

struct CompiledFactor {
  Term joint_term;  // cond and given
  Term given_term;
  Term marginal_term;
  std::vector<int> sum_slots;
  int cond_states = 1;
  bool empty_cond = false;
};

CompiledFactor compile(const ProbFactor &f, const JointDistribution &joint, SlotTable &slots) {
  CompiledFactor c;
  std::vector<VarRef> cg = f.cond;
  cg.insert(cg.end(), f.given.begin(), f.given.end());
  c.joint_term = make_term(cg, joint, slots);
  c.given_term = make_term(f.given, joint, slots);
  c.marginal_term = make_term(f.marginal_sum, joint, slots);
  for (const auto &r : f.marginal_sum) c.sum_slots.push_back(slots.slot(r));
  for (const auto &r : f.cond) c.cond_states *= joint.cardinality(r.v);
  c.empty_cond = f.cond.empty();
  return c;
}

std::string describe_event(const std::vector<VarRef> &vars, const std::vector<int> &values,
                           SlotTable &slots) {
  std::string out;
  for (std::size_t i = 0; i < vars.size(); ++i)
    out += (i ? ", " : "") + render_var(vars[i]) + "=" + std::to_string(values[slots.slot(vars[i])]);
  return out.empty() ? "(empty event)" : out;
}

class Evaluator {
 public:
  Evaluator(const EstimandAst &ast, const JointDistribution &joint, const EvaluateOptions &opt)
      : ast_(ast), opt_(opt) {
    cause_slot_ = slots_.slot({ast.cause, false});
    effect_slot_ = slots_.slot({ast.effect, false});
    for (const auto &v : ast.outer_sum) outer_slots_.push_back(slots_.slot({v, false}));
    f1_ = compile(ast.factor1, joint, slots_);
    f2_ = compile(ast.factor2, joint, slots_);
    for (const auto &r : slots_.refs()) {
      if (!joint.contains(r.v))
        throw EvaluationError("variable " + encode(r.v) + " missing from the joint distribution");
      cards_.push_back(joint.cardinality(r.v));
    }
  }

  int cause_card() const { return cards_[cause_slot_]; }
  int effect_card() const { return cards_[effect_slot_]; }

  double value(int x, int y) {
    if (x < 0 || x >= cause_card() || y < 0 || y >= effect_card())
      throw PreconditionError("value outside the variable's domain");
    std::vector<int> values(cards_.size(), 0);
    values[cause_slot_] = x;
    values[effect_slot_] = y;
    double total = 0.0;
    iterate(outer_slots_, values, [&] {
      total += factor(ast_.factor1, f1_, values) * factor(ast_.factor2, f2_, values);
    });
    return total;
  }

 private:
  template <class Fn>
  void iterate(const std::vector<int> &over, std::vector<int> &values, Fn fn) {
    for (int s : over) values[s] = 0;
    while (true) {
      fn();
      std::size_t d = 0;
      for (; d < over.size(); ++d) {
        if (++values[over[d]] < cards_[over[d]]) break;
        values[over[d]] = 0;
      }
      if (d == over.size()) return;
    }
  }

  double factor(const ProbFactor &pf, const CompiledFactor &c, std::vector<int> &values) {
    double sum = 0.0;
    iterate(c.sum_slots, values, [&] {
      double weight = c.marginal_term.lookup(values);
      // A term whose weight is zero contributes nothing, even when its
      // conditional is undefined.
      if (!(weight > 0.0) && opt_.smoothing == 0.0) return;
      double pg = c.given_term.lookup(values);
      double pcg = c.joint_term.lookup(values);
      double cond;
      if (opt_.smoothing > 0.0) {
        cond = (pcg + opt_.smoothing) / (pg + opt_.smoothing * c.cond_states);
      } else {
        if (!(pg > 0.0))
          throw EvaluationError("zero-probability conditioning event: " +
                                describe_event(pf.given, values, slots_));
        cond = pcg / pg;
      }
      sum += cond * weight;
    });
    return sum;
  }

  const EstimandAst &ast_;
  EvaluateOptions opt_;
  SlotTable slots_;
  int cause_slot_ = 0, effect_slot_ = 0;
  std::vector<int> outer_slots_;
  std::vector<int> cards_;
  CompiledFactor f1_, f2_;
};

}  // namespace

double evaluate_estimand(const EstimandAst &ast, const JointDistribution &joint, int x_value,
                         int y_value, const EvaluateOptions &options) {
  Evaluator ev(ast, joint, options);
  return ev.value(x_value, y_value);
}

std::vector<std::vector<double>> evaluate_estimand_table(const EstimandAst &ast,
                                                         const JointDistribution &joint,
                                                         const EvaluateOptions &options) {
  Evaluator ev(ast, joint, options);
  std::vector<std::vector<double>> out(ev.cause_card(), std::vector<double>(ev.effect_card()));
  for (int x = 0; x < ev.cause_card(); ++x)
    for (int y = 0; y < ev.effect_card(); ++y) out[x][y] = ev.value(x, y);
  return out;
}

}  // namespace scgfd
