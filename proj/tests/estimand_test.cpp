#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "scgfd/errors.hpp"
#include "scgfd/estimand.hpp"

using namespace scgfd;

namespace {

EffectQuery xy(int gamma, int gamma_max = 1) { return {"X", "Y", gamma, gamma_max}; }

MicroSet ms(std::initializer_list<MicroVertex> vs) { return MicroSet(vs.begin(), vs.end()); }

bool in(const SeriesSet &s, const SeriesId &v) { return s.count(v) > 0; }

// Set comprehensions written out literally: every (B, o) in the offset
// range is tested against the defining predicate with l = -gamma - o.
struct LiteralSets {
  const Scg &g;
  SeriesSet w;
  EffectQuery q;

  SeriesSet anc_x() const { return scg_ancestors(g, q.cause); }
  SeriesSet desc_x() const { return scg_descendants(g, q.cause); }
  SeriesSet anc_w() const { return w.empty() ? SeriesSet{} : scg_ancestors(g, w); }
  SeriesSet desc_w() const { return w.empty() ? SeriesSet{} : scg_descendants(g, w); }

  template <class Pred>
  MicroSet collect(Pred pred) const {
    MicroSet out;
    for (const auto &b : g.series())
      for (int o = -(q.gamma + 2 * q.gamma_max); o <= 0; ++o) {
        if (b == q.cause && o == -q.gamma) continue;
        if (pred(b, -q.gamma - o, o)) out.insert({b, o});
      }
    return out;
  }

  MicroSet bx_no_cycle() const {
    SeriesSet par = scg_parents(g, q.cause), aw = anc_w(), dx = desc_x();
    return collect([&](const SeriesId &b, int l, int o) {
      return (in(par, b) && 0 <= l && l <= q.gamma_max) ||
             (in(aw, b) && in(dx, b) && 1 <= l && l <= q.gamma_max) ||
             (b == q.cause && 1 <= o + q.gamma && o + q.gamma <= q.gamma);
    });
  }
  MicroSet bx_self_loop() const {
    SeriesSet par = scg_parents(g, q.cause);
    return collect([&](const SeriesId &b, int l, int) {
      return (in(par, b) && 0 <= l && l <= q.gamma_max) ||
             (b == q.cause && 1 <= l && l <= q.gamma_max);
    });
  }
  MicroSet bx_general(bool with_cause_instances) const {
    SeriesSet ax = anc_x(), dx = desc_x(), aw = anc_w();
    return collect([&](const SeriesId &b, int l, int o) {
      return (in(ax, b) && !in(dx, b) && 0 <= l && l <= q.gamma_max) ||
             ((in(ax, b) || in(aw, b)) && in(dx, b) && 1 <= l && l <= q.gamma_max) ||
             (with_cause_instances && b == q.cause && 1 <= o + q.gamma && o + q.gamma <= q.gamma);
    });
  }
  MicroSet bf() const {
    SeriesSet aw = anc_w(), dw = desc_w();
    return collect([&](const SeriesId &b, int l, int) {
      return (in(aw, b) && !in(dw, b) && -q.gamma <= l && l <= q.gamma_max) ||
             (in(aw, b) && in(dw, b) && 1 <= l && l <= q.gamma_max);
    });
  }
};

std::vector<std::string> satisfying_fixtures() {
  std::vector<std::string> out{"scg1", "scg2", "scg3"};
  for (const auto *list : {&fixtures::no_cycle_graphs(), &fixtures::self_loop_graphs(),
                           &fixtures::lag0_only_graphs()})
    out.insert(out.end(), list->begin(), list->end());
  return out;
}

// Strictly positive random joint over `vars`.
JointDistribution random_joint(std::mt19937_64 &rng, const std::vector<MicroVertex> &vars, int k) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::size_t n = 1;
  for (std::size_t i = 0; i < vars.size(); ++i) n *= static_cast<std::size_t>(k);
  std::vector<double> p(n);
  for (auto &v : p) v = u(rng);
  double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto &v : p) v /= total;
  return JointDistribution(vars, std::vector<int>(vars.size(), k), p);
}

std::vector<MicroVertex> variables_of(const FrontDoorSets &s, const EffectQuery &q) {
  MicroSet all = s.f;
  all.insert(s.bx.begin(), s.bx.end());
  all.insert(s.bf.begin(), s.bf.end());
  all.insert({q.cause, -q.gamma});
  all.insert({q.effect, 0});
  return {all.begin(), all.end()};
}

}  // namespace

TEST(MediatorInstances, Expansion) {
  EXPECT_EQ(mediator_instances({"W"}, xy(1)), ms({{"W", -1}, {"W", 0}}));
  EXPECT_EQ(mediator_instances({"W"}, xy(0)), ms({{"W", 0}}));
  EXPECT_EQ(mediator_instances({"W", "U"}, xy(2, 2)).size(), 6u);
  EXPECT_TRUE(mediator_instances({}, xy(1)).empty());
  EXPECT_THROW(mediator_instances({"W"}, xy(2, 1)), PreconditionError);
}

TEST(CauseSideSet, ReducedNoCycleForm) {
  Scg g = fixtures::graph("scg1");
  EXPECT_EQ(build_bx(g, {"W"}, xy(1), Variant::no_cycle), ms({{"X", -2}, {"W", -2}, {"X", 0}}));
}

TEST(CauseSideSet, LagZeroForm) {
  Scg g = fixtures::graph("scg1");
  EXPECT_EQ(build_bx(g, {"W"}, xy(0), Variant::gamma_zero), ms({{"X", -1}, {"W", -1}}));
}

TEST(CauseSideSet, IsolatedCause) {
  Scg g = parse_scg("series W X Y\nW -> Y");
  // The cause is its own ancestor and descendant, so only its past remains.
  EXPECT_EQ(build_bx(g, {"W"}, xy(0), Variant::gamma_zero), ms({{"X", -1}}));
  EXPECT_EQ(build_theorem_bx(g, {"W"}, xy(0)), ms({{"X", -1}}));
}

TEST(CauseSideSet, RejectsVariantThatDoesNotHold) {
  Scg g = fixtures::graph("scg1");
  EXPECT_THROW(build_bx(g, {"W"}, xy(1), Variant::self_loop_only), PreconditionError);
  EXPECT_THROW(build_bx(g, {"W"}, xy(1), Variant::gamma_zero), PreconditionError);
  EXPECT_THROW(build_bx(fixtures::graph("scg3"), {"W"}, xy(1), Variant::no_cycle),
               PreconditionError);
}

TEST(MediatorSideSet, Examples) {
  Scg g = fixtures::graph("scg1");
  EXPECT_EQ(build_bf(g, {"W"}, xy(1)), ms({{"X", 0}, {"X", -2}, {"W", -2}}));
  EXPECT_EQ(build_bf(parse_scg("series W X Y\nW -> W\nX -> Y"), {"W"}, xy(0)), ms({{"W", -1}}));
  EXPECT_EQ(build_bf(parse_scg("series W X Y\nW -> Y"), {"W"}, xy(0)), ms({{"W", -1}}));
  EXPECT_TRUE(build_bf(parse_scg("series W X Y\nW -> Y"), {}, xy(0)).empty());
}

TEST(FrontDoorSetsTest, MatchLiteralComprehensions) {
  for (const auto &name : satisfying_fixtures()) {
    Scg g = fixtures::graph(name);
    for (int gmax : {1, 2})
      for (int gamma = 0; gamma <= gmax; ++gamma) {
        EffectQuery q = xy(gamma, gmax);
        LiteralSets lit{g, {"W"}, q};
        SCOPED_TRACE(name + " gamma=" + std::to_string(gamma) + " gmax=" + std::to_string(gmax));
        auto holding = holding_variants(g, q);
        auto holds = [&](Variant v) {
          return std::find(holding.begin(), holding.end(), v) != holding.end();
        };
        if (holds(Variant::no_cycle))
          EXPECT_EQ(build_bx(g, {"W"}, q, Variant::no_cycle), lit.bx_no_cycle());
        if (holds(Variant::self_loop_only))
          EXPECT_EQ(build_bx(g, {"W"}, q, Variant::self_loop_only), lit.bx_self_loop());
        if (holds(Variant::gamma_zero))
          EXPECT_EQ(build_bx(g, {"W"}, q, Variant::gamma_zero), lit.bx_general(false));
        EXPECT_EQ(build_theorem_bx(g, {"W"}, q), lit.bx_general(holds(Variant::no_cycle)));
        EXPECT_EQ(build_bf(g, {"W"}, q), lit.bf());
      }
  }
}

TEST(FrontDoorSetsTest, StructuralInvariants) {
  for (const auto &name : satisfying_fixtures()) {
    Scg g = fixtures::graph(name);
    for (int gmax : {1, 2, 3})
      for (int gamma = 0; gamma <= gmax; ++gamma) {
        EffectQuery q = xy(gamma, gmax);
        if (holding_variants(g, q).empty()) continue;
        for (BxForm form : {BxForm::general, BxForm::reduced}) {
          FrontDoorSets s = make_front_door_sets(g, {"W"}, q, form);
          MicroVertex cause{"X", -gamma};
          EXPECT_FALSE(s.bx.count(cause));
          EXPECT_FALSE(s.bf.count(cause));
          for (const auto &v : s.bx) EXPECT_FALSE(s.f.count(v)) << encode(v);
          for (const auto *set : {&s.f, &s.bx, &s.bf})
            for (const auto &v : *set) {
              EXPECT_LE(v.offset, 0);
              EXPECT_GE(v.offset, -(gamma + gmax));
            }
        }
      }
  }
}

TEST(FrontDoorSetsTest, PreferredVariantIsDefault) {
  Scg g = fixtures::graph("scg1");
  FrontDoorSets s = make_front_door_sets(g, {"W"}, xy(0), BxForm::reduced);
  EXPECT_EQ(s.variant, Variant::no_cycle);
  EXPECT_THROW(make_front_door_sets(fixtures::graph("scg3"), {"W"}, xy(1)), PreconditionError);
}

TEST(Estimand, RendersTheWorkedFormula) {
  Scg g = fixtures::graph("scg1");
  EstimandAst ast = build_estimand(make_front_door_sets(g, {"W"}, xy(1)), xy(1));
  EXPECT_EQ(render_estimand(ast, RenderFormat::text),
            "P(y_t | do(x_{t-1})) = Σ_{w_t,w_{t-1}} Σ_{w_{t-2},x_t,x_{t-2}} "
            "P(w_t,w_{t-1} | x_{t-1},w_{t-2},x_t,x_{t-2}) P(w_{t-2},x_t,x_{t-2}) "
            "Σ_{w_{t-2},x_t,x_{t-2},x'_{t-1}} P(y_t | w_t,w_{t-1},w_{t-2},x_t,x_{t-2},x'_{t-1}) "
            "P(w_{t-2},x_t,x_{t-2},x'_{t-1})");
  EXPECT_EQ(render_estimand(ast, RenderFormat::json),
            R"({"outer_sum":["W@0","W@-1"],"factor1":{"cond":["W@0","W@-1"],"given":["X@-1","W@-2","X@0","X@-2"],"marginal_sum":["W@-2","X@0","X@-2"]},"factor2":{"cond":["Y@0"],"given":["W@0","W@-1","W@-2","X@0","X@-2","X@-1'"],"marginal_sum":["W@-2","X@0","X@-2","X@-1'"]},"cause":"X@-1","effect":"Y@0","degenerate":false})");
}

TEST(Estimand, WorkedFormulaStructure) {
  Scg g = fixtures::graph("scg1");
  EstimandAst ast = build_estimand(make_front_door_sets(g, {"W"}, xy(1)), xy(1));
  std::set<std::string> outer, second;
  for (const auto &v : ast.outer_sum) outer.insert(encode(v));
  for (const auto &r : ast.factor2.marginal_sum) second.insert(encode(r.v) + (r.primed ? "'" : ""));
  EXPECT_EQ(outer, (std::set<std::string>{"W@0", "W@-1"}));
  EXPECT_EQ(second, (std::set<std::string>{"W@-2", "X@-2", "X@0", "X@-1'"}));
}

TEST(Estimand, JsonRoundTrip) {
  for (const auto &name : satisfying_fixtures()) {
    Scg g = fixtures::graph(name);
    for (int gamma : {0, 1}) {
      EffectQuery q = xy(gamma);
      if (holding_variants(g, q).empty()) continue;
      for (BxForm form : {BxForm::general, BxForm::reduced}) {
        EstimandAst ast = build_estimand(make_front_door_sets(g, {"W"}, q, form), q);
        std::string text = render_estimand(ast, RenderFormat::json);
        EXPECT_EQ(parse_estimand_json(text), ast);
        EXPECT_EQ(render_estimand(parse_estimand_json(text), RenderFormat::json), text);
      }
    }
  }
  EXPECT_THROW(parse_estimand_json("{"), PreconditionError);
  EXPECT_THROW(parse_estimand_json(R"({"outer_sum":[]})"), PreconditionError);
}

TEST(Estimand, EmptyPiecesRenderAsOne) {
  FrontDoorSets s;
  EstimandAst ast = build_estimand(s, xy(0));
  EXPECT_TRUE(ast.degenerate);
  EXPECT_EQ(render_estimand(ast, RenderFormat::text),
            "P(y_t | do(x_t)) = 1 Σ_{x'_t} P(y_t | x'_t) P(x'_t)");
}

TEST(Estimand, ClassicFormWhenAdjustmentSetsAreEmpty) {
  FrontDoorSets s;
  s.f = ms({{"W", 0}});
  EstimandAst ast = build_estimand(s, xy(0));
  EXPECT_EQ(render_estimand(ast, RenderFormat::text),
            "P(y_t | do(x_t)) = Σ_{w_t} P(w_t | x_t) Σ_{x'_t} P(y_t | w_t,x'_t) P(x'_t)");
}

TEST(Estimand, RejectsInconsistentSets) {
  FrontDoorSets s;
  s.f = ms({{"W", 0}});
  s.bx = ms({{"W", 0}});
  EXPECT_THROW(build_estimand(s, xy(0)), PreconditionError);
  FrontDoorSets c;
  c.bf = ms({{"X", 0}});
  EXPECT_THROW(build_estimand(c, xy(0)), PreconditionError);
}

TEST(Evaluate, IndependentUniformEffect) {
  Scg g = fixtures::graph("scg1");
  EffectQuery q = xy(1);
  FrontDoorSets s = make_front_door_sets(g, {"W"}, q);
  EstimandAst ast = build_estimand(s, q);
  std::vector<MicroVertex> others;
  for (const auto &v : variables_of(s, q))
    if (!(v == MicroVertex{"Y", 0})) others.push_back(v);
  std::mt19937_64 rng(4);
  for (int k : {2, 3}) {
    JointDistribution rest = random_joint(rng, others, 2);
    std::vector<MicroVertex> vars = others;
    vars.push_back({"Y", 0});
    std::vector<int> cards(others.size(), 2);
    cards.push_back(k);
    std::vector<double> p;
    for (int y = 0; y < k; ++y)
      for (double v : rest.probabilities()) p.push_back(v / k);
    JointDistribution joint(vars, cards, p);
    auto table = evaluate_estimand_table(ast, joint);
    for (const auto &row : table)
      for (double v : row) EXPECT_NEAR(v, 1.0 / k, 1e-12);
  }
}

TEST(Evaluate, NormalizesOverEffectValues) {
  std::mt19937_64 rng(9);
  Scg g = fixtures::graph("scg1");
  EffectQuery q = xy(1);
  FrontDoorSets s = make_front_door_sets(g, {"W"}, q);
  EstimandAst ast = build_estimand(s, q);
  auto vars = variables_of(s, q);
  for (int i = 0; i < 100; ++i) {
    JointDistribution joint = random_joint(rng, vars, 2);
    for (const auto &row : evaluate_estimand_table(ast, joint)) {
      double total = std::accumulate(row.begin(), row.end(), 0.0);
      EXPECT_NEAR(total, 1.0, 1e-9);
      for (double v : row) EXPECT_GE(v, 0.0);
    }
  }
}

TEST(Evaluate, MatchesClassicFrontDoorModel) {
  // U -> X, U -> Y, X -> W -> Y with U hidden; the estimand must equal
  // sum_u P(u) sum_w P(w | x) P(y | w, u).
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u01(0.1, 0.9);
  for (int trial = 0; trial < 20; ++trial) {
    double pu = u01(rng);
    double px[2], pw[2], py[2][2];
    for (auto &v : px) v = u01(rng);
    for (auto &v : pw) v = u01(rng);
    for (auto &r : py)
      for (auto &v : r) v = u01(rng);
    auto bern = [](double p, int v) { return v ? p : 1.0 - p; };
    // Variables X@0, W@0, Y@0 with X fastest.
    std::vector<double> p(8, 0.0);
    for (int uu = 0; uu < 2; ++uu)
      for (int x = 0; x < 2; ++x)
        for (int w = 0; w < 2; ++w)
          for (int y = 0; y < 2; ++y)
            p[x + 2 * w + 4 * y] += bern(pu, uu) * bern(px[uu], x) * bern(pw[x], w) * bern(py[w][uu], y);
    JointDistribution joint({{"X", 0}, {"W", 0}, {"Y", 0}}, {2, 2, 2}, p);
    FrontDoorSets s;
    s.f = ms({{"W", 0}});
    EstimandAst ast = build_estimand(s, xy(0));
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        double truth = 0.0;
        for (int uu = 0; uu < 2; ++uu)
          for (int w = 0; w < 2; ++w) truth += bern(pu, uu) * bern(pw[x], w) * bern(py[w][uu], y);
        EXPECT_NEAR(evaluate_estimand(ast, joint, x, y), truth, 1e-12);
      }
  }
}

TEST(Evaluate, ZeroMassConditioningEventThrows) {
  JointDistribution joint({{"X", 0}, {"W", 0}, {"Y", 0}}, {2, 2, 2},
                          {0.25, 0.0, 0.25, 0.0, 0.25, 0.0, 0.25, 0.0});
  FrontDoorSets s;
  s.f = ms({{"W", 0}});
  EstimandAst ast = build_estimand(s, xy(0));
  EXPECT_NO_THROW(evaluate_estimand(ast, joint, 0, 0));
  try {
    evaluate_estimand(ast, joint, 1, 0);
    FAIL() << "expected an evaluation error";
  } catch (const EvaluationError &e) {
    EXPECT_NE(std::string(e.what()).find("x_t=1"), std::string::npos) << e.what();
  }
  double smoothed = evaluate_estimand(ast, joint, 1, 0, EvaluateOptions{0.5});
  EXPECT_TRUE(std::isfinite(smoothed));
}

TEST(Evaluate, MissingVariableThrows) {
  JointDistribution joint({{"X", 0}, {"Y", 0}}, {2, 2}, {0.25, 0.25, 0.25, 0.25});
  FrontDoorSets s;
  s.f = ms({{"W", 0}});
  EXPECT_THROW(evaluate_estimand(build_estimand(s, xy(0)), joint, 0, 0), EvaluationError);
  FrontDoorSets e;
  EXPECT_THROW(evaluate_estimand(build_estimand(e, xy(0)), joint, 2, 0), PreconditionError);
}

TEST(MicroVertexCodec, RoundTrip) {
  for (const MicroVertex &v : {MicroVertex{"W", -1}, MicroVertex{"Y", 0}, MicroVertex{"Ab1", -12}})
    EXPECT_EQ(decode_micro_vertex(encode(v)), v);
  EXPECT_EQ(encode({"W", -1}), "W@-1");
  EXPECT_THROW(decode_micro_vertex("W-1"), PreconditionError);
  EXPECT_THROW(decode_micro_vertex("W@x"), PreconditionError);
  EXPECT_EQ(render_var({{"X", -1}, true}), "x'_{t-1}");
  EXPECT_EQ(render_var({{"Y", 0}, false}), "y_t");
}

TEST(JointDistributionTest, MarginalSumsOut) {
  JointDistribution j({{"A", 0}, {"B", 0}}, {2, 3}, {0.1, 0.2, 0.05, 0.15, 0.3, 0.2});
  JointDistribution b = j.marginal({{"B", 0}});
  ASSERT_EQ(b.size(), 3u);
  EXPECT_NEAR(b.probabilities()[0], 0.3, 1e-15);
  EXPECT_NEAR(b.probabilities()[1], 0.2, 1e-15);
  EXPECT_NEAR(b.probabilities()[2], 0.5, 1e-15);
  JointDistribution ba = j.marginal({{"B", 0}, {"A", 0}});
  EXPECT_NEAR(ba.probabilities()[1], 0.05, 1e-15);
  EXPECT_NEAR(j.total(), 1.0, 1e-15);
  EXPECT_THROW(j.index_of({"C", 0}), UnknownVertexError);
}
