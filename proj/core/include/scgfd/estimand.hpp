#pragma once

#include <set>
#include <string>
#include <vector>

#include "scgfd/criterion.hpp"
#include "scgfd/distribution.hpp"
#include "scgfd/scg.hpp"

namespace scgfd {

using MicroSet = std::set<MicroVertex, MicroOrder>;

// Mediator instances W_{t-gamma+l}, 0 <= l <= gamma, for every W in w.
MicroSet mediator_instances(const SeriesSet &w, const EffectQuery &q);

// Cause-side adjustment set reduced for one Condition 4 variant. Throws
// PreconditionError when the variant does not hold for the cause.
MicroSet build_bx(const Scg &g, const SeriesSet &w, const EffectQuery &q, Variant variant);

// Cause-side adjustment set in its general form, including the extra cause
// instances that apply when the cause lies on no cycle.
MicroSet build_theorem_bx(const Scg &g, const SeriesSet &w, const EffectQuery &q);

// Mediator-side adjustment set.
MicroSet build_bf(const Scg &g, const SeriesSet &w, const EffectQuery &q);

enum class BxForm { general, reduced };

struct FrontDoorSets {
  MicroSet f;
  MicroSet bx;
  MicroSet bf;
  Variant variant = Variant::none;
};

// Builds F, B^x and B^f. `form` selects the general B^x or the one reduced
// for `variant`; variant none picks the preferred holding variant.
FrontDoorSets make_front_door_sets(const Scg &g, const SeriesSet &w, const EffectQuery &q,
                                   BxForm form = BxForm::general,
                                   Variant variant = Variant::none);

// Reference to a variable inside the estimand. The primed copy of the cause
// is summed independently of the intervened value.
struct VarRef {
  MicroVertex v;
  bool primed = false;

  bool operator==(const VarRef &other) const = default;
};

// sum over marginal_sum of P(cond | given) * P(marginal_sum).
struct ProbFactor {
  std::vector<VarRef> cond;
  std::vector<VarRef> given;
  std::vector<VarRef> marginal_sum;

  bool operator==(const ProbFactor &other) const = default;
};

// P(effect | do(cause)) = sum over outer_sum of factor1 * factor2.
struct EstimandAst {
  MicroVertex cause;
  MicroVertex effect;
  std::vector<MicroVertex> outer_sum;
  ProbFactor factor1;
  ProbFactor factor2;
  bool degenerate = false;

  bool operator==(const EstimandAst &other) const = default;
};

EstimandAst build_estimand(const FrontDoorSets &sets, const EffectQuery &q);

enum class RenderFormat { text, json };
std::string render_estimand(const EstimandAst &ast, RenderFormat format);
// Parses the JSON rendering back; throws PreconditionError on bad input.
EstimandAst parse_estimand_json(const std::string &text);

// "x_{t-1}", "x'_{t-1}", "y_t"
std::string render_var(const VarRef &v);

struct EvaluateOptions {
  // Additive smoothing of every conditional; 0 disables it. Only meant for
  // exploration since it changes the value being computed.
  double smoothing = 0.0;
};

// Value of the estimand at cause = x_value and effect = y_value. Throws
// EvaluationError on a zero-probability conditioning event or a variable
// missing from the joint.
double evaluate_estimand(const EstimandAst &ast, const JointDistribution &joint, int x_value,
                         int y_value, const EvaluateOptions &options = {});

// Evaluates for every (x, y); result[x][y].
std::vector<std::vector<double>> evaluate_estimand_table(const EstimandAst &ast,
                                                         const JointDistribution &joint,
                                                         const EvaluateOptions &options = {});

}  // namespace scgfd
