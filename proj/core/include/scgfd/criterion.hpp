#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scgfd/scg.hpp"

namespace scgfd {

// Total effect of cause at time t-gamma on effect at time t, in a model whose
// maximal lag is gamma_max.
struct EffectQuery {
  SeriesId cause;
  SeriesId effect;
  int gamma = 0;
  int gamma_max = 1;
};

// Throws PreconditionError unless cause != effect, 0 <= gamma <= gamma_max
// and gamma_max >= 1.
void validate_query(const EffectQuery &q);
void validate_query(const Scg &g, const EffectQuery &q);

// Condition 4 variants, in order of preference.
enum class Variant { no_cycle, self_loop_only, gamma_zero, none };

// Short labels "4a", "4c", "4b" and "none".
const char *variant_label(Variant v);
std::optional<Variant> parse_variant_label(const std::string &label);

struct Witness {
  int condition = 0;  // 1..4
  std::optional<ScgPath> path;
  std::vector<SeriesId> cycle;
  std::string note;
};

struct CriterionReport {
  bool satisfied = false;
  SeriesSet mediators;
  bool condition1 = false;
  bool condition2 = false;
  bool condition3 = false;
  // Every Condition 4 variant that holds, preferred first.
  std::vector<Variant> holding_variants;
  Variant variant = Variant::none;
  // Set when no active directed path from cause to effect exists.
  bool degenerate = false;
  std::vector<Witness> witnesses;
};

CriterionReport check_front_door(const Scg &g, const SeriesSet &w, const EffectQuery &q);

// Holding Condition 4 variants for the cause alone; independent of mediators.
std::vector<Variant> holding_variants(const Scg &g, const EffectQuery &q);

struct SearchHit {
  SeriesSet mediators;
  CriterionReport report;
};

// Every subset of the remaining series with at most max_size members that
// satisfies the criterion, ordered by size and then lexicographically.
std::vector<SearchHit> search_front_door_sets(const Scg &g, const EffectQuery &q, int max_size);

}  // namespace scgfd
