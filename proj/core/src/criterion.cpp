#include "scgfd/criterion.hpp"

#include <algorithm>
#include <functional>

#include "scgfd/errors.hpp"

namespace scgfd {

void validate_query(const EffectQuery &q) {
  if (q.cause == q.effect) throw PreconditionError("cause and effect must differ");
  if (q.gamma_max < 1) throw PreconditionError("gamma_max must be at least 1");
  if (q.gamma < 0 || q.gamma > q.gamma_max)
    throw PreconditionError("gamma must lie in [0, gamma_max]");
}

void validate_query(const Scg &g, const EffectQuery &q) {
  validate_query(q);
  g.index_of(q.cause);
  g.index_of(q.effect);
}

const char *variant_label(Variant v) {
  switch (v) {
    case Variant::no_cycle: return "4a";
    case Variant::self_loop_only: return "4c";
    case Variant::gamma_zero: return "4b";
    case Variant::none: return "none";
  }
  return "none";
}

std::optional<Variant> parse_variant_label(const std::string &label) {
  for (Variant v : {Variant::no_cycle, Variant::self_loop_only, Variant::gamma_zero, Variant::none})
    if (label == variant_label(v)) return v;
  return std::nullopt;
}

std::vector<Variant> holding_variants(const Scg &g, const EffectQuery &q) {
  validate_query(g, q);
  std::vector<Variant> out;
  CycleSummary cycles = cycles_containing(g, q.cause);
  if (cycles.kind == CycleKind::none) out.push_back(Variant::no_cycle);
  if (cycles.kind == CycleKind::self_loop_only) {
    SeriesSet anc = scg_ancestors(g, q.cause);
    bool confounded = std::any_of(anc.begin(), anc.end(), [&](const SeriesId &z) {
      return g.has_bidirected(q.cause, z);
    });
    if (!confounded) out.push_back(Variant::self_loop_only);
  }
  if (q.gamma == 0) out.push_back(Variant::gamma_zero);
  return out;
}

CriterionReport check_front_door(const Scg &g, const SeriesSet &w, const EffectQuery &q) {
  validate_query(g, q);
  for (const auto &v : w) g.index_of(v);
  if (w.count(q.cause) || w.count(q.effect))
    throw PreconditionError("mediators overlap cause or effect");

  CriterionReport r;
  r.mediators = w;

  auto unintercepted = find_unintercepted_directed(g, w, q.cause, q.effect);
  r.condition1 = !unintercepted;
  if (unintercepted) r.witnesses.push_back({1, unintercepted, {}, "directed path avoids the mediators"});
  r.degenerate = !find_unintercepted_directed(g, {}, q.cause, q.effect).has_value();

  auto backdoor = w.empty() ? std::nullopt : find_activated_backdoor(g, q.cause, w);
  r.condition2 = !backdoor;
  if (backdoor) r.witnesses.push_back({2, backdoor, {}, "back-door path active given the empty set"});

  auto open = w.empty() ? std::nullopt : find_unblocked_backdoor(g, w, q.effect, q.cause);
  r.condition3 = !open;
  if (open) r.witnesses.push_back({3, open, {}, "back-door path not blocked by the cause"});

  r.holding_variants = holding_variants(g, q);
  r.variant = r.holding_variants.empty() ? Variant::none : r.holding_variants.front();
  if (r.variant == Variant::none) {
    CycleSummary cycles = cycles_containing(g, q.cause);
    Witness wit{4, std::nullopt, {}, ""};
    auto larger = std::find_if(cycles.cycles.begin(), cycles.cycles.end(),
                               [](const auto &c) { return c.size() > 2; });
    if (larger != cycles.cycles.end()) {
      wit.cycle = *larger;
      wit.note = "cause lies on a cycle of length > 1 and gamma != 0";
    } else {
      if (!cycles.cycles.empty()) wit.cycle = cycles.cycles.front();
      wit.note = "cause has a self-loop, is confounded with one of its ancestors, and gamma != 0";
    }
    r.witnesses.push_back(std::move(wit));
  }

  r.satisfied = r.condition1 && r.condition2 && r.condition3 && r.variant != Variant::none;
  return r;
}

std::vector<SearchHit> search_front_door_sets(const Scg &g, const EffectQuery &q, int max_size) {
  if (max_size < 1) throw PreconditionError("max_size must be at least 1");
  validate_query(g, q);
  std::vector<SeriesId> pool;
  for (const auto &s : g.series())
    if (s != q.cause && s != q.effect) pool.push_back(s);

  std::vector<SearchHit> hits;
  std::vector<SeriesId> chosen;
  for (int size = 0; size <= max_size && size <= static_cast<int>(pool.size()); ++size) {
    std::function<void(std::size_t)> rec = [&](std::size_t start) {
      if (static_cast<int>(chosen.size()) == size) {
        SeriesSet w(chosen.begin(), chosen.end());
        CriterionReport r = check_front_door(g, w, q);
        if (r.satisfied) hits.push_back({w, std::move(r)});
        return;
      }
      for (std::size_t i = start; i < pool.size(); ++i) {
        chosen.push_back(pool[i]);
        rec(i + 1);
        chosen.pop_back();
      }
    };
    rec(0);
  }
  return hits;
}

}  // namespace scgfd
