#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace scgfd {

using SeriesId = std::string;
using SeriesSet = std::set<SeriesId>;
using SeriesPair = std::pair<SeriesId, SeriesId>;

// A summary causal graph: one vertex per time series, directed edges between
// series (self-loops allowed) and bidirected edges standing for latent
// confounding (a series may be confounded with itself).
class Scg {
 public:
  Scg() = default;

  // Throws PreconditionError on a malformed name or a duplicate, and
  // UnknownVertexError when an edge mentions an undeclared series.
  // Bidirected pairs are unordered; they are stored with first <= second.
  Scg(std::vector<SeriesId> series, std::vector<SeriesPair> directed,
      std::vector<SeriesPair> bidirected);

  const std::vector<SeriesId> &series() const { return series_; }
  const std::set<SeriesPair> &directed() const { return directed_; }
  const std::set<SeriesPair> &bidirected() const { return bidirected_; }

  bool has_series(std::string_view name) const;
  // Position of `name` in the sorted series list.
  std::size_t index_of(std::string_view name) const;
  bool has_directed(const SeriesId &from, const SeriesId &to) const;
  bool has_bidirected(const SeriesId &a, const SeriesId &b) const;

  // Canonical text: series sorted, then directed edges, then bidirected edges.
  std::string serialize() const;

  bool operator==(const Scg &other) const = default;

 private:
  std::vector<SeriesId> series_;
  std::set<SeriesPair> directed_;
  std::set<SeriesPair> bidirected_;
};

bool is_valid_series_name(std::string_view name);

// Parses the line-based graph format. Errors carry the offending line number.
Scg parse_scg(std::string_view text);
Scg load_scg_file(const std::string &path);

SeriesSet scg_parents(const Scg &g, const SeriesId &v);
SeriesSet scg_children(const Scg &g, const SeriesId &v);
// Both closures are reflexive.
SeriesSet scg_ancestors(const Scg &g, const SeriesId &v);
SeriesSet scg_descendants(const Scg &g, const SeriesId &v);
SeriesSet scg_ancestors(const Scg &g, const SeriesSet &vs);
SeriesSet scg_descendants(const Scg &g, const SeriesSet &vs);

enum class CycleKind { none, self_loop_only, has_larger_cycle };

struct CycleSummary {
  CycleKind kind = CycleKind::none;
  // Each cycle starts and ends with the queried vertex, e.g. {X, U, X}.
  std::vector<std::vector<SeriesId>> cycles;
};

CycleSummary cycles_containing(const Scg &g, const SeriesId &v);
const char *to_string(CycleKind kind);

// Mark between consecutive path vertices p[i] and p[i+1]:
// forward p[i]->p[i+1], backward p[i]<-p[i+1], both (edges in each
// direction), bidirected (latent confounding).
enum class LinkMark { forward, backward, both, bidirected };

struct ScgPath {
  std::vector<SeriesId> vertices;
  std::vector<LinkMark> links;

  bool operator==(const ScgPath &other) const = default;
};

// Renders e.g. "X -> W <-> Y".
std::string to_string(const ScgPath &p);
ScgPath reversed(const ScgPath &p);

std::vector<ScgPath> enumerate_scg_paths(const Scg &g, const SeriesId &a, const SeriesId &b);

enum class PathKind { directed, backdoor, other };
// A path whose first link is `both` can be read either way: it is classified
// as a backdoor path, and is_directed_scg_path accepts it too.
PathKind classify_scg_path(const ScgPath &p);
// First link -> or both, later links -> or both.
bool is_directed_scg_path(const ScgPath &p);
// First link <-, both, or bidirected.
bool is_backdoor_scg_path(const ScgPath &p);
const char *to_string(PathKind kind);

enum class MiddleRole { strict_collider, strict_non_collider, neither };

// Role of p.vertices[i] (0 < i < size-1) from the marks on each side.
MiddleRole middle_role(const ScgPath &p, std::size_t i);

// Blocking rule for macro paths. Interior patterns that are neither a strict
// collider nor a strict non-collider never block; when `diagnostics` is
// given, a line is appended for each of them.
bool scg_path_blocked(const Scg &g, const ScgPath &p, const SeriesSet &cond,
                      std::vector<std::string> *diagnostics = nullptr);

// Searches for a backdoor path from x to a member of targets that is active
// given the empty set. Returns the first one found.
std::optional<ScgPath> find_activated_backdoor(const Scg &g, const SeriesId &x,
                                               const SeriesSet &targets);
bool has_activated_backdoor(const Scg &g, const SeriesId &x, const SeriesSet &targets);

// Returns the first backdoor path from a source to y left active by {x}.
std::optional<ScgPath> find_unblocked_backdoor(const Scg &g, const SeriesSet &sources,
                                               const SeriesId &y, const SeriesId &x);
bool backdoors_blocked_by_x(const Scg &g, const SeriesSet &sources, const SeriesId &y,
                            const SeriesId &x);

// Returns an active directed path from x to y that avoids w, if any.
std::optional<ScgPath> find_unintercepted_directed(const Scg &g, const SeriesSet &w,
                                                   const SeriesId &x, const SeriesId &y);
bool intercepts_all_activated_directed(const Scg &g, const SeriesSet &w, const SeriesId &x,
                                       const SeriesId &y);

// Graphviz rendering; bidirected edges are dashed.
std::string to_dot(const Scg &g);

}  // namespace scgfd
