#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "scgfd/criterion.hpp"
#include "scgfd/distribution.hpp"
#include "scgfd/scg.hpp"

namespace scgfd {

enum class TemplateKind { directed, bidirected };

// Stationary micro edge pattern. Directed: (from, tau - lag) -> (to, tau).
// Bidirected: (from, tau - lag) <-> (to, tau); lag-0 bidirected templates
// between distinct series are stored with from < to.
struct EdgeTemplate {
  TemplateKind kind = TemplateKind::directed;
  SeriesId from;
  SeriesId to;
  int lag = 0;

  auto operator<=>(const EdgeTemplate &other) const = default;
  bool operator==(const EdgeTemplate &other) const = default;
};

std::string to_string(const EdgeTemplate &t);

struct CandidateSpec {
  Scg scg;
  std::vector<EdgeTemplate> templates;  // sorted
  int gamma_max = 1;

  bool has(const EdgeTemplate &t) const;
};

// Builds a spec from templates, sorting them and checking every invariant:
// lag bounds, no lag-0 self edges, acyclic lag-0 directed part and exact
// projection onto `scg`. Throws PreconditionError.
CandidateSpec make_candidate(const Scg &scg, std::vector<EdgeTemplate> templates, int gamma_max);

// Templates that can realize one SCG edge.
std::vector<EdgeTemplate> directed_edge_templates(const SeriesId &from, const SeriesId &to,
                                                  int gamma_max);
std::vector<EdgeTemplate> bidirected_edge_templates(const SeriesId &a, const SeriesId &b,
                                                    int gamma_max);

struct CandidateEnumeration {
  std::vector<CandidateSpec> candidates;
  bool truncated = false;
};

// Candidates in lexicographic order of the per-edge template masks (first
// SCG edge most significant), stopping after `cap` of them.
CandidateEnumeration enumerate_candidates(const Scg &g, int gamma_max, std::size_t cap);

// Length of the full stream, obtained by walking it.
std::uint64_t count_candidates(const Scg &g, int gamma_max);

// Closed-form stream length: product of (2^n - 1) over edges, with the
// correction for lag-0 acyclicity when directed cycles of length > 1 exist.
std::uint64_t candidate_count_law(const Scg &g, int gamma_max);

Scg latent_project(const CandidateSpec &spec);

// Path through a window graph. Marks follow the path direction; `both` is
// never used at the micro level.
struct MicroPath {
  std::vector<int> vertices;
  std::vector<LinkMark> links;
};

// Finite window of a candidate: slices 0..L-1, vertex id tau * S + s where
// s indexes the sorted series. Slice L-1 is time t.
class FtAdmg {
 public:
  struct DirectedEdge {
    int from, to, template_index;
  };
  struct BidirectedEdge {
    int a, b, template_index;  // a is the earlier (or equal-time, lower id) end
  };

  FtAdmg(const CandidateSpec &spec, int window_length);

  int window_length() const { return length_; }
  int num_series() const { return static_cast<int>(series_.size()); }
  int num_vertices() const { return length_ * num_series(); }
  const std::vector<SeriesId> &series() const { return series_; }
  const std::vector<EdgeTemplate> &templates() const { return templates_; }

  int id(int series_index, int tau) const { return tau * num_series() + series_index; }
  int series_index(int v) const { return v % num_series(); }
  int time(int v) const { return v / num_series(); }

  // Micro vertex (series, offset) sits at tau = L - 1 + offset.
  int id(const MicroVertex &v) const;
  bool contains(const MicroVertex &v) const;
  MicroVertex micro(int v) const;
  // "X_{t-1}"
  std::string name(int v) const;
  std::string render(const MicroPath &p) const;

  const std::vector<DirectedEdge> &directed_edges() const { return directed_; }
  const std::vector<BidirectedEdge> &bidirected_edges() const { return bidirected_; }
  const std::vector<int> &parents(int v) const { return parents_[v]; }
  const std::vector<int> &children(int v) const { return children_[v]; }
  // Neighbours through bidirected edges.
  const std::vector<int> &spouses(int v) const { return spouses_[v]; }

  bool has_directed(int from, int to) const;
  bool has_bidirected(int a, int b) const;
  bool is_acyclic() const;

  // DAG obtained by replacing each bidirected edge i with a latent vertex
  // num_vertices() + i pointing to both ends.
  const std::vector<std::vector<int>> &expanded_parents() const { return x_parents_; }
  const std::vector<std::vector<int>> &expanded_children() const { return x_children_; }

 private:
  int length_;
  std::vector<SeriesId> series_;
  std::vector<EdgeTemplate> templates_;
  std::vector<DirectedEdge> directed_;
  std::vector<BidirectedEdge> bidirected_;
  std::vector<std::vector<int>> parents_, children_, spouses_;
  std::vector<std::vector<int>> x_parents_, x_children_;
};

// Throws PreconditionError when L < gamma_max + 1.
FtAdmg instantiate_window(const CandidateSpec &spec, int window_length);

// Reflexive closures over directed micro edges.
std::set<int> micro_ancestors(const FtAdmg &g, int v);
std::set<int> micro_descendants(const FtAdmg &g, int v);
std::set<int> micro_ancestors(const FtAdmg &g, const std::set<int> &vs);
std::set<int> micro_descendants(const FtAdmg &g, const std::set<int> &vs);

// m-connection via latent expansion and a reachability sweep.
bool d_connected(const FtAdmg &g, int a, int b, const std::set<int> &z);

// m-connection by explicit enumeration of simple paths in the mixed graph.
bool d_connected_paths(const FtAdmg &g, int a, int b, const std::set<int> &z);

struct ActivePathQuery {
  int source = -1;
  std::set<int> targets;
  std::set<int> cond;
  // Vertices the path may not visit (the source is never revisited anyway).
  std::set<int> forbidden;
  // Require the first edge to carry an arrowhead into the source.
  bool into_source = false;
};

// Reachability-sweep decision for an ActivePathQuery.
bool active_path_exists(const FtAdmg &g, const ActivePathQuery &q);

// Depth-first search for a concrete active simple path. Gives up after
// `budget` extension steps and then returns nullopt with *exhausted set.
std::optional<MicroPath> find_active_path(const FtAdmg &g, const ActivePathQuery &q,
                                          std::uint64_t budget = 5'000'000,
                                          bool *exhausted = nullptr);

struct BackdoorCheck {
  bool holds = true;
  std::string reason;
  std::optional<MicroPath> path;
};

// Back-door test for a set of treatments: z holds no descendant of a
// treatment, and for each treatment T every path to the outcome that starts
// with an edge into T and avoids the other treatments is blocked by
// z together with the other treatments.
BackdoorCheck check_backdoor(const FtAdmg &g, const std::set<int> &treatments, int outcome,
                             const std::set<int> &z);
bool backdoor_holds(const FtAdmg &g, const std::set<int> &treatments, int outcome,
                    const std::set<int> &z);

// Whether P(y | do(x)) = sum_f P(f | do(x)) P(y | do(f)) is licensed: with
// the cause fixed, no path from a member of f to the outcome starts with an
// edge into that member, once paths through the cause or the other members
// are cut. Sets *witness to an offending path when one is found.
bool composition_holds(const FtAdmg &g, int cause, const std::set<int> &f, int outcome,
                       std::optional<MicroPath> *witness = nullptr);

struct Violation {
  std::size_t candidate_index = 0;
  std::string lemma;
  std::string path;
};

struct VerificationReport {
  Scg scg;
  EffectQuery query;
  SeriesSet mediators;
  int window_length = 0;
  std::size_t candidates_checked = 0;
  bool truncated = false;
  std::vector<Violation> violations;
  // Named checks that were run on each candidate.
  std::vector<std::string> checks;
  // Candidates where the two adjusted factors do not compose into the
  // total effect. Kept apart from the set checks above.
  std::vector<Violation> composition_failures;
};

// Exhaustive check of the front-door sets in every candidate window.
// Throws PreconditionError when the criterion does not hold or the window
// is shorter than 2 (gamma + gamma_max) + 2.
VerificationReport verify_front_door_lemmas(const Scg &g, const SeriesSet &w,
                                            const EffectQuery &q, int window_length,
                                            std::size_t cap);

struct Demonstration {
  std::size_t candidate_index = 0;
  std::string path;
  // Every non-collider on the path descends from the cause, so no valid
  // adjustment set can block it.
  bool unblockable = false;
};

// Back-door paths from the cause to a mediator instance that are active
// given the empty set, at most `limit`, unblockable ones first.
std::vector<Demonstration> demonstrate_backdoors(const Scg &g, const SeriesSet &w,
                                                 const EffectQuery &q, int window_length,
                                                 std::size_t cap, std::size_t limit);

// Micro path pattern given by time offsets; links are forward, backward or
// bidirected.
struct MicroPathPattern {
  std::vector<MicroVertex> vertices;
  std::vector<LinkMark> links;
};

std::string to_string(const MicroPathPattern &p);

// Indices (into the enumeration) of candidates containing every edge of
// the pattern.
std::vector<std::size_t> candidates_with_path(const CandidateEnumeration &e,
                                              const MicroPathPattern &p);

struct AmbiguityWitness {
  CandidateSpec first;   // a_t -> b_t
  CandidateSpec second;  // b_t -> a_t
};

// Two candidates disagreeing on the contemporaneous orientation between a
// and b; only exists when both a -> b and b -> a are in the SCG.
std::optional<AmbiguityWitness> find_direction_ambiguity(const Scg &g, const SeriesId &a,
                                                         const SeriesId &b, int gamma_max);

}  // namespace scgfd
