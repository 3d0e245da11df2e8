#include "scgfd/ftadmg.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <unordered_set>

#include "scgfd/errors.hpp"
#include "scgfd/estimand.hpp"

namespace scgfd {

namespace {

std::string offset_name(const std::string &series, int offset) {
  if (offset == 0) return series + "_t";
  return series + "_{t" + (offset < 0 ? "-" : "+") + std::to_string(std::abs(offset)) + "}";
}

// Edge groups of an SCG in canonical order: directed edges, then bidirected.
std::vector<std::vector<EdgeTemplate>> edge_groups(const Scg &g, int gamma_max) {
  std::vector<std::vector<EdgeTemplate>> groups;
  for (const auto &[a, b] : g.directed()) groups.push_back(directed_edge_templates(a, b, gamma_max));
  for (const auto &[a, b] : g.bidirected())
    groups.push_back(bidirected_edge_templates(a, b, gamma_max));
  return groups;
}

bool lag0_acyclic(const std::vector<SeriesId> &series, const std::vector<EdgeTemplate> &ts) {
  std::map<SeriesId, std::vector<SeriesId>> out;
  std::map<SeriesId, int> indeg;
  for (const auto &s : series) indeg[s] = 0;
  for (const auto &t : ts) {
    if (t.kind != TemplateKind::directed || t.lag != 0) continue;
    out[t.from].push_back(t.to);
    ++indeg[t.to];
  }
  std::vector<SeriesId> ready;
  for (const auto &[s, d] : indeg)
    if (d == 0) ready.push_back(s);
  std::size_t seen = 0;
  while (!ready.empty()) {
    SeriesId s = ready.back();
    ready.pop_back();
    ++seen;
    for (const auto &c : out[s])
      if (--indeg[c] == 0) ready.push_back(c);
  }
  return seen == series.size();
}

void check_gamma_max(int gamma_max) {
  if (gamma_max < 1) throw PreconditionError("gamma_max must be at least 1");
}

// Walks the candidate stream, calling `emit` for each valid candidate until
// it returns false. Groups are chosen in order with the last one varying
// fastest; a prefix whose lag-0 part is already cyclic is skipped whole,
// since more edges never break a cycle.
void walk_candidates(const Scg &g, int gamma_max,
                     const std::function<bool(std::vector<EdgeTemplate> &&)> &emit) {
  check_gamma_max(gamma_max);
  auto groups = edge_groups(g, gamma_max);
  std::vector<EdgeTemplate> chosen;
  std::function<bool(std::size_t)> choose = [&](std::size_t i) {
    if (i == groups.size()) {
      std::vector<EdgeTemplate> ts = chosen;
      std::sort(ts.begin(), ts.end());
      return emit(std::move(ts));
    }
    const std::size_t base = chosen.size();
    for (std::uint32_t mask = 1; mask < (1u << groups[i].size()); ++mask) {
      chosen.resize(base);
      for (std::size_t j = 0; j < groups[i].size(); ++j)
        if (mask & (1u << j)) chosen.push_back(groups[i][j]);
      if (lag0_acyclic(g.series(), chosen) && !choose(i + 1)) return false;
    }
    chosen.resize(base);
    return true;
  };
  choose(0);
}

std::uint64_t pow2(int n) { return std::uint64_t{1} << n; }

}  // namespace

std::string to_string(const EdgeTemplate &t) {
  if (t.kind == TemplateKind::directed)
    return offset_name(t.from, -t.lag) + " -> " + offset_name(t.to, 0);
  return offset_name(t.from, -t.lag) + " <-> " + offset_name(t.to, 0);
}

bool CandidateSpec::has(const EdgeTemplate &t) const {
  return std::binary_search(templates.begin(), templates.end(), t);
}

std::vector<EdgeTemplate> directed_edge_templates(const SeriesId &from, const SeriesId &to,
                                                  int gamma_max) {
  check_gamma_max(gamma_max);
  std::vector<EdgeTemplate> out;
  for (int lag = from == to ? 1 : 0; lag <= gamma_max; ++lag)
    out.push_back({TemplateKind::directed, from, to, lag});
  return out;
}

std::vector<EdgeTemplate> bidirected_edge_templates(const SeriesId &a, const SeriesId &b,
                                                    int gamma_max) {
  check_gamma_max(gamma_max);
  std::vector<EdgeTemplate> out;
  if (a == b) {
    for (int lag = 1; lag <= gamma_max; ++lag) out.push_back({TemplateKind::bidirected, a, a, lag});
    return out;
  }
  const SeriesId &lo = std::min(a, b), &hi = std::max(a, b);
  out.push_back({TemplateKind::bidirected, lo, hi, 0});
  for (int lag = 1; lag <= gamma_max; ++lag) {
    out.push_back({TemplateKind::bidirected, lo, hi, lag});
    out.push_back({TemplateKind::bidirected, hi, lo, lag});
  }
  return out;
}

CandidateSpec make_candidate(const Scg &scg, std::vector<EdgeTemplate> templates, int gamma_max) {
  check_gamma_max(gamma_max);
  std::sort(templates.begin(), templates.end());
  if (std::adjacent_find(templates.begin(), templates.end()) != templates.end())
    throw PreconditionError("duplicate template");
  for (const auto &t : templates) {
    scg.index_of(t.from);
    scg.index_of(t.to);
    if (t.lag < 0 || t.lag > gamma_max) throw PreconditionError("template lag out of range: " + to_string(t));
    if (t.from == t.to && t.lag == 0) throw PreconditionError("instantaneous self edge: " + to_string(t));
    if (t.kind == TemplateKind::bidirected && t.lag == 0 && t.from > t.to)
      throw PreconditionError("lag-0 bidirected template must be ordered: " + to_string(t));
  }
  if (!lag0_acyclic(scg.series(), templates))
    throw PreconditionError("lag-0 directed templates form a cycle");
  CandidateSpec spec{scg, std::move(templates), gamma_max};
  if (!(latent_project(spec) == scg))
    throw PreconditionError("templates do not project onto the summary graph");
  return spec;
}

CandidateEnumeration enumerate_candidates(const Scg &g, int gamma_max, std::size_t cap) {
  if (cap < 1) throw PreconditionError("cap must be at least 1");
  CandidateEnumeration out;
  walk_candidates(g, gamma_max, [&](std::vector<EdgeTemplate> &&ts) {
    if (out.candidates.size() == cap) {
      out.truncated = true;
      return false;
    }
    out.candidates.push_back({g, std::move(ts), gamma_max});
    return true;
  });
  return out;
}

std::uint64_t count_candidates(const Scg &g, int gamma_max) {
  std::uint64_t n = 0;
  walk_candidates(g, gamma_max, [&](std::vector<EdgeTemplate> &&) {
    ++n;
    return true;
  });
  return n;
}

std::uint64_t candidate_count_law(const Scg &g, int gamma_max) {
  check_gamma_max(gamma_max);
  std::uint64_t fixed = 1;
  std::vector<SeriesPair> cross;
  for (const auto &[a, b] : g.directed()) {
    if (a == b) fixed *= pow2(gamma_max) - 1;
    else cross.emplace_back(a, b);
  }
  for (const auto &[a, b] : g.bidirected())
    fixed *= a == b ? pow2(gamma_max) - 1 : pow2(2 * gamma_max + 1) - 1;
  // Sum over the subsets S of cross edges carrying a lag-0 template; S must
  // be acyclic. Edges in S choose freely among the lagged templates, the
  // others need at least one lagged template.
  std::uint64_t sum = 0;
  for (std::uint64_t s = 0; s < pow2(static_cast<int>(cross.size())); ++s) {
    std::vector<EdgeTemplate> lag0;
    std::uint64_t weight = 1;
    for (std::size_t i = 0; i < cross.size(); ++i) {
      if (s & (std::uint64_t{1} << i)) {
        lag0.push_back({TemplateKind::directed, cross[i].first, cross[i].second, 0});
        weight *= pow2(gamma_max);
      } else {
        weight *= pow2(gamma_max) - 1;
      }
    }
    if (lag0_acyclic(g.series(), lag0)) sum += weight;
  }
  return fixed * sum;
}

Scg latent_project(const CandidateSpec &spec) {
  std::set<SeriesPair> directed, bidirected;
  for (const auto &t : spec.templates) {
    if (t.kind == TemplateKind::directed) directed.emplace(t.from, t.to);
    else bidirected.insert(t.from <= t.to ? SeriesPair{t.from, t.to} : SeriesPair{t.to, t.from});
  }
  return Scg(spec.scg.series(), {directed.begin(), directed.end()},
             {bidirected.begin(), bidirected.end()});
}

FtAdmg::FtAdmg(const CandidateSpec &spec, int window_length)
    : length_(window_length), series_(spec.scg.series()), templates_(spec.templates) {
  if (window_length < spec.gamma_max + 1)
    throw PreconditionError("window shorter than gamma_max + 1");
  const int n = num_vertices();
  parents_.assign(n, {});
  children_.assign(n, {});
  spouses_.assign(n, {});
  for (int ti = 0; ti < static_cast<int>(templates_.size()); ++ti) {
    const auto &t = templates_[ti];
    int sf = static_cast<int>(spec.scg.index_of(t.from));
    int st = static_cast<int>(spec.scg.index_of(t.to));
    for (int tau = t.lag; tau < length_; ++tau) {
      int u = id(sf, tau - t.lag), v = id(st, tau);
      if (t.kind == TemplateKind::directed) {
        directed_.push_back({u, v, ti});
        parents_[v].push_back(u);
        children_[u].push_back(v);
      } else {
        bidirected_.push_back({std::min(u, v), std::max(u, v), ti});
        spouses_[u].push_back(v);
        spouses_[v].push_back(u);
      }
    }
  }
  for (auto *lists : {&parents_, &children_, &spouses_})
    for (auto &l : *lists) std::sort(l.begin(), l.end());
  if (!is_acyclic()) throw PreconditionError("window graph has a directed cycle");

  const int m = n + static_cast<int>(bidirected_.size());
  x_parents_.assign(m, {});
  x_children_.assign(m, {});
  for (int v = 0; v < n; ++v) {
    x_parents_[v] = parents_[v];
    x_children_[v] = children_[v];
  }
  for (int i = 0; i < static_cast<int>(bidirected_.size()); ++i) {
    int lat = n + i;
    for (int end : {bidirected_[i].a, bidirected_[i].b}) {
      x_children_[lat].push_back(end);
      x_parents_[end].push_back(lat);
    }
  }
}

int FtAdmg::id(const MicroVertex &v) const {
  auto it = std::lower_bound(series_.begin(), series_.end(), v.series);
  int tau = length_ - 1 + v.offset;
  if (it == series_.end() || *it != v.series || tau < 0 || tau >= length_)
    throw UnknownVertexError("micro vertex " + encode(v) + " outside the window");
  return id(static_cast<int>(it - series_.begin()), tau);
}

bool FtAdmg::contains(const MicroVertex &v) const {
  int tau = length_ - 1 + v.offset;
  return std::binary_search(series_.begin(), series_.end(), v.series) && tau >= 0 &&
         tau < length_;
}

MicroVertex FtAdmg::micro(int v) const {
  if (v < 0 || v >= num_vertices()) throw UnknownVertexError("vertex id out of range");
  return {series_[series_index(v)], time(v) - (length_ - 1)};
}

std::string FtAdmg::name(int v) const {
  MicroVertex m = micro(v);
  return offset_name(m.series, m.offset);
}

std::string FtAdmg::render(const MicroPath &p) const {
  std::string out;
  for (std::size_t i = 0; i < p.vertices.size(); ++i) {
    if (i > 0) {
      switch (p.links[i - 1]) {
        case LinkMark::forward: out += " -> "; break;
        case LinkMark::backward: out += " <- "; break;
        case LinkMark::bidirected: out += " <-> "; break;
        case LinkMark::both: out += " <=> "; break;
      }
    }
    out += name(p.vertices[i]);
  }
  return out;
}

bool FtAdmg::has_directed(int from, int to) const {
  return std::binary_search(children_[from].begin(), children_[from].end(), to);
}

bool FtAdmg::has_bidirected(int a, int b) const {
  return std::binary_search(spouses_[a].begin(), spouses_[a].end(), b);
}

bool FtAdmg::is_acyclic() const {
  const int n = num_vertices();
  std::vector<int> indeg(n, 0);
  for (const auto &e : directed_) ++indeg[e.to];
  std::vector<int> ready;
  for (int v = 0; v < n; ++v)
    if (!indeg[v]) ready.push_back(v);
  int seen = 0;
  while (!ready.empty()) {
    int v = ready.back();
    ready.pop_back();
    ++seen;
    for (int c : children_[v])
      if (--indeg[c] == 0) ready.push_back(c);
  }
  return seen == n;
}

FtAdmg instantiate_window(const CandidateSpec &spec, int window_length) {
  return FtAdmg(spec, window_length);
}

namespace {

void check_vertex(const FtAdmg &g, int v) {
  if (v < 0 || v >= g.num_vertices()) throw UnknownVertexError("vertex id out of range");
}

std::set<int> closure(const FtAdmg &g, const std::set<int> &start, bool down) {
  std::set<int> seen;
  std::vector<int> stack;
  for (int v : start) {
    check_vertex(g, v);
    if (seen.insert(v).second) stack.push_back(v);
  }
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int n : down ? g.children(v) : g.parents(v))
      if (seen.insert(n).second) stack.push_back(n);
  }
  return seen;
}

// Ancestors of `z` in the expanded DAG; latents never belong to it since
// they are never conditioned on, so the observed closure suffices.
std::vector<char> ancestor_mask(const FtAdmg &g, const std::set<int> &z) {
  std::vector<char> mask(g.expanded_parents().size(), 0);
  for (int v : micro_ancestors(g, z)) mask[v] = 1;
  return mask;
}

}  // namespace

std::set<int> micro_ancestors(const FtAdmg &g, int v) { return closure(g, {v}, false); }
std::set<int> micro_descendants(const FtAdmg &g, int v) { return closure(g, {v}, true); }
std::set<int> micro_ancestors(const FtAdmg &g, const std::set<int> &vs) { return closure(g, vs, false); }
std::set<int> micro_descendants(const FtAdmg &g, const std::set<int> &vs) { return closure(g, vs, true); }

bool active_path_exists(const FtAdmg &g, const ActivePathQuery &q) {
  check_vertex(g, q.source);
  for (int v : q.targets) check_vertex(g, v);
  for (int v : q.cond) check_vertex(g, v);
  const auto &par = g.expanded_parents();
  const auto &chi = g.expanded_children();
  const std::size_t m = par.size();
  std::vector<char> in_z(m, 0), banned(m, 0), target(m, 0);
  for (int v : q.cond) in_z[v] = 1;
  for (int v : q.forbidden) banned[v] = 1;
  for (int v : q.targets) target[v] = 1;
  banned[q.source] = 1;
  std::vector<char> anc = ancestor_mask(g, q.cond);

  // State 2v: reached v moving up (from a child); 2v+1: moving down.
  std::vector<char> visited(2 * m, 0);
  std::vector<int> queue;
  auto push = [&](int v, bool down) {
    if (banned[v]) return;
    int s = 2 * v + (down ? 1 : 0);
    if (!visited[s]) {
      visited[s] = 1;
      queue.push_back(s);
    }
  };
  for (int p : par[q.source]) push(p, false);
  if (!q.into_source)
    for (int c : chi[q.source]) push(c, true);
  while (!queue.empty()) {
    int s = queue.back();
    queue.pop_back();
    int v = s / 2;
    bool down = s % 2;
    if (target[v]) return true;
    if (!down) {
      if (in_z[v]) continue;
      for (int p : par[v]) push(p, false);
      for (int c : chi[v]) push(c, true);
    } else {
      if (!in_z[v])
        for (int c : chi[v]) push(c, true);
      if (anc[v])
        for (int p : par[v]) push(p, false);
    }
  }
  return false;
}

std::optional<MicroPath> find_active_path(const FtAdmg &g, const ActivePathQuery &q,
                                          std::uint64_t budget, bool *exhausted) {
  check_vertex(g, q.source);
  const int n = g.num_vertices();
  std::vector<char> in_z(n, 0), banned(n, 0), target(n, 0), used(n, 0);
  for (int v : q.cond) in_z[v] = 1;
  for (int v : q.forbidden) banned[v] = 1;
  for (int v : q.targets) target[v] = 1;
  std::vector<char> anc(n, 0);
  for (int v : micro_ancestors(g, q.cond)) anc[v] = 1;
  if (exhausted) *exhausted = false;

  // Every vertex of an active path is an ancestor of an endpoint or of the
  // conditioning set, so the rest of the window can be skipped.
  std::set<int> ends = q.cond;
  ends.insert(q.source);
  ends.insert(q.targets.begin(), q.targets.end());
  std::vector<char> relevant(n, 0);
  for (int v : micro_ancestors(g, ends)) relevant[v] = 1;
  for (int v = 0; v < n; ++v)
    if (!relevant[v]) banned[v] = 1;

  // Whether a target can still be reached from v through the skeleton
  // without reusing a vertex; a cheap cut for dead branches.
  std::vector<int> seen(n, 0), queue;
  int stamp = 0;
  auto target_reachable = [&](int from) {
    ++stamp;
    queue.assign(1, from);
    seen[from] = stamp;
    for (std::size_t i = 0; i < queue.size(); ++i) {
      int v = queue[i];
      if (target[v]) return true;
      for (const auto *nbrs : {&g.children(v), &g.parents(v), &g.spouses(v)})
        for (int u : *nbrs)
          if (seen[u] != stamp && !used[u] && !banned[u]) {
            seen[u] = stamp;
            queue.push_back(u);
          }
    }
    return false;
  };

  MicroPath path{{q.source}, {}};
  used[q.source] = 1;
  std::uint64_t steps = 0;
  bool out_of_budget = false;

  // Arrowhead at the end of `link` that touches the vertex it leads to.
  auto head_at_next = [](LinkMark m) { return m != LinkMark::backward; };
  auto head_at_prev = [](LinkMark m) { return m != LinkMark::forward; };

  std::size_t depth_limit = 0;
  bool cut_by_depth = false;
  std::function<bool(int)> dfs = [&](int v) -> bool {
    if (path.links.size() >= depth_limit) {
      cut_by_depth = true;
      return false;
    }
    struct Step {
      int next;
      LinkMark mark;
    };
    std::vector<Step> steps_here;
    for (int c : g.children(v)) steps_here.push_back({c, LinkMark::forward});
    for (int p : g.parents(v)) steps_here.push_back({p, LinkMark::backward});
    for (int s : g.spouses(v)) steps_here.push_back({s, LinkMark::bidirected});
    for (const auto &st : steps_here) {
      if (used[st.next] || banned[st.next]) continue;
      if (++steps > budget) {
        out_of_budget = true;
        return false;
      }
      if (path.links.empty()) {
        if (q.into_source && !head_at_prev(st.mark)) continue;
      } else {
        bool collider = head_at_next(path.links.back()) && head_at_prev(st.mark);
        if (collider ? !anc[v] : in_z[v]) continue;
      }
      path.vertices.push_back(st.next);
      path.links.push_back(st.mark);
      if (target[st.next]) return true;
      used[st.next] = 1;
      if (target_reachable(st.next) && dfs(st.next)) return true;
      used[st.next] = 0;
      path.vertices.pop_back();
      path.links.pop_back();
      if (out_of_budget) return false;
    }
    return false;
  };
  // Iterative deepening keeps witnesses short: one link at a time up to four,
  // then doubling. Each round is a complete search up to its length.
  for (depth_limit = 1;; depth_limit = depth_limit < 4 ? depth_limit + 1 : depth_limit * 2) {
    cut_by_depth = false;
    if (dfs(q.source)) return path;
    if (out_of_budget || !cut_by_depth) break;
  }
  if (exhausted) *exhausted = out_of_budget;
  return std::nullopt;
}

bool d_connected(const FtAdmg &g, int a, int b, const std::set<int> &z) {
  check_vertex(g, a);
  check_vertex(g, b);
  if (a == b) throw PreconditionError("endpoints must differ");
  if (z.count(a) || z.count(b)) throw PreconditionError("endpoint in conditioning set");
  return active_path_exists(g, {a, {b}, z, {}, false});
}

bool d_connected_paths(const FtAdmg &g, int a, int b, const std::set<int> &z) {
  check_vertex(g, a);
  check_vertex(g, b);
  if (a == b) throw PreconditionError("endpoints must differ");
  if (z.count(a) || z.count(b)) throw PreconditionError("endpoint in conditioning set");
  const int n = g.num_vertices();
  if (n > 57) return find_active_path(g, {a, {b}, z, {}, false}).has_value();

  // Simple paths grown link by link, read straight off the edge lists. A
  // prefix's future depends only on its last vertex, whether it arrived
  // there with an arrowhead, and the vertices already used, so failed
  // states are remembered.
  std::vector<char> in_z(n, 0), anc_z(n, 0);
  for (int v : z) in_z[v] = 1;
  for (int v : micro_ancestors(g, z)) anc_z[v] = 1;
  struct Link {
    int to;
    bool head_here, head_there;
  };
  std::vector<std::vector<Link>> links(n);
  for (const auto &e : g.directed_edges()) {
    links[e.from].push_back({e.to, false, true});
    links[e.to].push_back({e.from, true, false});
  }
  for (const auto &e : g.bidirected_edges()) {
    links[e.a].push_back({e.b, true, true});
    links[e.b].push_back({e.a, true, true});
  }
  std::unordered_set<std::uint64_t> dead;
  std::function<bool(int, bool, std::uint64_t)> grow = [&](int v, bool head_at_v, std::uint64_t used) {
    std::uint64_t key = (used << 7) | (static_cast<std::uint64_t>(v) << 1) | (head_at_v ? 1 : 0);
    if (dead.count(key)) return false;
    for (const Link &l : links[v]) {
      if (used >> l.to & 1) continue;
      if (v != a) {
        bool collider = head_at_v && l.head_here;
        if (collider ? !anc_z[v] : in_z[v]) continue;
      }
      if (l.to == b) return true;
      if (grow(l.to, l.head_there, used | std::uint64_t{1} << l.to)) return true;
    }
    dead.insert(key);
    return false;
  };
  return grow(a, false, std::uint64_t{1} << a);
}

BackdoorCheck check_backdoor(const FtAdmg &g, const std::set<int> &treatments, int outcome,
                             const std::set<int> &z) {
  check_vertex(g, outcome);
  if (treatments.count(outcome) || z.count(outcome))
    throw PreconditionError("outcome overlaps treatments or adjustment set");
  for (int t : treatments)
    if (z.count(t)) throw PreconditionError("treatment inside adjustment set");
  BackdoorCheck r;
  std::set<int> desc = micro_descendants(g, treatments);
  for (int v : z) {
    if (desc.count(v)) {
      r.holds = false;
      r.reason = "adjustment set contains descendant " + g.name(v);
      return r;
    }
  }
  for (int t : treatments) {
    ActivePathQuery q{t, {outcome}, z, {}, true};
    for (int o : treatments) {
      if (o == t) continue;
      q.cond.insert(o);
      q.forbidden.insert(o);
    }
    if (active_path_exists(g, q)) {
      r.holds = false;
      r.reason = "open back-door path from " + g.name(t);
      r.path = find_active_path(g, q);
      return r;
    }
  }
  return r;
}

bool composition_holds(const FtAdmg &g, int cause, const std::set<int> &f, int outcome,
                       std::optional<MicroPath> *witness) {
  // In the graph without edges into the cause, the cause only blocks, and
  // no collider can reach it, so the empty conditioning set with the cause
  // forbidden is exact. Cutting edges out of f turns the others into dead
  // ends, hence forbidden as well.
  for (int s : f) {
    ActivePathQuery q{s, {outcome}, {}, f, true};
    q.forbidden.erase(s);
    q.forbidden.insert(cause);
    if (active_path_exists(g, q)) {
      if (witness) *witness = find_active_path(g, q);
      return false;
    }
  }
  return true;
}

bool backdoor_holds(const FtAdmg &g, const std::set<int> &treatments, int outcome,
                    const std::set<int> &z) {
  return check_backdoor(g, treatments, outcome, z).holds;
}

namespace {

std::set<int> ids(const FtAdmg &g, const MicroSet &s) {
  std::set<int> out;
  for (const auto &v : s) out.insert(g.id(v));
  return out;
}

std::set<int> series_instances(const FtAdmg &g, const SeriesId &s) {
  std::set<int> out;
  int si = static_cast<int>(std::lower_bound(g.series().begin(), g.series().end(), s) -
                            g.series().begin());
  for (int tau = 0; tau < g.window_length(); ++tau) out.insert(g.id(si, tau));
  return out;
}

const char *bx_check_name(Variant v) {
  switch (v) {
    case Variant::no_cycle: return "bx_no_cycle";
    case Variant::self_loop_only: return "bx_self_loop";
    case Variant::gamma_zero: return "bx_gamma_zero";
    case Variant::none: break;
  }
  return "bx";
}

std::string path_text(const FtAdmg &g, const std::optional<MicroPath> &p, const std::string &fallback) {
  return p ? g.render(*p) : fallback;
}

}  // namespace

VerificationReport verify_front_door_lemmas(const Scg &g, const SeriesSet &w,
                                            const EffectQuery &q, int window_length,
                                            std::size_t cap) {
  CriterionReport crit = check_front_door(g, w, q);
  if (!crit.satisfied) throw PreconditionError("front-door criterion not satisfied");
  if (window_length < 2 * (q.gamma + q.gamma_max) + 2)
    throw PreconditionError("window shorter than 2 (gamma + gamma_max) + 2");

  VerificationReport rep;
  rep.scg = g;
  rep.query = q;
  rep.mediators = w;
  rep.window_length = window_length;

  MicroSet f = mediator_instances(w, q);
  std::vector<std::pair<std::string, MicroSet>> bx_sets;
  for (Variant v : crit.holding_variants) bx_sets.emplace_back(bx_check_name(v), build_bx(g, w, q, v));
  bx_sets.emplace_back("bx_general", build_theorem_bx(g, w, q));
  MicroSet bf = build_bf(g, w, q);
  // The cause-side shape check presumes no active back-door path at the
  // summary level, which the criterion guarantees.
  rep.checks = {"interception"};
  for (const auto &[name, s] : bx_sets) rep.checks.push_back(name);
  rep.checks.insert(rep.checks.end(), {"bf_mediator_outcome", "cause_backdoor_shape",
                                       "mediator_backdoor_shape"});

  CandidateEnumeration e = enumerate_candidates(g, q.gamma_max, cap);
  rep.truncated = e.truncated;
  for (std::size_t ci = 0; ci < e.candidates.size(); ++ci) {
    FtAdmg m(e.candidates[ci], window_length);
    auto violate = [&](const std::string &check, const std::string &path) {
      rep.violations.push_back({ci, check, path});
    };
    int cause = m.id(MicroVertex{q.cause, -q.gamma});
    int effect = m.id(MicroVertex{q.effect, 0});
    std::set<int> fi = ids(m, f);

    // Directed reachability from the cause avoiding F.
    {
      std::vector<int> prev(m.num_vertices(), -2);
      std::deque<int> queue{cause};
      prev[cause] = -1;
      while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int c : m.children(v)) {
          if (prev[c] != -2 || fi.count(c)) continue;
          prev[c] = v;
          queue.push_back(c);
        }
      }
      if (prev[effect] != -2) {
        MicroPath p;
        for (int v = effect; v != -1; v = prev[v]) p.vertices.insert(p.vertices.begin(), v);
        p.links.assign(p.vertices.size() - 1, LinkMark::forward);
        violate("interception", m.render(p));
      }
    }

    for (const auto &[name, s] : bx_sets) {
      std::set<int> z = ids(m, s);
      for (int target : fi) {
        BackdoorCheck bc = check_backdoor(m, {cause}, target, z);
        if (!bc.holds) {
          violate(name, bc.reason + ": " + path_text(m, bc.path, "(no path materialized)"));
          break;
        }
      }
    }

    {
      std::set<int> z = ids(m, bf);
      z.insert(cause);
      BackdoorCheck bc = check_backdoor(m, fi, effect, z);
      if (!bc.holds)
        violate("bf_mediator_outcome", bc.reason + ": " + path_text(m, bc.path, "(no path materialized)"));
    }

    std::set<int> x_inst = series_instances(m, q.cause);
    std::set<int> w_inst;
    for (const auto &s : w) {
      auto inst = series_instances(m, s);
      w_inst.insert(inst.begin(), inst.end());
    }
    for (int target : fi) {
      ActivePathQuery aq{cause, {target}, {}, x_inst, true};
      aq.forbidden.erase(cause);
      if (active_path_exists(m, aq)) {
        violate("cause_backdoor_shape", path_text(m, find_active_path(m, aq), "(no path materialized)"));
        break;
      }
    }
    for (int source : fi) {
      ActivePathQuery aq{source, {effect}, {}, x_inst, true};
      aq.forbidden.insert(w_inst.begin(), w_inst.end());
      aq.forbidden.erase(source);
      if (active_path_exists(m, aq)) {
        violate("mediator_backdoor_shape", path_text(m, find_active_path(m, aq), "(no path materialized)"));
        break;
      }
    }
    std::optional<MicroPath> cw;
    if (!composition_holds(m, cause, fi, effect, &cw))
      rep.composition_failures.push_back({ci, "composition", path_text(m, cw, "(no path materialized)")});
    ++rep.candidates_checked;
  }
  return rep;
}

std::vector<Demonstration> demonstrate_backdoors(const Scg &g, const SeriesSet &w,
                                                 const EffectQuery &q, int window_length,
                                                 std::size_t cap, std::size_t limit) {
  validate_query(g, q);
  if (window_length < 2 * (q.gamma + q.gamma_max) + 2)
    throw PreconditionError("window shorter than 2 (gamma + gamma_max) + 2");
  MicroSet f = mediator_instances(w, q);
  CandidateEnumeration e = enumerate_candidates(g, q.gamma_max, cap);
  std::vector<Demonstration> unblockable, other;
  std::set<std::string> seen;
  for (std::size_t ci = 0; ci < e.candidates.size(); ++ci) {
    FtAdmg m(e.candidates[ci], window_length);
    int cause = m.id(MicroVertex{q.cause, -q.gamma});
    std::set<int> desc = micro_descendants(m, cause);
    for (const auto &fv : f) {
      auto p = find_active_path(m, {cause, {m.id(fv)}, {}, {}, true});
      if (!p) continue;
      std::string text = m.render(*p);
      if (!seen.insert(text).second) continue;
      // With an empty conditioning set every interior vertex is a non-collider.
      bool all_desc = true;
      for (std::size_t i = 1; i + 1 < p->vertices.size(); ++i)
        all_desc = all_desc && desc.count(p->vertices[i]) > 0;
      Demonstration d{ci, text, all_desc};
      (all_desc ? unblockable : other).push_back(std::move(d));
    }
  }
  std::vector<Demonstration> out = std::move(unblockable);
  for (auto &d : other) out.push_back(std::move(d));
  if (out.size() > limit) out.resize(limit);
  return out;
}

std::string to_string(const MicroPathPattern &p) {
  std::string out;
  for (std::size_t i = 0; i < p.vertices.size(); ++i) {
    if (i > 0) {
      switch (p.links[i - 1]) {
        case LinkMark::forward: out += " -> "; break;
        case LinkMark::backward: out += " <- "; break;
        default: out += " <-> "; break;
      }
    }
    out += offset_name(p.vertices[i].series, p.vertices[i].offset);
  }
  return out;
}

std::vector<std::size_t> candidates_with_path(const CandidateEnumeration &e,
                                              const MicroPathPattern &p) {
  if (p.links.size() + 1 != p.vertices.size()) throw PreconditionError("malformed pattern");
  std::vector<EdgeTemplate> needed;
  for (std::size_t i = 0; i < p.links.size(); ++i) {
    MicroVertex a = p.vertices[i], b = p.vertices[i + 1];
    switch (p.links[i]) {
      case LinkMark::backward: std::swap(a, b); [[fallthrough]];
      case LinkMark::forward:
        if (b.offset < a.offset) return {};
        needed.push_back({TemplateKind::directed, a.series, b.series, b.offset - a.offset});
        break;
      case LinkMark::bidirected: {
        if (b.offset < a.offset || (b.offset == a.offset && b.series < a.series)) std::swap(a, b);
        needed.push_back({TemplateKind::bidirected, a.series, b.series, b.offset - a.offset});
        break;
      }
      case LinkMark::both: throw PreconditionError("'both' is not a micro-level mark");
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < e.candidates.size(); ++i)
    if (std::all_of(needed.begin(), needed.end(),
                    [&](const EdgeTemplate &t) { return e.candidates[i].has(t); }))
      out.push_back(i);
  return out;
}

std::optional<AmbiguityWitness> find_direction_ambiguity(const Scg &g, const SeriesId &a,
                                                         const SeriesId &b, int gamma_max) {
  g.index_of(a);
  g.index_of(b);
  if (a == b) throw PreconditionError("series must differ");
  check_gamma_max(gamma_max);
  if (!g.has_directed(a, b) || !g.has_directed(b, a)) return std::nullopt;
  auto build = [&](const SeriesId &first, const SeriesId &second) {
    std::vector<EdgeTemplate> ts;
    for (const auto &[u, v] : g.directed()) {
      if (u == first && v == second) ts.push_back({TemplateKind::directed, u, v, 0});
      else if (u == second && v == first) ts.push_back({TemplateKind::directed, u, v, 1});
      else ts.push_back({TemplateKind::directed, u, v, gamma_max});
    }
    for (const auto &[u, v] : g.bidirected())
      ts.push_back({TemplateKind::bidirected, u, v, u == v ? gamma_max : 0});
    return make_candidate(g, std::move(ts), gamma_max);
  };
  return AmbiguityWitness{build(a, b), build(b, a)};
}

}  // namespace scgfd
