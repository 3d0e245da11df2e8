#include "scgfd/scg.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

#include "scgfd/errors.hpp"

namespace scgfd {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

SeriesPair unordered(const SeriesId &a, const SeriesId &b) {
  return a <= b ? SeriesPair{a, b} : SeriesPair{b, a};
}

void require_vertex(const Scg &g, const SeriesId &v) {
  if (!g.has_series(v)) throw UnknownVertexError("unknown series '" + v + "'");
}

SeriesSet closure(const Scg &g, const SeriesSet &start, bool forward) {
  SeriesSet seen;
  std::vector<SeriesId> stack;
  for (const auto &v : start) {
    require_vertex(g, v);
    if (seen.insert(v).second) stack.push_back(v);
  }
  while (!stack.empty()) {
    SeriesId v = stack.back();
    stack.pop_back();
    for (const auto &[from, to] : g.directed()) {
      const SeriesId &src = forward ? from : to;
      const SeriesId &dst = forward ? to : from;
      if (src == v && seen.insert(dst).second) stack.push_back(dst);
    }
  }
  return seen;
}

const char *mark_text(LinkMark m) {
  switch (m) {
    case LinkMark::forward: return "->";
    case LinkMark::backward: return "<-";
    case LinkMark::both: return "<=>";
    case LinkMark::bidirected: return "<->";
  }
  return "?";
}

// Edge end at the right vertex of a link, and at the left vertex of a link.
enum class End { head, tail, ambiguous };

End end_at_right(LinkMark m) {
  switch (m) {
    case LinkMark::forward:
    case LinkMark::bidirected: return End::head;
    case LinkMark::backward: return End::tail;
    case LinkMark::both: return End::ambiguous;
  }
  return End::ambiguous;
}

End end_at_left(LinkMark m) {
  switch (m) {
    case LinkMark::backward:
    case LinkMark::bidirected: return End::head;
    case LinkMark::forward: return End::tail;
    case LinkMark::both: return End::ambiguous;
  }
  return End::ambiguous;
}

LinkMark flip(LinkMark m) {
  if (m == LinkMark::forward) return LinkMark::backward;
  if (m == LinkMark::backward) return LinkMark::forward;
  return m;
}

}  // namespace

bool is_valid_series_name(std::string_view name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

Scg::Scg(std::vector<SeriesId> series, std::vector<SeriesPair> directed,
         std::vector<SeriesPair> bidirected) {
  std::set<SeriesId> names;
  for (auto &s : series) {
    if (!is_valid_series_name(s)) throw PreconditionError("invalid series name '" + s + "'");
    if (!names.insert(s).second) throw PreconditionError("duplicate series '" + s + "'");
  }
  series_.assign(names.begin(), names.end());
  for (auto &[a, b] : directed) {
    require_vertex(*this, a);
    require_vertex(*this, b);
    if (!directed_.emplace(a, b).second)
      throw PreconditionError("duplicate edge " + a + " -> " + b);
  }
  for (auto &[a, b] : bidirected) {
    require_vertex(*this, a);
    require_vertex(*this, b);
    if (!bidirected_.insert(unordered(a, b)).second)
      throw PreconditionError("duplicate edge " + a + " <-> " + b);
  }
}

bool Scg::has_series(std::string_view name) const {
  return std::binary_search(series_.begin(), series_.end(), name);
}

std::size_t Scg::index_of(std::string_view name) const {
  auto it = std::lower_bound(series_.begin(), series_.end(), name);
  if (it == series_.end() || *it != name)
    throw UnknownVertexError("unknown series '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - series_.begin());
}

bool Scg::has_directed(const SeriesId &from, const SeriesId &to) const {
  return directed_.count({from, to}) > 0;
}

bool Scg::has_bidirected(const SeriesId &a, const SeriesId &b) const {
  return bidirected_.count(unordered(a, b)) > 0;
}

std::string Scg::serialize() const {
  std::string out = "series";
  for (const auto &s : series_) out += " " + s;
  out += "\n";
  for (const auto &[a, b] : directed_) out += a + " -> " + b + "\n";
  for (const auto &[a, b] : bidirected_) out += a + " <-> " + b + "\n";
  return out;
}

Scg parse_scg(std::string_view text) {
  std::vector<SeriesId> series;
  std::set<SeriesId> declared;
  std::vector<SeriesPair> directed, bidirected;
  std::set<SeriesPair> seen_directed, seen_bidirected;
  bool have_header = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (!have_header) {
      if (line.substr(0, 6) != "series" ||
          (line.size() > 6 && !std::isspace(static_cast<unsigned char>(line[6]))))
        throw ParseError(line_no, "expected 'series' declaration");
      std::istringstream names{std::string(line.substr(6))};
      std::string name;
      while (names >> name) {
        if (!is_valid_series_name(name)) throw ParseError(line_no, "invalid series name '" + name + "'");
        if (!declared.insert(name).second) throw ParseError(line_no, "duplicate series '" + name + "'");
        series.push_back(name);
      }
      if (series.empty()) throw ParseError(line_no, "'series' declares no names");
      have_header = true;
      continue;
    }

    bool bidir = true;
    std::size_t arrow = line.find("<->");
    std::size_t arrow_len = 3;
    if (arrow == std::string_view::npos) {
      bidir = false;
      arrow = line.find("->");
      arrow_len = 2;
    }
    if (arrow == std::string_view::npos) {
      if (line.substr(0, 6) == "series") throw ParseError(line_no, "second 'series' declaration");
      throw ParseError(line_no, "unrecognized line '" + std::string(line) + "'");
    }
    std::string a(trim(line.substr(0, arrow)));
    std::string b(trim(line.substr(arrow + arrow_len)));
    if (!is_valid_series_name(a) || !is_valid_series_name(b))
      throw ParseError(line_no, "malformed edge '" + std::string(line) + "'");
    for (const auto &v : {a, b})
      if (!declared.count(v)) throw ParseError(line_no, "undeclared series '" + v + "'");
    if (bidir) {
      if (!seen_bidirected.insert(unordered(a, b)).second)
        throw ParseError(line_no, "duplicate edge " + a + " <-> " + b);
      bidirected.emplace_back(a, b);
    } else {
      if (!seen_directed.emplace(a, b).second)
        throw ParseError(line_no, "duplicate edge " + a + " -> " + b);
      directed.emplace_back(a, b);
    }
  }
  if (!have_header) throw ParseError(0, "missing 'series' declaration");
  return Scg(std::move(series), std::move(directed), std::move(bidirected));
}

Scg load_scg_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open graph file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scg(buf.str());
}

SeriesSet scg_parents(const Scg &g, const SeriesId &v) {
  require_vertex(g, v);
  SeriesSet out;
  for (const auto &[a, b] : g.directed())
    if (b == v) out.insert(a);
  return out;
}

SeriesSet scg_children(const Scg &g, const SeriesId &v) {
  require_vertex(g, v);
  SeriesSet out;
  for (const auto &[a, b] : g.directed())
    if (a == v) out.insert(b);
  return out;
}

SeriesSet scg_ancestors(const Scg &g, const SeriesId &v) { return closure(g, {v}, false); }
SeriesSet scg_descendants(const Scg &g, const SeriesId &v) { return closure(g, {v}, true); }
SeriesSet scg_ancestors(const Scg &g, const SeriesSet &vs) { return closure(g, vs, false); }
SeriesSet scg_descendants(const Scg &g, const SeriesSet &vs) { return closure(g, vs, true); }

CycleSummary cycles_containing(const Scg &g, const SeriesId &v) {
  require_vertex(g, v);
  CycleSummary out;
  if (g.has_directed(v, v)) out.cycles.push_back({v, v});
  bool larger = false;
  std::vector<SeriesId> stack{v};
  std::set<SeriesId> on_stack{v};
  std::function<void(const SeriesId &)> dfs = [&](const SeriesId &u) {
    for (const auto &c : scg_children(g, u)) {
      if (c == u) continue;
      if (c == v) {
        auto cyc = stack;
        cyc.push_back(v);
        out.cycles.push_back(std::move(cyc));
        larger = true;
        continue;
      }
      if (on_stack.count(c)) continue;
      stack.push_back(c);
      on_stack.insert(c);
      dfs(c);
      on_stack.erase(c);
      stack.pop_back();
    }
  };
  dfs(v);
  if (larger) out.kind = CycleKind::has_larger_cycle;
  else if (!out.cycles.empty()) out.kind = CycleKind::self_loop_only;
  return out;
}

const char *to_string(CycleKind kind) {
  switch (kind) {
    case CycleKind::none: return "none";
    case CycleKind::self_loop_only: return "self_loop_only";
    case CycleKind::has_larger_cycle: return "has_larger_cycle";
  }
  return "?";
}

std::string to_string(const ScgPath &p) {
  std::string out;
  for (std::size_t i = 0; i < p.vertices.size(); ++i) {
    if (i > 0) out += std::string(" ") + mark_text(p.links[i - 1]) + " ";
    out += p.vertices[i];
  }
  return out;
}

ScgPath reversed(const ScgPath &p) {
  ScgPath r;
  r.vertices.assign(p.vertices.rbegin(), p.vertices.rend());
  for (auto it = p.links.rbegin(); it != p.links.rend(); ++it) r.links.push_back(flip(*it));
  return r;
}

std::vector<ScgPath> enumerate_scg_paths(const Scg &g, const SeriesId &a, const SeriesId &b) {
  require_vertex(g, a);
  require_vertex(g, b);
  if (a == b) throw PreconditionError("path endpoints must differ");
  std::vector<ScgPath> out;
  ScgPath cur{{a}, {}};
  std::set<SeriesId> used{a};
  std::function<void(const SeriesId &)> dfs = [&](const SeriesId &u) {
    for (const auto &n : g.series()) {
      if (used.count(n)) continue;
      std::vector<LinkMark> options;
      bool fw = g.has_directed(u, n), bw = g.has_directed(n, u);
      if (fw && bw) options.push_back(LinkMark::both);
      else if (fw) options.push_back(LinkMark::forward);
      else if (bw) options.push_back(LinkMark::backward);
      if (g.has_bidirected(u, n)) options.push_back(LinkMark::bidirected);
      for (LinkMark m : options) {
        cur.vertices.push_back(n);
        cur.links.push_back(m);
        if (n == b) {
          out.push_back(cur);
        } else {
          used.insert(n);
          dfs(n);
          used.erase(n);
        }
        cur.vertices.pop_back();
        cur.links.pop_back();
      }
    }
  };
  dfs(a);
  return out;
}

PathKind classify_scg_path(const ScgPath &p) {
  if (p.links.empty()) return PathKind::other;
  LinkMark first = p.links.front();
  if (first == LinkMark::backward || first == LinkMark::bidirected || first == LinkMark::both)
    return PathKind::backdoor;
  bool directed = std::all_of(p.links.begin(), p.links.end(), [](LinkMark m) {
    return m == LinkMark::forward || m == LinkMark::both;
  });
  return directed ? PathKind::directed : PathKind::other;
}

bool is_directed_scg_path(const ScgPath &p) {
  return !p.links.empty() && std::all_of(p.links.begin(), p.links.end(), [](LinkMark m) {
    return m == LinkMark::forward || m == LinkMark::both;
  });
}

bool is_backdoor_scg_path(const ScgPath &p) {
  return !p.links.empty() && p.links.front() != LinkMark::forward;
}

const char *to_string(PathKind kind) {
  switch (kind) {
    case PathKind::directed: return "directed";
    case PathKind::backdoor: return "backdoor";
    case PathKind::other: return "other";
  }
  return "?";
}

MiddleRole middle_role(const ScgPath &p, std::size_t i) {
  if (i == 0 || i + 1 >= p.vertices.size()) throw PreconditionError("not an interior position");
  End left = end_at_right(p.links[i - 1]);
  End right = end_at_left(p.links[i]);
  if (left == End::head && right == End::head) return MiddleRole::strict_collider;
  if (left == End::tail || right == End::tail) return MiddleRole::strict_non_collider;
  return MiddleRole::neither;
}

bool scg_path_blocked(const Scg &g, const ScgPath &p, const SeriesSet &cond,
                      std::vector<std::string> *diagnostics) {
  if (p.links.size() + 1 != p.vertices.size() || p.links.empty())
    throw PreconditionError("malformed path");
  if (cond.count(p.vertices.front()) || cond.count(p.vertices.back()))
    throw PreconditionError("conditioning set contains a path endpoint");
  for (std::size_t i = 1; i + 1 < p.vertices.size(); ++i) {
    const SeriesId &m = p.vertices[i];
    switch (middle_role(p, i)) {
      case MiddleRole::strict_collider: {
        SeriesSet desc = scg_descendants(g, m);
        bool opened = std::any_of(cond.begin(), cond.end(),
                                  [&](const SeriesId &c) { return desc.count(c) > 0; });
        if (!opened) return true;
        break;
      }
      case MiddleRole::strict_non_collider: {
        if (!cond.count(m)) break;
        SeriesSet anc = scg_ancestors(g, m);
        for (const SeriesId &v : {p.vertices[i - 1], p.vertices[i + 1]})
          if (g.has_directed(m, v) && !anc.count(v)) return true;
        break;
      }
      case MiddleRole::neither:
        if (diagnostics)
          diagnostics->push_back("pattern at " + m + " in '" + to_string(p) +
                                 "' is neither a strict collider nor a strict non-collider");
        break;
    }
  }
  return false;
}

std::optional<ScgPath> find_activated_backdoor(const Scg &g, const SeriesId &x,
                                               const SeriesSet &targets) {
  require_vertex(g, x);
  if (targets.count(x)) throw PreconditionError("cause is among the targets");
  for (const auto &t : targets)
    for (const auto &p : enumerate_scg_paths(g, x, t))
      if (classify_scg_path(p) == PathKind::backdoor && !scg_path_blocked(g, p, {})) return p;
  return std::nullopt;
}

bool has_activated_backdoor(const Scg &g, const SeriesId &x, const SeriesSet &targets) {
  return find_activated_backdoor(g, x, targets).has_value();
}

std::optional<ScgPath> find_unblocked_backdoor(const Scg &g, const SeriesSet &sources,
                                               const SeriesId &y, const SeriesId &x) {
  require_vertex(g, y);
  require_vertex(g, x);
  if (sources.count(y)) throw PreconditionError("effect is among the sources");
  for (const auto &s : sources) {
    SeriesSet cond;
    if (x != s && x != y) cond.insert(x);
    for (const auto &p : enumerate_scg_paths(g, s, y))
      if (classify_scg_path(p) == PathKind::backdoor && !scg_path_blocked(g, p, cond)) return p;
  }
  return std::nullopt;
}

bool backdoors_blocked_by_x(const Scg &g, const SeriesSet &sources, const SeriesId &y,
                            const SeriesId &x) {
  return !find_unblocked_backdoor(g, sources, y, x).has_value();
}

std::optional<ScgPath> find_unintercepted_directed(const Scg &g, const SeriesSet &w,
                                                   const SeriesId &x, const SeriesId &y) {
  if (x == y) throw PreconditionError("cause and effect must differ");
  if (w.count(x) || w.count(y)) throw PreconditionError("mediators overlap cause or effect");
  for (const auto &v : w) require_vertex(g, v);
  for (const auto &p : enumerate_scg_paths(g, x, y)) {
    if (!is_directed_scg_path(p) || scg_path_blocked(g, p, {})) continue;
    bool met = std::any_of(p.vertices.begin(), p.vertices.end(),
                           [&](const SeriesId &v) { return w.count(v) > 0; });
    if (!met) return p;
  }
  return std::nullopt;
}

bool intercepts_all_activated_directed(const Scg &g, const SeriesSet &w, const SeriesId &x,
                                       const SeriesId &y) {
  return !find_unintercepted_directed(g, w, x, y).has_value();
}

std::string to_dot(const Scg &g) {
  std::string out = "digraph scg {\n";
  for (const auto &s : g.series()) out += "  " + s + ";\n";
  for (const auto &[a, b] : g.directed()) out += "  " + a + " -> " + b + ";\n";
  for (const auto &[a, b] : g.bidirected())
    out += "  " + a + " -> " + b + " [dir=both, style=dashed];\n";
  out += "}\n";
  return out;
}

}  // namespace scgfd
