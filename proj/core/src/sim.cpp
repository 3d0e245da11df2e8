#include "scgfd/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <tuple>

#include "scgfd/errors.hpp"

namespace scgfd {

namespace {

// Uniform double in [0, 1) from the top 53 bits, identical on every platform.
double unit(std::mt19937_64 &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<double> random_row(std::mt19937_64 &rng, int k) {
  std::vector<double> u(k);
  double total = 0.0;
  for (auto &x : u) {
    // Cubing spreads the mass so that confounding is numerically visible.
    double r = unit(rng);
    x = r * r * r + 1e-12;
    total += x;
  }
  for (auto &x : u) x = kPositivityFloor + (1.0 - k * kPositivityFloor) * x / total;
  return u;
}

std::vector<double> random_table(std::mt19937_64 &rng, int k, int inputs) {
  std::size_t rows = 1;
  for (int i = 0; i < inputs; ++i) rows *= static_cast<std::size_t>(k);
  std::vector<double> t;
  t.reserve(rows * k);
  for (std::size_t r = 0; r < rows; ++r) {
    auto row = random_row(rng, k);
    t.insert(t.end(), row.begin(), row.end());
  }
  return t;
}

int popcount(unsigned m) {
  int n = 0;
  for (; m; m &= m - 1) ++n;
  return n;
}

}  // namespace

DiscreteDtdscm::DiscreteDtdscm(const CandidateSpec &spec, int window_length, int k)
    : spec_(spec), graph_(spec, window_length), card_(k) {
  const int S = graph_.num_series();
  const int L = graph_.window_length();
  const auto &ts = graph_.templates();
  slots_.assign(S, {});
  for (int s = 0; s < S; ++s) {
    const SeriesId &name = graph_.series()[s];
    for (int j = 0; j < static_cast<int>(ts.size()); ++j) {
      const auto &t = ts[j];
      if (t.kind == TemplateKind::directed) {
        if (t.to == name) slots_[s].push_back({j, false, false});
        continue;
      }
      if (t.to == name) slots_[s].push_back({j, true, false});
      if (t.from == name) slots_[s].push_back({j, true, true});
    }
    if (slots_[s].size() > 31) throw PreconditionError("too many mechanism inputs");
  }

  std::map<std::tuple<int, int, int>, int> latent_index;
  const auto &bes = graph_.bidirected_edges();
  for (int i = 0; i < static_cast<int>(bes.size()); ++i)
    latent_index[{bes[i].a, bes[i].b, bes[i].template_index}] = i;

  const int n = graph_.num_vertices();
  inputs_.assign(n, {});
  masks_.assign(n, 0);
  for (int tau = 0; tau < L; ++tau) {
    for (int s = 0; s < S; ++s) {
      int v = graph_.id(s, tau);
      for (std::size_t i = 0; i < slots_[s].size(); ++i) {
        const Slot &slot = slots_[s][i];
        const auto &t = ts[slot.template_index];
        int partner_series = static_cast<int>(spec.scg.index_of(slot.earlier_end ? t.to : t.from));
        int partner_tau = slot.earlier_end ? tau + t.lag : tau - t.lag;
        int var = -1;
        if (partner_tau >= 0 && partner_tau < L) {
          int u = graph_.id(partner_series, partner_tau);
          if (!slot.latent) var = u;
          else var = n + latent_index.at({std::min(u, v), std::max(u, v), slot.template_index});
        }
        inputs_[v].push_back(var);
        if (var >= 0) masks_[v] |= 1u << i;
      }
    }
  }
}

const std::vector<double> &DiscreteDtdscm::table(int v) const {
  int s = graph_.series_index(v);
  unsigned full = slots_[s].empty() ? 0u : (1u << slots_[s].size()) - 1;
  if (masks_[v] == full) return stationary_[s];
  return boundary_.at({s, masks_[v]});
}

const std::vector<double> &DiscreteDtdscm::latent_prior(int latent) const {
  return template_priors_.at(graph_.bidirected_edges().at(latent).template_index);
}

Factor DiscreteDtdscm::mechanism_factor(int v) const {
  const auto &tab = table(v);
  std::vector<int> present;
  for (int u : inputs_[v])
    if (u >= 0) present.push_back(u);
  std::vector<int> vars = present;
  vars.push_back(v);
  std::sort(vars.begin(), vars.end());
  std::vector<int> cards(vars.size(), card_);
  std::size_t size = 1;
  for (std::size_t i = 0; i < vars.size(); ++i) size *= static_cast<std::size_t>(card_);
  // Position of v and of each present input inside the factor's scope.
  auto pos = [&](int var) {
    return static_cast<std::size_t>(std::lower_bound(vars.begin(), vars.end(), var) - vars.begin());
  };
  std::size_t vpos = pos(v);
  std::vector<std::size_t> ipos;
  for (int u : present) ipos.push_back(pos(u));

  std::vector<double> values(size);
  std::vector<int> digit(vars.size(), 0);
  for (std::size_t idx = 0; idx < size; ++idx) {
    std::size_t row = 0, stride = 1;
    for (std::size_t i = 0; i < ipos.size(); ++i) {
      row += stride * digit[ipos[i]];
      stride *= card_;
    }
    values[idx] = tab[row * card_ + digit[vpos]];
    for (std::size_t d = 0; d < digit.size(); ++d) {
      if (++digit[d] < card_) break;
      digit[d] = 0;
    }
  }
  return Factor(std::move(vars), std::move(cards), std::move(values));
}

Factor DiscreteDtdscm::prior_factor(int latent) const {
  return Factor({num_observed() + latent}, {card_}, latent_prior(latent));
}

DiscreteDtdscm sample_dtdscm(const CandidateSpec &spec, int window_length, int k,
                             std::uint64_t seed) {
  if (k < 2) throw PreconditionError("cardinality must be at least 2");
  const std::uint64_t n = static_cast<std::uint64_t>(window_length) * spec.scg.series().size();
  std::uint64_t states = 1;
  for (std::uint64_t i = 0; i < n; ++i) {
    states *= static_cast<std::uint64_t>(k);
    if (states > kMaxObservedStates)
      throw PreconditionError("observed state space exceeds 2^18");
  }
  DiscreteDtdscm m(spec, window_length, k);
  std::mt19937_64 rng(seed);
  for (int j = 0; j < static_cast<int>(spec.templates.size()); ++j)
    if (spec.templates[j].kind == TemplateKind::bidirected) m.template_priors_[j] = random_row(rng, k);
  const int S = m.graph_.num_series();
  m.stationary_.assign(S, {});
  for (int tau = 0; tau < window_length; ++tau) {
    for (int s = 0; s < S; ++s) {
      int v = m.graph_.id(s, tau);
      unsigned full = m.slots_[s].empty() ? 0u : (1u << m.slots_[s].size()) - 1;
      unsigned mask = m.masks_[v];
      if (mask == full) {
        if (m.stationary_[s].empty())
          m.stationary_[s] = random_table(rng, k, static_cast<int>(m.slots_[s].size()));
      } else if (!m.boundary_.count({s, mask})) {
        m.boundary_[{s, mask}] = random_table(rng, k, popcount(mask));
      }
    }
  }
  return m;
}

JointDistribution exact_joint(const DiscreteDtdscm &m) {
  const int n = m.num_observed();
  std::vector<Factor> factors;
  for (int v = 0; v < n; ++v) factors.push_back(m.mechanism_factor(v));
  std::vector<int> latents;
  for (int l = 0; l < m.num_latent(); ++l) {
    factors.push_back(m.prior_factor(l));
    latents.push_back(n + l);
  }
  factors = eliminate(std::move(factors), latents);
  Factor joint({}, {}, {1.0});
  for (const auto &f : factors) joint = joint * f;
  std::vector<MicroVertex> vars;
  for (int v = 0; v < n; ++v) vars.push_back(m.graph().micro(v));
  if (static_cast<int>(joint.vars().size()) != n) throw Error("joint lost a variable");
  return JointDistribution(std::move(vars), joint.cards(), joint.values());
}

std::vector<double> interventional_truth(const DiscreteDtdscm &m, const EffectQuery &q,
                                         int x_value) {
  validate_query(m.spec().scg, q);
  if (m.window_length() < q.gamma + q.gamma_max + 1)
    throw PreconditionError("window too short for the cause's neighbourhood");
  if (x_value < 0 || x_value >= m.cardinality()) throw PreconditionError("value outside domain");
  const FtAdmg &g = m.graph();
  int cause = g.id(MicroVertex{q.cause, -q.gamma});
  int effect = g.id(MicroVertex{q.effect, 0});
  std::vector<Factor> factors;
  for (int v = 0; v < m.num_observed(); ++v)
    if (v != cause) factors.push_back(m.mechanism_factor(v));
  for (int l = 0; l < m.num_latent(); ++l) factors.push_back(m.prior_factor(l));
  std::vector<double> clamp(m.cardinality(), 0.0);
  clamp[x_value] = 1.0;
  factors.emplace_back(std::vector<int>{cause}, std::vector<int>{m.cardinality()}, clamp);
  Factor out = eliminate_all_but(std::move(factors), {effect});
  std::vector<double> dist = out.values();
  double total = 0.0;
  for (double p : dist) total += p;
  for (double &p : dist) p /= total;
  return dist;
}

CompareReport compare(const EstimandAst &ast, const DiscreteDtdscm &m, const JointDistribution &joint,
                      const EffectQuery &q, double tol) {
  CompareReport r;
  auto est = evaluate_estimand_table(ast, joint);
  for (int x = 0; x < m.cardinality(); ++x) {
    auto truth = interventional_truth(m, q, x);
    for (int y = 0; y < static_cast<int>(truth.size()); ++y)
      r.max_abs_error = std::max(r.max_abs_error, std::abs(est[x][y] - truth[y]));
  }
  r.pass = r.max_abs_error <= tol;
  return r;
}

CompareReport compare(const EstimandAst &ast, const DiscreteDtdscm &m, const EffectQuery &q,
                      double tol) {
  return compare(ast, m, exact_joint(m), q, tol);
}

std::size_t pick_candidate(std::uint64_t seed, std::size_t n) {
  if (n == 0) throw PreconditionError("no candidates to pick from");
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  return static_cast<std::size_t>(unit(rng) * static_cast<double>(n));
}

CompareReport run_trial(const EstimandAst &ast, const CandidateEnumeration &candidates,
                        const EffectQuery &q, int window_length, int k, std::uint64_t seed,
                        double tol) {
  std::size_t idx = pick_candidate(seed, candidates.candidates.size());
  DiscreteDtdscm m = sample_dtdscm(candidates.candidates[idx], window_length, k, seed);
  CompareReport r = compare(ast, m, q, tol);
  r.seed = seed;
  r.candidate_index = idx;
  return r;
}

}  // namespace scgfd
