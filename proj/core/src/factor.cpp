#include "scgfd/factor.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "scgfd/errors.hpp"

namespace scgfd {

Factor::Factor(std::vector<int> vars, std::vector<int> cards, std::vector<double> values)
    : vars_(std::move(vars)), cards_(std::move(cards)), values_(std::move(values)) {
  if (vars_.size() != cards_.size()) throw PreconditionError("one cardinality per variable");
  if (!std::is_sorted(vars_.begin(), vars_.end()) ||
      std::adjacent_find(vars_.begin(), vars_.end()) != vars_.end())
    throw PreconditionError("factor variables must be sorted and distinct");
  std::size_t n = 1;
  for (int c : cards_) n *= static_cast<std::size_t>(c);
  if (values_.size() != n) throw PreconditionError("factor table has the wrong size");
}

bool Factor::has(int var) const { return std::binary_search(vars_.begin(), vars_.end(), var); }

Factor Factor::operator*(const Factor &other) const {
  std::vector<int> vars, cards;
  std::size_t i = 0, j = 0;
  while (i < vars_.size() || j < other.vars_.size()) {
    if (j == other.vars_.size() || (i < vars_.size() && vars_[i] < other.vars_[j])) {
      vars.push_back(vars_[i]);
      cards.push_back(cards_[i++]);
    } else if (i == vars_.size() || other.vars_[j] < vars_[i]) {
      vars.push_back(other.vars_[j]);
      cards.push_back(other.cards_[j++]);
    } else {
      if (cards_[i] != other.cards_[j]) throw PreconditionError("cardinality mismatch");
      vars.push_back(vars_[i]);
      cards.push_back(cards_[i]);
      ++i;
      ++j;
    }
  }
  // Stride of each output variable inside each operand (0 when absent).
  std::vector<std::size_t> sa(vars.size(), 0), sb(vars.size(), 0);
  std::size_t stride = 1;
  for (std::size_t k = 0, p = 0; k < vars_.size(); ++k) {
    while (vars[p] != vars_[k]) ++p;
    sa[p] = stride;
    stride *= cards_[k];
  }
  stride = 1;
  for (std::size_t k = 0, p = 0; k < other.vars_.size(); ++k) {
    while (vars[p] != other.vars_[k]) ++p;
    sb[p] = stride;
    stride *= other.cards_[k];
  }
  std::size_t n = 1;
  for (int c : cards) n *= static_cast<std::size_t>(c);
  std::vector<double> out(n);
  std::vector<int> digit(vars.size(), 0);
  std::size_t ia = 0, ib = 0;
  for (std::size_t idx = 0; idx < n; ++idx) {
    out[idx] = values_[ia] * other.values_[ib];
    for (std::size_t d = 0; d < digit.size(); ++d) {
      if (++digit[d] < cards[d]) {
        ia += sa[d];
        ib += sb[d];
        break;
      }
      ia -= sa[d] * (cards[d] - 1);
      ib -= sb[d] * (cards[d] - 1);
      digit[d] = 0;
    }
  }
  return Factor(std::move(vars), std::move(cards), std::move(out));
}

Factor Factor::sum_out(int var) const {
  auto it = std::lower_bound(vars_.begin(), vars_.end(), var);
  if (it == vars_.end() || *it != var) return *this;
  std::size_t pos = static_cast<std::size_t>(it - vars_.begin());
  std::size_t inner = 1;
  for (std::size_t k = 0; k < pos; ++k) inner *= cards_[k];
  std::size_t card = cards_[pos];
  std::size_t outer = values_.size() / (inner * card);
  std::vector<double> out(inner * outer, 0.0);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t c = 0; c < card; ++c)
      for (std::size_t i = 0; i < inner; ++i)
        out[o * inner + i] += values_[(o * card + c) * inner + i];
  std::vector<int> vars = vars_, cards = cards_;
  vars.erase(vars.begin() + pos);
  cards.erase(cards.begin() + pos);
  return Factor(std::move(vars), std::move(cards), std::move(out));
}

namespace {

std::size_t merged_size(const std::vector<Factor> &factors, int var) {
  std::map<int, int> scope;
  for (const auto &f : factors)
    if (f.has(var))
      for (std::size_t i = 0; i < f.vars().size(); ++i) scope[f.vars()[i]] = f.cards()[i];
  std::size_t n = 1;
  for (const auto &[v, c] : scope)
    if (v != var) n *= static_cast<std::size_t>(c);
  return n;
}

void eliminate_one(std::vector<Factor> &factors, int var) {
  Factor merged({}, {}, {1.0});
  std::vector<Factor> rest;
  for (auto &f : factors) {
    if (f.has(var)) merged = merged * f;
    else rest.push_back(std::move(f));
  }
  rest.push_back(merged.sum_out(var));
  factors = std::move(rest);
}

}  // namespace

std::vector<Factor> eliminate(std::vector<Factor> factors, const std::vector<int> &vars) {
  std::set<int> pending(vars.begin(), vars.end());
  while (!pending.empty()) {
    int best = *pending.begin();
    std::size_t best_size = std::numeric_limits<std::size_t>::max();
    for (int v : pending) {
      std::size_t s = merged_size(factors, v);
      if (s < best_size) {
        best = v;
        best_size = s;
      }
    }
    eliminate_one(factors, best);
    pending.erase(best);
  }
  return factors;
}

Factor eliminate_all_but(std::vector<Factor> factors, const std::vector<int> &keep) {
  std::set<int> all;
  for (const auto &f : factors) all.insert(f.vars().begin(), f.vars().end());
  std::vector<int> drop;
  for (int v : all)
    if (std::find(keep.begin(), keep.end(), v) == keep.end()) drop.push_back(v);
  factors = eliminate(std::move(factors), drop);
  Factor out({}, {}, {1.0});
  for (const auto &f : factors) out = out * f;
  return out;
}

}  // namespace scgfd
