#include "scgfd/distribution.hpp"

#include <numeric>

#include "scgfd/errors.hpp"
#include "scgfd/scg.hpp"

namespace scgfd {

std::string encode(const MicroVertex &v) { return v.series + "@" + std::to_string(v.offset); }

MicroVertex decode_micro_vertex(const std::string &text) {
  auto at = text.find('@');
  if (at == std::string::npos) throw PreconditionError("malformed micro vertex '" + text + "'");
  MicroVertex v;
  v.series = text.substr(0, at);
  if (!is_valid_series_name(v.series))
    throw PreconditionError("malformed micro vertex '" + text + "'");
  std::string num = text.substr(at + 1);
  std::size_t used = 0;
  try {
    v.offset = std::stoi(num, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (num.empty() || used != num.size())
    throw PreconditionError("malformed micro vertex '" + text + "'");
  return v;
}

JointDistribution::JointDistribution(std::vector<MicroVertex> vars, std::vector<int> cards,
                                     std::vector<double> p)
    : vars_(std::move(vars)), cards_(std::move(cards)), p_(std::move(p)) {
  if (vars_.size() != cards_.size()) throw PreconditionError("one cardinality per variable");
  std::size_t n = 1;
  for (int c : cards_) {
    if (c < 1) throw PreconditionError("cardinality must be positive");
    n *= static_cast<std::size_t>(c);
  }
  if (p_.size() != n) throw PreconditionError("table size does not match cardinalities");
  for (std::size_t i = 0; i < vars_.size(); ++i)
    for (std::size_t j = i + 1; j < vars_.size(); ++j)
      if (vars_[i] == vars_[j]) throw PreconditionError("duplicate variable " + encode(vars_[i]));
}

std::size_t JointDistribution::index_of(const MicroVertex &v) const {
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i] == v) return i;
  throw UnknownVertexError("variable " + encode(v) + " not in distribution");
}

bool JointDistribution::contains(const MicroVertex &v) const {
  for (const auto &u : vars_)
    if (u == v) return true;
  return false;
}

JointDistribution JointDistribution::marginal(const std::vector<MicroVertex> &keep) const {
  std::vector<int> cards;
  std::vector<std::size_t> pos;
  for (const auto &v : keep) {
    pos.push_back(index_of(v));
    cards.push_back(cards_[pos.back()]);
  }
  std::size_t out_size = 1;
  std::vector<std::size_t> out_stride(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out_stride[i] = out_size;
    out_size *= static_cast<std::size_t>(cards[i]);
  }
  // Stride in the output table contributed by each source variable.
  std::vector<std::size_t> contrib(vars_.size(), 0);
  for (std::size_t i = 0; i < keep.size(); ++i) contrib[pos[i]] = out_stride[i];

  std::vector<double> out(out_size, 0.0);
  std::vector<int> digit(vars_.size(), 0);
  std::size_t out_idx = 0;
  for (std::size_t idx = 0; idx < p_.size(); ++idx) {
    out[out_idx] += p_[idx];
    for (std::size_t d = 0; d < digit.size(); ++d) {
      if (++digit[d] < cards_[d]) {
        out_idx += contrib[d];
        break;
      }
      out_idx -= contrib[d] * static_cast<std::size_t>(cards_[d] - 1);
      digit[d] = 0;
    }
  }
  return JointDistribution(keep, std::move(cards), std::move(out));
}

double JointDistribution::total() const { return std::accumulate(p_.begin(), p_.end(), 0.0); }

}  // namespace scgfd
