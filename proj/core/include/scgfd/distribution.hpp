#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace scgfd {

// A series observed at time t + offset (offset <= 0 for every set the
// library builds).
struct MicroVertex {
  std::string series;
  int offset = 0;

  bool operator==(const MicroVertex &other) const = default;
};

// Canonical order: series ascending, then later offsets first.
struct MicroOrder {
  bool operator()(const MicroVertex &a, const MicroVertex &b) const {
    if (a.series != b.series) return a.series < b.series;
    return a.offset > b.offset;
  }
};

// "W@-1"
std::string encode(const MicroVertex &v);
// Inverse of encode; throws PreconditionError on malformed text.
MicroVertex decode_micro_vertex(const std::string &text);

// Joint probability table over finitely many discrete variables. The first
// variable varies fastest in `p`.
class JointDistribution {
 public:
  JointDistribution(std::vector<MicroVertex> vars, std::vector<int> cards, std::vector<double> p);

  const std::vector<MicroVertex> &vars() const { return vars_; }
  const std::vector<int> &cards() const { return cards_; }
  const std::vector<double> &probabilities() const { return p_; }
  std::size_t size() const { return p_.size(); }

  // Position of v in vars(); throws UnknownVertexError when absent.
  std::size_t index_of(const MicroVertex &v) const;
  bool contains(const MicroVertex &v) const;
  int cardinality(const MicroVertex &v) const { return cards_[index_of(v)]; }

  // Marginal over `keep` (in the given order, first fastest).
  JointDistribution marginal(const std::vector<MicroVertex> &keep) const;

  double total() const;

 private:
  std::vector<MicroVertex> vars_;
  std::vector<int> cards_;
  std::vector<double> p_;
};

}  // namespace scgfd
