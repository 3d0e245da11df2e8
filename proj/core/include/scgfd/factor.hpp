#pragma once

#include <cstddef>
#include <vector>

namespace scgfd {

// Table over discrete variables identified by integer ids. Variables are
// kept sorted; the first one varies fastest.
class Factor {
 public:
  Factor() = default;
  Factor(std::vector<int> vars, std::vector<int> cards, std::vector<double> values);

  const std::vector<int> &vars() const { return vars_; }
  const std::vector<int> &cards() const { return cards_; }
  const std::vector<double> &values() const { return values_; }
  std::vector<double> &values() { return values_; }
  std::size_t size() const { return values_.size(); }
  bool has(int var) const;

  Factor operator*(const Factor &other) const;
  Factor sum_out(int var) const;

 private:
  std::vector<int> vars_;
  std::vector<int> cards_;
  std::vector<double> values_;
};

// Multiplies all factors and sums out every variable not in `keep`,
// choosing at each step the variable whose elimination creates the
// smallest intermediate table.
Factor eliminate_all_but(std::vector<Factor> factors, const std::vector<int> &keep);

// Same elimination restricted to the listed variables; the untouched
// factors are returned alongside the new ones.
std::vector<Factor> eliminate(std::vector<Factor> factors, const std::vector<int> &vars);

}  // namespace scgfd
