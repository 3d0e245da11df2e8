#pragma once

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "scgfd/scg.hpp"

namespace fixtures {

inline std::string graph_path(const std::string &name) {
  return std::string(SCGFD_GRAPH_DIR) + "/" + name + ".scg";
}

inline scgfd::Scg graph(const std::string &name) { return scgfd::load_scg_file(graph_path(name)); }

inline const std::vector<std::string> &no_cycle_graphs() {
  static const std::vector<std::string> names{"no_cycle_a", "no_cycle_b", "no_cycle_c", "no_cycle_d",
                                              "no_cycle_e"};
  return names;
}
inline const std::vector<std::string> &self_loop_graphs() {
  static const std::vector<std::string> names{"self_loop_a", "self_loop_b", "self_loop_c",
                                              "self_loop_d", "self_loop_e"};
  return names;
}
inline const std::vector<std::string> &lag0_only_graphs() {
  static const std::vector<std::string> names{"lag0_only_a", "lag0_only_b", "lag0_only_c",
                                              "lag0_only_d", "lag0_only_e"};
  return names;
}
inline const std::vector<std::string> &failing_graphs() {
  static const std::vector<std::string> names{"failing_a", "failing_b", "failing_c", "failing_d",
                                              "failing_e"};
  return names;
}

// Random SCG over the first n of A..G; each ordered pair gets a directed edge
// with probability p_dir and each unordered pair (self pairs included) a
// bidirected edge with probability p_bi.
inline scgfd::Scg random_scg(std::mt19937_64 &rng, int n, double p_dir, double p_bi) {
  std::bernoulli_distribution dir(p_dir), bi(p_bi);
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(std::string(1, static_cast<char>('A' + i)));
  std::vector<scgfd::SeriesPair> d, b;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (dir(rng)) d.emplace_back(names[i], names[j]);
      if (j >= i && bi(rng)) b.emplace_back(names[i], names[j]);
    }
  return scgfd::Scg(names, d, b);
}

}  // namespace fixtures
