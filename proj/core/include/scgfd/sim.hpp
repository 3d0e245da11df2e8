#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "scgfd/criterion.hpp"
#include "scgfd/distribution.hpp"
#include "scgfd/estimand.hpp"
#include "scgfd/factor.hpp"
#include "scgfd/ftadmg.hpp"

namespace scgfd {

// Lower bound on every table entry.
inline constexpr double kPositivityFloor = 1e-3;
// Largest observed state space handled by exact enumeration.
inline constexpr std::uint64_t kMaxObservedStates = std::uint64_t{1} << 18;

// Discrete structural model over a candidate window. Each series has one
// mechanism shared by all slices whose inputs are all inside the window;
// slices missing some inputs use a boundary table for that input pattern.
// Each bidirected micro edge is a latent with the prior of its template.
class DiscreteDtdscm {
 public:
  // An input of a series' mechanism: an observed parent from a directed
  // template, or the latent of a bidirected template seen from one end.
  struct Slot {
    int template_index;
    bool latent;
    bool earlier_end;  // latent only: this series is the template's `from` end
  };

  const CandidateSpec &spec() const { return spec_; }
  const FtAdmg &graph() const { return graph_; }
  int window_length() const { return graph_.window_length(); }
  int cardinality() const { return card_; }
  int num_observed() const { return graph_.num_vertices(); }
  int num_latent() const { return static_cast<int>(graph_.bidirected_edges().size()); }

  const std::vector<Slot> &slots(int series_index) const { return slots_[series_index]; }
  // Variable ids feeding vertex v (-1 for slots outside the window), in slot order.
  const std::vector<int> &inputs(int v) const { return inputs_[v]; }
  // Conditional table used by vertex v: rows indexed by present inputs
  // (first fastest), k entries per row.
  const std::vector<double> &table(int v) const;
  const std::vector<double> &latent_prior(int latent) const;
  std::size_t boundary_table_count() const { return boundary_.size(); }

  // Factor for vertex v's mechanism and for a latent's prior; latent
  // variable ids start at num_observed().
  Factor mechanism_factor(int v) const;
  Factor prior_factor(int latent) const;

 private:
  friend DiscreteDtdscm sample_dtdscm(const CandidateSpec &spec, int window_length, int k,
                                      std::uint64_t seed);
  DiscreteDtdscm(const CandidateSpec &spec, int window_length, int k);

  CandidateSpec spec_;
  FtAdmg graph_;
  int card_;
  std::vector<std::vector<Slot>> slots_;
  std::vector<std::vector<int>> inputs_;
  std::vector<unsigned> masks_;
  std::vector<std::vector<double>> stationary_;
  std::map<std::pair<int, unsigned>, std::vector<double>> boundary_;
  std::map<int, std::vector<double>> template_priors_;
};

// Seeded model with every conditional entry >= kPositivityFloor. Throws
// PreconditionError when k < 2 or k^(observed variables) exceeds 2^18.
DiscreteDtdscm sample_dtdscm(const CandidateSpec &spec, int window_length, int k,
                             std::uint64_t seed);

// Observational distribution of all window variables, latents summed out.
JointDistribution exact_joint(const DiscreteDtdscm &m);

// Distribution of the effect at slice L-1 after setting the cause at slice
// L-1-gamma to x_value.
std::vector<double> interventional_truth(const DiscreteDtdscm &m, const EffectQuery &q,
                                         int x_value);

struct CompareReport {
  std::uint64_t seed = 0;
  std::size_t candidate_index = 0;
  double max_abs_error = 0.0;
  bool pass = false;
};

// Evaluates the estimand on the model's joint for every (x, y) and checks
// it against the interventional truth.
CompareReport compare(const EstimandAst &ast, const DiscreteDtdscm &m, const EffectQuery &q,
                      double tol);
CompareReport compare(const EstimandAst &ast, const DiscreteDtdscm &m, const JointDistribution &joint,
                      const EffectQuery &q, double tol);

// Deterministic choice of a candidate index in [0, n) for a seed.
std::size_t pick_candidate(std::uint64_t seed, std::size_t n);

// One seeded trial: picks a candidate, samples a model on it and compares
// the estimand against the interventional truth.
CompareReport run_trial(const EstimandAst &ast, const CandidateEnumeration &candidates,
                        const EffectQuery &q, int window_length, int k, std::uint64_t seed,
                        double tol);

}  // namespace scgfd
