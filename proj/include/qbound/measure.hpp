#pragma once

#include <cstddef>
#include <vector>

#include "qbound/error.hpp"

namespace qb {

struct Atom {
  double x;  // position, > 0
  double w;  // weight, > 0
};

// Finite discrete probability measure on (0, inf). After canonicalization
// the atoms are sorted by strictly increasing position, duplicate positions
// have been merged, and the weights sum to exactly 1 under compensated
// summation. Immutable; safe to share across threads.
class DiscreteMeasure {
 public:
  // Sorts, merges duplicate positions, renormalizes. Inputs whose total
  // mass deviates from 1 by more than 1e-6 are rejected as caller errors.
  static DiscreteMeasure canonicalize(std::vector<Atom> raw_atoms);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  double position(std::size_t i) const { return atoms_[i].x; }
  double weight(std::size_t i) const { return atoms_[i].w; }
  double min_position() const { return atoms_.front().x; }
  double max_position() const { return atoms_.back().x; }

  // |sum of input weights - 1| as seen before renormalization.
  double input_mass_deviation() const noexcept { return input_mass_deviation_; }

 private:
  DiscreteMeasure() = default;

  std::vector<Atom> atoms_;
  double input_mass_deviation_ = 0.0;
};

// mu_p = integral of x^(p-2); mu_2 is total mass, mu_3 the mean of x.
struct MomentProfile {
  double mu1;
  double mu2;
  double mu3;
};

struct RVSupportPoint {
  double value;  // any finite real; zero-valued points carry no mass
  double prob;   // >= 0, per-variable probabilities sum to 1
};

struct RandomVariable {
  std::vector<RVSupportPoint> support;
};

// Discrete random variables xi_1..xi_n with sum_i E xi_i^2 = 1.
struct RVCollection {
  std::vector<RandomVariable> variables;
  std::size_t n() const noexcept { return variables.size(); }
};

// Returns sum_i w_i * x_i^(p-2), accumulated in ascending-x order with
// compensated summation. Exactly 1 for p = 2 on canonical measures.
double moment(const DiscreteMeasure& m, double p);

// mu_1, mu_2, mu_3 in one pass; checks mu1*mu3 >= 1 (log-convexity of
// p -> mu_p), which can only fail through an arithmetic bug.
MomentProfile moment_profile(const DiscreteMeasure& m);

// The measure mu_xi with integral h dmu = sum_i E h(|xi_i|) xi_i^2: an atom
// of weight prob*value^2 at |value| for every support point, merged and
// canonicalized. Requires sum_i E xi_i^2 = 1 within 1e-6.
DiscreteMeasure build_mu_xi(const RVCollection& rvs);

}  // namespace qb
