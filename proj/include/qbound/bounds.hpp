#pragma once

#include <optional>

#include "qbound/error.hpp"

namespace qb {

enum class BoundBranch {
  low_c,   // 0 < c <= 1/2
  high_c,  // 1/2 < c < 1
};

struct BoundReport {
  double c = 0.0;
  double delta_star = 0.0;
  BoundBranch branch = BoundBranch::low_c;
  std::optional<double> u_star;       // high branch only
  double chen_shao_p3 = 0.0;          // comparison value at p = 3
  std::optional<double> exact_delta;  // set when a measure was supplied
  std::optional<double> gap;          // delta_star - exact_delta
};

// Optimal closed-form upper bound on the c-quantile of L:
//   delta* = c*mu3                                 for 0 < c <= 1/2
//   delta* = (mu3 - (2c-1)^2/mu1) / (4(1-c))       for 1/2 <= c < 1
// Both expressions equal mu3/2 at c = 1/2. Requires mu1*mu3 >= 1, which
// holds for every probability measure on (0, inf).
double pinelis_bound(double c, double mu3, double mu1);

// Parametric family delta*(u) = (mu3 - 2u(2c-1) + mu1*u^2) / (4(1-c)) for
// 1/2 < c < 1 and u > 0; convex in u and minimized at u = u_star, where it
// equals pinelis_bound.
double delta_star_family(double c, double u, double mu3, double mu1);

// Minimizer u* = (2c-1)/mu1 of the family; satisfies 0 < u* < delta*.
double u_star(double c, double mu1);

// Chen-Shao bound (2 (p-2)^(p-2) / (p-1)^(p-1) * mu_p)^(1/(p-2)) for p > 2.
// At p = 3 this is mu3/2, coinciding with pinelis_bound at c = 1/2.
double chen_shao_bound(double p, double mu_p);

// Closed-form fields of a BoundReport (no measure involved; exact_delta and
// gap are left for the caller).
BoundReport make_bound_report(double c, double mu3, double mu1);

}  // namespace qb
