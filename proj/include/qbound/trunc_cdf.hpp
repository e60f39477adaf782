#pragma once

#include "qbound/measure.hpp"

namespace qb {

enum class SolveMethod {
  exact_piecewise,
  bisection,
};

struct QuantileResult {
  double delta;       // the root of L(d) = c
  int segment_index;  // atoms at or below delta; 0 means left of the first atom
  SolveMethod method;
};

// Truncation CDF L(d) = sum_{x<=d} w + d * sum_{x>d} w/x. Continuous and
// nondecreasing, 0 at 0+, identically 1 from the last atom on.
double eval_L(const DiscreteMeasure& m, double d);

// Unique root of L(d) = c for c in (0,1). L is linear between consecutive
// atoms (and on (0, x_1]) with slope sum_{x>x_j} w/x, so the bracketing
// segment is located by scanning L at the atoms and the root solved in
// closed form. Ties c = L(x_j) return x_j itself.
QuantileResult quantile(const DiscreteMeasure& m, double c);

// Independent bisection oracle on [c*x_min, x_max]; the lower end satisfies
// L(c*x_min) = c*x_min*mu_1 <= c because x_min*mu_1 <= 1. Terminates when
// the bracket is narrower than tol.
QuantileResult quantile_bisect(const DiscreteMeasure& m, double c, double tol);

}  // namespace qb
