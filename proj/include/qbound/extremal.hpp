#pragma once

#include <optional>

#include "qbound/measure.hpp"

namespace qb {

// A measure attaining delta = delta* together with the construction data.
// For c <= 1/2 the measure is the Dirac at mu3_target (u_star/v_star/pi are
// empty and mu1_target records the realized value 1/mu3). For c > 1/2 it
// places masses 1-pi and pi at u* and v* = 2*delta* - u*; pi = 1 collapses
// it to a single atom at v*.
struct ExtremalSpec {
  double c;
  double mu3_target;
  double mu1_target;
  DiscreteMeasure measure;
  std::optional<double> u_star;
  std::optional<double> v_star;
  std::optional<double> pi;
};

// Case 0 < c <= 1/2: the Dirac measure at mu3 has quantile exactly c*mu3.
ExtremalSpec extremal_low(double c, double mu3);

// Case 1/2 < c < 1: two-point measure with masses 1-pi, pi at u*, v*,
//   pi = 2(1-c)(mu3*mu1 - (2c-1)) / (4(1-c)^2 + mu3*mu1 - 1),
// reproducing mu1 and mu3 and attaining delta* exactly. Requires
// mu3*mu1 >= 1; at mu3*mu1 = 1, pi = 1 and the measure is the Dirac at
// 1/mu1. Both constructors re-solve the quantile equation on their own
// output and throw std::logic_error when it fails to attain the bound.
ExtremalSpec extremal_high(double c, double mu3, double mu1);

}  // namespace qb
