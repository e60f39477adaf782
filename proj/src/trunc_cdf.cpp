#include "qbound/trunc_cdf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qbound/numeric.hpp"

namespace qb {

namespace {

// prefix[i] = sum_{j<i} w_j (ascending), suffix[i] = sum_{j>=i} w_j/x_j
// (descending), both compensated. On [x_{i-1}, x_i] the CDF is
// L(d) = prefix[i] + d * suffix[i], so each segment solve is O(1).
struct SegmentTable {
  std::vector<double> prefix;
  std::vector<double> suffix;

  explicit SegmentTable(const DiscreteMeasure& m) {
    const auto& atoms = m.atoms();
    const std::size_t k = atoms.size();
    prefix.resize(k + 1);
    suffix.resize(k + 1);
    NeumaierSum ps;
    prefix[0] = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      ps.add(atoms[i].w);
      prefix[i + 1] = ps.value();
    }
    NeumaierSum ss;
    suffix[k] = 0.0;
    for (std::size_t i = k; i-- > 0;) {
      ss.add(atoms[i].w / atoms[i].x);
      suffix[i] = ss.value();
    }
  }
};

int atoms_at_or_below(const DiscreteMeasure& m, double d) {
  const auto& atoms = m.atoms();
  const auto it = std::upper_bound(
      atoms.begin(), atoms.end(), d,
      [](double value, const Atom& a) { return value < a.x; });
  return static_cast<int>(it - atoms.begin());
}

void check_level(double c) {
  if (!(c > 0.0 && c < 1.0)) {
    raise(errc::invalid_quantile_level,
          "quantile level must lie strictly inside (0,1)");
  }
}

}  // namespace

double eval_L(const DiscreteMeasure& m, double d) {
  if (!(d > 0.0)) {
    raise(errc::nonpositive_argument, "eval_L needs d > 0");
  }
  NeumaierSum below;  // weights of atoms at or below d, ascending order
  NeumaierSum above;  // w/x terms of atoms beyond d, ascending order
  for (const Atom& a : m.atoms()) {
    if (a.x <= d) {
      below.add(a.w);
    } else {
      above.add(a.w / a.x);
    }
  }
  const double value = below.value() + d * above.value();
  return std::clamp(value, 0.0, 1.0);
}

QuantileResult quantile(const DiscreteMeasure& m, double c) {
  check_level(c);
  const SegmentTable table(m);
  const auto& atoms = m.atoms();
  const int k = static_cast<int>(atoms.size());

  for (int i = 0; i < k; ++i) {
    const double L_i = table.prefix[i + 1] + atoms[i].x * table.suffix[i + 1];
    if (L_i < c) continue;
    if (L_i == c) {
      return {atoms[i].x, i + 1, SolveMethod::exact_piecewise};
    }
    // root strictly inside (x_{i-1}, x_i); the slope suffix[i] is positive
    // because atom i still contributes w_i/x_i
    const double delta = (c - table.prefix[i]) / table.suffix[i];
    return {delta, i, SolveMethod::exact_piecewise};
  }
  // L(x_max) = 1 > c, so a bracketing atom always exists
  throw std::logic_error("quantile: no bracketing atom found for c = " +
                         std::to_string(c));
}

QuantileResult quantile_bisect(const DiscreteMeasure& m, double c, double tol) {
  check_level(c);
  if (!(tol > 0.0)) {
    raise(errc::nonpositive_tolerance, "bisection tolerance must be positive");
  }

  double lo = c * m.min_position();
  double hi = m.max_position();
  for (int iter = 0; iter < 200 && hi - lo >= tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket at floating-point resolution
    if (eval_L(m, mid) < c) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double delta = 0.5 * (lo + hi);
  return {delta, atoms_at_or_below(m, delta), SolveMethod::bisection};
}

}  // namespace qb
