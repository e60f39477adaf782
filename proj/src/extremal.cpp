#include "qbound/extremal.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qbound/bounds.hpp"
#include "qbound/trunc_cdf.hpp"

namespace qb {

namespace {

constexpr double kMomentProductSlack = 1e-12;
// below this excess of mu3*mu1 over 1 the two atoms are closer than
// floating-point resolution supports; collapse to the Dirac form
constexpr double kDegenerateWindow = 1e-12;

std::string describe(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// transcription-error tripwire, deliberately looser than the attainment
// tolerances the test suite asserts
void check_attainment(const DiscreteMeasure& m, double c, double star,
                      double rel_tol, const char* who) {
  const double realized = quantile(m, c).delta;
  if (!(std::abs(realized / star - 1.0) <= rel_tol)) {
    throw std::logic_error(std::string(who) +
                           ": constructed measure has quantile " +
                           describe(realized) + " but delta* = " +
                           describe(star));
  }
}

}  // namespace

ExtremalSpec extremal_low(double c, double mu3) {
  if (!(c > 0.0 && c <= 0.5)) {
    raise(errc::invalid_quantile_level, "case I covers 0 < c <= 1/2");
  }
  if (!(mu3 > 0.0) || !std::isfinite(mu3)) {
    raise(errc::moment_inconsistency,
          "mu3 = " + describe(mu3) + " must be positive and finite");
  }
  const double mu1 = 1.0 / mu3;
  DiscreteMeasure measure = DiscreteMeasure::canonicalize({{mu3, 1.0}});
  check_attainment(measure, c, pinelis_bound(c, mu3, mu1), 1e-11,
                   "extremal_low");
  return {c, mu3, mu1, std::move(measure), {}, {}, {}};
}

ExtremalSpec extremal_high(double c, double mu3, double mu1) {
  if (!(c > 0.5 && c < 1.0)) {
    raise(errc::invalid_quantile_level, "case II covers 1/2 < c < 1");
  }
  if (!(mu3 > 0.0) || !std::isfinite(mu3) || !(mu1 > 0.0) ||
      !std::isfinite(mu1)) {
    raise(errc::moment_inconsistency, "moments must be positive and finite");
  }
  const double product = mu3 * mu1;
  if (product < 1.0 - kMomentProductSlack) {
    raise(errc::moment_inconsistency,
          "mu3*mu1 = " + describe(product) + " < 1 violates log-convexity");
  }

  const double star = pinelis_bound(c, mu3, mu1);
  const double u = u_star(c, mu1);
  const double v = 2.0 * star - u;

  double pi = 1.0;
  bool degenerate = product - 1.0 < kDegenerateWindow;
  if (!degenerate) {
    pi = 2.0 * (1.0 - c) * (product - (2.0 * c - 1.0)) /
         (4.0 * (1.0 - c) * (1.0 - c) + product - 1.0);
    if (!(pi < 1.0)) {  // rounding pushed pi onto or past 1
      pi = 1.0;
      degenerate = true;
    }
  }

  DiscreteMeasure measure =
      degenerate ? DiscreteMeasure::canonicalize({{v, 1.0}})
                 : DiscreteMeasure::canonicalize({{u, 1.0 - pi}, {v, pi}});
  check_attainment(measure, c, star, 1e-8, "extremal_high");
  return {c, mu3, mu1, std::move(measure), u, v, pi};
}

}  // namespace qb
