#include "qbound/bounds.hpp"

#include <cmath>
#include <sstream>

namespace qb {

namespace {

constexpr double kMomentProductSlack = 1e-12;

std::string describe(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void check_level_open(double c) {
  if (!(c > 0.0 && c < 1.0)) {
    raise(errc::invalid_quantile_level,
          "quantile level must lie strictly inside (0,1)");
  }
}

void check_level_high(double c) {
  if (!(c > 0.5 && c < 1.0)) {
    raise(errc::invalid_quantile_level,
          "this operation is defined for 1/2 < c < 1");
  }
}

void check_positive_moment(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    raise(errc::moment_inconsistency,
          std::string(name) + " = " + describe(value) +
              " must be positive and finite");
  }
}

void check_moment_product(double mu3, double mu1) {
  if (mu1 * mu3 < 1.0 - kMomentProductSlack) {
    raise(errc::moment_inconsistency,
          "mu1*mu3 = " + describe(mu1 * mu3) +
              " < 1; no probability measure has such moments");
  }
}

}  // namespace

double pinelis_bound(double c, double mu3, double mu1) {
  check_level_open(c);
  check_positive_moment(mu3, "mu3");
  check_positive_moment(mu1, "mu1");
  check_moment_product(mu3, mu1);
  if (c <= 0.5) return c * mu3;
  const double excess = 2.0 * c - 1.0;
  return (mu3 - excess * excess / mu1) / (4.0 * (1.0 - c));
}

double delta_star_family(double c, double u, double mu3, double mu1) {
  check_level_high(c);
  if (!(u > 0.0) || !std::isfinite(u)) {
    raise(errc::nonpositive_argument, "family parameter u must be positive");
  }
  check_positive_moment(mu3, "mu3");
  check_positive_moment(mu1, "mu1");
  const double excess = 2.0 * c - 1.0;
  return (mu3 - 2.0 * u * excess + mu1 * u * u) / (4.0 * (1.0 - c));
}

double u_star(double c, double mu1) {
  check_level_high(c);
  check_positive_moment(mu1, "mu1");
  return (2.0 * c - 1.0) / mu1;
}

double chen_shao_bound(double p, double mu_p) {
  if (!(p > 2.0) || !std::isfinite(p)) {
    raise(errc::invalid_order, "Chen-Shao bound needs p > 2");
  }
  check_positive_moment(mu_p, "mu_p");
  const double base = 2.0 * std::pow(p - 2.0, p - 2.0) /
                      std::pow(p - 1.0, p - 1.0) * mu_p;
  return std::pow(base, 1.0 / (p - 2.0));
}

BoundReport make_bound_report(double c, double mu3, double mu1) {
  BoundReport report;
  report.c = c;
  report.delta_star = pinelis_bound(c, mu3, mu1);
  report.branch = c <= 0.5 ? BoundBranch::low_c : BoundBranch::high_c;
  if (report.branch == BoundBranch::high_c) {
    report.u_star = u_star(c, mu1);
  }
  report.chen_shao_p3 = chen_shao_bound(3.0, mu3);
  return report;
}

}  // namespace qb
