#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "qbound/measure.hpp"
#include "qbound/rng.hpp"
#include "qbound/trunc_cdf.hpp"
#include "qbound/verify.hpp"

using qb::DiscreteMeasure;

namespace {

bool is_error(const std::function<void()>& f, qb::errc code) {
  try {
    f();
  } catch (const qb::error& e) {
    return e.code() == code;
  }
  return false;
}

DiscreteMeasure two_atom() {
  return DiscreteMeasure::canonicalize({{1.0, 0.5}, {3.0, 0.5}});
}

DiscreteMeasure scaled(const DiscreteMeasure& m, double s) {
  std::vector<qb::Atom> atoms = m.atoms();
  for (auto& a : atoms) a.x *= s;
  return DiscreteMeasure::canonicalize(std::move(atoms));
}

}  // namespace

TEST_CASE("eval_L on hand examples") {
  const auto dirac = DiscreteMeasure::canonicalize({{2.0, 1.0}});
  CHECK(qb::eval_L(dirac, 2.0) == 1.0);
  CHECK(qb::eval_L(dirac, 5.0) == 1.0);
  CHECK(qb::eval_L(dirac, 1.0) == 0.5);

  const auto m = two_atom();
  CHECK(qb::eval_L(m, 1.5) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(qb::eval_L(m, 3.0) == 1.0);
  CHECK(qb::eval_L(m, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  CHECK(is_error([&] { qb::eval_L(m, 0.0); }, qb::errc::nonpositive_argument));
  CHECK(is_error([&] { qb::eval_L(m, -1.0); }, qb::errc::nonpositive_argument));
}

TEST_CASE("quantile solves the hand examples exactly") {
  const auto dirac = DiscreteMeasure::canonicalize({{2.0, 1.0}});
  const auto r0 = qb::quantile(dirac, 0.25);
  CHECK(r0.delta == 0.5);
  CHECK(r0.segment_index == 0);
  CHECK(r0.method == qb::SolveMethod::exact_piecewise);

  const auto m = two_atom();
  const auto r1 = qb::quantile(m, 0.5);
  CHECK(r1.delta == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(r1.segment_index == 0);

  const auto r2 = qb::quantile(m, 0.75);
  CHECK(r2.delta == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(r2.segment_index == 1);
}

TEST_CASE("quantile returns the atom itself on an exact tie") {
  const auto m = two_atom();
  const double at_first_atom = qb::eval_L(m, 1.0);
  const auto res = qb::quantile(m, at_first_atom);
  CHECK(res.delta == 1.0);
  CHECK(res.segment_index == 1);
}

TEST_CASE("quantile validates its level") {
  const auto m = two_atom();
  for (double c : {0.0, 1.0, -0.5, 2.0}) {
    CHECK(is_error([&] { qb::quantile(m, c); },
                   qb::errc::invalid_quantile_level));
  }
  CHECK(is_error([&] { qb::quantile(m, std::nan("")); },
                 qb::errc::invalid_quantile_level));
}

TEST_CASE("bisection oracle matches the exact solver on examples") {
  const auto dirac = DiscreteMeasure::canonicalize({{2.0, 1.0}});
  const auto rb = qb::quantile_bisect(dirac, 0.25, 1e-12);
  CHECK(rb.method == qb::SolveMethod::bisection);
  CHECK(std::abs(rb.delta - 0.5) <= 1e-12);

  const auto m = two_atom();
  CHECK(std::abs(qb::quantile_bisect(m, 0.75, 1e-12).delta - 1.5) <= 1e-12);

  CHECK(is_error([&] { qb::quantile_bisect(m, 0.5, 0.0); },
                 qb::errc::nonpositive_tolerance));
  CHECK(is_error([&] { qb::quantile_bisect(m, 1.5, 1e-9); },
                 qb::errc::invalid_quantile_level));
}

TEST_CASE("levels near one stay below the last atom") {
  const auto m = two_atom();
  const auto res = qb::quantile(m, 0.999999);
  CHECK(res.delta < m.max_position());
  CHECK(std::abs(qb::eval_L(m, res.delta) - 0.999999) <= 1e-12);
  const auto bis = qb::quantile_bisect(m, 0.999999, 1e-12);
  CHECK(bis.delta < m.max_position());
  CHECK(std::abs(bis.delta - res.delta) <= 2e-12);
}

TEST_CASE("round trip L(quantile(c)) = c across the level grid") {
  qb::Rng rng(8001);
  for (int trial = 0; trial < 300; ++trial) {
    const auto m = qb::random_measure(rng, 1, 8, 0.1, 10.0);
    for (int i = 1; i <= 99; ++i) {
      const double c = i * 0.01;
      const auto res = qb::quantile(m, c);
      CHECK(std::abs(qb::eval_L(m, res.delta) - c) <= 1e-12);
    }
  }
}

TEST_CASE("exact solver and bisection agree on randomized measures") {
  qb::Rng rng(8002);
  const double tol = 1e-12;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto m = qb::random_measure(rng, 1, 8, 0.1, 10.0);
    const double c = rng.uniform01();
    const double exact = qb::quantile(m, c).delta;
    const double bis = qb::quantile_bisect(m, c, tol).delta;
    CHECK(std::abs(exact - bis) <= tol + 1e-12 * exact);
  }
}

TEST_CASE("bisection round trip stays within its derived tolerance") {
  // |L(delta_b) - c| <= slope * tol/2 with slope <= mu_1 <= 1/x_min
  qb::Rng rng(8003);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto m = qb::random_measure(rng, 1, 8, 0.1, 10.0);
    const double c = rng.uniform01();
    const double bis = qb::quantile_bisect(m, c, 1e-12).delta;
    const double slope_cap = 1.0 / m.min_position();
    CHECK(std::abs(qb::eval_L(m, bis) - c) <= 1e-12 * slope_cap + 1e-13);
  }
}

TEST_CASE("L is nondecreasing and strictly increasing below the last atom") {
  const auto m = two_atom();
  double prev = 0.0;
  for (int i = 1; i <= 300; ++i) {
    const double d = i * 0.01;
    const double value = qb::eval_L(m, d);
    if (d <= m.max_position()) {
      CHECK(value > prev);  // slopes are O(1) on this measure
    } else {
      CHECK(value == 1.0);
    }
    prev = value;
  }

  qb::Rng rng(8004);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto mm = qb::random_measure(rng, 1, 8, 0.1, 10.0);
    const double d1 = rng.log_uniform(0.05, 20.0);
    const double d2 = rng.log_uniform(0.05, 20.0);
    const double lo = std::min(d1, d2);
    const double hi = std::max(d1, d2);
    CHECK(qb::eval_L(mm, lo) <= qb::eval_L(mm, hi) + 1e-15);
  }
}

TEST_CASE("quantile scales exactly with the measure under binary scaling") {
  qb::Rng rng(8005);
  for (int trial = 0; trial < 500; ++trial) {
    const auto m = qb::random_measure(rng, 1, 8, 0.1, 10.0);
    const double c = rng.uniform01();
    const double base = qb::quantile(m, c).delta;
    for (double s : {0.5, 2.0, 4.0, 1024.0, 0x1.0p-20}) {
      CHECK(qb::quantile(scaled(m, s), c).delta == s * base);
    }
    // non-binary scales agree to roundoff
    const double s = 1.7;
    CHECK(qb::quantile(scaled(m, s), c).delta ==
          doctest::Approx(s * base).epsilon(1e-12));
  }
}
