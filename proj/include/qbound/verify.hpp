#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qbound/measure.hpp"
#include "qbound/rng.hpp"

namespace qb {

struct TrialConfig {
  std::uint64_t seed = 20240901ull;
  int n_trials = 1000;
  int atom_count_min = 1;
  int atom_count_max = 8;
  double position_lo = 0.1;
  double position_hi = 10.0;
  std::vector<double> c_grid;  // defaults to 0.05, 0.10, ..., 0.95
  std::vector<double> p_grid;  // defaults to 2.5, 3, 4, 6
  double tolerance = 1e-9;

  static TrialConfig defaults();

  // throws errc::invalid_config
  void validate() const;
};

struct Violation {
  int trial = 0;
  std::string check;  // bound | strict_3atom | strict_2atom_lowc | strict_perturbed
  double c = 0.0;
  double delta = 0.0;
  double delta_star = 0.0;
  DiscreteMeasure measure;
};

struct TrialReport {
  int trials_run = 0;
  double max_gap_ratio = 0.0;  // max observed delta / delta*
  // min observed (delta* - delta)/delta*; only the strictness suite fills it
  double min_strictness_margin = 0.0;
  bool has_strictness_margin = false;
  std::vector<Violation> violations;
  std::vector<Violation> strictness_failures;

  bool clean() const noexcept {
    return violations.empty() && strictness_failures.empty();
  }
};

struct ComparisonRow {
  int trial = 0;
  double c = 0.0;
  double p = 0.0;
  double delta = 0.0;
  double pinelis = 0.0;
  double chen_shao = 0.0;
};

struct ComparisonReport {
  int trials_run = 0;
  std::vector<ComparisonRow> rows;
  // pinelis != chen_shao bitwise at (c = 1/2, p = 3)
  std::vector<ComparisonRow> coincidence_failures;
  // a bound fell below the exact quantile it must dominate: pinelis vs the
  // c-quantile per row, chen_shao vs the median quantile
  std::vector<ComparisonRow> dominance_failures;

  bool clean() const noexcept {
    return coincidence_failures.empty() && dominance_failures.empty();
  }
};

// Positions log-uniform in [lo, hi], weights uniform on the simplex, then
// canonicalized. Atom count uniform in [k_min, k_max].
DiscreteMeasure random_measure(Rng& rng, int k_min, int k_max, double lo,
                               double hi);

// Random measures x c_grid: records every case with delta > delta* +
// tolerance. Violations are data, not errors; a correct build reports none.
TrialReport run_bound_suite(const TrialConfig& cfg, int threads = 1);

// Strict inequality delta < delta* (margin > 1e-12 * delta*) on supports
// where equality is impossible: >= 3 atoms at every grid level, 2 atoms at
// levels c <= 1/2, and two-point measures pushed off the extremal
// configuration by inflating the upper atom position by 10%.
TrialReport run_strictness_suite(const TrialConfig& cfg, int threads = 1);

// Per-(trial, c, p) table of exact delta vs both closed-form bounds.
// Asserts bitwise pinelis/chen-shao coincidence at (1/2, 3) when the grids
// contain those points, pinelis dominance at every c, and chen-shao
// dominance over the median quantile. keep_rows=false drops the bulk table
// and keeps only failures.
ComparisonReport run_chen_shao_comparison(const TrialConfig& cfg,
                                          int threads = 1,
                                          bool keep_rows = true);

}  // namespace qb
