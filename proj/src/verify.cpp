#include "qbound/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "qbound/bounds.hpp"
#include "qbound/extremal.hpp"
#include "qbound/trunc_cdf.hpp"

namespace qb {

namespace {

constexpr double kStrictnessFloor = 1e-12;  // relative, per Remark-style claims
constexpr std::uint64_t kStrictSalt = 0x5354524943545F31ull;
constexpr std::uint64_t kChenShaoSalt = 0x4348454E5348414Full;

// Runs fn(i) for i in [0, n); execution order is arbitrary but every result
// is keyed by trial index, so reports are identical for any thread count.
template <typename Fn>
void for_each_trial(int n, int threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
  };
  const int pool_size = std::min(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(pool_size);
  for (int t = 0; t < pool_size; ++t) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();
}

void sort_by_trial_then_level(std::vector<Violation>& v) {
  std::sort(v.begin(), v.end(), [](const Violation& a, const Violation& b) {
    if (a.trial != b.trial) return a.trial < b.trial;
    if (a.check != b.check) return a.check < b.check;
    return a.c < b.c;
  });
}

DiscreteMeasure random_measure_with_min_size(Rng& rng, int k_min, int k_max,
                                             double lo, double hi,
                                             int min_size) {
  // coincident positions merge, so redraw until the support is big enough
  for (;;) {
    DiscreteMeasure m = random_measure(rng, k_min, k_max, lo, hi);
    if (static_cast<int>(m.size()) >= min_size) return m;
  }
}

}  // namespace

TrialConfig TrialConfig::defaults() {
  TrialConfig cfg;
  for (int i = 1; i <= 19; ++i) cfg.c_grid.push_back(i * 0.05);
  cfg.p_grid = {2.5, 3.0, 4.0, 6.0};
  return cfg;
}

void TrialConfig::validate() const {
  if (n_trials < 1) {
    raise(errc::invalid_config, "n_trials must be at least 1");
  }
  if (atom_count_min < 1 || atom_count_max < atom_count_min) {
    raise(errc::invalid_config, "atom_count_range needs 1 <= min <= max");
  }
  if (!(position_lo > 0.0) || !(position_hi >= position_lo)) {
    raise(errc::invalid_config, "position_range needs 0 < lo <= hi");
  }
  if (c_grid.empty()) {
    raise(errc::invalid_config, "c_grid must not be empty");
  }
  for (double c : c_grid) {
    if (!(c > 0.0 && c < 1.0)) {
      raise(errc::invalid_config, "c_grid values must lie strictly in (0,1)");
    }
  }
  for (double p : p_grid) {
    if (!(p > 2.0)) {
      raise(errc::invalid_config, "p_grid values must exceed 2");
    }
  }
  if (!(tolerance > 0.0)) {
    raise(errc::invalid_config, "tolerance must be positive");
  }
}

DiscreteMeasure random_measure(Rng& rng, int k_min, int k_max, double lo,
                               double hi) {
  const int k = rng.uniform_int(k_min, k_max);
  std::vector<double> weights = rng.dirichlet(static_cast<std::size_t>(k));
  std::vector<Atom> atoms(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    atoms[static_cast<std::size_t>(i)] = {rng.log_uniform(lo, hi),
                                          weights[static_cast<std::size_t>(i)]};
  }
  return DiscreteMeasure::canonicalize(std::move(atoms));
}

TrialReport run_bound_suite(const TrialConfig& cfg, int threads) {
  cfg.validate();
  const int n = cfg.n_trials;
  std::vector<std::vector<Violation>> violations(static_cast<std::size_t>(n));
  std::vector<double> ratios(static_cast<std::size_t>(n), 0.0);

  for_each_trial(n, threads, [&](int i) {
    Rng rng = Rng::for_trial(cfg.seed, static_cast<std::uint64_t>(i));
    const DiscreteMeasure m =
        random_measure(rng, cfg.atom_count_min, cfg.atom_count_max,
                       cfg.position_lo, cfg.position_hi);
    const MomentProfile prof = moment_profile(m);
    double worst = 0.0;
    for (double c : cfg.c_grid) {
      const double delta = quantile(m, c).delta;
      const double star = pinelis_bound(c, prof.mu3, prof.mu1);
      worst = std::max(worst, delta / star);
      if (delta > star + cfg.tolerance) {
        violations[static_cast<std::size_t>(i)].push_back(
            {i, "bound", c, delta, star, m});
      }
    }
    ratios[static_cast<std::size_t>(i)] = worst;
  });

  TrialReport report;
  report.trials_run = n;
  for (auto& per_trial : violations) {
    report.violations.insert(report.violations.end(), per_trial.begin(),
                             per_trial.end());
  }
  sort_by_trial_then_level(report.violations);
  report.max_gap_ratio = *std::max_element(ratios.begin(), ratios.end());
  return report;
}

TrialReport run_strictness_suite(const TrialConfig& cfg, int threads) {
  cfg.validate();
  const int n = cfg.n_trials;
  std::vector<std::vector<Violation>> failures(static_cast<std::size_t>(n));
  std::vector<double> margins(static_cast<std::size_t>(n),
                              std::numeric_limits<double>::infinity());
  std::vector<double> ratios(static_cast<std::size_t>(n), 0.0);

  for_each_trial(n, threads, [&](int i) {
    Rng rng = Rng::for_trial(cfg.seed ^ kStrictSalt,
                             static_cast<std::uint64_t>(i));
    double min_margin = std::numeric_limits<double>::infinity();
    double max_ratio = 0.0;

    auto check_strict = [&](const DiscreteMeasure& m, double c,
                            const char* tag) {
      const MomentProfile prof = moment_profile(m);
      const double delta = quantile(m, c).delta;
      const double star = pinelis_bound(c, prof.mu3, prof.mu1);
      min_margin = std::min(min_margin, (star - delta) / star);
      max_ratio = std::max(max_ratio, delta / star);
      if (!(star - delta > kStrictnessFloor * star)) {
        failures[static_cast<std::size_t>(i)].push_back(
            {i, tag, c, delta, star, m});
      }
    };

    // >= 3 support points: equality is impossible at every level
    const DiscreteMeasure m3 = random_measure_with_min_size(
        rng, std::max(3, cfg.atom_count_min), std::max(3, cfg.atom_count_max),
        cfg.position_lo, cfg.position_hi, 3);
    for (double c : cfg.c_grid) check_strict(m3, c, "strict_3atom");

    // 2 support points: equality needs one point when c <= 1/2
    const DiscreteMeasure m2 = random_measure_with_min_size(
        rng, 2, 2, cfg.position_lo, cfg.position_hi, 2);
    for (double c : cfg.c_grid) {
      if (c <= 0.5) check_strict(m2, c, "strict_2atom_lowc");
    }

    // two-point measures pushed off the extremal configuration: inflating
    // the upper atom position changes both moments, so the support no longer
    // sits at the (u*, v*) pair of its own moment pair
    for (double c : cfg.c_grid) {
      if (!(c > 0.5)) continue;
      const double mu3 = rng.log_uniform(0.5, 5.0);
      const double product = rng.log_uniform(1.05, 100.0);
      const ExtremalSpec spec = extremal_high(c, mu3, product / mu3);
      if (spec.measure.size() != 2) continue;
      const DiscreteMeasure perturbed = DiscreteMeasure::canonicalize(
          {{spec.measure.position(0), spec.measure.weight(0)},
           {spec.measure.position(1) * 1.1, spec.measure.weight(1)}});
      check_strict(perturbed, c, "strict_perturbed");
    }

    margins[static_cast<std::size_t>(i)] = min_margin;
    ratios[static_cast<std::size_t>(i)] = max_ratio;
  });

  TrialReport report;
  report.trials_run = n;
  for (auto& per_trial : failures) {
    report.strictness_failures.insert(report.strictness_failures.end(),
                                      per_trial.begin(), per_trial.end());
  }
  sort_by_trial_then_level(report.strictness_failures);
  report.max_gap_ratio = *std::max_element(ratios.begin(), ratios.end());
  report.min_strictness_margin = *std::min_element(margins.begin(),
                                                   margins.end());
  report.has_strictness_margin = true;
  return report;
}

ComparisonReport run_chen_shao_comparison(const TrialConfig& cfg, int threads,
                                          bool keep_rows) {
  cfg.validate();
  const int n = cfg.n_trials;
  struct PerTrial {
    std::vector<ComparisonRow> rows;
    std::vector<ComparisonRow> coincidence;
    std::vector<ComparisonRow> dominance;
  };
  std::vector<PerTrial> results(static_cast<std::size_t>(n));

  for_each_trial(n, threads, [&](int i) {
    Rng rng = Rng::for_trial(cfg.seed ^ kChenShaoSalt,
                             static_cast<std::uint64_t>(i));
    PerTrial& out = results[static_cast<std::size_t>(i)];
    const DiscreteMeasure m =
        random_measure(rng, cfg.atom_count_min, cfg.atom_count_max,
                       cfg.position_lo, cfg.position_hi);
    const MomentProfile prof = moment_profile(m);
    const double delta_median = quantile(m, 0.5).delta;
    const double pinelis_median = pinelis_bound(0.5, prof.mu3, prof.mu1);

    std::vector<double> chen_shao_values;
    chen_shao_values.reserve(cfg.p_grid.size());
    for (double p : cfg.p_grid) {
      const double cs = chen_shao_bound(p, moment(m, p));
      chen_shao_values.push_back(cs);
      // the Chen-Shao inequality bounds the median-type quantile
      if (cs < delta_median - cfg.tolerance) {
        out.dominance.push_back(
            {i, 0.5, p, delta_median, pinelis_median, cs});
      }
      if (p == 3.0 && pinelis_median != cs) {
        out.coincidence.push_back(
            {i, 0.5, p, delta_median, pinelis_median, cs});
      }
    }

    for (double c : cfg.c_grid) {
      const double delta_c = quantile(m, c).delta;
      const double pin = pinelis_bound(c, prof.mu3, prof.mu1);
      if (pin < delta_c - cfg.tolerance) {
        out.dominance.push_back(
            {i, c, cfg.p_grid.empty() ? 3.0 : cfg.p_grid.front(), delta_c, pin,
             chen_shao_values.empty() ? 0.0 : chen_shao_values.front()});
      }
      if (keep_rows) {
        for (std::size_t pi = 0; pi < cfg.p_grid.size(); ++pi) {
          out.rows.push_back(
              {i, c, cfg.p_grid[pi], delta_c, pin, chen_shao_values[pi]});
        }
      }
    }
  });

  ComparisonReport report;
  report.trials_run = n;
  for (PerTrial& per_trial : results) {
    report.rows.insert(report.rows.end(), per_trial.rows.begin(),
                       per_trial.rows.end());
    report.coincidence_failures.insert(report.coincidence_failures.end(),
                                       per_trial.coincidence.begin(),
                                       per_trial.coincidence.end());
    report.dominance_failures.insert(report.dominance_failures.end(),
                                     per_trial.dominance.begin(),
                                     per_trial.dominance.end());
  }
  return report;
}

}  // namespace qb
