// qbound: exact quantiles of the truncation CDF L(d) = integral of
// min(1, d/x) for discrete measures on (0,inf), the optimal closed-form
// bound delta* on them, the extremal measures attaining it, and randomized
// verification suites. See README.md for the file schemas.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qbound/bounds.hpp"
#include "qbound/extremal.hpp"
#include "qbound/io.hpp"
#include "qbound/measure.hpp"
#include "qbound/trunc_cdf.hpp"
#include "qbound/verify.hpp"

namespace {

using nlohmann::json;

constexpr int kExitViolations = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;

int exit_code_for(qb::errc code) {
  switch (code) {
    case qb::errc::schema_violation:
    case qb::errc::invalid_config:
      return kExitUsage;
    default:
      return kExitDomain;
  }
}

[[noreturn]] void usage_error(const std::string& what) {
  qb::raise(qb::errc::invalid_config, what);
}

void write_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path);
  if (!f) usage_error(out_path + ": cannot open for writing");
  f << text;
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += fields[i];
  }
  line += '\n';
  return line;
}

std::string fmt(double v) { return qb::io::format_double(v); }

const char* method_name(qb::SolveMethod m) {
  return m == qb::SolveMethod::exact_piecewise ? "exact_piecewise" : "bisection";
}

struct CommonOpts {
  std::string input;
  std::string out;
  std::string format = "table";
};

void add_format_option(CLI::App* cmd, CommonOpts& opts,
                       const std::string& default_format) {
  opts.format = default_format;
  cmd->add_option("--format", opts.format, "output format")
      ->check(CLI::IsMember({"json", "csv", "table"}))
      ->capture_default_str();
  cmd->add_option("--out", opts.out, "write the primary output to this file");
}

int run_quantile(const CommonOpts& opts, double c) {
  const qb::DiscreteMeasure m = qb::io::load_measure_file(opts.input);
  const qb::QuantileResult res = qb::quantile(m, c);
  const double echo = qb::eval_L(m, res.delta);

  std::string text;
  if (opts.format == "json") {
    text = qb::io::emit_json(json{{"c", c},
                                  {"delta", res.delta},
                                  {"segment_index", res.segment_index},
                                  {"method", method_name(res.method)},
                                  {"L_at_delta", echo}});
  } else if (opts.format == "csv") {
    text = csv_line({"c", "delta", "segment_index", "method", "L_at_delta"}) +
           csv_line({fmt(c), fmt(res.delta), std::to_string(res.segment_index),
                     method_name(res.method), fmt(echo)});
  } else {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "delta          = %.12g\n"
                  "segment_index  = %d\n"
                  "method         = %s\n"
                  "L(delta)       = %.12g   (c = %.12g)\n",
                  res.delta, res.segment_index, method_name(res.method), echo,
                  c);
    text = buf;
  }
  write_text(text, opts.out);
  return 0;
}

int run_bound(const CommonOpts& opts, double c, std::optional<double> mu3_opt,
              std::optional<double> mu1_opt) {
  const bool have_file = !opts.input.empty();
  if (have_file && (mu3_opt || mu1_opt)) {
    usage_error("give either --input or explicit --mu1/--mu3, not both");
  }
  if (!have_file && !mu3_opt) {
    usage_error("either --input or --mu3 is required");
  }

  std::optional<qb::DiscreteMeasure> measure;
  double mu3 = 0.0;
  double mu1 = 0.0;
  if (have_file) {
    measure = qb::io::load_measure_file(opts.input);
    const qb::MomentProfile prof = qb::moment_profile(*measure);
    mu3 = prof.mu3;
    mu1 = prof.mu1;
  } else {
    mu3 = *mu3_opt;
    if (mu1_opt) {
      mu1 = *mu1_opt;
    } else if (c <= 0.5) {
      mu1 = 1.0 / mu3;  // delta* ignores mu1 on this branch; use the floor
    } else {
      usage_error("--mu1 is required for c > 1/2");
    }
  }

  qb::BoundReport report = qb::make_bound_report(c, mu3, mu1);
  if (measure) {
    report.exact_delta = qb::quantile(*measure, c).delta;
    report.gap = report.delta_star - *report.exact_delta;
  }

  std::string text;
  if (opts.format == "json") {
    text = qb::io::emit_json(qb::io::bound_report_to_json(report));
  } else if (opts.format == "csv") {
    std::vector<std::string> head{"c", "branch", "delta_star", "chen_shao_p3"};
    std::vector<std::string> row{
        fmt(c), report.branch == qb::BoundBranch::low_c ? "low_c" : "high_c",
        fmt(report.delta_star), fmt(report.chen_shao_p3)};
    if (report.u_star) {
      head.push_back("u_star");
      row.push_back(fmt(*report.u_star));
    }
    if (report.exact_delta) {
      head.insert(head.end(), {"exact_delta", "gap"});
      row.insert(row.end(), {fmt(*report.exact_delta), fmt(*report.gap)});
    }
    text = csv_line(head) + csv_line(row);
  } else {
    text += "delta_star     = " + std::string(fmt(report.delta_star)) + "\n";
    text += "branch         = " +
            std::string(report.branch == qb::BoundBranch::low_c ? "low_c"
                                                                : "high_c") +
            "\n";
    if (report.u_star) text += "u_star         = " + fmt(*report.u_star) + "\n";
    text += "chen_shao(p=3) = " + fmt(report.chen_shao_p3) + "\n";
    if (report.exact_delta) {
      text += "exact_delta    = " + fmt(*report.exact_delta) + "\n";
      text += "gap            = " + fmt(*report.gap) + "\n";
    }
  }
  write_text(text, opts.out);
  return 0;
}

int run_compare(const CommonOpts& opts, std::vector<double> c_grid,
                std::vector<double> p_grid, std::optional<double> c_single,
                std::optional<double> p_single) {
  if (c_single) c_grid.push_back(*c_single);
  if (p_single) p_grid.push_back(*p_single);
  if (c_grid.empty()) {
    for (int i = 1; i <= 9; ++i) c_grid.push_back(i * 0.1);
  }
  if (p_grid.empty()) p_grid = {2.5, 3.0, 4.0, 6.0};

  const qb::DiscreteMeasure m = qb::io::load_measure_file(opts.input);
  const qb::MomentProfile prof = qb::moment_profile(m);

  struct Row {
    double c, p, delta, pinelis, chen_shao;
  };
  std::vector<Row> rows;
  rows.reserve(c_grid.size() * p_grid.size());
  for (double c : c_grid) {
    const double delta = qb::quantile(m, c).delta;
    const double pin = qb::pinelis_bound(c, prof.mu3, prof.mu1);
    for (double p : p_grid) {
      rows.push_back({c, p, delta, pin, qb::chen_shao_bound(p, qb::moment(m, p))});
    }
  }

  std::string text;
  if (opts.format == "json") {
    json arr = json::array();
    for (const Row& r : rows) {
      arr.push_back({{"c", r.c},
                     {"p", r.p},
                     {"delta", r.delta},
                     {"pinelis", r.pinelis},
                     {"chen_shao", r.chen_shao}});
    }
    text = qb::io::emit_json(json{{"rows", std::move(arr)}});
  } else if (opts.format == "csv") {
    text = csv_line({"c", "p", "delta", "pinelis", "chen_shao"});
    for (const Row& r : rows) {
      text += csv_line(
          {fmt(r.c), fmt(r.p), fmt(r.delta), fmt(r.pinelis), fmt(r.chen_shao)});
    }
  } else {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%8s %6s %14s %14s %14s\n", "c", "p",
                  "delta", "pinelis", "chen_shao");
    text = buf;
    for (const Row& r : rows) {
      std::snprintf(buf, sizeof buf, "%8.4g %6.4g %14.8g %14.8g %14.8g\n", r.c,
                    r.p, r.delta, r.pinelis, r.chen_shao);
      text += buf;
    }
  }
  write_text(text, opts.out);
  return 0;
}

int run_extremal(const CommonOpts& opts, double c, double mu3,
                 std::optional<double> mu1_opt) {
  qb::ExtremalSpec spec = [&] {
    if (c <= 0.5) return qb::extremal_low(c, mu3);
    if (!mu1_opt) usage_error("--mu1 is required for c > 1/2");
    return qb::extremal_high(c, mu3, *mu1_opt);
  }();

  const qb::MomentProfile prof = qb::moment_profile(spec.measure);
  const double delta = qb::quantile(spec.measure, c).delta;
  const double star = qb::pinelis_bound(c, spec.mu3_target, spec.mu1_target);

  std::string text;
  if (opts.format == "json") {
    json j{{"c", c},
           {"mu3_target", spec.mu3_target},
           {"mu1_target", spec.mu1_target},
           {"mu3_realized", prof.mu3},
           {"mu1_realized", prof.mu1},
           {"delta", delta},
           {"delta_star", star},
           {"measure", qb::io::measure_to_json(spec.measure)}};
    if (spec.u_star) j["u_star"] = *spec.u_star;
    if (spec.v_star) j["v_star"] = *spec.v_star;
    if (spec.pi) j["pi"] = *spec.pi;
    text = qb::io::emit_json(j);
  } else {
    for (std::size_t i = 0; i < spec.measure.size(); ++i) {
      text += "atom[" + std::to_string(i) + "]      x = " +
              fmt(spec.measure.position(i)) + "  w = " +
              fmt(spec.measure.weight(i)) + "\n";
    }
    if (spec.u_star) text += "u_star       = " + fmt(*spec.u_star) + "\n";
    if (spec.v_star) text += "v_star       = " + fmt(*spec.v_star) + "\n";
    if (spec.pi) text += "pi           = " + fmt(*spec.pi) + "\n";
    text += "mu3 realized = " + fmt(prof.mu3) + "  (target " +
            fmt(spec.mu3_target) + ")\n";
    text += "mu1 realized = " + fmt(prof.mu1) + "  (target " +
            fmt(spec.mu1_target) + ")\n";
    text += "delta        = " + fmt(delta) + "\n";
    text += "delta_star   = " + fmt(star) + "\n";
  }

  // --out always receives the bare measure so the result pipes into the
  // other subcommands
  if (!opts.out.empty()) {
    write_text(qb::io::emit_json(qb::io::measure_to_json(spec.measure)),
               opts.out);
    std::cout << text;
  } else {
    std::cout << text;
  }
  return 0;
}

int run_mu_xi(const CommonOpts& opts) {
  const qb::RVCollection rvs = qb::io::load_rv_collection_file(opts.input);
  const qb::DiscreteMeasure m = qb::build_mu_xi(rvs);
  std::string text;
  if (opts.format == "table") {
    for (std::size_t i = 0; i < m.size(); ++i) {
      text += "atom[" + std::to_string(i) + "]  x = " + fmt(m.position(i)) +
              "  w = " + fmt(m.weight(i)) + "\n";
    }
  } else {
    text = qb::io::emit_json(qb::io::measure_to_json(m));
  }
  write_text(text, opts.out);
  return 0;
}

int run_verify(const CommonOpts& opts, std::optional<std::uint64_t> seed,
               std::optional<int> trials, int threads) {
  qb::TrialConfig cfg = opts.input.empty()
                            ? qb::TrialConfig::defaults()
                            : qb::io::load_trial_config_file(opts.input);
  if (seed) cfg.seed = *seed;
  if (trials) cfg.n_trials = *trials;
  cfg.validate();

  const qb::TrialReport bound = qb::run_bound_suite(cfg, threads);
  const qb::TrialReport strict = qb::run_strictness_suite(cfg, threads);
  const qb::ComparisonReport chen =
      qb::run_chen_shao_comparison(cfg, threads, /*keep_rows=*/false);

  const json report{{"config", qb::io::trial_config_to_json(cfg)},
                    {"bound_suite", qb::io::trial_report_to_json(bound)},
                    {"strictness_suite", qb::io::trial_report_to_json(strict)},
                    {"chen_shao", qb::io::comparison_report_to_json(chen)}};
  const std::string report_text = qb::io::emit_json(report);

  char buf[256];
  std::string summary;
  std::snprintf(buf, sizeof buf,
                "bound suite:      %d trials x %zu levels, %zu violations, "
                "max delta/delta* = %.12g\n",
                bound.trials_run, cfg.c_grid.size(), bound.violations.size(),
                bound.max_gap_ratio);
  summary += buf;
  std::snprintf(buf, sizeof buf,
                "strictness suite: %d trials, %zu failures, min relative gap "
                "= %.12g\n",
                strict.trials_run, strict.strictness_failures.size(),
                strict.min_strictness_margin);
  summary += buf;
  std::snprintf(buf, sizeof buf,
                "chen-shao suite:  %d trials, %zu coincidence failures, %zu "
                "dominance failures\n",
                chen.trials_run, chen.coincidence_failures.size(),
                chen.dominance_failures.size());
  summary += buf;
  const bool clean = bound.clean() && strict.clean() && chen.clean();
  summary += clean ? "all checks passed\n" : "CHECKS FAILED\n";

  if (!opts.out.empty()) {
    write_text(report_text, opts.out);
    std::cout << summary;
  } else if (opts.format == "json") {
    std::cout << report_text;
  } else {
    std::cout << summary;
  }
  return clean ? 0 : kExitViolations;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantile bounds for truncation CDFs of measures on (0,inf)"};
  app.require_subcommand(1);

  CommonOpts quantile_opts;
  double quantile_c = 0.0;
  CLI::App* cmd_quantile =
      app.add_subcommand("quantile", "exact c-quantile of L for a measure");
  cmd_quantile->add_option("--input", quantile_opts.input,
                           "measure file (JSON, .csv, or - for stdin)")
      ->required();
  cmd_quantile->add_option("--c", quantile_c, "quantile level in (0,1)")
      ->required();
  add_format_option(cmd_quantile, quantile_opts, "table");

  CommonOpts bound_opts;
  double bound_c = 0.0;
  std::optional<double> bound_mu3, bound_mu1;
  CLI::App* cmd_bound =
      app.add_subcommand("bound", "closed-form bound delta* on the quantile");
  cmd_bound->add_option("--c", bound_c, "quantile level in (0,1)")->required();
  cmd_bound->add_option("--mu3", bound_mu3, "moment mu_3 (mean of x)");
  cmd_bound->add_option("--mu1", bound_mu1, "moment mu_1 (mean of 1/x)");
  cmd_bound->add_option("--input", bound_opts.input,
                        "measure file; moments are computed from it");
  add_format_option(cmd_bound, bound_opts, "table");

  CommonOpts compare_opts;
  std::vector<double> compare_c_grid, compare_p_grid;
  std::optional<double> compare_c, compare_p;
  CLI::App* cmd_compare = app.add_subcommand(
      "compare", "exact delta vs pinelis and chen-shao bounds over grids");
  cmd_compare->add_option("--input", compare_opts.input, "measure file")
      ->required();
  cmd_compare->add_option("--c-grid", compare_c_grid,
                          "comma-separated quantile levels")
      ->delimiter(',');
  cmd_compare->add_option("--p-grid", compare_p_grid,
                          "comma-separated moment orders (> 2)")
      ->delimiter(',');
  cmd_compare->add_option("--c", compare_c, "single quantile level to add");
  cmd_compare->add_option("--p", compare_p, "single moment order to add");
  add_format_option(cmd_compare, compare_opts, "table");

  CommonOpts extremal_opts;
  double extremal_c = 0.0, extremal_mu3 = 0.0;
  std::optional<double> extremal_mu1;
  CLI::App* cmd_extremal = app.add_subcommand(
      "extremal", "construct the measure attaining delta = delta*");
  cmd_extremal->add_option("--c", extremal_c, "quantile level in (0,1)")
      ->required();
  cmd_extremal->add_option("--mu3", extremal_mu3, "target mu_3")->required();
  cmd_extremal->add_option("--mu1", extremal_mu1,
                           "target mu_1 (required for c > 1/2)");
  add_format_option(cmd_extremal, extremal_opts, "table");

  CommonOpts mu_xi_opts;
  CLI::App* cmd_mu_xi = app.add_subcommand(
      "mu-xi", "measure induced by random variables with sum E xi^2 = 1");
  cmd_mu_xi->add_option("--input", mu_xi_opts.input,
                        "RV collection file (JSON or - for stdin)")
      ->required();
  add_format_option(cmd_mu_xi, mu_xi_opts, "json");

  CommonOpts verify_opts;
  std::optional<std::uint64_t> verify_seed;
  std::optional<int> verify_trials;
  int verify_threads = 1;
  CLI::App* cmd_verify = app.add_subcommand(
      "verify", "randomized bound/strictness/comparison suites");
  cmd_verify->add_option("--input", verify_opts.input,
                         "trial config JSON (defaults when omitted)");
  cmd_verify->add_option("--seed", verify_seed, "override the config seed");
  cmd_verify->add_option("--trials", verify_trials,
                         "override the config trial count");
  cmd_verify->add_option("--threads", verify_threads,
                         "worker threads (1 = serial)");
  add_format_option(cmd_verify, verify_opts, "table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (cmd_quantile->parsed()) return run_quantile(quantile_opts, quantile_c);
    if (cmd_bound->parsed())
      return run_bound(bound_opts, bound_c, bound_mu3, bound_mu1);
    if (cmd_compare->parsed())
      return run_compare(compare_opts, compare_c_grid, compare_p_grid,
                         compare_c, compare_p);
    if (cmd_extremal->parsed())
      return run_extremal(extremal_opts, extremal_c, extremal_mu3, extremal_mu1);
    if (cmd_mu_xi->parsed()) return run_mu_xi(mu_xi_opts);
    if (cmd_verify->parsed())
      return run_verify(verify_opts, verify_seed, verify_trials, verify_threads);
  } catch (const qb::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitViolations;
  }
  return 0;
}
