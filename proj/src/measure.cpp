#include "qbound/measure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qbound/numeric.hpp"

namespace qb {

namespace {

// inputs within this of unit mass are rounding noise and get renormalized;
// anything beyond is a caller error
constexpr double kMassTolerance = 1e-6;
constexpr double kLogConvexitySlack = 1e-12;

std::string describe(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double compensated_mass(const std::vector<Atom>& atoms) {
  NeumaierSum s;
  for (const Atom& a : atoms) s.add(a.w);
  return s.value();
}

}  // namespace

const char* errc_name(errc code) noexcept {
  switch (code) {
    case errc::empty_measure: return "EmptyMeasure";
    case errc::nonpositive_atom: return "NonpositiveAtom";
    case errc::mass_deviation: return "MassDeviation";
    case errc::log_convexity_violation: return "LogConvexityViolation";
    case errc::invalid_quantile_level: return "InvalidQuantileLevel";
    case errc::nonpositive_argument: return "NonpositiveArgument";
    case errc::nonpositive_tolerance: return "NonpositiveTolerance";
    case errc::moment_inconsistency: return "MomentInconsistency";
    case errc::invalid_order: return "InvalidOrder";
    case errc::invalid_config: return "InvalidConfig";
    case errc::schema_violation: return "SchemaViolation";
  }
  return "UnknownError";
}

DiscreteMeasure DiscreteMeasure::canonicalize(std::vector<Atom> raw_atoms) {
  if (raw_atoms.empty()) raise(errc::empty_measure, "measure has no atoms");
  for (std::size_t i = 0; i < raw_atoms.size(); ++i) {
    const Atom& a = raw_atoms[i];
    if (!(a.x > 0.0) || !std::isfinite(a.x)) {
      raise(errc::nonpositive_atom, "atom " + std::to_string(i) +
                                        " has position " + describe(a.x) +
                                        "; positions must be positive finite");
    }
    if (!(a.w > 0.0) || !std::isfinite(a.w)) {
      raise(errc::nonpositive_atom, "atom " + std::to_string(i) +
                                        " has weight " + describe(a.w) +
                                        "; weights must be positive finite");
    }
  }

  std::sort(raw_atoms.begin(), raw_atoms.end(),
            [](const Atom& a, const Atom& b) { return a.x < b.x; });

  // merge exactly coincident positions; no epsilon merging of nearby atoms
  std::vector<Atom> atoms;
  atoms.reserve(raw_atoms.size());
  for (const Atom& a : raw_atoms) {
    if (!atoms.empty() && atoms.back().x == a.x) {
      atoms.back().w += a.w;
    } else {
      atoms.push_back(a);
    }
  }

  const double mass = compensated_mass(atoms);
  const double deviation = std::abs(mass - 1.0);
  if (deviation > kMassTolerance) {
    raise(errc::mass_deviation,
          "total weight " + describe(mass) + " deviates from 1 by " +
              describe(deviation) + " (tolerance 1e-6)");
  }

  for (Atom& a : atoms) a.w /= mass;

  // push the compensated weight sum onto 1.0 exactly by nudging the largest
  // weight; converges in one or two rounds
  for (int round = 0; round < 32; ++round) {
    const double residual = 1.0 - compensated_mass(atoms);
    if (residual == 0.0) break;
    auto largest =
        std::max_element(atoms.begin(), atoms.end(),
                         [](const Atom& a, const Atom& b) { return a.w < b.w; });
    largest->w += residual;
  }

  DiscreteMeasure m;
  m.atoms_ = std::move(atoms);
  m.input_mass_deviation_ = deviation;
  return m;
}

double moment(const DiscreteMeasure& m, double p) {
  NeumaierSum s;
  if (p == 2.0) {
    for (const Atom& a : m.atoms()) s.add(a.w);
  } else if (p == 3.0) {
    for (const Atom& a : m.atoms()) s.add(a.w * a.x);
  } else if (p == 1.0) {
    for (const Atom& a : m.atoms()) s.add(a.w / a.x);
  } else {
    for (const Atom& a : m.atoms()) s.add(a.w * std::pow(a.x, p - 2.0));
  }
  return s.value();
}

MomentProfile moment_profile(const DiscreteMeasure& m) {
  const MomentProfile profile{moment(m, 1.0), moment(m, 2.0), moment(m, 3.0)};
  if (profile.mu1 * profile.mu3 < 1.0 - kLogConvexitySlack) {
    raise(errc::log_convexity_violation,
          "mu1*mu3 = " + describe(profile.mu1 * profile.mu3) +
              " < 1; impossible for a probability measure, so this is an "
              "arithmetic bug");
  }
  return profile;
}

DiscreteMeasure build_mu_xi(const RVCollection& rvs) {
  if (rvs.variables.empty()) {
    raise(errc::empty_measure, "collection has no random variables");
  }

  NeumaierSum total_second_moment;
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < rvs.variables.size(); ++i) {
    const RandomVariable& var = rvs.variables[i];
    if (var.support.empty()) {
      raise(errc::empty_measure,
            "variable " + std::to_string(i) + " has empty support");
    }
    NeumaierSum prob_mass;
    NeumaierSum second_moment;
    for (std::size_t j = 0; j < var.support.size(); ++j) {
      const RVSupportPoint& pt = var.support[j];
      if (!std::isfinite(pt.value)) {
        raise(errc::nonpositive_atom, "variable " + std::to_string(i) +
                                          " support point " + std::to_string(j) +
                                          " has non-finite value");
      }
      if (!(pt.prob >= 0.0) || !std::isfinite(pt.prob)) {
        raise(errc::nonpositive_atom, "variable " + std::to_string(i) +
                                          " support point " + std::to_string(j) +
                                          " has negative probability " +
                                          describe(pt.prob));
      }
      prob_mass.add(pt.prob);
      second_moment.add(pt.prob * (pt.value * pt.value));
    }
    if (std::abs(prob_mass.value() - 1.0) > kMassTolerance) {
      raise(errc::mass_deviation,
            "variable " + std::to_string(i) + " probabilities sum to " +
                describe(prob_mass.value()) + ", expected 1");
    }
    total_second_moment.add(second_moment.value());
    for (const RVSupportPoint& pt : var.support) {
      if (pt.value != 0.0 && pt.prob > 0.0) {
        atoms.push_back({std::abs(pt.value), pt.prob * (pt.value * pt.value)});
      }
    }
  }

  const double total = total_second_moment.value();
  if (std::abs(total - 1.0) > kMassTolerance) {
    raise(errc::mass_deviation, "sum of E xi_i^2 is " + describe(total) +
                                    ", expected 1 (tolerance 1e-6)");
  }
  return DiscreteMeasure::canonicalize(std::move(atoms));
}

}  // namespace qb
