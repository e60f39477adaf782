#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "qbound/bounds.hpp"
#include "qbound/measure.hpp"
#include "qbound/verify.hpp"

namespace qb::io {

// Measure schema:      {"atoms": [{"x": <num>, "w": <num>}, ...]}
// RV collection:       {"variables": [{"support": [{"v": <num>, "p": <num>}, ...]}, ...]}
// CSV measures:        header "x,w", one atom per line
// Trial config:        {"seed": ..., "n_trials": ..., "atom_count_range": [min,max],
//                       "position_range": [lo,hi], "c_grid": [...], "p_grid": [...],
//                       "tolerance": ...}; every key optional, unknown keys rejected.
//
// Structural problems throw errc::schema_violation with a field/line
// diagnostic; mass deviations keep their own kind.

DiscreteMeasure measure_from_json(const nlohmann::json& j,
                                  const std::string& context);
DiscreteMeasure measure_from_csv(std::istream& in, const std::string& context);
RVCollection rv_collection_from_json(const nlohmann::json& j,
                                     const std::string& context);
TrialConfig trial_config_from_json(const nlohmann::json& j,
                                   const std::string& context);

// path "-" reads JSON from stdin; a ".csv" suffix selects the CSV reader.
DiscreteMeasure load_measure_file(const std::string& path);
RVCollection load_rv_collection_file(const std::string& path);
TrialConfig load_trial_config_file(const std::string& path);

nlohmann::json measure_to_json(const DiscreteMeasure& m);
nlohmann::json bound_report_to_json(const BoundReport& r);
nlohmann::json trial_report_to_json(const TrialReport& r);
nlohmann::json comparison_report_to_json(const ComparisonReport& r);
nlohmann::json trial_config_to_json(const TrialConfig& cfg);

// 17 significant digits; round-trips every finite double exactly.
std::string format_double(double v);

// Deterministic serialization: keys sorted (nlohmann object order), floats
// via format_double, two-space indentation.
std::string emit_json(const nlohmann::json& j);

}  // namespace qb::io
