#include "qbound/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace qb::io {

using nlohmann::json;

namespace {

[[noreturn]] void schema_fail(const std::string& context,
                              const std::string& what) {
  raise(errc::schema_violation, context + ": " + what);
}

double require_number(const json& j, const std::string& where) {
  if (!j.is_number()) schema_fail(where, "expected a number");
  return j.get<double>();
}

const json& require_member(const json& j, const char* key,
                           const std::string& where) {
  if (!j.is_object()) schema_fail(where, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) {
    schema_fail(where, std::string("missing field \"") + key + "\"");
  }
  return *it;
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> keys,
                         const std::string& where) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : keys) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) schema_fail(where, "unknown field \"" + item.key() + "\"");
  }
}

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_csv_number(const std::string& token, const std::string& where) {
  const std::string t = trim(token);
  if (t.empty()) schema_fail(where, "empty number field");
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) {
    schema_fail(where, "cannot parse number from \"" + t + "\"");
  }
  return v;
}

json parse_json_text(const std::string& text, const std::string& context) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    schema_fail(context, e.what());
  }
}

std::string read_stream(std::istream& in) {
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string read_input(const std::string& path) {
  if (path == "-") return read_stream(std::cin);
  std::ifstream f(path);
  if (!f) {
    raise(errc::schema_violation, path + ": cannot open file");
  }
  return read_stream(f);
}

bool has_csv_suffix(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
}

// canonicalize() rejects structurally bad atoms with its own kinds; when the
// atoms came from a file those are schema problems and exit with code 2,
// while a mass deviation keeps its domain meaning
DiscreteMeasure canonicalize_from_file(std::vector<Atom> atoms,
                                       const std::string& context) {
  try {
    return DiscreteMeasure::canonicalize(std::move(atoms));
  } catch (const error& e) {
    if (e.code() == errc::nonpositive_atom || e.code() == errc::empty_measure) {
      schema_fail(context, e.what());
    }
    throw;
  }
}

json violations_to_json(const std::vector<Violation>& violations) {
  json arr = json::array();
  for (const Violation& v : violations) {
    arr.push_back({{"trial", v.trial},
                   {"check", v.check},
                   {"c", v.c},
                   {"delta", v.delta},
                   {"delta_star", v.delta_star},
                   {"measure", measure_to_json(v.measure)}});
  }
  return arr;
}

json rows_to_json(const std::vector<ComparisonRow>& rows) {
  json arr = json::array();
  for (const ComparisonRow& r : rows) {
    arr.push_back({{"trial", r.trial},
                   {"c", r.c},
                   {"p", r.p},
                   {"delta", r.delta},
                   {"pinelis", r.pinelis},
                   {"chen_shao", r.chen_shao}});
  }
  return arr;
}

void emit(const json& j, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  const std::string pad_in(static_cast<std::size_t>(depth + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t i = 0;
      for (const auto& item : j.items()) {
        out += pad_in;
        out += json(item.key()).dump();
        out += ": ";
        emit(item.value(), out, depth + 1);
        if (++i != j.size()) out += ',';
        out += '\n';
      }
      out += pad;
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        out += pad_in;
        emit(j[i], out, depth + 1);
        if (i + 1 != j.size()) out += ',';
        out += '\n';
      }
      out += pad;
      out += ']';
      return;
    }
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

DiscreteMeasure measure_from_json(const json& j, const std::string& context) {
  const json& atoms_json = require_member(j, "atoms", context);
  reject_unknown_keys(j, {"atoms"}, context);
  if (!atoms_json.is_array()) schema_fail(context, "\"atoms\" must be an array");
  std::vector<Atom> atoms;
  atoms.reserve(atoms_json.size());
  for (std::size_t i = 0; i < atoms_json.size(); ++i) {
    const std::string where = context + ": atoms[" + std::to_string(i) + "]";
    const json& a = atoms_json[i];
    if (!a.is_object()) schema_fail(where, "expected an object");
    reject_unknown_keys(a, {"x", "w"}, where);
    atoms.push_back({require_number(require_member(a, "x", where), where + ".x"),
                     require_number(require_member(a, "w", where), where + ".w")});
  }
  if (atoms.empty()) schema_fail(context, "\"atoms\" must not be empty");
  return canonicalize_from_file(std::move(atoms), context);
}

DiscreteMeasure measure_from_csv(std::istream& in, const std::string& context) {
  std::string line;
  if (!std::getline(in, line)) schema_fail(context, "empty file");
  {
    std::string header = trim(line);
    header.erase(std::remove(header.begin(), header.end(), ' '), header.end());
    if (header != "x,w") {
      schema_fail(context, "line 1: header must be \"x,w\", got \"" +
                               trim(line) + "\"");
    }
  }
  std::vector<Atom> atoms;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const std::string where = context + ": line " + std::to_string(line_no);
    const std::size_t comma = t.find(',');
    if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos) {
      schema_fail(where, "expected exactly two comma-separated fields");
    }
    atoms.push_back({parse_csv_number(t.substr(0, comma), where),
                     parse_csv_number(t.substr(comma + 1), where)});
  }
  if (atoms.empty()) schema_fail(context, "no atom rows after the header");
  return canonicalize_from_file(std::move(atoms), context);
}

RVCollection rv_collection_from_json(const json& j, const std::string& context) {
  const json& vars = require_member(j, "variables", context);
  reject_unknown_keys(j, {"variables"}, context);
  if (!vars.is_array() || vars.empty()) {
    schema_fail(context, "\"variables\" must be a nonempty array");
  }
  RVCollection rvs;
  rvs.variables.reserve(vars.size());
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const std::string vwhere = context + ": variables[" + std::to_string(i) + "]";
    const json& support = require_member(vars[i], "support", vwhere);
    reject_unknown_keys(vars[i], {"support"}, vwhere);
    if (!support.is_array() || support.empty()) {
      schema_fail(vwhere, "\"support\" must be a nonempty array");
    }
    RandomVariable rv;
    rv.support.reserve(support.size());
    for (std::size_t k = 0; k < support.size(); ++k) {
      const std::string where = vwhere + ".support[" + std::to_string(k) + "]";
      const json& pt = support[k];
      if (!pt.is_object()) schema_fail(where, "expected an object");
      reject_unknown_keys(pt, {"v", "p"}, where);
      rv.support.push_back(
          {require_number(require_member(pt, "v", where), where + ".v"),
           require_number(require_member(pt, "p", where), where + ".p")});
    }
    rvs.variables.push_back(std::move(rv));
  }
  return rvs;
}

TrialConfig trial_config_from_json(const json& j, const std::string& context) {
  if (!j.is_object()) schema_fail(context, "expected an object");
  reject_unknown_keys(j,
                      {"seed", "n_trials", "atom_count_range", "position_range",
                       "c_grid", "p_grid", "tolerance"},
                      context);
  TrialConfig cfg = TrialConfig::defaults();
  if (j.contains("seed")) {
    const json& s = j["seed"];
    if (!s.is_number_unsigned()) {
      schema_fail(context, "\"seed\" must be a nonnegative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  if (j.contains("n_trials")) {
    const json& t = j["n_trials"];
    if (!t.is_number_integer()) {
      schema_fail(context, "\"n_trials\" must be an integer");
    }
    cfg.n_trials = t.get<int>();
  }
  auto read_pair = [&](const char* key, auto& lo, auto& hi) {
    const json& pair = j[key];
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
        !pair[1].is_number()) {
      schema_fail(context, std::string("\"") + key +
                               "\" must be a two-element numeric array");
    }
    using T = std::remove_reference_t<decltype(lo)>;
    lo = pair[0].get<T>();
    hi = pair[1].get<T>();
  };
  if (j.contains("atom_count_range")) {
    const json& pair = j["atom_count_range"];
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
        !pair[1].is_number_integer()) {
      schema_fail(context,
                  "\"atom_count_range\" must be a two-element integer array");
    }
    cfg.atom_count_min = pair[0].get<int>();
    cfg.atom_count_max = pair[1].get<int>();
  }
  if (j.contains("position_range")) {
    read_pair("position_range", cfg.position_lo, cfg.position_hi);
  }
  auto read_grid = [&](const char* key, std::vector<double>& grid) {
    const json& g = j[key];
    if (!g.is_array()) {
      schema_fail(context, std::string("\"") + key + "\" must be an array");
    }
    grid.clear();
    for (const json& v : g) {
      grid.push_back(require_number(v, context + ": " + key));
    }
  };
  if (j.contains("c_grid")) read_grid("c_grid", cfg.c_grid);
  if (j.contains("p_grid")) read_grid("p_grid", cfg.p_grid);
  if (j.contains("tolerance")) {
    cfg.tolerance = require_number(j["tolerance"], context + ": tolerance");
  }
  cfg.validate();
  return cfg;
}

DiscreteMeasure load_measure_file(const std::string& path) {
  if (has_csv_suffix(path)) {
    std::ifstream f(path);
    if (!f) raise(errc::schema_violation, path + ": cannot open file");
    return measure_from_csv(f, path);
  }
  return measure_from_json(parse_json_text(read_input(path), path), path);
}

RVCollection load_rv_collection_file(const std::string& path) {
  return rv_collection_from_json(parse_json_text(read_input(path), path), path);
}

TrialConfig load_trial_config_file(const std::string& path) {
  return trial_config_from_json(parse_json_text(read_input(path), path), path);
}

json measure_to_json(const DiscreteMeasure& m) {
  json atoms = json::array();
  for (const Atom& a : m.atoms()) {
    atoms.push_back({{"x", a.x}, {"w", a.w}});
  }
  return json{{"atoms", std::move(atoms)}};
}

json bound_report_to_json(const BoundReport& r) {
  json j{{"c", r.c},
         {"delta_star", r.delta_star},
         {"branch", r.branch == BoundBranch::low_c ? "low_c" : "high_c"},
         {"chen_shao_p3", r.chen_shao_p3}};
  if (r.u_star) j["u_star"] = *r.u_star;
  if (r.exact_delta) j["exact_delta"] = *r.exact_delta;
  if (r.gap) j["gap"] = *r.gap;
  return j;
}

json trial_report_to_json(const TrialReport& r) {
  json j{{"trials_run", r.trials_run},
         {"max_gap_ratio", r.max_gap_ratio},
         {"violations", violations_to_json(r.violations)},
         {"strictness_failures", violations_to_json(r.strictness_failures)}};
  if (r.has_strictness_margin) {
    j["min_strictness_margin"] = r.min_strictness_margin;
  }
  return j;
}

json comparison_report_to_json(const ComparisonReport& r) {
  json j{{"trials_run", r.trials_run},
         {"coincidence_failures", rows_to_json(r.coincidence_failures)},
         {"dominance_failures", rows_to_json(r.dominance_failures)}};
  if (!r.rows.empty()) j["rows"] = rows_to_json(r.rows);
  return j;
}

json trial_config_to_json(const TrialConfig& cfg) {
  return json{{"seed", cfg.seed},
              {"n_trials", cfg.n_trials},
              {"atom_count_range", {cfg.atom_count_min, cfg.atom_count_max}},
              {"position_range", {cfg.position_lo, cfg.position_hi}},
              {"c_grid", cfg.c_grid},
              {"p_grid", cfg.p_grid},
              {"tolerance", cfg.tolerance}};
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string emit_json(const json& j) {
  std::string out;
  emit(j, out, 0);
  out += '\n';
  return out;
}

}  // namespace qb::io
