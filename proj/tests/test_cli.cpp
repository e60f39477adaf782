#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code;
  std::string out;
};

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "qbound_cli_test";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string bin() {
  const char* path = std::getenv("QBOUND_BIN");
  REQUIRE_MESSAGE(path != nullptr, "QBOUND_BIN must point at the CLI binary");
  return path;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

RunResult run(const std::string& args) {
  const fs::path out = work_dir() / "stdout.txt";
  const std::string cmd =
      bin() + " " + args + " > " + out.string() + " 2> /dev/null";
  const int status = std::system(cmd.c_str());
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, slurp(out)};
}

fs::path write_two_atom_measure() {
  const fs::path p = work_dir() / "two_atom.json";
  spit(p, R"({"atoms":[{"x":1.0,"w":0.5},{"x":3.0,"w":0.5}]})");
  return p;
}

}  // namespace

TEST_CASE("quantile command prints the exact root") {
  const auto measure = write_two_atom_measure();
  const auto res = run("quantile --input " + measure.string() +
                       " --c 0.75 --format json");
  REQUIRE(res.exit_code == 0);
  const json j = json::parse(res.out);
  CHECK(std::abs(j["delta"].get<double>() - 1.5) <= 1e-12);
  CHECK(j["segment_index"].get<int>() == 1);
  CHECK(std::abs(j["L_at_delta"].get<double>() - 0.75) <= 1e-12);
}

TEST_CASE("quantile command maps error kinds onto exit codes") {
  const fs::path bad = work_dir() / "bad.json";
  spit(bad, R"({"atoms":[{"x":1.0,"w":-0.5},{"x":2.0,"w":1.5}]})");
  CHECK(run("quantile --input " + bad.string() + " --c 0.5").exit_code == 2);

  const auto measure = write_two_atom_measure();
  CHECK(run("quantile --input " + measure.string() + " --c 1.5").exit_code == 3);
  CHECK(run("quantile --input " + measure.string() + " --c 0").exit_code == 3);
  CHECK(run("quantile --input missing.json --c 0.5").exit_code == 2);
  CHECK(run("quantile --c 0.5").exit_code == 2);
}

TEST_CASE("csv measures load with header checking") {
  const fs::path p = work_dir() / "measure.csv";
  spit(p, "x,w\n2.0,1.0\n");
  const auto res = run("quantile --input " + p.string() + " --c 0.25 --format json");
  REQUIRE(res.exit_code == 0);
  CHECK(json::parse(res.out)["delta"].get<double>() == 0.5);

  spit(p, "w,x\n2.0,1.0\n");
  CHECK(run("quantile --input " + p.string() + " --c 0.25").exit_code == 2);
}

TEST_CASE("bound command with explicit moments and with a file") {
  const auto half = run("bound --c 0.5 --mu3 2 --format json");
  REQUIRE(half.exit_code == 0);
  const json j = json::parse(half.out);
  CHECK(j["delta_star"].get<double>() == 1.0);
  CHECK(j["branch"] == "low_c");
  CHECK(j["chen_shao_p3"].get<double>() == 1.0);

  const auto high =
      run("bound --c 0.75 --mu3 2 --mu1 0.6666666666666666 --format json");
  REQUIRE(high.exit_code == 0);
  const json h = json::parse(high.out);
  CHECK(std::abs(h["delta_star"].get<double>() - 1.625) <= 1e-12);
  CHECK(std::abs(h["u_star"].get<double>() - 0.75) <= 1e-12);

  const auto measure = write_two_atom_measure();
  const auto from_file =
      run("bound --c 0.75 --input " + measure.string() + " --format json");
  REQUIRE(from_file.exit_code == 0);
  const json f = json::parse(from_file.out);
  CHECK(std::abs(f["exact_delta"].get<double>() - 1.5) <= 1e-12);
  CHECK(f["gap"].get<double>() > 0.0);

  // moments and file together are ambiguous, not a precedence rule
  CHECK(run("bound --c 0.75 --mu3 2 --input " + measure.string()).exit_code ==
        2);
  // inconsistent inline moments
  CHECK(run("bound --c 0.75 --mu3 1 --mu1 0.5").exit_code == 3);
  // the high branch needs mu1
  CHECK(run("bound --c 0.75 --mu3 1").exit_code == 2);
}

TEST_CASE("compare emits one row per grid point") {
  const auto measure = write_two_atom_measure();
  const auto res = run("compare --input " + measure.string() +
                       " --c-grid 0.5 --p-grid 3 --format csv");
  REQUIRE(res.exit_code == 0);
  std::istringstream lines(res.out);
  std::string header, row, extra;
  REQUIRE(std::getline(lines, header));
  REQUIRE(std::getline(lines, row));
  CHECK(!std::getline(lines, extra));
  CHECK(header == "c,p,delta,pinelis,chen_shao");
  // at (c = 1/2, p = 3) the two bounds coincide
  std::vector<std::string> fields;
  std::istringstream fs_row(row);
  std::string field;
  while (std::getline(fs_row, field, ',')) fields.push_back(field);
  REQUIRE(fields.size() == 5);
  CHECK(fields[3] == fields[4]);

  const auto table = run("compare --input " + measure.string());
  REQUIRE(table.exit_code == 0);
  CHECK(table.out.find("chen_shao") != std::string::npos);
}

TEST_CASE("extremal prints the attaining measure") {
  const auto res = run(
      "extremal --c 0.75 --mu3 2 --mu1 0.6666666666666666 --format json");
  REQUIRE(res.exit_code == 0);
  const json j = json::parse(res.out);
  CHECK(std::abs(j["pi"].get<double>() - 5.0 / 7.0) <= 1e-12);
  CHECK(std::abs(j["u_star"].get<double>() - 0.75) <= 1e-12);
  CHECK(std::abs(j["v_star"].get<double>() - 2.5) <= 1e-12);
  CHECK(std::abs(j["delta"].get<double>() - 1.625) <= 1e-12);
  CHECK(std::abs(j["delta_star"].get<double>() - 1.625) <= 1e-12);
  CHECK(j["measure"]["atoms"].size() == 2);

  const auto low = run("extremal --c 0.3 --mu3 1 --format json");
  REQUIRE(low.exit_code == 0);
  const json l = json::parse(low.out);
  CHECK(l["measure"]["atoms"].size() == 1);
  CHECK(std::abs(l["delta"].get<double>() - 0.3) <= 1e-12);

  CHECK(run("extremal --c 0.75 --mu3 1 --mu1 0.5").exit_code == 3);
  CHECK(run("extremal --c 0.75 --mu3 1").exit_code == 2);
}

TEST_CASE("mu-xi output pipes straight into quantile and bound") {
  const fs::path rv = work_dir() / "rv.json";
  spit(rv, R"({"variables":[
    {"support":[{"v":0.7071067811865476,"p":0.5},{"v":-0.7071067811865476,"p":0.5}]},
    {"support":[{"v":0.7071067811865476,"p":0.5},{"v":-0.7071067811865476,"p":0.5}]}]})");
  const fs::path measure = work_dir() / "mu_xi.json";
  const auto mk = run("mu-xi --input " + rv.string() + " --out " +
                      measure.string());
  REQUIRE(mk.exit_code == 0);
  const json m = json::parse(slurp(measure));
  REQUIRE(m["atoms"].size() == 1);
  CHECK(std::abs(m["atoms"][0]["x"].get<double>() - 0.7071067811865476) <=
        1e-15);

  const auto q = run("quantile --input " + measure.string() +
                     " --c 0.5 --format json");
  REQUIRE(q.exit_code == 0);
  CHECK(std::abs(q.out.find("delta") != std::string::npos ? 0.0 : 1.0) == 0.0);

  const fs::path low_mass = work_dir() / "rv_low.json";
  spit(low_mass, R"({"variables":[
    {"support":[{"v":0.8,"p":0.5},{"v":-0.8,"p":0.5}]}]})");
  CHECK(run("mu-xi --input " + low_mass.string()).exit_code == 3);

  const fs::path bad = work_dir() / "rv_bad.json";
  spit(bad, R"({"variables":[{"support":[{"v":1.0}]}]})");
  CHECK(run("mu-xi --input " + bad.string()).exit_code == 2);
}

TEST_CASE("verify runs clean and respects flag overrides") {
  const fs::path report = work_dir() / "report.json";
  const auto res = run("verify --trials 100 --seed 17 --out " +
                       report.string());
  REQUIRE(res.exit_code == 0);
  CHECK(res.out.find("all checks passed") != std::string::npos);
  const json j = json::parse(slurp(report));
  CHECK(j["bound_suite"]["violations"].empty());
  CHECK(j["strictness_suite"]["strictness_failures"].empty());
  CHECK(j["config"]["n_trials"].get<int>() == 100);
  CHECK(j["config"]["seed"].get<std::uint64_t>() == 17);

  CHECK(run("verify --trials 0").exit_code == 2);

  const fs::path cfg = work_dir() / "cfg.json";
  spit(cfg, R"({"n_trials": 60, "c_grid": [0.25, 0.5, 0.75]})");
  const auto with_cfg = run("verify --input " + cfg.string() + " --format json");
  REQUIRE(with_cfg.exit_code == 0);
  CHECK(json::parse(with_cfg.out)["config"]["n_trials"].get<int>() == 60);

  spit(cfg, R"({"n_trials": 60, "c_grid": [0.25, 1.5]})");
  CHECK(run("verify --input " + cfg.string()).exit_code == 2);
}

TEST_CASE("mu-xi pipes into quantile through stdin") {
  const fs::path rv = work_dir() / "rv_pipe.json";
  spit(rv, R"({"variables":[{"support":[{"v":0.0,"p":0.75},{"v":2.0,"p":0.25}]}]})");
  const fs::path out = work_dir() / "pipe_out.json";
  const std::string cmd = bin() + " mu-xi --input " + rv.string() + " | " +
                          bin() + " quantile --input - --c 0.25 --format json > " +
                          out.string() + " 2> /dev/null";
  REQUIRE(std::system(cmd.c_str()) == 0);
  const json j = json::parse(slurp(out));
  CHECK(j["delta"].get<double>() == 0.5);  // Dirac at 2
}

TEST_CASE("nothing is written to stderr on success") {
  const auto measure = write_two_atom_measure();
  const fs::path err = work_dir() / "stderr.txt";
  const std::string cmd = bin() + " quantile --input " + measure.string() +
                          " --c 0.5 > /dev/null 2> " + err.string();
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(slurp(err).empty());

  const std::string vcmd = bin() + " verify --trials 20 > /dev/null 2> " +
                           err.string();
  REQUIRE(std::system(vcmd.c_str()) == 0);
  CHECK(slurp(err).empty());
}

TEST_CASE("compare accepts single-value level and order flags") {
  const auto measure = write_two_atom_measure();
  const auto res = run("compare --input " + measure.string() +
                       " --c 0.5 --p 3 --format csv");
  REQUIRE(res.exit_code == 0);
  std::istringstream lines(res.out);
  std::string header, row;
  REQUIRE(std::getline(lines, header));
  REQUIRE(std::getline(lines, row));
  CHECK(row.substr(0, 6) == "0.5,3,");
}

TEST_CASE("identical invocations produce identical bytes") {
  const auto measure = write_two_atom_measure();
  const std::string cmd = "compare --input " + measure.string() +
                          " --format csv";
  const auto a = run(cmd);
  const auto b = run(cmd);
  CHECK(a.out == b.out);

  const auto v1 = run("verify --trials 50 --seed 3 --format json");
  const auto v2 = run("verify --trials 50 --seed 3 --format json");
  CHECK(v1.out == v2.out);
}
