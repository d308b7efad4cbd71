#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "experiment_config.hpp"
#include "runner.hpp"

using namespace remsamp_cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json base_config() {
  return json::parse(R"({
    "channel": {"alpha": 0.3, "delay": {"kind": "constant", "c": 6}},
    "sim": {"horizon": 2e4, "replications": 4, "seed": 7},
    "policies": ["zerowait"]
  })");
}

bool has_error(const ParseResult& r, const std::string& needle) {
  for (const auto& e : r.errors) {
    if (e.find(needle) != std::string::npos) return true;
  }
  return false;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.push_back("");
    rows.push_back(f);
  }
  return rows;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "remsamp_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(REMSAMP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("a valid config parses with defaults filled in") {
  const ParseResult r = parse_config(base_config());
  REQUIRE(r.ok());
  CHECK(r.config.alpha == 0.3);
  CHECK(r.config.delay.kind == "constant");
  CHECK(r.config.sim.seed == 7);
  CHECK(r.config.solver.grid_nodes == 2001);
  CHECK(r.config.policies == std::vector<std::string>{"zerowait"});
  CHECK(r.config.wants("zerowait"));
  CHECK_FALSE(r.config.wants("optimal"));
  const json eff = to_json(r.config);
  CHECK(eff["solver"]["k1"].is_null());
  CHECK(eff["sim"]["horizon"] == 2e4);
}

TEST_CASE("invalid configs are rejected with every violation listed") {
  json c = base_config();
  c["channel"]["alpha"] = 1.0;
  c["channel"]["delay"]["c"] = -2;
  c["sim"]["replications"] = 1;
  c["solver"] = {{"eps1", 0}, {"grid_nodes", 100}, {"bogus", 1}};
  c["policies"] = {"optimal", "fastest"};
  const ParseResult r = parse_config(c);
  CHECK_FALSE(r.ok());
  CHECK(has_error(r, "alpha must lie in [0, 1)"));
  CHECK(has_error(r, "channel.delay.c: must be positive"));
  CHECK(has_error(r, "sim.replications"));
  CHECK(has_error(r, "solver.eps1"));
  CHECK(has_error(r, "solver.grid_nodes"));
  CHECK(has_error(r, "unknown key \"bogus\""));
  CHECK(has_error(r, "policies: entries must be"));
  CHECK(r.errors.size() >= 7);

  json s = base_config();
  s["sweep"] = {{"parameter", "sigma"}, {"values", {0.5, 1.0}}};
  CHECK(has_error(parse_config(s), "sigma sweeps need a lognormal delay"));
  s["sweep"] = {{"parameter", "alpha"}, {"values", {0.2, 1.2}}};
  CHECK(has_error(parse_config(s), "alpha must lie in [0, 1)"));
  s["sweep"] = {{"parameter", "alpha"}, {"values", json::array()}};
  CHECK(has_error(parse_config(s), "non-empty array"));

  json d = base_config();
  d["sim"]["dt"] = 0.5;
  CHECK(has_error(parse_config(d), "dt must not exceed 1/100"));
  json m = base_config();
  m["channel"].erase("delay");
  CHECK(has_error(parse_config(m), "channel.delay: missing"));
  json t = base_config();
  t["sim"]["seed"] = "one";
  CHECK(has_error(parse_config(t), "sim.seed: must be an integer"));
}

TEST_CASE("number formatting and CSV layout") {
  CHECK(format_number(11.0) == "11");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(csv_header() ==
        "sweep_param,sweep_value,mse_opt,v_opt,age_opt,age_threshold,sim_mse_optimal,"
        "sim_mse_age,sim_mse_zerowait,ci_optimal,ci_age,ci_zerowait,runtime_s\n");
  PointResult p;
  p.sweep_param = "alpha";
  p.sweep_value = 0.3;
  p.age = {9.0, 3.0, 1};
  p.sims["zerowait"] = remsamp_sim_result{9.1, 9.0, 0, 0, 0.05, 0, 0, 0, 0, 0, 0};
  p.runtime_s = 1.5;
  CHECK(csv_row(p, false) == "alpha,0.3,,,9,3,,,9.1,,,0.05,\n");
  CHECK(csv_row(p, true) == "alpha,0.3,,,9,3,,,9.1,,,0.05,1.5\n");
}

TEST_CASE("alpha sweep writes one row per point, reproducibly") {
  json c = base_config();
  c["policies"] = {"optimal", "age", "zerowait"};
  c["sweep"] = {{"parameter", "alpha"}, {"values", {0.0, 0.3, 0.5}}};
  const ParseResult r = parse_config(c);
  REQUIRE(r.ok());
  const fs::path out1 = scratch("alpha1.csv");
  const fs::path out2 = scratch("alpha2.csv");
  std::stringstream err;
  REQUIRE(cmd_sweep(r.config, out1.string(), "", 1, err) == 0);
  REQUIRE(cmd_sweep(r.config, out2.string(), "", 2, err) == 0);
  CHECK(slurp(out1) == slurp(out2));

  const auto rows = read_csv(out1);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].size() == csv_columns().size());
  double prev_mse = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == csv_columns().size());
    CHECK(rows[i][0] == "alpha");
    const double mse = std::stod(rows[i][2]);
    const double age = std::stod(rows[i][4]);
    CHECK(mse < age);
    CHECK(mse > prev_mse);
    prev_mse = mse;
    CHECK(rows[i][12].empty());
    for (std::size_t k = 6; k <= 11; ++k) CHECK_FALSE(rows[i][k].empty());
  }
  CHECK(std::stod(rows[1][2]) == doctest::Approx(8.3882955715).epsilon(1e-6));

  const fs::path summary = scratch("alpha1.summary.json");
  REQUIRE(fs::exists(summary));
  const json js = json::parse(slurp(summary));
  CHECK(js["points"].size() == 3);
}

TEST_CASE("sigma sweep with zero-wait only") {
  json c = base_config();
  c["channel"] = {{"alpha", 0.65}, {"delay", {{"kind", "lognormal"}, {"sigma", 1.0}}}};
  c["sweep"] = {{"parameter", "sigma"}, {"values", {0.5, 1.0, 1.5}}};
  c["sim"]["horizon"] = 5e4;
  const ParseResult r = parse_config(c);
  REQUIRE(r.ok());
  const fs::path out = scratch("sigma.csv");
  std::stringstream err;
  REQUIRE(cmd_sweep(r.config, out.string(), scratch("sigma.json").string(), 1, err) == 0);
  const auto rows = read_csv(out);
  REQUIRE(rows.size() == 4);
  double prev_age = 0, prev_sim = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i][2].empty());
    CHECK(rows[i][6].empty());
    CHECK(rows[i][7].empty());
    const double age = std::stod(rows[i][4]);
    const double sim = std::stod(rows[i][8]);
    CHECK(age > prev_age);
    CHECK(sim > prev_sim);
    prev_age = age;
    prev_sim = sim;
  }
}

TEST_CASE("the command-line binary") {
  const fs::path good = scratch("good.json");
  const fs::path bad = scratch("bad.json");
  std::ofstream(good) << base_config().dump();
  json b = base_config();
  b["channel"]["alpha"] = -0.5;
  std::ofstream(bad) << b.dump();

  CHECK(run_cli("validate --config " + good.string()) == 0);
  CHECK(run_cli("validate --config " + bad.string()) == 2);
  CHECK(run_cli("validate --config " + scratch("missing.json").string()) != 0);
  CHECK(run_cli("solve-age --config " + good.string() + " --out " + scratch("age.json").string()) == 0);
  const json age = json::parse(slurp(scratch("age.json")));
  CHECK(age["age_opt"].get<double>() == doctest::Approx(6.0 + 36.0 * 1.3 / 0.49 / (2 * 6.0 / 0.7)));

  const fs::path a = scratch("sim_a.json"), c = scratch("sim_c.json");
  CHECK(run_cli("simulate --config " + good.string() + " --out " + a.string()) == 0);
  CHECK(run_cli("simulate --config " + good.string() + " --out " + c.string() + " --seed 8") == 0);
  CHECK(slurp(a) != slurp(c));
  CHECK(run_cli("sweep --config " + bad.string()) == 2);
  CHECK(run_cli("frobnicate") != 0);
}
