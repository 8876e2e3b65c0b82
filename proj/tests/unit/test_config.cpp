#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "nlbranch/config.hpp"
#include "nlbranch/errors.hpp"
#include "nlbranch/runner.hpp"

using namespace nlbranch;

namespace {

int run_cli(const std::string& args) {
  const int rc = std::system((std::string(NLBRANCH_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("flat config with comments") {
  const Config cfg = Config::parse_flat("# comment\nmech.c1 = 2.5\n\nprobes = 0.1;0.2 # trailing\n");
  CHECK(cfg.get_double("mech.c1") == 2.5);
  CHECK(cfg.get_points("probes").size() == 2);
  CHECK(cfg.get("sim.seed") == "1");
  CHECK_THROWS_AS((void)Config::parse_flat("no equals sign"), ConfigError);
  CHECK_THROWS_AS((void)Config::parse_flat("unknown.key = 1"), ConfigError);
}

TEST_CASE("JSON config is flattened") {
  const Config cfg = Config::parse_json(R"({"mech": {"c1": 0.5, "b": "2:1"}, "domain": {"center": [0, 0.5]}})");
  CHECK(cfg.get_double("mech.c1") == 0.5);
  CHECK(cfg.get("mech.b") == "2:1");
  CHECK(cfg.get_list("domain.center") == std::vector<double>{0.0, 0.5});
  CHECK_THROWS_AS((void)Config::parse_json("[1, 2]"), ConfigError);
}

TEST_CASE("typed accessors") {
  Config cfg;
  cfg.set("probes", "0:1:5");
  const auto pts = cfg.get_points("probes");
  REQUIRE(pts.size() == 5);
  CHECK(pts[2][0] == doctest::Approx(0.5));
  cfg.set("probes", "0.1,0.2;0.3,0.4");
  CHECK(cfg.get_points("probes")[1] == Point{0.3, 0.4});
  cfg.set("guard.enabled", "off");
  CHECK_FALSE(cfg.get_bool("guard.enabled"));
  cfg.set("sim.seed", "1.5");
  CHECK_THROWS_AS((void)cfg.get_int("sim.seed"), ConfigError);
  cfg.set("mech.c1", "abc");
  CHECK_THROWS_AS((void)cfg.get_double("mech.c1"), ConfigError);
}

TEST_CASE("environment overrides") {
  CHECK(Config::env_name("sim.n_realizations") == "NLBRANCH_SIM_N_REALIZATIONS");
  setenv("NLBRANCH_MECH_C1", "0.75", 1);
  Config cfg;
  cfg.apply_env();
  unsetenv("NLBRANCH_MECH_C1");
  CHECK(cfg.get_double("mech.c1") == 0.75);
}

TEST_CASE("merge only copies explicit keys") {
  Config base;
  base.set("mech.c1", "3");
  Config over;
  over.set("sim.seed", "42");
  base.merge(over);
  CHECK(base.get("mech.c1") == "3");
  CHECK(base.get("sim.seed") == "42");
}

TEST_CASE("presets") {
  for (const std::string& name : {"flow-composition", "disk-jump", "scaling-invariance"}) {
    const Config cfg = preset(name);
    CHECK(cfg.has("sim.seed"));
    CHECK_NOTHROW((void)build_model(cfg));
  }
  CHECK(preset_names().size() == 9);
  CHECK_THROWS_AS((void)preset("nope"), ConfigError);
}

TEST_CASE("preset dump round-trips") {
  const Config a = preset("kpp-interval");
  const Config b = Config::parse_flat(a.dump());
  CHECK(a.dump() == b.dump());
}

TEST_CASE("invalid r exits with a machine-readable reason") {
  Config cfg = preset("kpp-interval");
  cfg.set("mech.r", "2");
  cfg.set("sim.n_realizations", "10");
  const RunOutput out = run("solve", cfg, 1);
  CHECK(out.status == 2);
  CHECK(out.summary["reason"] == "offspring_condition_violated");
}

TEST_CASE("solve CSV layout") {
  Config cfg = preset("linear-interval");
  cfg.set("probes", "0.5");
  cfg.set("sim.n_realizations", "200");
  const RunOutput out = run("solve", cfg, 1);
  REQUIRE(out.status == 0);
  std::istringstream in(out.csv);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "x,estimate,stderr,n_effective,truncated_fraction,seed");
  CHECK(row.rfind("0.5,", 0) == 0);
  CHECK(row.substr(row.rfind(',') + 1) == "1001");
  CHECK(out.summary["seed"] == 1001);
}

TEST_CASE("oracle command") {
  Config cfg = preset("kpp-interval");
  const RunOutput out = run("oracle", cfg, 1);
  REQUIRE(out.status == 0);
  CHECK(out.summary["residual"].get<double>() < 1e-6);
}

TEST_CASE("unknown command and bad config") {
  CHECK(run("bogus", Config{}, 1).status == 3);
  Config cfg;
  cfg.set("domain.kind", "torus");
  CHECK(run("solve", cfg, 1).status == 3);
}

TEST_CASE("command-line exit codes and outputs") {
  CHECK(run_cli("preset --list") == 0);
  CHECK(run_cli("solve --preset kpp-interval --set mech.r=2") == 2);
  CHECK(run_cli("solve --preset nope") == 3);
  const auto dir = std::filesystem::temp_directory_path() / "nlbranch_cli_test";
  std::filesystem::remove_all(dir);
  CHECK(run_cli("exitkernel --preset flow-exit --out " + dir.string()) == 0);
  CHECK(std::filesystem::exists(dir / "exitkernel.csv"));
  CHECK(std::filesystem::exists(dir / "exitkernel.json"));
  std::filesystem::remove_all(dir);
}
