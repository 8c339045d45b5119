#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "dyadlab/cli.hpp"
#include "dyadlab/errors.hpp"

using namespace dyadlab;
using namespace dyadlab::cli;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  std::string path = std::string("./") + name;
  std::ofstream out(path);
  out << content;
  return path;
}

const std::string* find(const Record& r, const std::string& key) {
  for (const auto& [k, v] : r.fields) {
    if (k == key) return &v;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("typed config accessors and their failure modes") {
  Config cfg;
  cfg.set("depth", "4");
  cfg.set("tol", "1e-9");
  cfg.set("p_list", "1.5, 2,4");
  cfg.set("bad", "xyz");
  CHECK(cfg.get_int("depth", 0) == 4);
  CHECK(cfg.get_int("missing", 7) == 7);
  CHECK(cfg.get_double("tol", 0.0) == doctest::Approx(1e-9));
  CHECK(cfg.get_doubles("p_list", "") == std::vector<double>{1.5, 2.0, 4.0});
  CHECK(cfg.get_strings("spaces", "scalar,l2x2") ==
        std::vector<std::string>{"scalar", "l2x2"});
  CHECK_THROWS_AS(cfg.get_int("bad", 0), MalformedInputError);
  CHECK_THROWS_AS(cfg.get_double("bad", 0.0), MalformedInputError);
}

TEST_CASE("config files parse key=value lines with comments") {
  std::string path = write_temp("cfg_ok.cfg",
                                "# comment line\n"
                                "depth = 3\n"
                                "tol=1e-8   # trailing comment\n"
                                "\n"
                                "space_list = scalar, l2x2\n");
  Config cfg = load_config_file(path);
  CHECK(cfg.get_int("depth", 0) == 3);
  CHECK(cfg.get_double("tol", 0.0) == doctest::Approx(1e-8));
  CHECK(cfg.get("space_list") == "scalar, l2x2");

  std::string broken = write_temp("cfg_bad.cfg", "depth 3\n");
  CHECK_THROWS_AS(load_config_file(broken), MalformedInputError);
  CHECK_THROWS_AS(load_config_file("./no_such_file.cfg"), MalformedInputError);
}

TEST_CASE("records serialize to CSV and JSON with 17 significant digits") {
  Record r;
  r.put("experiment", "demo");
  r.put("value", 0.1 + 0.2);
  r.put("count", static_cast<long long>(3));
  r.put("pass", true);
  r.put("quoted", "a,b");
  std::vector<Record> records{r};

  std::string csv = to_csv(records);
  CHECK(csv.find("experiment,value,count,pass,quoted") == 0);
  CHECK(csv.find("0.30000000000000004") != std::string::npos);
  CHECK(csv.find("\"a,b\"") != std::string::npos);

  std::string json = to_json(records);
  CHECK(json.find("\"value\": \"0.30000000000000004\"") != std::string::npos);

  // 17 significant digits round-trip the double exactly
  double parsed = std::stod("0.30000000000000004");
  CHECK(parsed == 0.1 + 0.2);
}

TEST_CASE("defaults exist for every subcommand and unknown names fail") {
  for (const std::string& name : subcommands()) {
    Config cfg = defaults_for(name);
    CHECK(cfg.has("seed"));
    CHECK(cfg.has("format"));
  }
  CHECK_THROWS_AS(defaults_for("bogus"), MalformedInputError);
  CHECK_THROWS_AS(run("bogus", Config{}), MalformedInputError);
}

TEST_CASE("verification subcommands run green on small configurations") {
  {
    Config cfg = defaults_for("verify-lemma");
    RunResult r = run("verify-lemma", cfg);
    CHECK(r.exit_code == 0);
    REQUIRE(r.records.size() == 1);
    CHECK(*find(r.records[0], "pass") == "1");
    CHECK(find(r.records[0], "cfg_seed") != nullptr);  // records echo their config
  }
  {
    Config cfg = defaults_for("verify-distribution");
    cfg.set("depth", "3");
    cfg.set("trials", "2");
    RunResult r = run("verify-distribution", cfg);
    CHECK(r.exit_code == 0);
    CHECK(r.records.size() == 4);
  }
  {
    Config cfg = defaults_for("verify-weak-form");
    cfg.set("trials", "5");
    cfg.set("depth", "3");
    cfg.set("vector_depth", "2");
    RunResult r = run("verify-weak-form", cfg);
    CHECK(r.exit_code == 0);
    REQUIRE(r.records.size() == 2);
    CHECK(*find(r.records[1], "pass") == "1");
  }
}

TEST_CASE("estimate-norms emits one self-describing row per case") {
  Config cfg = defaults_for("estimate-norms");
  cfg.set("p_list", "2");
  cfg.set("space_list", "scalar,l2x2");
  cfg.set("depth", "2");
  cfg.set("grid", "32");
  cfg.set("vector_grid", "32");
  cfg.set("restarts", "3");
  cfg.set("iters", "200");
  RunResult r = run("estimate-norms", cfg);
  CHECK(r.exit_code == 0);
  REQUIRE(r.records.size() == 2);
  for (const Record& rec : r.records) {
    CHECK(find(rec, "s_lower") != nullptr);
    CHECK(find(rec, "h_lower") != nullptr);
    CHECK(find(rec, "ratio") != nullptr);
    CHECK(*find(rec, "pass") == "1");
    CHECK(find(rec, "cfg_p_list") != nullptr);
  }
}

TEST_CASE("identical configuration and seed reproduce identical values") {
  Config cfg = defaults_for("verify-weak-form");
  cfg.set("trials", "3");
  cfg.set("depth", "2");
  cfg.set("vector_depth", "2");
  cfg.set("seed", "42");
  RunResult a = run("verify-weak-form", cfg);
  RunResult b = run("verify-weak-form", cfg);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    REQUIRE(a.records[i].fields.size() == b.records[i].fields.size());
    for (std::size_t f = 0; f < a.records[i].fields.size(); ++f) {
      if (a.records[i].fields[f].first == "wall_ms") continue;
      CHECK(a.records[i].fields[f].second == b.records[i].fields[f].second);
    }
  }
}

TEST_CASE("materialize dumps the matrix rows") {
  Config cfg = defaults_for("materialize");
  cfg.set("depth", "1");
  cfg.set("op", "s0");
  RunResult r = run("materialize", cfg);
  CHECK(r.exit_code == 0);
  REQUIRE(r.records.size() == 1);
  CHECK(*find(r.records[0], "rows") == "4");
  CHECK(find(r.records[0], "row0") != nullptr);
  CHECK(find(r.records[0], "row3") != nullptr);
}
