#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tamebc/campaign.hpp"

using namespace tamebc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("tamebc_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(TAMEBC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing", "[cli]") {
  const ExperimentConfig c = config_from_json(json::parse(R"({"p": 5, "e": 2, "mode": "descent", "m": 2})"));
  CHECK(c.p == 5);
  CHECK(c.e == 2);
  CHECK(c.f == 1);
  CHECK(c.mode == Mode::Descent);
  CHECK_NOTHROW(validate(c));
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"prime": 5})")), ConfigInvalid);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"p": "five"})")), ConfigInvalid);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"mode": "fast"})")), ConfigInvalid);
  CHECK_THROWS_AS(config_from_json(json::parse("[1, 2]")), ConfigInvalid);

  ExperimentConfig bad;
  bad.p = 3;
  bad.e = 1;
  bad.f = 3;  // p | d
  CHECK_THROWS_AS(validate(bad), ConfigInvalid);
  bad = ExperimentConfig{};
  bad.p = 9;
  CHECK_THROWS_AS(validate(bad), ConfigInvalid);
  bad = ExperimentConfig{};
  bad.e = 3;  // 3 does not divide 2
  CHECK_THROWS_AS(validate(bad), ConfigInvalid);
  bad = ExperimentConfig{};
  bad.n = 3;
  CHECK_THROWS_AS(validate(bad), ConfigInvalid);
  bad = ExperimentConfig{};
  bad.mode = Mode::Descent;
  bad.m = 1;  // m < e
  CHECK_THROWS_AS(validate(bad), ConfigInvalid);

  const ExperimentConfig round = config_from_json(config_to_json(c));
  CHECK(config_to_json(round) == config_to_json(c));
}

TEST_CASE("reports are deterministic", "[cli]") {
  ExperimentConfig c;
  c.p = 3;
  c.e = 2;
  c.n = 2;
  c.sample_count = 4;
  c.seed = 9;
  RunOptions one;
  one.threads = 1;
  RunOptions many;
  many.threads = 3;
  const CampaignReport a = run_experiment(c, one);
  const CampaignReport b = run_experiment(c, many);
  CHECK(records_jsonl(a) == records_jsonl(b));
  CHECK(summary_csv(a) == summary_csv(b));
  const fs::path d1 = scratch("det1");
  const fs::path d2 = scratch("det2");
  write_report(a, d1.string());
  write_report(b, d2.string());
  CHECK(slurp(d1 / "report.jsonl") == slurp(d2 / "report.jsonl"));
  CHECK(slurp(d1 / "summary.csv") == slurp(d2 / "summary.csv"));
  CHECK(summary_csv(a).rfind("case_id,verdict,lhs,rhs,D,depth,certified,ms\n", 0) == 0);

  c.seed = 10;
  CHECK(records_jsonl(run_experiment(c, one)) != records_jsonl(a));
}

TEST_CASE("every report line is JSON with a schema version", "[cli]") {
  for (Mode mode : {Mode::Matching, Mode::Descent, Mode::Invariants, Mode::Orbital}) {
    ExperimentConfig c;
    c.mode = mode;
    c.m = 2;
    c.n = 2;
    c.sample_count = 2;
    const CampaignReport r = run_experiment(c, {});
    std::istringstream in(records_jsonl(r));
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
      const json j = json::parse(line);
      if (lines == 0) CHECK(j.contains("summary"));
      else CHECK(j.at("schema_version") == kSchemaVersion);
      ++lines;
    }
    CHECK(lines == 3);
    INFO(mode_name(mode));
    CHECK(r.all_ok());
  }
}

TEST_CASE("n = 1 matching campaign", "[cli]") {
  for (const auto& [e, f] : std::vector<std::pair<int, int>>{{2, 1}, {1, 2}}) {
    ExperimentConfig c;
    c.p = 5;
    c.e = e;
    c.f = f;
    c.m = 1;
    c.precision = 10;
    c.sample_count = 50;
    c.seed = 3;
    const CampaignReport r = run_experiment(c, {});
    CHECK(r.passed() == 50);
    CHECK(r.certified() == 50);
  }
}

TEST_CASE("selfcheck and fault injection", "[cli]") {
  const SelfcheckReport good = selfcheck({});
  INFO(good.table());
  CHECK(good.all_ok());
  const SelfcheckReport bad = selfcheck({true});
  CHECK_FALSE(bad.all_ok());
}

TEST_CASE("command-line exit codes", "[cli]") {
  const fs::path dir = scratch("cli");
  CHECK(run_cli("selfcheck") == 0);
  CHECK(run_cli("selfcheck --corrupt-zeta") == 1);

  {
    std::ofstream cfg(dir / "ok.json");
    cfg << R"({"p": 3, "e": 2, "f": 1, "n": 1, "m": 1, "sample_count": 8, "seed": 4})";
  }
  const fs::path out = dir / "out";
  CHECK(run_cli("verify-matching --config " + (dir / "ok.json").string() + " --out " + out.string()) == 0);
  CHECK(fs::exists(out / "report.jsonl"));
  CHECK(fs::exists(out / "summary.csv"));
  // descent needs m >= e
  CHECK(run_cli("descend --config " + (dir / "ok.json").string()) == 2);
  {
    std::ofstream cfg(dir / "descent.json");
    cfg << R"({"p": 5, "e": 2, "m": 2, "n": 2, "sample_count": 4})";
  }
  CHECK(run_cli("descend --config " + (dir / "descent.json").string() + " --seed 7 --trace") == 0);

  {
    std::ofstream cfg(dir / "bad.json");
    cfg << R"({"p": 3, "e": 1, "f": 3})";
  }
  CHECK(run_cli("run --config " + (dir / "bad.json").string()) == 2);
  {
    std::ofstream cfg(dir / "typo.json");
    cfg << R"({"sampel_count": 3})";
  }
  CHECK(run_cli("run --config " + (dir / "typo.json").string()) == 2);
  CHECK(run_cli("run --config " + (dir / "missing.json").string()) == 2);
}
