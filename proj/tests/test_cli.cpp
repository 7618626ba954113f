#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "conesheaf/json_io.hpp"

namespace {

struct CliRun {
  int exit_code = -1;
  std::string output;
};

CliRun run_cli(const std::string& args) {
  static int counter = 0;
  std::string out_path = "/tmp/conesheaf_cli_test_" + std::to_string(counter++) + ".json";
  std::string cmd =
      std::string(CONESHEAF_CLI_PATH) + " " + args + " > " + out_path + " 2>/dev/null";
  int status = std::system(cmd.c_str());
  CliRun run;
  run.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  run.output = ss.str();
  std::remove(out_path.c_str());
  return run;
}

std::string fixture(const std::string& name) {
  return std::string(CONESHEAF_FIXTURE_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("exit code 0 on success") {
  CHECK(run_cli("group_zeta ab --no-timing").exit_code == 0);
  CHECK(run_cli("cone_analyze " + fixture("ex4to3.json") + " --trials 100").exit_code ==
        0);
}

TEST_CASE("exit code 2 on malformed input") {
  CHECK(run_cli("cone_analyze /nonexistent.json").exit_code == 2);
  CHECK(run_cli("group_zeta xyz").exit_code == 2);
  CHECK(run_cli("group_explore " + fixture("ex4to3.json")).exit_code == 2);
}

TEST_CASE("exit code 1 on budget exhaustion, with a partial report") {
  CliRun run = run_cli("cone_analyze " + fixture("ex4to3.json") +
                       " --budget 2 --no-timing --trials 10");
  CHECK(run.exit_code == 1);
  conesheaf::Json report = conesheaf::Json::parse(run.output);
  CHECK(report["verdicts"]["effective_monic"]["status"] == "BUDGET");

  CHECK(run_cli("group_explore " + fixture("s3.json") + " --budget 3").exit_code == 1);
  CHECK(run_cli("ks_search " + fixture("ks18.json") + " --budget 3").exit_code == 1);
}

TEST_CASE("reports carry the schema header and input digests") {
  CliRun run = run_cli("cone_analyze " + fixture("ex4to3.json") + " --no-timing");
  conesheaf::Json report = conesheaf::Json::parse(run.output);
  CHECK(report["schema"] == "conesheaf/1");
  CHECK(report["inputs"].size() == 1);
  for (const auto& [path, digest] : report["inputs"].items()) {
    CHECK(digest.get<std::string>().starts_with("fnv1a64:"));
  }
}

TEST_CASE("fc_apply with an identity table echoes the input") {
  CliRun run = run_cli("fc_apply " + fixture("fc_identity.json") + " --no-timing");
  REQUIRE(run.exit_code == 0);
  conesheaf::Json report = conesheaf::Json::parse(run.output);
  conesheaf::Json input = conesheaf::load_json_file(fixture("fc_identity.json"));
  conesheaf::CMatrix in = conesheaf::parse_matrix(input["matrix"]);
  conesheaf::CMatrix out = conesheaf::parse_matrix(report["verdicts"]["result"]);
  CHECK((in - out).norm() <= 1e-9);
}

TEST_CASE("reports to --out files match stdout reports") {
  std::string out_path = "/tmp/conesheaf_out_test.json";
  CliRun to_stdout = run_cli("group_zeta abab --no-timing");
  CliRun to_file = run_cli("group_zeta abab --no-timing --out " + out_path);
  CHECK(to_file.output.empty());
  std::ifstream in(out_path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == to_stdout.output);
  std::remove(out_path.c_str());
}
