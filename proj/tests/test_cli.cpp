// End-to-end checks of the mtlab command line via popen.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "mtlab/mtlab.hpp"

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const std::string command = std::string(MTLAB_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  char buffer[4096];
  std::size_t n = 0;
  while ((n = std::fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
    result.out.append(buffer, n);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("mtlab_cli_test_" + name);
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path);
  REQUIRE(out.good());
  out << body;
}

const std::string kSmallTable =
    "index,status,z,p\n"
    "0,FalseNull,2.3,0.01\n"
    "1,TrueNull,1.7,0.04\n"
    "2,TrueNull,0.8,0.2\n"
    "3,TrueNull,-1.2,0.9\n";

}  // namespace

TEST_CASE("cli: limit prints lambda_inf,u_limit") {
  const auto result = run_cli("limit --mu 2 --pi1 0.1 --gamma 0.1");
  REQUIRE(result.exit_code == 0);
  const mtlab::LimitParams lp(mtlab::EffectSize(2.0), 0.1, mtlab::Probability(0.1));
  const std::string expected = mtlab::format_real(mtlab::lambda_infinity(lp)) + "," +
                               mtlab::format_real(mtlab::bh_limit_threshold(lp).value()) + "\n";
  CHECK(result.out == expected);
}

TEST_CASE("cli: simulate emits the field table deterministically") {
  const auto once = run_cli("simulate --m 10 --pi1 0.3 --mu 2 --seed 5");
  REQUIRE(once.exit_code == 0);
  const auto again = run_cli("simulate --m 10 --pi1 0.3 --mu 2 --seed 5");
  CHECK(once.out == again.out);

  std::istringstream lines(once.out);
  std::string header;
  REQUIRE(std::getline(lines, header));
  CHECK(header == "index,status,z,p");
  std::size_t rows = 0;
  std::size_t false_nulls = 0;
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ++rows;
    if (line.find("FalseNull") != std::string::npos) ++false_nulls;
  }
  CHECK(rows == 10);
  CHECK(false_nulls == 3);

  // library reproduces the exact same table
  std::ostringstream expected;
  mtlab::write_field_table(expected, mtlab::generate_field(
      mtlab::ModelParams(10, 0.3, mtlab::EffectSize(2.0)), mtlab::SeedSpec{5, 0}));
  CHECK(once.out == expected.str());
}

TEST_CASE("cli: bh applies the step-up rule to a table file") {
  const auto table_path = temp_file("bh_table.csv");
  write_file(table_path, kSmallTable);
  const auto result = run_cli("bh --gamma 0.2 --in " + table_path.string());
  REQUIRE(result.exit_code == 0);
  CHECK(result.out == mtlab::format_real(0.1) + ",2\n0\n1\n");
  std::filesystem::remove(table_path);
}

TEST_CASE("cli: alpha and bonferroni print threshold decisions") {
  const auto table_path = temp_file("alpha_table.csv");
  write_file(table_path, kSmallTable);

  const auto alpha = run_cli("alpha --alpha 0.05 --in " + table_path.string());
  REQUIRE(alpha.exit_code == 0);
  CHECK(alpha.out == mtlab::format_real(0.05) + ",2\n0\n1\n");

  const auto bonf = run_cli("bonferroni --level 0.05 --in " + table_path.string());
  REQUIRE(bonf.exit_code == 0);
  CHECK(bonf.out == mtlab::format_real(0.05 / 4.0) + ",1\n0\n");
  std::filesystem::remove(table_path);
}

TEST_CASE("cli: oracle uses the status column") {
  const auto table_path = temp_file("oracle_table.csv");
  write_file(table_path,
             "index,status,z,p\n"
             "0,FalseNull,1.0,0.01\n"
             "1,TrueNull,1.0,0.02\n"
             "2,FalseNull,1.0,0.03\n");
  const auto result = run_cli("oracle --gamma 0.5 --in " + table_path.string());
  REQUIRE(result.exit_code == 0);
  CHECK(result.out == mtlab::format_real(0.03) + ",3\n0\n1\n2\n");
  std::filesystem::remove(table_path);
}

TEST_CASE("cli: ppv evaluates the design-point formulas") {
  const auto result = run_cli("ppv --alpha 0.05 --power 0.8 --pi1 0.5");
  REQUIRE(result.exit_code == 0);
  std::istringstream lines(result.out);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "metric,value");
  REQUIRE(std::getline(lines, line));
  CHECK(line == "ppv," + mtlab::format_real(0.9411764705882353));
  REQUIRE(std::getline(lines, line));
  CHECK(line == "mfdr," + mtlab::format_real(0.058823529411764705));
  REQUIRE(std::getline(lines, line));
  CHECK(line == "min_pi1_for_ppv_half," + mtlab::format_real(0.05 / 1.05));
}

TEST_CASE("cli: experiment runs a config and mirrors JSON") {
  const auto config_path = temp_file("experiment.cfg");
  const auto json_path = temp_file("experiment.json");
  write_file(config_path,
             "m = 200\n"
             "pi1 = 0.1\n"
             "mu = 2\n"
             "procedure = bh\n"
             "gamma = 0.1\n"
             "trials = 50\n"
             "seed = 42\n");

  const auto result =
      run_cli("experiment --config " + config_path.string() + " --json " + json_path.string());
  REQUIRE(result.exit_code == 0);
  std::istringstream lines(result.out);
  std::string header;
  REQUIRE(std::getline(lines, header));
  CHECK(header == "m,pi1,mu,procedure,param,metric,estimate,stderr,trials,target,flag");

  // worker count must not change a single byte
  const auto serial = run_cli("experiment --config " + config_path.string() + " --workers 1");
  const auto parallel = run_cli("experiment --config " + config_path.string() + " --workers 16");
  CHECK(serial.out == parallel.out);

  std::ifstream json_in(json_path);
  REQUIRE(json_in.good());
  const auto parsed = nlohmann::json::parse(json_in);
  CHECK(parsed.is_array());
  CHECK(parsed.size() >= 7);

  std::filesystem::remove(config_path);
  std::filesystem::remove(json_path);
}

TEST_CASE("cli: converge requires an m_schedule") {
  const auto config_path = temp_file("converge.cfg");
  write_file(config_path,
             "m = 200\n"
             "pi1 = 0.1\n"
             "mu = 2\n"
             "procedure = bh\n"
             "gamma = 0.1\n"
             "trials = 10\n"
             "seed = 42\n");
  CHECK(run_cli("converge --config " + config_path.string()).exit_code == 1);

  write_file(config_path,
             "m = 200\n"
             "pi1 = 0.1\n"
             "mu = 2\n"
             "procedure = bh\n"
             "gamma = 0.1\n"
             "trials = 10\n"
             "seed = 42\n"
             "m_schedule = 100,400\n");
  const auto result = run_cli("converge --config " + config_path.string());
  CHECK(result.exit_code == 0);
  CHECK(result.out.find("tau_deviation") != std::string::npos);
  std::filesystem::remove(config_path);
}

TEST_CASE("cli: invalid inputs exit with code 1") {
  CHECK(run_cli("experiment --config /nonexistent/file.cfg").exit_code == 1);
  CHECK(run_cli("bogus-subcommand").exit_code == 1);
  CHECK(run_cli("limit --mu 2 --pi1 1.5 --gamma 0.1").exit_code == 1);
  CHECK(run_cli("ppv --alpha 2 --power 0.5 --pi1 0.5").exit_code == 1);

  const auto bad_table = temp_file("bad_table.csv");
  write_file(bad_table, "wrong,header\n");
  CHECK(run_cli("bh --gamma 0.1 --in " + bad_table.string()).exit_code == 1);
  std::filesystem::remove(bad_table);

  const auto bad_config = temp_file("bad.cfg");
  write_file(bad_config, "m = 10\npi1 = 0\nprocedure = bh\ngamma = 0.1\ntrials = 1\nseed = 0\n"
                         "surprise = 1\n");
  CHECK(run_cli("experiment --config " + bad_config.string()).exit_code == 1);
  std::filesystem::remove(bad_config);
}

TEST_CASE("cli: help exits cleanly") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("simulate --help").exit_code == 0);
}
