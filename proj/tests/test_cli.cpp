#include <catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

const std::string cli = QGRAPH_CLI_PATH;
const std::string data = QGRAPH_DATA_DIR;

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run(const std::string& args) {
  const std::string out_file = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
                               "/qgraph_cli_test_out.txt";
  const std::string command = cli + " " + args + " > " + out_file + " 2>/dev/null";
  const int status = std::system(command.c_str());
  std::ifstream in(out_file, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return {WEXITSTATUS(status), buffer.str()};
}

}  // namespace

TEST_CASE("verify passes on the bundled graphs") {
  for (const std::string name : {"interval", "path", "k4", "fig1b"}) {
    auto result = run("--graph " + data + "/" + name + ".json verify --samples 10");
    INFO(result.output);
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("overall,pass") != std::string::npos);
  }
}

TEST_CASE("verify output is byte-identical across runs and worker counts") {
  const std::string args = "--graph " + data + "/k4.json --seed 7 verify --samples 16";
  auto first = run(args + " --workers 1");
  auto second = run(args + " --workers 1");
  auto eight = run(args + " --workers 8");
  CHECK(first.exit_code == 0);
  CHECK(first.output == second.output);
  CHECK(first.output == eight.output);
}

TEST_CASE("spectrum lists interval roots at multiples of pi") {
  auto result = run("--graph " + data + "/interval.json spectrum --kmax 10");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("# qgraph v1") == 0);
  CHECK(result.output.find("3.14159265") != std::string::npos);
  CHECK(result.output.find("6.28318530") != std::string::npos);
  CHECK(result.output.find("9.42477796") != std::string::npos);
}

TEST_CASE("coeffs methods emit one row per coefficient") {
  for (const std::string method : {"orbit", "direct", "newton", "partition", "primitive"}) {
    auto result = run("--graph " + data + "/path.json coeffs --k 1.3 --method " + method);
    INFO(method << "\n" << result.output);
    CHECK(result.exit_code == 0);
    int rows = 0;
    for (char c : result.output) rows += c == '\n';
    CHECK(rows == 2 + 5);  // provenance + header + a_0..a_4
  }
}

TEST_CASE("json format is well formed") {
  auto result = run("--graph " + data + "/path.json --format json coeffs --k 0.5 --method direct");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("\"qgraph\": \"v1\"") != std::string::npos);
  CHECK(result.output.find("\"command\": \"coeffs\"") != std::string::npos);
}

TEST_CASE("matrix dump has only adjacency-allowed entries") {
  auto result = run("--graph " + data + "/path.json matrix");
  CHECK(result.exit_code == 0);
  int rows = 0;
  for (char c : result.output) rows += c == '\n';
  CHECK(rows == 2 + 6);
}

TEST_CASE("usage errors exit with code 1") {
  CHECK(run("spectrum --kmax 10").exit_code == 1);              // no graph
  CHECK(run("--graph /nonexistent.json spectrum --kmax 10").exit_code == 1);
  CHECK(run("--graph " + data + "/k4.json nonsense").exit_code == 1);

  // malformed graph file: unknown top-level field
  const std::string bad = "/tmp/qgraph_bad_graph.json";
  std::ofstream(bad) << R"({"vertices": ["a","b"], "edges": [{"from":"a","to":"b","length":1.0}], "extra": 1})";
  CHECK(run("--graph " + bad + " spectrum --kmax 10").exit_code == 1);
}

TEST_CASE("vacuum reports both routes with error estimates") {
  auto result = run("--graph " + data + "/path.json vacuum");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("orbit_sum") != std::string::npos);
  CHECK(result.output.find("integral_oracle") != std::string::npos);
  CHECK(result.output.find("-0.1308996") != std::string::npos);  // -pi/24
}
