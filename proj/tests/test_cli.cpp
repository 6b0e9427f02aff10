#include <doctest.h>

#include "gcaccel/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gcaccel;
using namespace gcaccel::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gcaccel_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(GCACCEL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("manifest JSON round trip") {
  RunManifest m = RunManifest::from_json(
      R"({"generator":"adder:8","passes":"segment,rename,esw,oor","seed":7,
          "inputs":"0101010101010101","out_dir":"x","config":{"mode":"garbler","ges":4},
          "trace":true})");
  CHECK(m.generator == "adder:8");
  CHECK(m.seed == 7);
  CHECK(m.config.mode == Mode::Garbler);
  CHECK(m.config.num_ges == 4);
  CHECK(m.trace);
  const RunManifest back = RunManifest::from_json(m.to_json());
  CHECK(back.to_json() == m.to_json());
  CHECK(RunManifest::from_json(R"({"generator":"chain:3","config":"ges = 2\nsww_bytes = 512"})")
            .config.window()
            .capacity == 32);
  CHECK_THROWS_AS(RunManifest::from_json(R"({"generator":"chain:3","colour":1})"), UsageError);
  CHECK_THROWS(manifest_inputs(RunManifest::from_json(R"({"generator":"adder:2","inputs":"01"})"),
                               generate("adder:2")));
}

TEST_CASE("compile writes the stream files") {
  const fs::path dir = scratch("compile");
  RunManifest m;
  m.generator = "matmul:2:4";
  m.passes = "segment,rename,esw,oor";
  m.out_dir = dir.string();
  std::ostringstream log;
  CHECK(cmd_compile(m, log) == 0);
  for (const auto& f : kCompileFiles) CHECK(fs::exists(dir / f));
  const Compiled c = read_compiled(dir.string());
  CHECK(c.meta.get("segment_size") == "65536");
  CHECK(c.meta.get("format") == "gcaccel-streams-1");
  CHECK(c.streams.num_instructions == generate("matmul:2:4").gates.size());
}

TEST_CASE("run is deterministic and the report aggregates runs") {
  const fs::path dir = scratch("run");
  RunManifest m;
  m.generator = "adder:8";
  m.config = SimConfig::parse("sww_bytes = 256\nges = 4");
  std::ostringstream log;
  m.out_dir = (dir / "a").string();
  CHECK(cmd_run(m, log) == 0);
  m.out_dir = (dir / "b").string();
  CHECK(cmd_run(m, log) == 0);
  const std::string ra = slurp(dir / "a" / "report.json");
  CHECK(!ra.empty());
  CHECK(ra == slurp(dir / "b" / "report.json"));
  CHECK(ra.find("\"oracle_match\": true") != std::string::npos);

  std::ostringstream csv;
  CHECK(cmd_report({(dir / "a").string(), (dir / "b").string()}, csv) == 0);
  std::size_t lines = 0;
  for (char ch : csv.str()) lines += ch == '\n';
  CHECK(lines == 3);
}

TEST_CASE("sweep produces one row per point") {
  const fs::path dir = scratch("sweep");
  RunManifest m;
  m.generator = "chain:20:and";
  m.out_dir = dir.string();
  std::ostringstream log;
  CHECK(cmd_sweep(m, {{"ges", {"1", "2"}}, {"mode", {"evaluator", "garbler"}}}, log) == 0);
  const std::string csv = slurp(dir / "report.csv");
  std::size_t lines = 0;
  for (char ch : csv) lines += ch == '\n';
  CHECK(lines == 5);
}

TEST_CASE("command line exit codes") {
  const fs::path dir = scratch("exe");
  const std::string out = " -o " + (dir / "o").string();
  CHECK(run_cli("compile --gen adder:4 --passes full,rename,bogus" + out) == 2);
  CHECK(run_cli("compile --gen adder:4 --passes full,rename,esw,oor" + out) == 0);
  CHECK(run_cli("run --gen chain:5 --ges 2" + out) == 0);
  CHECK(run_cli("run --circuit /nonexistent/file.txt" + out) != 0);
  CHECK(run_cli("gen adder:4 -o " + (dir / "adder.txt").string()) == 0);
  CHECK(fs::exists(dir / "adder.txt"));
}
