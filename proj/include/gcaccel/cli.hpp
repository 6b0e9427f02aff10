#pragma once

#include "gcaccel/pipeline.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gcaccel::cli {

/*! \brief Everything that determines a run.
 *
 * JSON keys: circuit | generator, passes, seed, inputs (bit string, optional),
 * out_dir, config (object of config keys, or a key=value string), trace.
 */
struct RunManifest {
  std::string circuit;
  std::string generator;
  std::string passes = "full,rename,esw,oor";
  std::uint64_t seed = 1;
  std::optional<std::string> inputs;
  std::string out_dir = "run";
  SimConfig config;
  bool trace = false;

  static RunManifest from_json(const std::string& text);
  static RunManifest load(const std::string& path);
  std::string to_json() const;
};

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

Circuit load_circuit(const RunManifest& m);
Bits manifest_inputs(const RunManifest& m, const Circuit& c);

/// Parsed meta.txt sidecar.
struct CompiledMeta {
  std::map<std::string, std::string> values;
  std::string get(const std::string& key) const;
};

/// Files written by compile, relative to the output directory.
inline const std::vector<std::string> kCompileFiles = {"instructions.bin", "positions.bin", "oor.bin",
                                                       "meta.txt", "traffic.json"};

void write_compiled(const std::string& dir, const CompileResult& r, const SimConfig& cfg);

struct Compiled {
  StreamSet streams;
  Program source;  ///< restored, pre-OoR program
  TrafficReport traffic;
  CompiledMeta meta;
};

Compiled read_compiled(const std::string& dir);

/// Subcommands. Each returns the process exit code.
int cmd_gen(const std::string& spec, const std::string& out_path);
int cmd_compile(const RunManifest& m, std::ostream& log);
int cmd_garble(const RunManifest& m, std::ostream& log);
int cmd_run(const RunManifest& m, std::ostream& log);
int cmd_report(const std::vector<std::string>& run_dirs, std::ostream& csv);

/// One sweep axis: a config key and the values it takes.
struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

/// Runs the cartesian product of the axes into out_dir/<k>/ and writes out_dir/report.csv.
int cmd_sweep(const RunManifest& base, const std::vector<SweepAxis>& axes, std::ostream& log);

/// Column names of cmd_report, in order.
const std::vector<std::string>& report_columns();

}  // namespace gcaccel::cli
