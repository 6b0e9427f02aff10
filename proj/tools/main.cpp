#include "gcaccel/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace gcaccel;
using namespace gcaccel::cli;

namespace {

struct ManifestFlags {
  std::string manifest;
  std::string circuit;
  std::string generator;
  std::string passes;
  std::string config_file;
  std::vector<std::string> sets;
  std::string mode;
  std::string dram;
  std::string out;
  std::string inputs;
  std::uint32_t ges = 0;
  std::uint64_t sww_bytes = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool trace = false;

  void add(CLI::App* app) {
    app->add_option("--manifest", manifest, "JSON run manifest; flags override its fields");
    app->add_option("--circuit", circuit, "Bristol circuit file");
    app->add_option("--gen", generator, "generator spec, e.g. adder:32 or matmul:4:8");
    app->add_option("--passes", passes, "pass list, e.g. full,rename,esw,oor,sched:16");
    app->add_option("--config", config_file, "key=value config file");
    app->add_option("--set", sets, "config override KEY=VALUE (repeatable)");
    app->add_option("--mode", mode, "garbler or evaluator")->check(CLI::IsMember({"garbler", "evaluator"}));
    app->add_option("--ges", ges, "number of gate engines");
    app->add_option("--sww-bytes", sww_bytes, "SWW size in bytes");
    app->add_option("--dram", dram, "ddr4, hbm2, unlimited or bytes per cycle");
    app->add_option("--seed", seed, "seed for labels and random inputs")->each([this](const std::string&) {
      seed_given = true;
    });
    app->add_option("--inputs", inputs, "input bits as a 0/1 string (default: random from seed)");
    app->add_option("-o,--out", out, "output directory");
    app->add_flag("--trace", trace, "write a per-cycle trace.csv");
  }

  RunManifest build() const {
    RunManifest m = manifest.empty() ? RunManifest{} : RunManifest::load(manifest);
    if (!circuit.empty()) {
      m.circuit = circuit;
      m.generator.clear();
    }
    if (!generator.empty()) {
      m.generator = generator;
      m.circuit.clear();
    }
    if (!passes.empty()) m.passes = passes;
    try {
      if (!config_file.empty()) {
        std::ifstream in(config_file);
        if (!in) throw std::runtime_error("cannot open " + config_file);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        m.config = SimConfig::parse(text, m.config);
      }
      for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw UsageError("--set expects KEY=VALUE, got '" + kv + "'");
        m.config.set(kv.substr(0, eq), kv.substr(eq + 1));
      }
      if (!mode.empty()) m.config.set("mode", mode);
      if (ges) m.config.num_ges = ges;
      if (sww_bytes) m.config.sww_bytes = sww_bytes;
      if (!dram.empty()) m.config.set("dram.bandwidth", dram);
      m.config.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (seed_given) m.seed = seed;
    if (!inputs.empty()) m.inputs = inputs;
    if (!out.empty()) m.out_dir = out;
    if (trace) m.trace = true;
    return m;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Garbled-circuit accelerator toolchain: compiler, garbler and cycle-level simulator"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "write a generated circuit in Bristol format");
  std::string gen_spec, gen_out;
  gen->add_option("spec", gen_spec, "chain:N[:op] parallel:N[:op] xor_tree:N adder:B matmul:N:B blocks:W:D bubble:P:L")
      ->required();
  gen->add_option("-o,--out", gen_out, "output file (default stdout)");

  ManifestFlags compile_f, garble_f, run_f, sweep_f;
  auto* compile = app.add_subcommand("compile", "compile a circuit into GE streams");
  compile_f.add(compile);
  auto* garble = app.add_subcommand("garble", "garble the compiled program in software");
  garble_f.add(garble);
  auto* run = app.add_subcommand("run", "simulate and check against the software oracle");
  run_f.add(run);

  auto* report = app.add_subcommand("report", "CSV comparison of finished runs");
  std::vector<std::string> report_dirs;
  std::string report_out;
  report->add_option("runs", report_dirs, "run directories")->required();
  report->add_option("-o,--out", report_out, "CSV file (default stdout)");

  auto* sweep = app.add_subcommand("sweep", "run a cartesian product of config values");
  sweep_f.add(sweep);
  std::vector<std::string> axes_text;
  sweep->add_option("--axis", axes_text, "KEY=V1,V2,... (repeatable)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_spec, gen_out);
    if (compile->parsed()) return cmd_compile(compile_f.build(), std::cerr);
    if (garble->parsed()) return cmd_garble(garble_f.build(), std::cerr);
    if (run->parsed()) return cmd_run(run_f.build(), std::cerr);
    if (report->parsed()) {
      if (report_out.empty()) return cmd_report(report_dirs, std::cout);
      std::ofstream out(report_out);
      if (!out) throw std::runtime_error("cannot write " + report_out);
      return cmd_report(report_dirs, out);
    }
    if (sweep->parsed()) {
      std::vector<SweepAxis> axes;
      for (const auto& t : axes_text) {
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw UsageError("--axis expects KEY=V1,V2,...");
        SweepAxis ax{t.substr(0, eq), {}};
        std::stringstream ss(t.substr(eq + 1));
        std::string v;
        while (std::getline(ss, v, ',')) ax.values.push_back(v);
        axes.push_back(std::move(ax));
      }
      return cmd_sweep(sweep_f.build(), axes, std::cerr);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const CircuitError& e) {
    std::cerr << "circuit error: " << e.what() << '\n';
    return 3;
  } catch (const SimError& e) {
    std::cerr << "simulation error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
