#include "gcaccel/cli.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace gcaccel::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

template <class F>
void write_binary(const std::string& path, F&& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  body(out);
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::ifstream open_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

std::vector<std::uint64_t> split_numbers(const std::string& s, const std::string& what) {
  std::vector<std::uint64_t> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoull(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw std::runtime_error("meta.txt: bad number '" + tok + "' in " + what);
    }
  }
  return out;
}

std::map<std::string, std::string> config_map(const SimConfig& c) {
  std::map<std::string, std::string> m;
  std::istringstream in(c.to_text());
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) m[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return m;
}

std::string circuit_source(const RunManifest& m) {
  return m.generator.empty() ? "file:" + m.circuit : "gen:" + m.generator;
}

}  // namespace

// ---------------------------------------------------------------------------
// manifest

RunManifest RunManifest::from_json(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const std::exception& e) {
    throw UsageError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("manifest must be a JSON object");
  static const std::vector<std::string> known = {"circuit", "generator", "passes", "seed", "inputs",
                                                 "out_dir", "config",    "trace"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw UsageError("unknown manifest key '" + it.key() + "'");
  RunManifest m;
  m.circuit = j.value("circuit", std::string{});
  m.generator = j.value("generator", std::string{});
  m.passes = j.value("passes", m.passes);
  m.seed = j.value("seed", m.seed);
  if (j.contains("inputs")) m.inputs = j.at("inputs").get<std::string>();
  m.out_dir = j.value("out_dir", m.out_dir);
  m.trace = j.value("trace", false);
  if (j.contains("config")) {
    const auto& c = j.at("config");
    try {
      if (c.is_string()) {
        m.config = SimConfig::parse(c.get<std::string>());
      } else if (c.is_object()) {
        for (auto it = c.begin(); it != c.end(); ++it)
          m.config.set(it.key(), it.value().is_string() ? it.value().get<std::string>()
                                                        : it.value().dump());
        m.config.validate();
      } else {
        throw UsageError("manifest 'config' must be an object or a key=value string");
      }
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  return m;
}

RunManifest RunManifest::load(const std::string& path) { return from_json(read_file(path)); }

std::string RunManifest::to_json() const {
  ojson j;
  if (!circuit.empty()) j["circuit"] = circuit;
  if (!generator.empty()) j["generator"] = generator;
  j["passes"] = passes;
  j["seed"] = seed;
  if (inputs) j["inputs"] = *inputs;
  j["out_dir"] = out_dir;
  ojson c = ojson::object();
  for (const auto& [k, v] : config_map(config)) c[k] = v;
  j["config"] = c;
  j["trace"] = trace;
  return j.dump(2) + "\n";
}

Circuit load_circuit(const RunManifest& m) {
  if (m.circuit.empty() == m.generator.empty())
    throw UsageError("give exactly one of a circuit file or a generator spec");
  if (!m.generator.empty()) {
    try {
      return generate(m.generator);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  return read_bristol_file(m.circuit);
}

Bits manifest_inputs(const RunManifest& m, const Circuit& c) {
  if (!m.inputs) return random_input_bits(c.inputs.size(), m.seed);
  const std::string& s = *m.inputs;
  if (s.size() != c.inputs.size())
    throw UsageError("inputs has " + std::to_string(s.size()) + " bits, circuit has " +
                     std::to_string(c.inputs.size()) + " inputs");
  Bits b;
  for (char ch : s) {
    if (ch != '0' && ch != '1') throw UsageError("inputs must be a string of 0 and 1");
    b.push_back(ch == '1');
  }
  return b;
}

// ---------------------------------------------------------------------------
// compiled artifacts

std::string CompiledMeta::get(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) throw std::runtime_error("meta.txt: missing key '" + key + "'");
  return it->second;
}

void write_compiled(const std::string& dir, const CompileResult& r, const SimConfig& cfg) {
  fs::create_directories(dir);
  const StreamSet& s = r.streams;
  write_binary(dir + "/instructions.bin", [&](std::ostream& o) {
    for (const auto& g : s.ges) write_words(o, g.words);
  });
  write_binary(dir + "/positions.bin", [&](std::ostream& o) {
    for (const auto& g : s.ges) write_u32(o, g.positions);
  });
  write_binary(dir + "/oor.bin", [&](std::ostream& o) {
    for (const auto& g : s.ges) write_u32(o, g.oor);
  });
  std::vector<std::size_t> counts, oor_counts;
  for (const auto& g : s.ges) {
    counts.push_back(g.positions.size());
    oor_counts.push_back(g.oor.size());
  }
  std::ostringstream meta;
  meta << "format=gcaccel-streams-1\n"
       << "num_inputs=" << s.num_inputs << '\n'
       << "one_address=" << (r.program.one_address ? *r.program.one_address : 0) << '\n'
       << "num_instructions=" << s.num_instructions << '\n'
       << "and_count=" << r.program.and_count() << '\n'
       << "address_width=" << address_width(cfg.sww_bytes) << '\n'
       << "sww_bytes=" << cfg.sww_bytes << '\n'
       << "window_capacity=" << s.window_capacity << '\n'
       << "passes=" << [&] {
            std::string p;
            for (const auto& x : r.program.passes) p += (p.empty() ? "" : ",") + x;
            return p;
          }() << '\n'
       << "segment_size=" << r.program.segment_size << '\n'
       << "num_ges=" << s.ges.size() << '\n'
       << "ge_counts=" << join(counts) << '\n'
       << "oor_counts=" << join(oor_counts) << '\n'
       << "output_addresses=" << join(s.output_addresses) << '\n';
  write_file(dir + "/meta.txt", meta.str());
  write_file(dir + "/traffic.json", r.traffic.to_json());
}

Compiled read_compiled(const std::string& dir) {
  Compiled c;
  {
    std::istringstream in(read_file(dir + "/meta.txt"));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw std::runtime_error("meta.txt: malformed line '" + line + "'");
      c.meta.values[line.substr(0, eq)] = line.substr(eq + 1);
    }
  }
  if (c.meta.get("format") != "gcaccel-streams-1") throw std::runtime_error("meta.txt: unknown format");
  StreamSet& s = c.streams;
  s.num_inputs = static_cast<std::uint32_t>(std::stoul(c.meta.get("num_inputs")));
  s.num_instructions = static_cast<std::uint32_t>(std::stoul(c.meta.get("num_instructions")));
  s.window_capacity = static_cast<std::uint32_t>(std::stoul(c.meta.get("window_capacity")));
  for (auto a : split_numbers(c.meta.get("output_addresses"), "output_addresses"))
    s.output_addresses.push_back(static_cast<Address>(a));
  const auto counts = split_numbers(c.meta.get("ge_counts"), "ge_counts");
  const auto oor_counts = split_numbers(c.meta.get("oor_counts"), "oor_counts");
  if (counts.size() != oor_counts.size() || counts.empty())
    throw std::runtime_error("meta.txt: GE count lists disagree");

  auto in_words = open_binary(dir + "/instructions.bin");
  auto in_pos = open_binary(dir + "/positions.bin");
  auto in_oor = open_binary(dir + "/oor.bin");
  const auto words = read_words(in_words);
  const auto positions = read_u32(in_pos);
  const auto oor = read_u32(in_oor);
  std::size_t total = 0, total_oor = 0;
  for (auto n : counts) total += n;
  for (auto n : oor_counts) total_oor += n;
  if (words.size() != total || positions.size() != total || oor.size() != total_oor ||
      total != s.num_instructions)
    throw std::runtime_error("stream files do not match meta.txt");

  // table ordinals follow program order
  std::vector<Opcode> op_at(s.num_instructions, Opcode::Nop);
  for (std::size_t k = 0; k < total; ++k) {
    if (positions[k] >= s.num_instructions) throw std::runtime_error("positions.bin: out of range");
    op_at[positions[k]] = decode_instruction(words[k]).op;
  }
  std::vector<std::uint32_t> ordinal(s.num_instructions, 0);
  std::uint32_t next = 0;
  for (std::size_t p = 0; p < op_at.size(); ++p)
    if (op_at[p] == Opcode::And) ordinal[p] = next++;

  std::size_t at = 0, at_oor = 0;
  for (std::size_t g = 0; g < counts.size(); ++g) {
    GeStream gs;
    for (std::size_t k = 0; k < counts[g]; ++k, ++at) {
      gs.positions.push_back(positions[at]);
      gs.words.push_back(words[at]);
      if (op_at[positions[at]] == Opcode::And) gs.tables.push_back(ordinal[positions[at]]);
    }
    gs.oor.assign(oor.begin() + static_cast<std::ptrdiff_t>(at_oor),
                  oor.begin() + static_cast<std::ptrdiff_t>(at_oor + oor_counts[g]));
    at_oor += oor_counts[g];
    s.ges.push_back(std::move(gs));
  }
  const auto one = static_cast<Address>(std::stoul(c.meta.get("one_address")));
  c.source = program_from_streams(s, one ? std::optional<Address>(one) : std::nullopt);
  for (std::size_t p = 0; p < c.source.instrs.size(); ++p)
    if (c.source.instrs[p].live)
      s.live_writes.push_back({static_cast<std::uint32_t>(p), c.source.instrs[p].out});
  c.traffic = TrafficReport::from_json(read_file(dir + "/traffic.json"));
  return c;
}

// ---------------------------------------------------------------------------
// subcommands

namespace {

std::vector<PassStep> manifest_passes(const RunManifest& m) {
  try {
    return parse_pass_list(m.passes);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

/// Reuses compiled files when they came from the same circuit, passes and SWW size.
Compiled ensure_compiled(const RunManifest& m, const Circuit& circuit, std::ostream& log) {
  const std::string stamp_path = m.out_dir + "/compile.stamp";
  const std::string stamp = circuit_source(m) + "\n" + m.passes + "\n" + m.config.to_text();
  bool fresh = fs::exists(stamp_path);
  for (const auto& f : kCompileFiles) fresh = fresh && fs::exists(m.out_dir + "/" + f);
  if (fresh && read_file(stamp_path) == stamp) return read_compiled(m.out_dir);
  const auto passes = manifest_passes(m);
  const CompileResult r = compile(circuit, passes, m.config);
  write_compiled(m.out_dir, r, m.config);
  write_file(stamp_path, stamp);
  log << "compiled " << r.program.instrs.size() << " instructions into " << r.streams.ges.size()
      << " GE streams (" << m.out_dir << ")\n";
  return read_compiled(m.out_dir);
}

}  // namespace

int cmd_gen(const std::string& spec, const std::string& out_path) {
  Circuit c;
  try {
    c = generate(spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (out_path.empty() || out_path == "-") {
    write_bristol(std::cout, c);
  } else {
    write_file(out_path, write_bristol_text(c));
  }
  return 0;
}

int cmd_compile(const RunManifest& m, std::ostream& log) {
  const auto passes = manifest_passes(m);
  const Circuit circuit = load_circuit(m);
  const CompileResult r = compile(circuit, passes, m.config);
  write_compiled(m.out_dir, r, m.config);
  log << "compiled " << r.program.instrs.size() << " instructions, " << r.traffic.live_wires
      << " live wires, " << r.traffic.oor_wires << " OoR reads -> " << m.out_dir << '\n';
  return 0;
}

int cmd_garble(const RunManifest& m, std::ostream& log) {
  const Circuit circuit = load_circuit(m);
  const Compiled c = ensure_compiled(m, circuit, log);
  const GarbledProgram g = garble_program(c.source, Seed::from_u64(m.seed));
  const Bits bits = program_input_bits(c.source, manifest_inputs(m, circuit));
  const auto active = encode_inputs(g.ctx, g.circuit, bits);
  const DramImage eval = evaluator_image(g, active);
  const DramImage garb = garbler_image(g);
  write_binary(m.out_dir + "/tables.bin", [&](std::ostream& o) { write_tables(o, g.gc.tables); });
  write_binary(m.out_dir + "/input_zero.bin", [&](std::ostream& o) { write_labels(o, garb.input_labels); });
  write_binary(m.out_dir + "/input_active.bin", [&](std::ostream& o) { write_labels(o, eval.input_labels); });
  write_binary(m.out_dir + "/output_zero.bin",
               [&](std::ostream& o) { write_labels(o, g.gc.output_zero_labels); });
  write_binary(m.out_dir + "/delta.bin", [&](std::ostream& o) { write_labels(o, {g.ctx.delta().r}); });
  log << "garbled " << g.gc.tables.size() << " AND gates -> " << m.out_dir << '\n';
  return 0;
}

int cmd_run(const RunManifest& m, std::ostream& log) {
  const Circuit circuit = load_circuit(m);
  fs::create_directories(m.out_dir);
  write_file(m.out_dir + "/manifest.json", m.to_json());
  const Compiled c = ensure_compiled(m, circuit, log);
  SimConfig cfg = m.config;
  cfg.num_ges = static_cast<std::uint32_t>(c.streams.ges.size());

  std::ofstream trace;
  SimOptions opts;
  if (m.trace) {
    trace.open(m.out_dir + "/trace.csv");
    trace << "cycle,issued,window_base,dram_inflight,wb_pending\n";
    opts.trace = &trace;
  }
  const Bits inputs = manifest_inputs(m, circuit);
  const VerifiedRun v = verify_streams(circuit, c.source, c.streams, cfg, m.seed, inputs, opts);

  SimOptions ideal;
  ideal.ideal_memory = true;
  ideal.functional = false;
  DramImage blank;
  const auto compute_only = simulate(c.streams, blank, cfg, ideal).total_cycles;
  const auto traffic_only = data_movement_cycles(v.report.bytes.total(), cfg.dram);

  ojson j = ojson::parse(v.report.to_json());
  ojson out;
  out["circuit"] = circuit_source(m);
  out["passes"] = c.meta.get("passes");
  out["sww_bytes"] = cfg.sww_bytes;
  out["dram_bandwidth"] = cfg.dram.unlimited() ? -1.0 : cfg.dram.bandwidth_bytes_per_cycle;
  out["seed"] = m.seed;
  out["oracle_match"] = v.match;
  if (!v.match) out["mismatch"] = v.mismatch;
  for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = it.value();
  out["compute_only_cycles"] = compute_only;
  out["traffic_only_cycles"] = traffic_only;
  out["traffic"] = ojson::parse(c.traffic.to_json());
  std::string outs;
  for (auto b : v.decoded) outs += b ? '1' : '0';
  out["outputs"] = outs;
  write_file(m.out_dir + "/report.json", out.dump(2) + "\n");

  log << to_string(cfg.mode) << ": " << v.report.total_cycles << " cycles, "
      << v.report.gates_per_cycle << " gates/cycle, oracle " << (v.match ? "match" : "MISMATCH")
      << '\n';
  if (!v.match) log << "first difference: " << v.mismatch << '\n';
  return v.match ? 0 : 1;
}

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols = {
      "run",          "circuit",        "passes",         "mode",
      "ges",          "sww_bytes",      "dram_bandwidth", "total_cycles",
      "gates",        "gates_per_cycle", "steady_gates_per_cycle", "live_wires",
      "oor_wires",    "total_wires",    "bytes_wires_in", "bytes_wires_out",
      "bytes_tables", "bytes_instructions", "bytes_oor_addrs", "bytes_oor_retry",
      "compute_only_cycles", "traffic_only_cycles", "oracle_match"};
  return cols;
}

int cmd_report(const std::vector<std::string>& run_dirs, std::ostream& csv) {
  if (run_dirs.empty()) throw UsageError("report needs at least one run directory");
  const auto& cols = report_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) csv << (i ? "," : "") << cols[i];
  csv << '\n';
  for (const auto& dir : run_dirs) {
    ojson j;
    try {
      j = ojson::parse(read_file(dir + "/report.json"));
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(dir + "/report.json is corrupt: " + e.what());
    }
    try {
      const auto& t = j.at("traffic");
      const auto& b = j.at("bytes");
      auto quote = [](std::string s) {
        if (s.find(',') == std::string::npos && s.find('"') == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return q + "\"";
      };
      csv << quote(dir) << ',' << quote(j.at("circuit").get<std::string>()) << ','
          << quote(j.at("passes").get<std::string>()) << ',' << j.at("mode").get<std::string>()
          << ',' << j.at("ges") << ',' << j.at("sww_bytes") << ',' << j.at("dram_bandwidth") << ','
          << j.at("total_cycles") << ',' << j.at("gates") << ',' << j.at("gates_per_cycle") << ','
          << j.at("steady_gates_per_cycle") << ',' << t.at("live_wires") << ','
          << t.at("oor_wires") << ',' << t.at("total_wires") << ',' << b.at("wires_in") << ','
          << b.at("wires_out") << ',' << b.at("tables") << ',' << b.at("instructions") << ','
          << b.at("oor_addrs") << ',' << b.at("oor_retry") << ',' << j.at("compute_only_cycles")
          << ',' << j.at("traffic_only_cycles") << ','
          << (j.at("oracle_match").get<bool>() ? 1 : 0) << '\n';
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(dir + "/report.json is missing fields: " + e.what());
    }
  }
  return 0;
}

int cmd_sweep(const RunManifest& base, const std::vector<SweepAxis>& axes, std::ostream& log) {
  std::vector<RunManifest> runs{base};
  for (const auto& ax : axes) {
    if (ax.values.empty()) throw UsageError("sweep axis '" + ax.key + "' has no values");
    std::vector<RunManifest> next;
    for (const auto& r : runs)
      for (const auto& v : ax.values) {
        RunManifest m = r;
        try {
          m.config.set(ax.key, v);
          m.config.validate();
        } catch (const std::invalid_argument& e) {
          throw UsageError(e.what());
        }
        next.push_back(std::move(m));
      }
    runs = std::move(next);
  }
  fs::create_directories(base.out_dir);
  std::vector<std::string> dirs;
  int rc = 0;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    runs[k].out_dir = base.out_dir + "/run" + std::to_string(k);
    log << "[" << k + 1 << "/" << runs.size() << "] ";
    rc |= cmd_run(runs[k], log);
    dirs.push_back(runs[k].out_dir);
  }
  std::ofstream csv(base.out_dir + "/report.csv");
  cmd_report(dirs, csv);
  return rc;
}

}  // namespace gcaccel::cli
