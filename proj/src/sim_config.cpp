#include "gcaccel/simulator.hpp"

#include <json.hpp>

#include <charconv>
#include <sstream>

namespace gcaccel {

namespace {

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || p != end)
    throw std::invalid_argument("config key '" + key + "' expects an unsigned integer, got '" + v + "'");
  return out;
}

std::uint32_t parse_u32(const std::string& key, const std::string& v) {
  const auto x = parse_uint(key, v);
  if (x > 0xffffffffULL) throw std::invalid_argument("config key '" + key + "' is out of range");
  return static_cast<std::uint32_t>(x);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt_double(double d) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, p);
}

}  // namespace

void SimConfig::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument("invalid config: " + m); };
  if (num_ges == 0) fail("ges must be positive");
  if (sww_bytes % 16 != 0) fail("sww_bytes must be a multiple of 16");
  window().validate();
  if (banks_per_ge == 0) fail("banks_per_ge must be positive");
  if (sww_accesses_per_bank == 0) fail("bank accesses per cycle must be positive");
  if (queues.instr == 0 || queues.table == 0 || queues.oor == 0) fail("queue depths must be positive");
  if (dram.burst_bytes < 32 || dram.burst_bytes % 32 != 0)
    fail("dram.burst must be a positive multiple of 32");
  if (pipeline.sww_read == 0) fail("pipeline.sww_read must be at least 1");
  if (pipeline.and_latency_garbler == 0 || pipeline.and_latency_evaluator == 0 ||
      pipeline.xor_latency == 0)
    fail("execution latencies must be at least 1");
  if (writeback_buffer < 2) fail("wb_buffer must hold at least 2 entries");
  if (deadlock_cycles == 0) fail("deadlock_cycles must be positive");
}

void SimConfig::set(const std::string& key, const std::string& value) {
  if (key == "mode") {
    if (value == "garbler")
      mode = Mode::Garbler;
    else if (value == "evaluator")
      mode = Mode::Evaluator;
    else
      throw std::invalid_argument("mode must be garbler or evaluator, got '" + value + "'");
  } else if (key == "ges") {
    num_ges = parse_u32(key, value);
  } else if (key == "sww_bytes") {
    sww_bytes = parse_uint(key, value);
  } else if (key == "banks_per_ge") {
    banks_per_ge = parse_u32(key, value);
  } else if (key == "dram.bandwidth") {
    if (value == "ddr4")
      dram.bandwidth_bytes_per_cycle = DramConfig::ddr4().bandwidth_bytes_per_cycle;
    else if (value == "hbm2")
      dram.bandwidth_bytes_per_cycle = DramConfig::hbm2().bandwidth_bytes_per_cycle;
    else if (value == "unlimited")
      dram.bandwidth_bytes_per_cycle = 0.0;
    else {
      double d = 0;
      auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), d);
      if (ec != std::errc{} || p != value.data() + value.size())
        throw std::invalid_argument("dram.bandwidth expects a number, ddr4, hbm2 or unlimited");
      dram.bandwidth_bytes_per_cycle = d;
    }
  } else if (key == "dram.latency") {
    dram.base_latency_cycles = parse_u32(key, value);
  } else if (key == "dram.burst") {
    dram.burst_bytes = parse_u32(key, value);
  } else if (key == "queue.instr") {
    queues.instr = parse_u32(key, value);
  } else if (key == "queue.table") {
    queues.table = parse_u32(key, value);
  } else if (key == "queue.oor") {
    queues.oor = parse_u32(key, value);
  } else if (key == "wb_buffer") {
    writeback_buffer = parse_u32(key, value);
  } else if (key == "pipeline.and_garbler") {
    pipeline.and_latency_garbler = parse_u32(key, value);
  } else if (key == "pipeline.and_evaluator") {
    pipeline.and_latency_evaluator = parse_u32(key, value);
  } else if (key == "pipeline.xor") {
    pipeline.xor_latency = parse_u32(key, value);
  } else if (key == "pipeline.fetch_decode") {
    pipeline.fetch_decode = parse_u32(key, value);
  } else if (key == "pipeline.sww_read") {
    pipeline.sww_read = parse_u32(key, value);
  } else if (key == "pipeline.writeback") {
    pipeline.writeback = parse_u32(key, value);
  } else if (key == "oor_retry_delay") {
    oor_retry_delay = parse_u32(key, value);
  } else if (key == "deadlock_cycles") {
    deadlock_cycles = parse_uint(key, value);
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

SimConfig SimConfig::parse(std::string_view text, SimConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    try {
      base.set(trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  base.validate();
  return base;
}

SimConfig SimConfig::parse(std::string_view text) { return parse(text, SimConfig{}); }

std::string SimConfig::to_text() const {
  std::ostringstream os;
  os << "mode = " << to_string(mode) << '\n'
     << "ges = " << num_ges << '\n'
     << "sww_bytes = " << sww_bytes << '\n'
     << "banks_per_ge = " << banks_per_ge << '\n'
     << "dram.bandwidth = "
     << (dram.unlimited() ? std::string("unlimited") : fmt_double(dram.bandwidth_bytes_per_cycle))
     << '\n'
     << "dram.latency = " << dram.base_latency_cycles << '\n'
     << "dram.burst = " << dram.burst_bytes << '\n'
     << "queue.instr = " << queues.instr << '\n'
     << "queue.table = " << queues.table << '\n'
     << "queue.oor = " << queues.oor << '\n'
     << "wb_buffer = " << writeback_buffer << '\n'
     << "pipeline.and_garbler = " << pipeline.and_latency_garbler << '\n'
     << "pipeline.and_evaluator = " << pipeline.and_latency_evaluator << '\n'
     << "pipeline.xor = " << pipeline.xor_latency << '\n'
     << "pipeline.fetch_decode = " << pipeline.fetch_decode << '\n'
     << "pipeline.sww_read = " << pipeline.sww_read << '\n'
     << "pipeline.writeback = " << pipeline.writeback << '\n'
     << "oor_retry_delay = " << oor_retry_delay << '\n'
     << "deadlock_cycles = " << deadlock_cycles << '\n';
  return os.str();
}

std::string SimReport::to_json() const {
  nlohmann::ordered_json j;
  j["mode"] = to_string(mode);
  j["ges"] = num_ges;
  j["total_cycles"] = total_cycles;
  j["gates"] = gates;
  j["gates_per_cycle"] = gates_per_cycle;
  j["steady_gates_per_cycle"] = steady_gates_per_cycle;
  j["first_issue"] = first_issue;
  j["last_issue"] = last_issue;
  nlohmann::ordered_json b;
  b["wires_in"] = bytes.wires_in;
  b["wires_out"] = bytes.wires_out;
  b["tables"] = bytes.tables;
  b["instructions"] = bytes.instructions;
  b["oor_addrs"] = bytes.oor_addrs;
  b["oor_retry"] = bytes.oor_retry;
  b["total"] = bytes.total();
  j["bytes"] = b;
  j["live_wires_written"] = live_wires_written;
  j["oor_wires_read"] = oor_wires_read;
  j["oor_retries"] = oor_retries;
  j["preloaded_inputs"] = preloaded_inputs;
  j["window_advances"] = window_advances;
  j["bank_grants"] = bank_grants;
  GeCounters sum;
  auto per_ge = nlohmann::ordered_json::array();
  for (const auto& g : ges) {
    nlohmann::ordered_json e;
    e["issued"] = g.issued;
    e["busy"] = g.busy;
    e["idle"] = g.idle;
    e["operand_not_ready"] = g.operand_not_ready;
    e["bank_conflict"] = g.bank_conflict;
    e["queue_empty"] = g.queue_empty;
    e["writeback_backpressure"] = g.writeback_backpressure;
    e["window_wait"] = g.window_wait;
    per_ge.push_back(e);
    sum.issued += g.issued;
    sum.busy += g.busy;
    sum.idle += g.idle;
    sum.operand_not_ready += g.operand_not_ready;
    sum.bank_conflict += g.bank_conflict;
    sum.queue_empty += g.queue_empty;
    sum.writeback_backpressure += g.writeback_backpressure;
    sum.window_wait += g.window_wait;
  }
  nlohmann::ordered_json st;
  st["operand_not_ready"] = sum.operand_not_ready;
  st["bank_conflict"] = sum.bank_conflict;
  st["queue_empty"] = sum.queue_empty;
  st["writeback_backpressure"] = sum.writeback_backpressure;
  st["window_wait"] = sum.window_wait;
  j["stalls"] = st;
  j["per_ge"] = per_ge;
  if (!digest.empty()) j["digest"] = digest;
  return j.dump(2) + "\n";
}

}  // namespace gcaccel
