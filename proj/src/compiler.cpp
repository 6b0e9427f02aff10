#include "gcaccel/compiler.hpp"

#include "gcaccel/simulator.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace gcaccel {

WindowModel WindowModel::from_bytes(std::uint64_t sww_bytes) {
  const std::uint64_t n = sww_bytes / 16;
  if (n > 0xffffffffULL) throw std::invalid_argument("SWW too large");
  WindowModel w{static_cast<std::uint32_t>(n)};
  w.validate();
  return w;
}

void WindowModel::validate() const {
  if (capacity < 2 || (capacity & (capacity - 1)) != 0)
    throw std::invalid_argument("SWW capacity must be a power of two of at least 2 wires, got " +
                                std::to_string(capacity));
}

Address WindowModel::initial_base(const Program& p) const {
  const std::uint32_t h = half_of(p.first_output());
  return h >= 1 ? (h - 1) * half() : 0;
}

std::size_t StreamSet::oor_count() const {
  std::size_t n = 0;
  for (const auto& g : ges) n += g.oor.size();
  return n;
}

std::size_t StreamSet::table_count() const {
  std::size_t n = 0;
  for (const auto& g : ges) n += g.tables.size();
  return n;
}

namespace {

void require_renamed(const Program& p, const char* what) {
  if (!p.renamed()) throw std::invalid_argument(std::string(what) + " needs a renamed program");
}

/// Levels of instructions [first, last) counting operands produced outside as level 0.
std::vector<std::uint32_t> local_levels(const Program& p, std::size_t first, std::size_t last) {
  std::unordered_map<Address, std::uint32_t> level;
  level.reserve(last - first);
  std::vector<std::uint32_t> out;
  out.reserve(last - first);
  auto lvl = [&](Address a) -> std::uint32_t {
    auto it = level.find(a);
    return it == level.end() ? 0 : it->second;
  };
  for (std::size_t k = first; k < last; ++k) {
    const Instruction& i = p.instrs[k];
    std::uint32_t l = 1;
    if (i.op != Opcode::Nop) l = 1 + std::max(lvl(i.in0), lvl(i.in1));
    level[i.out] = l;
    out.push_back(l);
  }
  return out;
}

void sort_range_by_level(Program& p, std::size_t first, std::size_t last) {
  const auto lv = local_levels(p, first, last);
  std::vector<std::size_t> idx(last - first);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return lv[a] < lv[b]; });
  std::vector<Instruction> tmp;
  tmp.reserve(idx.size());
  for (auto k : idx) tmp.push_back(p.instrs[first + k]);
  std::copy(tmp.begin(), tmp.end(), p.instrs.begin() + static_cast<std::ptrdiff_t>(first));
}

}  // namespace

std::vector<std::uint32_t> program_levels(const Program& p) {
  return local_levels(p, 0, p.instrs.size());
}

Program reorder_full(const Program& p) {
  Program q = p;
  sort_range_by_level(q, 0, q.instrs.size());
  q.passes.push_back("full");
  return q;
}

Program reorder_segment(const Program& p, std::uint32_t segment_size) {
  if (segment_size == 0) throw std::invalid_argument("segment size must be at least 1");
  Program q = p;
  for (std::size_t first = 0; first < q.instrs.size(); first += segment_size)
    sort_range_by_level(q, first, std::min(q.instrs.size(), first + segment_size));
  q.passes.push_back("segment:" + std::to_string(segment_size));
  q.segment_size = segment_size;
  return q;
}

Program rename_wires(const Program& p) {
  Program q = p;
  std::unordered_map<Address, Address> map;
  map.reserve(p.instrs.size());
  auto remap = [&](Address a) {
    auto it = map.find(a);
    return it == map.end() ? a : it->second;
  };
  for (std::size_t k = 0; k < q.instrs.size(); ++k) {
    Instruction& i = q.instrs[k];
    if (i.op != Opcode::Nop) {
      if (i.in0 != kOorAddress) i.in0 = remap(i.in0);
      if (i.in1 != kOorAddress) i.in1 = remap(i.in1);
    }
    map[i.out] = q.output_of(k);
    i.out = q.output_of(k);
  }
  for (Address& a : q.output_addresses) a = remap(a);
  q.passes.push_back("rename");
  return q;
}

Program mark_live(const Program& p, const WindowModel& w) {
  require_renamed(p, "mark_live");
  w.validate();
  Program q = p;
  const Address first = p.first_output();
  std::vector<std::uint8_t> live(p.instrs.size(), 0);
  for (const Instruction& i : p.instrs) {
    if (i.op == Opcode::Nop) continue;
    for (Address a : {i.in0, i.in1}) {
      if (a < first) continue;
      if (w.half_of(i.out) >= std::uint64_t{w.half_of(a)} + 2) live[a - first] = 1;
    }
  }
  for (Address a : p.output_addresses)
    if (a >= first) live[a - first] = 1;
  for (std::size_t k = 0; k < q.instrs.size(); ++k) q.instrs[k].live = live[k] != 0;
  q.passes.push_back("esw");
  return q;
}

Program mark_all_live(const Program& p) {
  Program q = p;
  for (auto& i : q.instrs) i.live = true;
  return q;
}

OorLowering lower_oor(const Program& p, const WindowModel& w) {
  require_renamed(p, "lower_oor");
  w.validate();
  OorLowering r{p, {}};
  const Address first = p.first_output();
  for (Instruction& i : r.program.instrs) {
    if (i.op == Opcode::Nop) continue;
    for (Address* a : {&i.in0, &i.in1}) {
      if (*a == kOorAddress) throw std::invalid_argument("program is already OoR-lowered");
      if (w.resident(*a, i.out)) continue;
      if (*a >= first && !p.instrs[*a - first].live)
        throw std::logic_error("wire " + std::to_string(*a) + " is read out of range by " +
                               std::to_string(i.out) + " but is not live");
      r.oor.push_back(*a);
      *a = kOorAddress;
    }
  }
  r.program.passes.push_back("oor");
  return r;
}

StreamSet build_streams(const OorLowering& l, const std::vector<std::uint32_t>& ge_of,
                        std::uint32_t num_ges, const WindowModel& w) {
  const Program& lowered = l.program;
  require_renamed(lowered, "build_streams");
  if (num_ges == 0) throw std::invalid_argument("num_ges must be at least 1");
  if (ge_of.size() != lowered.instrs.size())
    throw std::invalid_argument("GE assignment size does not match the program");
  StreamSet s;
  s.num_inputs = lowered.num_inputs;
  s.num_instructions = static_cast<std::uint32_t>(lowered.instrs.size());
  s.window_capacity = w.capacity;
  s.output_addresses = lowered.output_addresses;
  s.ges.resize(num_ges);

  std::uint32_t ordinal = 0;
  std::size_t cursor = 0;
  for (std::size_t k = 0; k < lowered.instrs.size(); ++k) {
    const Instruction& i = lowered.instrs[k];
    const auto g = ge_of[k];
    if (g >= num_ges) throw std::invalid_argument("GE index out of range");
    GeStream& gs = s.ges[g];
    gs.positions.push_back(static_cast<std::uint32_t>(k));
    gs.words.push_back(encode_instruction(i));
    if (i.op == Opcode::And) gs.tables.push_back(ordinal++);
    if (i.live) s.live_writes.push_back({static_cast<std::uint32_t>(k), i.out});
    if (i.op == Opcode::Nop) continue;
    for (Address a : {i.in0, i.in1}) {
      if (a != kOorAddress) continue;
      if (cursor >= l.oor.size()) throw std::invalid_argument("OoR list shorter than zero operands");
      gs.oor.push_back(l.oor[cursor++]);
    }
  }
  if (cursor != l.oor.size()) throw std::invalid_argument("OoR list longer than zero operands");
  return s;
}

StreamSet schedule_ges(const OorLowering& lowered, const SimConfig& cfg) {
  if (cfg.num_ges == 0) throw std::invalid_argument("num_ges must be at least 1");
  const SimReport r = dispatch_schedule(lowered.program, cfg);
  return build_streams(lowered, r.ge_of, cfg.num_ges, cfg.window());
}

StreamSet schedule_ges(const OorLowering& lowered, std::uint32_t num_ges, const WindowModel& w) {
  SimConfig cfg;
  cfg.num_ges = num_ges;
  cfg.sww_bytes = std::uint64_t{w.capacity} * 16;
  return schedule_ges(lowered, cfg);
}

TrafficReport traffic_report(const Program& p, const WindowModel& w) {
  TrafficReport t;
  for (const auto& i : p.instrs) {
    t.live_wires += i.live;
    if (i.op != Opcode::Nop) t.oor_wires += (i.in0 == kOorAddress) + (i.in1 == kOorAddress);
  }
  t.total_wires = t.live_wires + t.oor_wires;
  const Address base = w.initial_base(p);
  for (Address a = std::max<Address>(1, base); a <= p.num_inputs && a < base + w.capacity; ++a)
    ++t.preloaded_inputs;
  t.bytes_wires_in = 16 * (t.oor_wires + t.preloaded_inputs);
  t.bytes_wires_out = 16 * t.live_wires;
  t.bytes_tables = 32 * p.and_count();
  t.bytes_instructions = 8 * p.instrs.size();
  t.bytes_oor_addrs = 4 * t.oor_wires;
  return t;
}

TrafficReport traffic_report(const Program& p, const WindowModel& w, const StreamSet& streams) {
  TrafficReport t = traffic_report(p, w);
  if (streams.oor_count() != t.oor_wires || streams.table_count() != p.and_count() ||
      streams.live_writes.size() != t.live_wires)
    throw std::invalid_argument("streams do not match the program");
  return t;
}

std::string TrafficReport::to_json() const {
  nlohmann::ordered_json j;
  j["live_wires"] = live_wires;
  j["oor_wires"] = oor_wires;
  j["total_wires"] = total_wires;
  j["preloaded_inputs"] = preloaded_inputs;
  j["bytes_wires_in"] = bytes_wires_in;
  j["bytes_wires_out"] = bytes_wires_out;
  j["bytes_tables"] = bytes_tables;
  j["bytes_instructions"] = bytes_instructions;
  j["bytes_oor_addrs"] = bytes_oor_addrs;
  j["bytes_total"] = bytes_total();
  return j.dump(2) + "\n";
}

TrafficReport TrafficReport::from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  TrafficReport t;
  t.live_wires = j.at("live_wires").get<std::uint64_t>();
  t.oor_wires = j.at("oor_wires").get<std::uint64_t>();
  t.total_wires = j.at("total_wires").get<std::uint64_t>();
  t.preloaded_inputs = j.value("preloaded_inputs", std::uint64_t{0});
  t.bytes_wires_in = j.at("bytes_wires_in").get<std::uint64_t>();
  t.bytes_wires_out = j.at("bytes_wires_out").get<std::uint64_t>();
  t.bytes_tables = j.at("bytes_tables").get<std::uint64_t>();
  t.bytes_instructions = j.at("bytes_instructions").get<std::uint64_t>();
  t.bytes_oor_addrs = j.at("bytes_oor_addrs").get<std::uint64_t>();
  return t;
}

// ---------------------------------------------------------------------------

namespace {

std::uint32_t parse_arg(std::string_view tok, std::string_view arg) {
  std::uint32_t v = 0;
  auto [p, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), v);
  if (ec != std::errc{} || p != arg.data() + arg.size() || v == 0)
    throw std::invalid_argument("pass '" + std::string(tok) + "' needs a positive integer argument");
  return v;
}

}  // namespace

std::vector<PassStep> parse_pass_list(std::string_view text) {
  std::vector<PassStep> steps;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view tok = text.substr(pos, comma - pos);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    pos = comma + 1;
    if (tok.empty()) {
      if (comma == text.size() && steps.empty()) break;
      throw std::invalid_argument("empty pass in list");
    }
    const auto colon = tok.find(':');
    const std::string_view name = tok.substr(0, colon);
    const bool has_arg = colon != std::string_view::npos;
    auto no_arg = [&](PassStep::Kind k) {
      if (has_arg) throw std::invalid_argument("pass '" + std::string(name) + "' takes no argument");
      steps.push_back({k, 0});
    };
    if (name == "baseline")
      no_arg(PassStep::Kind::Baseline);
    else if (name == "full")
      no_arg(PassStep::Kind::Full);
    else if (name == "rename")
      no_arg(PassStep::Kind::Rename);
    else if (name == "esw")
      no_arg(PassStep::Kind::Esw);
    else if (name == "oor")
      no_arg(PassStep::Kind::Oor);
    else if (name == "segment")
      steps.push_back({PassStep::Kind::Segment, has_arg ? parse_arg(tok, tok.substr(colon + 1)) : 0});
    else if (name == "sched") {
      if (!has_arg) throw std::invalid_argument("pass 'sched' needs a GE count, e.g. sched:16");
      steps.push_back({PassStep::Kind::Sched, parse_arg(tok, tok.substr(colon + 1))});
    } else
      throw std::invalid_argument("unknown pass '" + std::string(tok) + "'");
    if (comma == text.size()) break;
  }
  return steps;
}

std::string format_pass_list(const std::vector<PassStep>& steps) {
  std::string s;
  for (const auto& st : steps) {
    if (!s.empty()) s += ',';
    switch (st.kind) {
      case PassStep::Kind::Baseline: s += "baseline"; break;
      case PassStep::Kind::Full: s += "full"; break;
      case PassStep::Kind::Segment:
        s += "segment";
        if (st.arg) s += ":" + std::to_string(st.arg);
        break;
      case PassStep::Kind::Rename: s += "rename"; break;
      case PassStep::Kind::Esw: s += "esw"; break;
      case PassStep::Kind::Oor: s += "oor"; break;
      case PassStep::Kind::Sched: s += "sched:" + std::to_string(st.arg); break;
    }
  }
  return s;
}

CompileResult compile(const Circuit& c, const std::vector<PassStep>& passes, const SimConfig& cfg) {
  SimConfig sc = cfg;
  const WindowModel w = cfg.window();
  CompileResult r;
  Program p = assemble(c);
  OorLowering low;
  bool lowered = false;
  bool scheduled = false;
  for (std::size_t k = 0; k < passes.size(); ++k) {
    const PassStep& st = passes[k];
    if (lowered && st.kind != PassStep::Kind::Sched)
      throw std::invalid_argument("only sched may follow oor");
    switch (st.kind) {
      case PassStep::Kind::Baseline:
        if (k != 0) throw std::invalid_argument("baseline must be the first pass");
        break;
      case PassStep::Kind::Full: p = reorder_full(p); break;
      case PassStep::Kind::Segment: p = reorder_segment(p, st.arg ? st.arg : w.half()); break;
      case PassStep::Kind::Rename: p = rename_wires(p); break;
      case PassStep::Kind::Esw:
        if (!p.renamed()) throw std::invalid_argument("esw needs rename after reordering");
        p = mark_live(p, w);
        break;
      case PassStep::Kind::Oor: {
        if (!p.renamed()) throw std::invalid_argument("oor needs rename after reordering");
        r.source = p;
        low = lower_oor(p, w);
        lowered = true;
        break;
      }
      case PassStep::Kind::Sched:
        if (scheduled) throw std::invalid_argument("sched given twice");
        sc.num_ges = st.arg;
        scheduled = true;
        break;
    }
  }
  if (!lowered) {
    if (!p.renamed())
      throw std::invalid_argument("reordered program must be renamed before it can run");
    // hardware cannot run a program without OoR markers
    r.source = p;
    low = lower_oor(p, w);
  }
  r.streams = schedule_ges(low, sc);
  if (scheduled) low.program.passes.push_back("sched:" + std::to_string(sc.num_ges));
  r.lowered = lowered;
  r.scheduled = scheduled;
  r.oor = low.oor;
  r.traffic = traffic_report(low.program, w, r.streams);
  r.program = std::move(low.program);
  return r;
}

}  // namespace gcaccel
