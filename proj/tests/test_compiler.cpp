#include <doctest.h>

#include "gcaccel/compiler.hpp"
#include "gcaccel/pipeline.hpp"
#include "gcaccel/simulator.hpp"

#include <map>
#include <set>
#include <random>

using namespace gcaccel;

namespace {

// a, b, c; w4 = b ^ c; w5 = b & c; w6 = a ^ w4; w7 = w5 & w6
Program small_program() {
  CircuitBuilder b;
  auto in = b.inputs(3);
  const WireId w4 = b.xor_(in[1], in[2]);
  const WireId w5 = b.and_(in[1], in[2]);
  const WireId w6 = b.xor_(in[0], w4);
  const WireId w7 = b.and_(w5, w6);
  return assemble(b.finish({1, 1, 1}, {w7}, {1}));
}

const char* kFamilies[] = {"chain:60",    "chain:33:inv", "parallel:40", "xor_tree:31", "adder:16",
                           "matmul:2:6",  "blocks:6:9",   "bubble:4:12", "parallel:9:inv"};

/// Random topological order of the program (randomized Kahn).
Program shuffle_topologically(const Program& p, std::mt19937_64& r) {
  const std::size_t n = p.instrs.size();
  std::map<Address, std::size_t> producer;
  for (std::size_t k = 0; k < n; ++k) producer[p.instrs[k].out] = k;
  std::vector<std::vector<std::size_t>> users(n);
  std::vector<int> pending(n, 0);
  for (std::size_t k = 0; k < n; ++k)
    for (Address a : {p.instrs[k].in0, p.instrs[k].in1})
      if (auto it = producer.find(a); it != producer.end()) {
        users[it->second].push_back(k);
        ++pending[k];
      }
  std::vector<std::size_t> ready;
  for (std::size_t k = 0; k < n; ++k)
    if (!pending[k]) ready.push_back(k);
  Program q = p;
  q.instrs.clear();
  while (!ready.empty()) {
    std::swap(ready[r() % ready.size()], ready.back());
    const auto k = ready.back();
    ready.pop_back();
    q.instrs.push_back(p.instrs[k]);
    for (auto u : users[k])
      if (--pending[u] == 0) ready.push_back(u);
  }
  REQUIRE(q.instrs.size() == n);
  return q;
}

/// Software window replay: every operand is resident, OoR, or a preloaded input.
void check_window_sound(const OorLowering& l, const WindowModel& w) {
  const Program& p = l.program;
  const Address first = p.first_output();
  std::size_t cursor = 0;
  for (const auto& i : p.instrs) {
    const std::uint32_t h = w.half_of(i.out);
    const std::uint32_t lo = h >= 1 ? h - 1 : 0;
    for (Address a : {i.in0, i.in1}) {
      if (a == kOorAddress) {
        REQUIRE(cursor < l.oor.size());
        const Address src = l.oor[cursor++];
        CHECK(w.half_of(src) + 1 < h);  // really out of range
        if (src >= first) CHECK(p.instrs[src - first].live);  // it was spilled
        continue;
      }
      CHECK(w.half_of(a) >= lo);
      CHECK(w.half_of(a) <= h);
    }
  }
  CHECK(cursor == l.oor.size());
}

}  // namespace

TEST_CASE("full reorder on trivial shapes") {
  const Program par = assemble(generate("parallel:64"));
  CHECK(reorder_full(par).instrs == par.instrs);
  const Program ch = assemble(generate("chain:5"));
  CHECK(reorder_full(ch).instrs == ch.instrs);
}

TEST_CASE("full reorder groups interleaved chains by level") {
  const Circuit c = gen_blocks(2, 4);  // A1..A4 then B1..B4
  const Program p = assemble(c);
  const auto lv = level_schedule(c).level;
  const Program q = reorder_full(p);
  std::vector<Address> want;
  for (std::uint32_t l = 1; l <= 4; ++l)
    for (std::size_t k = 0; k < p.instrs.size(); ++k)
      if (lv[k] == l) want.push_back(p.instrs[k].out);
  std::vector<Address> got;
  for (const auto& i : q.instrs) got.push_back(i.out);
  CHECK(got == want);
  CHECK(got[0] == p.instrs[0].out);
  CHECK(got[1] == p.instrs[4].out);
}

TEST_CASE("full reorder yields a level order where each level is independent") {
  for (const char* spec : kFamilies) {
    CAPTURE(spec);
    const Program q = reorder_full(assemble(generate(spec)));
    const auto lv = program_levels(q);
    std::map<Address, std::uint32_t> level_of;
    for (std::size_t k = 0; k < q.instrs.size(); ++k) {
      if (k) CHECK(lv[k - 1] <= lv[k]);
      level_of[q.instrs[k].out] = lv[k];
      for (Address a : {q.instrs[k].in0, q.instrs[k].in1})
        if (auto it = level_of.find(a); it != level_of.end()) CHECK(it->second < lv[k]);
    }
  }
}

TEST_CASE("segment reorder boundaries") {
  const Program p = assemble(generate("matmul:2:5"));
  CHECK(reorder_segment(p, static_cast<std::uint32_t>(p.instrs.size())).instrs ==
        reorder_full(p).instrs);
  CHECK(reorder_segment(p, 1).instrs == p.instrs);
  CHECK_THROWS(reorder_segment(p, 0));
  const std::uint32_t S = 37;
  const Program q = reorder_segment(p, S);
  CHECK(q.segment_size == S);
  for (std::size_t first = 0; first < p.instrs.size(); first += S) {
    const auto last = std::min(p.instrs.size(), first + S);
    std::multiset<Address> a, b;
    for (auto k = first; k < last; ++k) {
      a.insert(p.instrs[k].out);
      b.insert(q.instrs[k].out);
    }
    CHECK(a == b);
  }
  const SimConfig def;
  CHECK(def.window().half() == 65536);
}

TEST_CASE("renaming") {
  const Program p = assemble(generate("adder:8"));
  CHECK(rename_wires(p).instrs == p.instrs);
  std::mt19937_64 r(12);
  for (const char* spec : kFamilies) {
    CAPTURE(spec);
    const Circuit c = generate(spec);
    const Program q = rename_wires(shuffle_topologically(assemble(c), r));
    CHECK(q.renamed());
    for (std::size_t k = 1; k < q.instrs.size(); ++k) CHECK(q.instrs[k].out == q.instrs[k - 1].out + 1);
    for (int t = 0; t < 20; ++t) {
      Bits in(c.inputs.size());
      for (auto& b : in) b = r() & 1;
      REQUIRE(interpret(q, in) == plaintext_evaluate(c, in));
    }
  }
}

TEST_CASE("small program with a four-wire window") {
  const Program p = small_program();
  const WindowModel w{4};
  CHECK(w.initial_base(p) == 2);
  const Program live = mark_live(p, w);
  std::vector<bool> bits;
  for (const auto& i : live.instrs) bits.push_back(i.live);
  CHECK(bits == std::vector<bool>{false, false, false, true});
  const OorLowering l = lower_oor(live, w);
  CHECK(l.oor == std::vector<Address>{1});
  CHECK(l.program.instrs[2].in0 == kOorAddress);
  CHECK(l.program.instrs[2].in1 == 4);
  const TrafficReport t = traffic_report(l.program, w);
  CHECK(t.live_wires == 1);
  CHECK(t.oor_wires == 1);
  CHECK(t.total_wires == 2);
  CHECK(t.preloaded_inputs == 2);  // wires 2 and 3 sit in the first window
  check_window_sound(l, w);
}

TEST_CASE("liveness rules") {
  const WindowModel w{4};
  Program p;
  p.num_inputs = 1;
  p.input_addresses = {1};
  // 2..6 chain on themselves, 7 reads 6 and 2
  for (Address a = 2; a <= 6; ++a) p.instrs.push_back({Opcode::Xor, a - 1, a - 1, true, a});
  p.instrs.push_back({Opcode::Xor, 6, 2, true, 7});
  p.output_addresses = {7};
  const Program live = mark_live(p, w);
  CHECK(live.instrs[0].live);   // wire 2 (half 1) is read by 7 (half 3)
  CHECK(!live.instrs[1].live);  // wire 3 read by 4 in the next half
  CHECK(live.instrs.back().live);  // circuit output
  const OorLowering l = lower_oor(live, w);
  CHECK(l.oor == std::vector<Address>{2});
  check_window_sound(l, w);

  Program shuffled = p;
  std::swap(shuffled.instrs[0].out, shuffled.instrs[1].out);
  CHECK_THROWS(mark_live(shuffled, w));
  CHECK_THROWS(lower_oor(shuffled, w));
  // an OoR read of a wire whose live bit was cleared is a compiler bug
  Program cleared = live;
  cleared.instrs[0].live = false;
  CHECK_THROWS_AS(lower_oor(cleared, w), std::logic_error);
  CHECK(lower_oor(mark_live(assemble(generate("adder:4")), WindowModel{}), WindowModel{}).oor.empty());
}

TEST_CASE("semantic preservation, window and ESW soundness for every pass list") {
  std::mt19937_64 r(99);
  const std::vector<std::string> lists = {"baseline", "full,rename", "segment:16,rename",
                                          "full,rename,esw,oor", "segment,rename,esw,oor",
                                          "rename,esw,oor"};
  for (const char* spec : kFamilies) {
    const Circuit c = generate(spec);
    for (std::uint32_t n : {8u, 32u, 256u}) {
      SimConfig cfg;
      cfg.sww_bytes = n * 16;
      cfg.num_ges = 3;
      for (const auto& pl : lists) {
        CAPTURE(spec);
        CAPTURE(n);
        CAPTURE(pl);
        const CompileResult cr = compile(c, parse_pass_list(pl), cfg);
        const Program back = restore_operands(cr.program, cr.oor);
        CHECK(back.instrs == cr.source.instrs);
        CHECK(back.output_addresses == cr.source.output_addresses);
        for (int t = 0; t < 50; ++t) {
          Bits in(c.inputs.size());
          for (auto& b : in) b = r() & 1;
          REQUIRE(interpret(back, in) == plaintext_evaluate(c, in));
        }
        check_window_sound({cr.program, cr.oor}, cfg.window());
        // ESW never spills more than all-live
        std::size_t live = 0;
        for (const auto& i : cr.program.instrs) live += i.live;
        CHECK(live <= cr.program.instrs.size());
        CHECK(cr.traffic.live_wires == live);
      }
    }
  }
}

TEST_CASE("scheduling") {
  const WindowModel w{};
  {
    const auto l = lower_oor(assemble(generate("adder:8")), w);
    const StreamSet s = schedule_ges(l, 1, w);
    REQUIRE(s.ges.size() == 1);
    std::vector<std::uint64_t> words;
    for (const auto& i : l.program.instrs) words.push_back(encode_instruction(i));
    CHECK(s.ges[0].words == words);
    CHECK(s.ges[0].tables.size() == 8);
  }
  {
    const auto l = lower_oor(assemble(generate("parallel:64")), w);
    const StreamSet s = schedule_ges(l, 16, w);
    for (std::uint32_t g = 0; g < 16; ++g) {
      REQUIRE(s.ges[g].positions.size() == 4);
      for (std::uint32_t k = 0; k < 4; ++k) CHECK(s.ges[g].positions[k] == g + 16 * k);
    }
  }
  const auto l = lower_oor(mark_live(rename_wires(reorder_full(assemble(generate("matmul:2:6")))), WindowModel{32}), WindowModel{32});
  for (std::uint32_t G : {1u, 3u, 16u}) {
    const StreamSet s = schedule_ges(l, G, WindowModel{32});
    std::vector<int> seen(l.program.instrs.size(), 0);
    std::size_t oor_total = 0;
    for (const auto& g : s.ges) {
      std::size_t zeros = 0, ands = 0;
      for (std::size_t k = 0; k < g.positions.size(); ++k) {
        if (k) CHECK(g.positions[k - 1] < g.positions[k]);
        ++seen[g.positions[k]];
        const Instruction i = decode_instruction(g.words[k]);
        zeros += (i.in0 == 0) + (i.in1 == 0);
        ands += i.op == Opcode::And;
      }
      CHECK(zeros == g.oor.size());
      CHECK(ands == g.tables.size());
      for (std::size_t k = 1; k < g.tables.size(); ++k) CHECK(g.tables[k - 1] < g.tables[k]);
      oor_total += g.oor.size();
    }
    for (int v : seen) CHECK(v == 1);
    CHECK(oor_total == l.oor.size());
  }
  CHECK_THROWS(schedule_ges(l, 0, WindowModel{32}));
}

TEST_CASE("traffic report") {
  Program p;
  p.num_inputs = 2;
  p.input_addresses = {1, 2};
  p.instrs.push_back({Opcode::Xor, 1, 2, false, 3});
  const TrafficReport t = traffic_report(p, WindowModel{});
  CHECK(t.total_wires == 0);
  CHECK(t.bytes_instructions == 8);
  CHECK(t.bytes_tables == 0);
  CHECK(t.bytes_wires_in == 32);  // two preloaded inputs

  const Circuit c = generate("matmul:4:8");
  SimConfig cfg;
  cfg.sww_bytes = 1024 * 16;
  const auto full = compile(c, parse_pass_list("full,rename,esw,oor"), cfg).traffic;
  const auto seg = compile(c, parse_pass_list("segment,rename,esw,oor"), cfg).traffic;
  CHECK(seg.total_wires < full.total_wires);
  CHECK(full.bytes_tables == 32 * c.and_count());
  CHECK(full.bytes_oor_addrs == 4 * full.oor_wires);
  CHECK(full.bytes_wires_out == 16 * full.live_wires);
  const TrafficReport back = TrafficReport::from_json(full.to_json());
  CHECK(back.to_json() == full.to_json());
}

TEST_CASE("pass lists") {
  const auto steps = parse_pass_list("baseline,full,segment:64,segment,rename,esw,oor,sched:16");
  REQUIRE(steps.size() == 8);
  CHECK(steps[2].arg == 64);
  CHECK(steps[3].arg == 0);
  CHECK(steps[7].arg == 16);
  CHECK(format_pass_list(steps) == "baseline,full,segment:64,segment,rename,esw,oor,sched:16");
  CHECK(parse_pass_list("").empty());
  for (const char* bad : {"fulll", "segment:0", "segment:x", "sched", "rename:3", "full,,rename"})
    CHECK_THROWS_AS(parse_pass_list(bad), std::invalid_argument);
}

TEST_CASE("compile driver") {
  const Circuit c = generate("adder:8");
  SimConfig cfg;
  const auto r = compile(c, parse_pass_list("segment,rename,esw,oor,sched:4"), cfg);
  CHECK(r.program.segment_size == 65536);
  CHECK(r.streams.ges.size() == 4);
  CHECK(r.scheduled);
  CHECK(r.lowered);
  const Circuit blocks = generate("blocks:4:8");
  CHECK_THROWS(compile(blocks, parse_pass_list("full,esw"), cfg));
  CHECK_THROWS(compile(blocks, parse_pass_list("full"), cfg));
  CHECK_NOTHROW(compile(blocks, parse_pass_list("full,rename"), cfg));
  CHECK_THROWS(compile(c, parse_pass_list("oor,full"), cfg));
  CHECK_THROWS(compile(c, parse_pass_list("rename,baseline"), cfg));
  const auto plain = compile(c, parse_pass_list("baseline"), cfg);
  CHECK(plain.streams.ges.size() == 16);
  CHECK(!plain.lowered);
}
