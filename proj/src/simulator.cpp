#include "gcaccel/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace gcaccel {

const char* to_string(Mode m) { return m == Mode::Garbler ? "garbler" : "evaluator"; }

BankSlot sww_map(Address addr, std::uint32_t capacity, std::uint32_t num_banks) {
  return {addr % num_banks, (addr % capacity) / num_banks};
}

SwwState::SwwState(const WindowModel& w, Address initial_base)
    : window(w), base(initial_base), slots(w.capacity) {
  w.validate();
  if (initial_base % w.half()) throw std::invalid_argument("window base must be a multiple of H");
}

bool SwwState::holds(Address a) const {
  const Slot& s = slot(a);
  return in_range(a) && s.valid && s.addr == a;
}

void SwwState::write(Address a, const Label& v) {
  if (!in_range(a))
    throw SimError("write of wire " + std::to_string(a) + " outside window [" +
                   std::to_string(base) + ", " + std::to_string(base + window.capacity - 1) + "]");
  slot(a) = {a, true, v};
}

const Label& SwwState::read(Address a) const {
  if (!in_range(a))
    throw SimError("read of wire " + std::to_string(a) + " outside window [" +
                   std::to_string(base) + ", " + std::to_string(base + window.capacity - 1) +
                   "] without OoR marking");
  if (!holds(a)) throw SimError("read of wire " + std::to_string(a) + " before it is valid");
  return slot(a).value;
}

namespace {

void slide_half(SwwState& s) {
  const Address h = s.window.half();
  for (Address a = s.base; a < s.base + h; ++a) s.slot(a).valid = false;
  s.base += h;
}

}  // namespace

void window_advance(SwwState& s, Address new_output) {
  if (s.in_range(new_output)) return;
  if (new_output != s.base + s.window.capacity)
    throw SimError("output " + std::to_string(new_output) + " jumps past the window top " +
                   std::to_string(s.base + s.window.capacity - 1));
  slide_half(s);
}

std::string functional_digest(const std::vector<Label>& outputs,
                              const std::vector<GarbledTable>& tables) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](const Label& l) {
    for (auto b : l.bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& l : outputs) mix(l);
  for (const auto& t : tables) {
    mix(t.t_g);
    mix(t.t_e);
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

namespace {

constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();

enum class Block : std::uint8_t {
  None,
  OperandNotReady,
  BankConflict,
  QueueEmpty,
  WritebackBackpressure,
  WindowWait
};

struct Entry {
  std::uint32_t pos = 0;
  Instruction ins;
  std::uint32_t table_ordinal = 0;
  bool access_done = false;
  bool oor_taken[2] = {false, false};
  Label oor_value[2];
  bool table_taken = false;
  GarbledTable table;
  bool bank_granted[2] = {false, false};
};

struct OorRecord {
  Address addr = 0;
  enum class State { Waiting, Inflight, Retry, Done } state = State::Waiting;
  std::uint64_t retry_at = 0;
  std::uint32_t attempts = 0;
  Label value;
};

struct WbEntry {
  bool is_table = false;
  Address addr = 0;
  std::uint32_t ordinal = 0;
  Label value;
  GarbledTable table;
};

struct GeState {
  // stream (replay mode)
  std::vector<std::uint32_t> positions;
  std::vector<Instruction> instrs;
  std::vector<std::uint32_t> table_ords;
  std::vector<Address> oor_addrs;

  std::vector<std::optional<Entry>> slots;

  // instruction queue
  std::size_t instr_requested = 0;
  std::size_t instr_arrived = 0;
  std::size_t instr_fetched = 0;
  // table queue (evaluator)
  std::size_t table_requested = 0;
  std::size_t table_arrived = 0;
  std::size_t table_popped = 0;
  std::size_t and_seen = 0;
  // OoR address and wire queues
  std::size_t oor_addr_requested = 0;
  std::size_t oor_addr_arrived = 0;
  std::size_t oor_addr_consumed = 0;  // moved into records
  std::deque<OorRecord> oor_records;
  std::uint64_t oor_head_seq = 0;  // seq of oor_records.front()
  std::size_t oor_popped = 0;
  // writeback buffer
  std::deque<WbEntry> wb_queue;
  std::uint32_t wb_reserved = 0;

  GeCounters counters;
  // per-cycle flags
  bool issued_now = false;
  Block issue_block = Block::None;
  Block access_block = Block::None;
  bool fetch_starved = false;

  bool frontend_empty() const {
    return std::none_of(slots.begin(), slots.end(), [](const auto& s) { return s.has_value(); });
  }
};

struct PendingWrite {
  std::uint64_t cycle;
  std::uint32_t idx;
  std::uint32_t ge;
  bool operator>(const PendingWrite& o) const {
    return cycle != o.cycle ? cycle > o.cycle : idx > o.idx;
  }
};

class Engine final : public DramModel::Client {
public:
  Engine(const SimConfig& cfg, const SimOptions& opts, const DramImage* image)
      : cfg_(cfg),
        opts_(opts),
        image_(image),
        window_(cfg.window()),
        sww_(window_, 0),
        dram_(cfg.dram) {
    cfg_.validate();
    fd_ = cfg.pipeline.fetch_decode;
    rd_ = cfg.pipeline.sww_read;
    stages_ = fd_ + rd_;
    access_stage_ = fd_ + (rd_ >= 2 ? 1 : 0);
    and_lat_ = cfg.and_latency();
    xor_lat_ = cfg.pipeline.xor_latency;
    wb_lat_ = cfg.pipeline.writeback;
    garbler_ = cfg.mode == Mode::Garbler;
  }

  /// Replay mode: per-GE streams.
  void load_streams(const StreamSet& s) {
    if (s.ges.size() != cfg_.num_ges)
      throw std::invalid_argument("stream set has " + std::to_string(s.ges.size()) +
                                  " GE streams but the config has " +
                                  std::to_string(cfg_.num_ges));
    if (s.window_capacity && s.window_capacity != window_.capacity)
      throw std::invalid_argument("streams were compiled for a different SWW capacity");
    num_inputs_ = s.num_inputs;
    num_instr_ = s.num_instructions;
    outputs_ = s.output_addresses;
    ges_.assign(cfg_.num_ges, GeState{});
    std::size_t seen = 0;
    for (std::uint32_t g = 0; g < cfg_.num_ges; ++g) {
      const GeStream& gs = s.ges[g];
      if (gs.positions.size() != gs.words.size())
        throw std::invalid_argument("stream position/word count mismatch");
      GeState& ge = ges_[g];
      ge.positions = gs.positions;
      ge.table_ords = gs.tables;
      ge.oor_addrs = gs.oor;
      ge.instrs.reserve(gs.words.size());
      std::size_t zeros = 0, ands = 0;
      for (std::size_t k = 0; k < gs.words.size(); ++k) {
        Instruction ins = decode_instruction(gs.words[k]);
        ins.out = num_inputs_ + 1 + gs.positions[k];
        zeros += (ins.op != Opcode::Nop) * ((ins.in0 == kOorAddress) + (ins.in1 == kOorAddress));
        ands += ins.op == Opcode::And;
        ge.instrs.push_back(ins);
      }
      if (zeros != gs.oor.size())
        throw std::invalid_argument("GE " + std::to_string(g) +
                                    ": OoR stream length does not match zero operands");
      if (ands != gs.tables.size())
        throw std::invalid_argument("GE " + std::to_string(g) +
                                    ": table stream length does not match AND count");
      ge.slots.assign(stages_, std::nullopt);
      seen += gs.positions.size();
    }
    if (seen != num_instr_) throw std::invalid_argument("streams do not cover the program");
    setup_common();
  }

  /// Dispatch mode: one shared program, GEs take the next instruction when free.
  void load_dispatch(const Program& p) {
    if (!p.renamed()) throw std::invalid_argument("scheduling needs a renamed program");
    dispatch_ = true;
    num_inputs_ = p.num_inputs;
    num_instr_ = static_cast<std::uint32_t>(p.instrs.size());
    outputs_ = p.output_addresses;
    dispatch_instrs_ = p.instrs;
    dispatch_table_ord_.resize(p.instrs.size());
    std::uint32_t ord = 0;
    for (std::size_t k = 0; k < p.instrs.size(); ++k)
      dispatch_table_ord_[k] = p.instrs[k].op == Opcode::And ? ord++ : 0;
    ges_.assign(cfg_.num_ges, GeState{});
    for (auto& ge : ges_) ge.slots.assign(stages_, std::nullopt);
    setup_common();
  }

  SimReport run() {
    std::uint64_t t = 0;
    std::uint64_t last_progress = 0;
    for (;; ++t) {
      progress_ = false;
      now_ = t;
      if (!opts_.ideal_memory) {
        for (const auto& c : dram_.tick(t, *this)) complete(c, t);
      }
      drain_writes(t);
      for (std::uint32_t g = 0; g < ges_.size(); ++g) {
        GeState& ge = ges_[g];
        ge.issued_now = false;
        ge.issue_block = ge.access_block = Block::None;
        ge.fetch_starved = false;
        try_issue(g, t);
        advance_frontend(ge);
        try_fetch(g);
      }
      bank_use_.assign(cfg_.num_banks(), 0);
      for (std::uint32_t g = 0; g < ges_.size(); ++g) try_access(g, t);
      account(t);
      try_window_advance();
      if (opts_.trace) trace_row(t);
      if (progress_) last_progress = t;
      if (finished()) break;
      if (t - last_progress > cfg_.deadlock_cycles) throw SimError(deadlock_dump(t));
    }
    return make_report(t + 1);
  }

  // DramModel::Client ------------------------------------------------------

  std::uint32_t pending_bytes(std::size_t stream) override {
    if (stream == preload_stream_) {
      const std::size_t left = preload_.size() - preload_requested_;
      return static_cast<std::uint32_t>(std::min<std::size_t>(left, labels_per_burst()) * 16);
    }
    const auto g = stream / kStreamsPerGe;
    GeState& ge = ges_[g];
    switch (stream % kStreamsPerGe) {
      case kInstr: {
        const std::size_t left = ge.instrs.size() - ge.instr_requested;
        const std::size_t occupied = ge.instr_requested - ge.instr_fetched;
        const std::size_t free = cfg_.queues.instr - std::min<std::size_t>(occupied, cfg_.queues.instr);
        const std::size_t want =
            std::min<std::size_t>({left, cfg_.dram.burst_bytes / 8, cfg_.queues.instr});
        return want && free >= want ? static_cast<std::uint32_t>(want * 8) : 0;
      }
      case kTable: {
        if (garbler_) return 0;
        const std::size_t left = ge.table_ords.size() - ge.table_requested;
        const std::size_t occupied = ge.table_requested - ge.table_popped;
        const std::size_t free = cfg_.queues.table - std::min<std::size_t>(occupied, cfg_.queues.table);
        const std::size_t want =
            std::min<std::size_t>({left, cfg_.dram.burst_bytes / 32, cfg_.queues.table});
        return want && free >= want ? static_cast<std::uint32_t>(want * 32) : 0;
      }
      case kOorAddr: {
        const std::size_t left = ge.oor_addrs.size() - ge.oor_addr_requested;
        const std::size_t occupied = ge.oor_addr_requested - ge.oor_addr_consumed;
        const std::size_t free = cfg_.queues.oor - std::min<std::size_t>(occupied, cfg_.queues.oor);
        const std::size_t want =
            std::min<std::size_t>({left, cfg_.dram.burst_bytes / 4, cfg_.queues.oor});
        return want && free >= want ? static_cast<std::uint32_t>(want * 4) : 0;
      }
      case kOorWire: {
        for (const auto& r : ge.oor_records)
          if (r.state == OorRecord::State::Retry && r.retry_at <= now_) return 16;
        if (ge.oor_addr_arrived > ge.oor_addr_consumed && ge.oor_records.size() < cfg_.queues.oor)
          return 16;
        return 0;
      }
      case kWriteback:
        if (ge.wb_queue.empty()) return 0;
        return ge.wb_queue.front().is_table ? 32 : 16;
    }
    return 0;
  }

  std::uint64_t issued(std::size_t stream, std::uint32_t bytes) override {
    progress_ = true;
    if (stream == preload_stream_) {
      const std::uint64_t tag = preload_requested_;
      preload_requested_ += bytes / 16;
      bytes_.wires_in += bytes;
      return tag;
    }
    const auto g = stream / kStreamsPerGe;
    GeState& ge = ges_[g];
    switch (stream % kStreamsPerGe) {
      case kInstr: {
        const std::uint64_t tag = ge.instr_requested;
        ge.instr_requested += bytes / 8;
        bytes_.instructions += bytes;
        return tag;
      }
      case kTable: {
        const std::uint64_t tag = ge.table_requested;
        ge.table_requested += bytes / 32;
        bytes_.tables += bytes;
        return tag;
      }
      case kOorAddr: {
        const std::uint64_t tag = ge.oor_addr_requested;
        ge.oor_addr_requested += bytes / 4;
        bytes_.oor_addrs += bytes;
        return tag;
      }
      case kOorWire: {
        for (std::size_t i = 0; i < ge.oor_records.size(); ++i) {
          OorRecord& r = ge.oor_records[i];
          if (r.state == OorRecord::State::Retry && r.retry_at <= now_) {
            r.state = OorRecord::State::Inflight;
            ++r.attempts;
            bytes_.oor_retry += bytes;
            ++oor_retries_;
            return ge.oor_head_seq + i;
          }
        }
        OorRecord r;
        r.addr = ge.oor_addrs[ge.oor_addr_consumed++];
        r.state = OorRecord::State::Inflight;
        r.attempts = 1;
        ge.oor_records.push_back(r);
        bytes_.wires_in += bytes;
        return ge.oor_head_seq + ge.oor_records.size() - 1;
      }
      case kWriteback: {
        WbEntry e = ge.wb_queue.front();
        ge.wb_queue.pop_front();
        --ge.wb_reserved;
        if (e.is_table)
          bytes_.tables += bytes;
        else
          bytes_.wires_out += bytes;
        const std::uint64_t tag = wb_inflight_.size();
        wb_inflight_.push_back(e);
        return tag;
      }
    }
    throw std::logic_error("unknown DRAM stream");
  }

  std::vector<std::uint32_t> ge_assignment() const { return ge_of_; }

private:
  static constexpr std::size_t kStreamsPerGe = 5;
  enum : std::size_t { kInstr = 0, kTable = 1, kOorAddr = 2, kOorWire = 3, kWriteback = 4 };

  std::size_t labels_per_burst() const { return std::max<std::uint32_t>(1, cfg_.dram.burst_bytes / 16); }

  void setup_common() {
    first_out_ = num_inputs_ + 1;
    const Address last_out = first_out_ + (num_instr_ ? num_instr_ - 1 : 0);
    const std::uint32_t h0 = window_.half_of(first_out_);
    const Address base0 = h0 >= 1 ? (h0 - 1) * window_.half() : 0;
    sww_ = SwwState(window_, base0);
    last_half_ = window_.half_of(last_out);
    half_total_.assign(last_half_ + 1, 0);
    for (std::uint32_t k = 0; k < num_instr_; ++k) ++half_total_[window_.half_of(first_out_ + k)];
    half_issued_.assign(last_half_ + 1, 0);
    half_written_.assign(last_half_ + 1, 0);
    first_unissued_ = first_unwritten_ = 0;
    bump_half_cursors();

    ready_at_.assign(num_instr_, kNever);
    written_.assign(num_instr_, 0);
    values_.assign(num_instr_, Label{});
    issue_cycle_.assign(num_instr_, kNever);
    ge_of_.assign(num_instr_, 0);
    issued_instr_.assign(num_instr_, Instruction{});
    if (garbler_ && opts_.functional) {
      tables_of_.assign(num_instr_, GarbledTable{});
      table_ord_of_.assign(num_instr_, 0);
    }
    tables_out_.assign(0, GarbledTable{});

    // inputs that sit inside the initial window are preloaded
    for (Address a = std::max<Address>(1, base0);
         a <= num_inputs_ && a < base0 + window_.capacity; ++a)
      preload_.push_back(a);
    preload_done_.assign(num_inputs_ + 1, 0);

    if (opts_.functional) {
      if (!image_) throw std::invalid_argument("functional simulation needs a DRAM image");
      if (image_->input_labels.size() != num_inputs_)
        throw std::invalid_argument("DRAM image has " + std::to_string(image_->input_labels.size()) +
                                    " input labels, program has " + std::to_string(num_inputs_));
      if (garbler_ && !image_->delta) throw std::invalid_argument("garbler mode needs delta");
      for (Address a = 1; a <= num_inputs_; ++a) dram_wires_[a] = image_->input_labels[a - 1];
      if (garbler_) {
        std::size_t ands = 0;
        for (const auto& ge : ges_) ands += ge.table_ords.size();
        if (dispatch_)
          ands = static_cast<std::size_t>(std::count_if(
              dispatch_instrs_.begin(), dispatch_instrs_.end(),
              [](const Instruction& i) { return i.op == Opcode::And; }));
        tables_out_.assign(ands, GarbledTable{});
      }
    } else {
      for (Address a = 1; a <= num_inputs_; ++a) dram_wires_[a] = Label{};
    }

    if (opts_.ideal_memory) {
      for (Address a : preload_) {
        sww_.write(a, dram_wires_[a]);
        preload_done_[a] = 1;
      }
      preload_requested_ = preload_.size();
    } else {
      for (std::size_t g = 0; g < ges_.size() * kStreamsPerGe; ++g) dram_.add_stream();
      preload_stream_ = dram_.add_stream();
    }
  }

  void bump_half_cursors() {
    while (first_unissued_ <= last_half_ && half_issued_[first_unissued_] == half_total_[first_unissued_])
      ++first_unissued_;
    while (first_unwritten_ <= last_half_ &&
           half_written_[first_unwritten_] == half_total_[first_unwritten_])
      ++first_unwritten_;
  }

  // -- completions -----------------------------------------------------------

  void complete(const DramModel::Completion& c, std::uint64_t t) {
    progress_ = true;
    if (c.stream == preload_stream_) {
      for (std::size_t i = 0; i < c.bytes / 16; ++i) {
        const Address a = preload_[c.tag + i];
        if (sww_.in_range(a)) sww_.write(a, dram_wires_[a]);
        preload_done_[a] = 1;
      }
      return;
    }
    GeState& ge = ges_[c.stream / kStreamsPerGe];
    switch (c.stream % kStreamsPerGe) {
      case kInstr: ge.instr_arrived += c.bytes / 8; break;
      case kTable: ge.table_arrived += c.bytes / 32; break;
      case kOorAddr: ge.oor_addr_arrived += c.bytes / 4; break;
      case kOorWire: {
        OorRecord& r = ge.oor_records[c.tag - ge.oor_head_seq];
        auto it = dram_valid_.find(r.addr);
        const bool valid = r.addr <= num_inputs_ || (it != dram_valid_.end());
        if (valid) {
          r.value = dram_wires_[r.addr];
          r.state = OorRecord::State::Done;
        } else {
          r.state = OorRecord::State::Retry;
          r.retry_at = t + cfg_.retry_delay();
        }
        break;
      }
      case kWriteback: {
        const WbEntry& e = wb_inflight_[c.tag];
        if (e.is_table) {
          if (opts_.functional) tables_out_[e.ordinal] = e.table;
        } else {
          dram_wires_[e.addr] = e.value;
          dram_valid_.insert(e.addr);
          ++live_written_;
        }
        break;
      }
    }
  }

  void drain_writes(std::uint64_t t) {
    while (!writes_.empty() && writes_.top().cycle <= t) {
      const PendingWrite w = writes_.top();
      writes_.pop();
      progress_ = true;
      const Address a = first_out_ + w.idx;
      sww_.write(a, values_[w.idx]);
      written_[w.idx] = 1;
      ++half_written_[window_.half_of(a)];
      GeState& ge = ges_[w.ge];
      const Instruction& ins = instr_at(w.idx);
      if (ins.live) push_writeback(ge, WbEntry{false, a, 0, values_[w.idx], {}});
      if (garbler_ && ins.op == Opcode::And && opts_.functional)
        push_writeback(ge, WbEntry{true, a, table_ord_of_[w.idx], {}, tables_of_[w.idx]});
      else if (garbler_ && ins.op == Opcode::And)
        push_writeback(ge, WbEntry{true, a, 0, {}, {}});
    }
    bump_half_cursors();
  }

  void push_writeback(GeState& ge, const WbEntry& e) {
    if (opts_.ideal_memory) {
      --ge.wb_reserved;
      if (e.is_table) {
        bytes_.tables += 32;
        if (opts_.functional) tables_out_[e.ordinal] = e.table;
      } else {
        bytes_.wires_out += 16;
        dram_wires_[e.addr] = e.value;
        dram_valid_.insert(e.addr);
        ++live_written_;
      }
      return;
    }
    ge.wb_queue.push_back(e);
  }

  // -- pipeline ---------------------------------------------------------------

  const Instruction& instr_at(std::uint32_t idx) const { return issued_instr_[idx]; }

  std::uint32_t latency(Opcode op) const { return op == Opcode::And ? and_lat_ : xor_lat_; }

  /// Readiness of a non-OoR operand at issue cycle t.
  bool operand_ready(Address a, std::uint64_t t) const {
    if (a >= first_out_) return ready_at_[a - first_out_] <= t;
    return sww_.holds(a);
  }

  Label operand_value(Address a) const {
    if (a >= first_out_) {
      const auto idx = a - first_out_;
      if (sww_.holds(a)) return sww_.slot(a).value;
      if (!written_[idx]) return values_[idx];  // forwarded
      throw SimError("wire " + std::to_string(a) + " was evicted before its consumer issued");
    }
    return sww_.read(a);
  }

  void try_issue(std::uint32_t g, std::uint64_t t) {
    GeState& ge = ges_[g];
    auto& slot = ge.slots[stages_ - 1];
    if (!slot || !slot->access_done) return;
    Entry& e = *slot;
    const Instruction& ins = e.ins;
    const bool uses[2] = {ins.op != Opcode::Nop, ins.op != Opcode::Nop};
    const Address ops[2] = {ins.in0, ins.in1};
    for (int k = 0; k < 2; ++k) {
      if (!uses[k] || ops[k] == kOorAddress) continue;
      if (!operand_ready(ops[k], t)) {
        if (ops[k] <= num_inputs_ && !preload_pending(ops[k]))
          throw SimError("instruction " + std::to_string(e.pos) + " reads input wire " +
                         std::to_string(ops[k]) + " that is neither resident nor OoR");
        ge.issue_block = Block::OperandNotReady;
        return;
      }
    }
    const std::uint32_t need = (ins.live ? 1u : 0u) + (garbler_ && ins.op == Opcode::And ? 1u : 0u);
    if (!opts_.ideal_memory && ge.wb_reserved + need > cfg_.writeback_buffer) {
      ge.issue_block = Block::WritebackBackpressure;
      return;
    }
    ge.wb_reserved += need;

    const std::uint32_t idx = e.pos;
    issued_instr_[idx] = ins;
    if (opts_.functional) execute(e);
    const std::uint32_t lat = ins.op == Opcode::Nop ? 1 : latency(ins.op);
    ready_at_[idx] = t + lat;
    issue_cycle_[idx] = t;
    ge_of_[idx] = g;
    writes_.push({t + lat + wb_lat_, idx, g});
    ++half_issued_[window_.half_of(ins.out)];
    bump_half_cursors();
    ++ge.counters.issued;
    ge.issued_now = true;
    progress_ = true;
    slot.reset();
  }

  bool preload_pending(Address a) const {
    return a >= 1 && a <= num_inputs_ && !preload_done_[a] &&
           std::binary_search(preload_.begin(), preload_.end(), a);
  }

  void execute(Entry& e) {
    const Instruction& ins = e.ins;
    const std::uint32_t idx = e.pos;
    if (ins.op == Opcode::Nop) {
      values_[idx] = Label{};
      return;
    }
    const Label a = ins.in0 == kOorAddress ? e.oor_value[0] : operand_value(ins.in0);
    const Label b = ins.in1 == kOorAddress ? e.oor_value[1] : operand_value(ins.in1);
    if (ins.op == Opcode::Xor) {
      values_[idx] = free_xor(a, b);
      return;
    }
    if (garbler_) {
      auto [wc0, table] = garble_and(GlobalDelta{*image_->delta}, a, b, ins.out);
      values_[idx] = wc0;
      tables_of_[idx] = table;
      table_ord_of_[idx] = e.table_ordinal;
    } else {
      values_[idx] = eval_and(a, b, e.table, ins.out);
    }
  }

  void advance_frontend(GeState& ge) {
    for (std::size_t s = stages_ - 1; s-- > 0;) {
      auto& cur = ge.slots[s];
      if (!cur || ge.slots[s + 1]) continue;
      if (s == access_stage_ && !cur->access_done) continue;
      ge.slots[s + 1] = std::move(cur);
      cur.reset();
      progress_ = true;
    }
  }

  void try_fetch(std::uint32_t g) {
    GeState& ge = ges_[g];
    if (ge.slots[0]) return;
    Entry e;
    if (dispatch_) {
      if (dispatch_next_ >= dispatch_instrs_.size()) return;
      e.pos = static_cast<std::uint32_t>(dispatch_next_);
      e.ins = dispatch_instrs_[dispatch_next_];
      e.table_ordinal = dispatch_table_ord_[dispatch_next_];
      ++dispatch_next_;
    } else {
      if (ge.instr_fetched >= ge.instrs.size()) return;
      if (!opts_.ideal_memory && ge.instr_fetched >= ge.instr_arrived) {
        ge.fetch_starved = true;
        return;
      }
      e.pos = ge.positions[ge.instr_fetched];
      e.ins = ge.instrs[ge.instr_fetched];
      if (e.ins.op == Opcode::And) e.table_ordinal = ge.table_ords[ge.and_seen++];
      ++ge.instr_fetched;
    }
    ge.slots[0] = std::move(e);
    progress_ = true;
  }

  void try_access(std::uint32_t g, std::uint64_t) {
    GeState& ge = ges_[g];
    auto& slot = ge.slots[access_stage_];
    if (!slot || slot->access_done) return;
    Entry& e = *slot;
    const Instruction& ins = e.ins;

    if (ins.out >= sww_.base + window_.capacity) {
      ge.access_block = Block::WindowWait;
      return;
    }
    const Address ops[2] = {ins.in0, ins.in1};
    const bool active = ins.op != Opcode::Nop;
    // OoR operands pop in operand order
    for (int k = 0; k < 2 && active; ++k) {
      if (ops[k] != kOorAddress || e.oor_taken[k]) continue;
      if (!pop_oor(ge, e.oor_value[k])) {
        ge.access_block = Block::QueueEmpty;
        return;
      }
      e.oor_taken[k] = true;
      progress_ = true;
    }
    if (ins.op == Opcode::And && !garbler_ && !e.table_taken) {
      if (!pop_table(ge, e)) {
        ge.access_block = Block::QueueEmpty;
        return;
      }
      e.table_taken = true;
      progress_ = true;
    }
    bool all = true;
    for (int k = 0; k < 2 && active; ++k) {
      if (ops[k] == kOorAddress || e.bank_granted[k]) continue;
      if (ops[k] < sww_.base)
        throw SimError("instruction " + std::to_string(e.pos) + " reads departed wire " +
                       std::to_string(ops[k]) + " without OoR marking");
      const auto bank = sww_map(ops[k], window_.capacity, cfg_.num_banks()).bank;
      if (bank_use_[bank] < cfg_.sww_accesses_per_bank) {
        ++bank_use_[bank];
        ++bank_grants_;
        e.bank_granted[k] = true;
        progress_ = true;
      } else {
        all = false;
      }
    }
    if (!all) {
      ge.access_block = Block::BankConflict;
      return;
    }
    e.access_done = true;
  }

  bool pop_oor(GeState& ge, Label& value) {
    if (opts_.ideal_memory) {
      if (ge.oor_popped >= ge.oor_addrs.size() && !dispatch_) throw SimError("OoR stream underflow");
      if (opts_.functional && !dispatch_) {
        const Address a = ge.oor_addrs[ge.oor_popped];
        if (a > num_inputs_ && !dram_valid_.count(a))
          throw SimError("OoR wire " + std::to_string(a) + " was never spilled");
        value = dram_wires_[a];
      }
      ++ge.oor_popped;
      ++oor_read_;
      return true;
    }
    if (ge.oor_records.empty() || ge.oor_records.front().state != OorRecord::State::Done) {
      if (ge.oor_popped >= ge.oor_addrs.size()) throw SimError("OoR stream underflow");
      return false;
    }
    value = ge.oor_records.front().value;
    ge.oor_records.pop_front();
    ++ge.oor_head_seq;
    ++ge.oor_popped;
    ++oor_read_;
    return true;
  }

  bool pop_table(GeState& ge, Entry& e) {
    if (opts_.ideal_memory) {
      if (opts_.functional) e.table = image_->tables.at(e.table_ordinal);
      ++ge.table_popped;
      return true;
    }
    if (ge.table_popped >= ge.table_arrived) {
      if (ge.table_popped >= ge.table_ords.size()) throw SimError("table stream underflow");
      return false;
    }
    if (opts_.functional) e.table = image_->tables.at(ge.table_ords[ge.table_popped]);
    ++ge.table_popped;
    return true;
  }

  void account(std::uint64_t t) {
    for (auto& ge : ges_) {
      auto& c = ge.counters;
      if (ge.issued_now) {
        ++c.busy;
        first_issue_ = std::min(first_issue_, t);
        last_issue_ = t;
        continue;
      }
      Block b = ge.issue_block != Block::None ? ge.issue_block : ge.access_block;
      if (b == Block::None && ge.fetch_starved) b = Block::QueueEmpty;
      switch (b) {
        case Block::None: ++c.idle; break;
        case Block::OperandNotReady: ++c.operand_not_ready; break;
        case Block::BankConflict: ++c.bank_conflict; break;
        case Block::QueueEmpty: ++c.queue_empty; break;
        case Block::WritebackBackpressure: ++c.writeback_backpressure; break;
        case Block::WindowWait: ++c.window_wait; break;
      }
    }
  }

  void try_window_advance() {
    for (;;) {
      const std::uint32_t k = sww_.base / window_.half();
      if (k + 2 > last_half_) return;
      if (first_unissued_ < k + 2 || first_unwritten_ < k + 1) return;
      slide_half(sww_);
      ++advances_;
      progress_ = true;
    }
  }

  bool finished() const {
    if (!writes_.empty()) return false;
    if (dispatch_) {
      if (dispatch_next_ < dispatch_instrs_.size()) return false;
    }
    for (const auto& ge : ges_) {
      if (!ge.frontend_empty()) return false;
      if (!dispatch_ && ge.instr_fetched < ge.instrs.size()) return false;
      if (!ge.wb_queue.empty()) return false;
    }
    if (!opts_.ideal_memory && !dram_.idle()) return false;
    return true;
  }

  void trace_row(std::uint64_t t) {
    std::uint64_t issued = 0, wb = 0;
    for (const auto& ge : ges_) {
      issued += ge.issued_now;
      wb += ge.wb_queue.size();
    }
    *opts_.trace << t << ',' << issued << ',' << sww_.base << ',' << dram_.inflight() << ',' << wb
                 << '\n';
  }

  std::string deadlock_dump(std::uint64_t t) const {
    std::ostringstream os;
    os << "deadlock: no progress for " << cfg_.deadlock_cycles << " cycles at cycle " << t
       << "; window base " << sww_.base << ", first unissued half " << first_unissued_
       << ", first unwritten half " << first_unwritten_ << '\n';
    for (std::size_t g = 0; g < ges_.size(); ++g) {
      const GeState& ge = ges_[g];
      os << "  GE " << g << ": fetched " << ge.instr_fetched << '/' << ge.instrs.size()
         << ", oor popped " << ge.oor_popped << '/' << ge.oor_addrs.size() << ", wb queue "
         << ge.wb_queue.size() << ", slots";
      for (const auto& s : ge.slots) {
        if (s)
          os << ' ' << s->pos << (s->access_done ? "*" : "");
        else
          os << " -";
      }
      os << '\n';
    }
    return os.str();
  }

  SimReport make_report(std::uint64_t cycles) {
    SimReport r;
    r.mode = cfg_.mode;
    r.num_ges = cfg_.num_ges;
    r.total_cycles = cycles;
    r.gates = num_instr_;
    r.gates_per_cycle = cycles ? double(num_instr_) / double(cycles) : 0.0;
    if (num_instr_) {
      r.first_issue = first_issue_;
      r.last_issue = last_issue_;
      r.steady_gates_per_cycle = double(num_instr_) / double(last_issue_ - first_issue_ + 1);
    }
    for (const auto& ge : ges_) r.ges.push_back(ge.counters);
    r.bytes = bytes_;
    if (opts_.ideal_memory) {
      // nothing crossed a modeled channel; report the equivalent stream volume
      r.bytes.instructions = 8ull * num_instr_;
      r.bytes.wires_in = 16ull * (oor_read_ + preload_.size());
      r.bytes.oor_addrs = 4ull * oor_read_;
      if (!garbler_) {
        std::uint64_t ands = 0;
        for (const auto& ge : ges_) ands += ge.table_popped;
        r.bytes.tables = 32ull * ands;
      }
    }
    r.live_wires_written = live_written_;
    r.oor_wires_read = oor_read_;
    r.oor_retries = oor_retries_;
    r.preloaded_inputs = preload_.size();
    r.window_advances = advances_;
    r.bank_grants = bank_grants_;
    r.issue_cycle = issue_cycle_;
    r.ge_of = ge_of_;
    if (opts_.functional) {
      for (Address a : outputs_) {
        if (a <= num_inputs_) {
          r.output_labels.push_back(dram_wires_.at(a));
          continue;
        }
        if (!dram_valid_.count(a))
          throw SimError("output wire " + std::to_string(a) + " never reached DRAM");
        r.output_labels.push_back(dram_wires_.at(a));
      }
      if (garbler_) r.tables = tables_out_;
      r.digest = functional_digest(r.output_labels, r.tables);
    }
    return r;
  }

  SimConfig cfg_;
  SimOptions opts_;
  const DramImage* image_;
  WindowModel window_;
  SwwState sww_;
  DramModel dram_;

  std::uint32_t fd_ = 0, rd_ = 0, stages_ = 0, access_stage_ = 0;
  std::uint32_t and_lat_ = 0, xor_lat_ = 0, wb_lat_ = 0;
  bool garbler_ = false;
  bool progress_ = false;
  std::uint64_t now_ = 0;

  bool dispatch_ = false;
  std::vector<Instruction> dispatch_instrs_;
  std::vector<std::uint32_t> dispatch_table_ord_;
  std::size_t dispatch_next_ = 0;

  std::uint32_t num_inputs_ = 0;
  std::uint32_t num_instr_ = 0;
  Address first_out_ = 1;
  std::vector<Address> outputs_;
  std::vector<GeState> ges_;

  std::uint32_t last_half_ = 0;
  std::vector<std::uint32_t> half_total_, half_issued_, half_written_;
  std::uint32_t first_unissued_ = 0, first_unwritten_ = 0;

  std::vector<std::uint64_t> ready_at_;
  std::vector<std::uint8_t> written_;
  std::vector<Label> values_;
  std::vector<std::uint64_t> issue_cycle_;
  std::vector<std::uint32_t> ge_of_;
  std::vector<Instruction> issued_instr_;
  std::vector<GarbledTable> tables_of_;
  std::vector<std::uint32_t> table_ord_of_;
  std::priority_queue<PendingWrite, std::vector<PendingWrite>, std::greater<>> writes_;

  std::vector<Address> preload_;
  std::size_t preload_requested_ = 0;
  std::vector<std::uint8_t> preload_done_;
  std::size_t preload_stream_ = std::numeric_limits<std::size_t>::max();

  std::unordered_map<Address, Label> dram_wires_;
  std::unordered_set<Address> dram_valid_;
  std::vector<WbEntry> wb_inflight_;
  std::vector<GarbledTable> tables_out_;

  std::vector<std::uint32_t> bank_use_;
  ByteCounters bytes_;
  std::uint64_t live_written_ = 0, oor_read_ = 0, oor_retries_ = 0, advances_ = 0, bank_grants_ = 0;
  std::uint64_t first_issue_ = kNever, last_issue_ = 0;
};

}  // namespace

SimReport simulate(const StreamSet& streams, const DramImage& image, const SimConfig& cfg,
                   const SimOptions& opts) {
  Engine e(cfg, opts, &image);
  e.load_streams(streams);
  return e.run();
}

SimReport dispatch_schedule(const Program& lowered, const SimConfig& cfg) {
  SimOptions opts;
  opts.ideal_memory = true;
  opts.functional = false;
  Engine e(cfg, opts, nullptr);
  e.load_dispatch(lowered);
  return e.run();
}

std::uint64_t data_movement_cycles(std::uint64_t bytes, const DramConfig& dram) {
  if (bytes == 0) return 0;
  if (dram.unlimited()) return dram.base_latency_cycles + 1;
  const double t = static_cast<double>(bytes) / dram.bandwidth_bytes_per_cycle;
  // the token comparison tolerates 1e-9 bytes of rounding
  const auto whole = static_cast<std::uint64_t>(std::ceil(t - 1e-6));
  return whole + dram.base_latency_cycles;
}

CycleDecomposition decompose_cycles(const StreamSet& streams, const DramImage& image,
                                    const SimConfig& cfg, const SimOptions& opts) {
  CycleDecomposition d;
  const SimReport full = simulate(streams, image, cfg, opts);
  SimOptions ideal = opts;
  ideal.ideal_memory = true;
  ideal.trace = nullptr;
  d.full = full.total_cycles;
  d.compute_only = simulate(streams, image, cfg, ideal).total_cycles;
  d.traffic_only = data_movement_cycles(full.bytes.total(), cfg.dram);
  return d;
}

}  // namespace gcaccel
