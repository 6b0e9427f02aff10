#pragma once

#include "gcaccel/compiler.hpp"
#include "gcaccel/dram.hpp"
#include "gcaccel/gcrypto.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gcaccel {

enum class Mode { Garbler, Evaluator };

const char* to_string(Mode m);

struct PipelineConfig {
  std::uint32_t and_latency_garbler = 21;
  std::uint32_t and_latency_evaluator = 18;
  std::uint32_t xor_latency = 1;
  std::uint32_t fetch_decode = 2;
  std::uint32_t sww_read = 3;
  std::uint32_t writeback = 2;
};

struct QueueDepths {
  std::uint32_t instr = 1024;
  std::uint32_t table = 256;
  std::uint32_t oor = 256;
};

struct SimConfig {
  Mode mode = Mode::Evaluator;
  std::uint32_t num_ges = 16;
  std::uint64_t sww_bytes = 2u << 20;
  std::uint32_t banks_per_ge = 4;
  /// SWW banks run at twice the GE clock.
  std::uint32_t sww_accesses_per_bank = 2;
  QueueDepths queues;
  DramConfig dram;
  PipelineConfig pipeline;
  std::uint32_t writeback_buffer = 64;
  /// 0 means "same as the DRAM base latency".
  std::uint32_t oor_retry_delay = 0;
  std::uint64_t deadlock_cycles = 200000;

  WindowModel window() const { return WindowModel::from_bytes(sww_bytes); }
  std::uint32_t num_banks() const { return num_ges * banks_per_ge; }
  std::uint32_t and_latency() const {
    return mode == Mode::Garbler ? pipeline.and_latency_garbler : pipeline.and_latency_evaluator;
  }
  std::uint32_t retry_delay() const {
    return oor_retry_delay ? oor_retry_delay : dram.base_latency_cycles;
  }
  void validate() const;

  /// key=value lines; unknown keys are errors. Keys: mode, ges, sww_bytes,
  /// banks_per_ge, dram.bandwidth, dram.latency, dram.burst, queue.instr,
  /// queue.table, queue.oor, wb_buffer, pipeline.{and_garbler,and_evaluator,
  /// xor,fetch_decode,sww_read,writeback}, oor_retry_delay, deadlock_cycles.
  /// dram.bandwidth also accepts ddr4, hbm2, unlimited.
  void set(const std::string& key, const std::string& value);
  static SimConfig parse(std::string_view text, SimConfig base);
  static SimConfig parse(std::string_view text);
  std::string to_text() const;
};

struct BankSlot {
  std::uint32_t bank;
  std::uint32_t slot;
};

/// Consecutive addresses stripe across banks.
BankSlot sww_map(Address addr, std::uint32_t capacity, std::uint32_t num_banks);

/*! \brief Resident wire slots of the SWW.
 *
 * Slot of address a is a mod capacity; the resident range is
 * [base, base + capacity - 1] and only moves forward by half a window.
 */
struct SwwState {
  struct Slot {
    Address addr = 0;
    bool valid = false;
    Label value;
  };

  WindowModel window;
  Address base = 0;
  std::vector<Slot> slots;

  explicit SwwState(const WindowModel& w, Address initial_base = 0);

  bool in_range(Address a) const { return a >= base && a < base + window.capacity; }
  Slot& slot(Address a) { return slots[a % window.capacity]; }
  const Slot& slot(Address a) const { return slots[a % window.capacity]; }
  /// True when a holds a valid value for exactly this address.
  bool holds(Address a) const;
  void write(Address a, const Label& v);
  /// Reads a resident, valid wire; throws SimError otherwise.
  const Label& read(Address a) const;
};

/// Slides the window by half when `new_output` is the first address past the top.
void window_advance(SwwState& s, Address new_output);

class SimError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct GeCounters {
  std::uint64_t issued = 0;
  std::uint64_t busy = 0;
  std::uint64_t idle = 0;
  std::uint64_t operand_not_ready = 0;
  std::uint64_t bank_conflict = 0;
  std::uint64_t queue_empty = 0;
  std::uint64_t writeback_backpressure = 0;
  std::uint64_t window_wait = 0;

  std::uint64_t stalls() const {
    return operand_not_ready + bank_conflict + queue_empty + writeback_backpressure + window_wait;
  }
};

struct ByteCounters {
  std::uint64_t wires_in = 0;
  std::uint64_t wires_out = 0;
  std::uint64_t tables = 0;
  std::uint64_t instructions = 0;
  std::uint64_t oor_addrs = 0;
  std::uint64_t oor_retry = 0;  ///< re-reads of wires not yet valid in DRAM

  std::uint64_t total() const { return wires_in + wires_out + tables + instructions + oor_addrs; }
};

struct SimReport {
  Mode mode = Mode::Evaluator;
  std::uint32_t num_ges = 0;
  std::uint64_t total_cycles = 0;
  std::uint64_t gates = 0;
  double gates_per_cycle = 0.0;
  /// Gates per cycle between the first and last issue.
  double steady_gates_per_cycle = 0.0;
  std::uint64_t first_issue = 0;
  std::uint64_t last_issue = 0;
  std::vector<GeCounters> ges;
  ByteCounters bytes;
  std::uint64_t live_wires_written = 0;
  std::uint64_t oor_wires_read = 0;
  std::uint64_t oor_retries = 0;
  std::uint64_t preloaded_inputs = 0;
  std::uint64_t window_advances = 0;
  std::uint64_t bank_grants = 0;
  /// Issue cycle per program position.
  std::vector<std::uint64_t> issue_cycle;
  /// GE per program position.
  std::vector<std::uint32_t> ge_of;

  /// Evaluator: active output labels. Garbler: output zero labels.
  std::vector<Label> output_labels;
  /// Garbler: tables in program order.
  std::vector<GarbledTable> tables;
  std::string digest;

  std::string to_json() const;
};

/// Contents of off-chip memory before a run.
struct DramImage {
  /// Per program input address 1..num_inputs: active labels (evaluator) or zero labels (garbler).
  std::vector<Label> input_labels;
  /// Evaluator only: program-order tables.
  std::vector<GarbledTable> tables;
  /// Garbler only.
  std::optional<Label> delta;
};

struct SimOptions {
  /// Queues never run dry, no DRAM, unlimited writeback buffering.
  bool ideal_memory = false;
  /// Compute labels and tables; ideal runs may switch this off.
  bool functional = true;
  /// Optional per-cycle CSV: cycle,issued,window_base,dram_inflight,wb_pending
  std::ostream* trace = nullptr;
};

SimReport simulate(const StreamSet& streams, const DramImage& image, const SimConfig& cfg,
                   const SimOptions& opts = {});

/// Dispatches the program to GEs under ideal memory; returns the GE per position and the report.
SimReport dispatch_schedule(const Program& lowered, const SimConfig& cfg);

/// Cycles the DRAM channel alone needs to move `bytes` plus one access latency.
std::uint64_t data_movement_cycles(std::uint64_t bytes, const DramConfig& dram);

/// Compute-only, traffic-only and full cycle counts of one stream set.
struct CycleDecomposition {
  std::uint64_t full = 0;
  std::uint64_t compute_only = 0;  ///< ideal-memory replay
  std::uint64_t traffic_only = 0;  ///< data_movement_cycles of the run's bytes
};

CycleDecomposition decompose_cycles(const StreamSet& streams, const DramImage& image,
                                    const SimConfig& cfg, const SimOptions& opts = {});

/// FNV-1a digest over output labels and tables.
std::string functional_digest(const std::vector<Label>& outputs,
                              const std::vector<GarbledTable>& tables);

}  // namespace gcaccel
