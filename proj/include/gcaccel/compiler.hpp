#pragma once

#include "gcaccel/isa.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gcaccel {

struct SimConfig;

/*! \brief Sliding wire window geometry.
 *
 * While producing outputs in half h (h >= 1) the resident halves are
 * {h-1, h}; the window starts at the half before the first output (or 0).
 */
struct WindowModel {
  std::uint32_t capacity = 131072;

  static WindowModel from_bytes(std::uint64_t sww_bytes);

  std::uint32_t half() const { return capacity / 2; }
  std::uint32_t half_of(Address a) const { return a / half(); }
  /// Window base before any instruction of `p` runs.
  Address initial_base(const Program& p) const;
  /// True when `operand` is resident while producing `out`.
  bool resident(Address operand, Address out) const {
    return std::uint64_t{half_of(operand)} + 1 >= half_of(out);
  }
  void validate() const;
};

/// Per-gate-engine streams produced by the scheduler.
struct GeStream {
  std::vector<std::uint32_t> positions;  ///< program positions, increasing
  std::vector<std::uint64_t> words;      ///< encoded instructions, same order
  std::vector<std::uint32_t> tables;     ///< table ordinals (program-order AND index)
  std::vector<Address> oor;              ///< OoR wire addresses in pop order
};

struct LiveWrite {
  std::uint32_t position;
  Address address;
};

struct StreamSet {
  std::uint32_t num_inputs = 0;
  std::uint32_t num_instructions = 0;
  std::uint32_t window_capacity = 0;
  std::vector<Address> output_addresses;
  std::vector<GeStream> ges;
  std::vector<LiveWrite> live_writes;  ///< program order

  std::size_t oor_count() const;
  std::size_t table_count() const;
};

struct TrafficReport {
  std::uint64_t live_wires = 0;
  std::uint64_t oor_wires = 0;
  std::uint64_t total_wires = 0;
  std::uint64_t preloaded_inputs = 0;
  std::uint64_t bytes_wires_in = 0;
  std::uint64_t bytes_wires_out = 0;
  std::uint64_t bytes_tables = 0;
  std::uint64_t bytes_instructions = 0;
  std::uint64_t bytes_oor_addrs = 0;

  std::uint64_t bytes_total() const {
    return bytes_wires_in + bytes_wires_out + bytes_tables + bytes_instructions + bytes_oor_addrs;
  }
  std::string to_json() const;
  static TrafficReport from_json(std::string_view text);
};

/// ASAP dependence levels of the program's instructions (inputs at level 0).
std::vector<std::uint32_t> program_levels(const Program& p);

Program reorder_full(const Program& p);
Program reorder_segment(const Program& p, std::uint32_t segment_size);
Program rename_wires(const Program& p);
/// Clears the live bit of spent wires; circuit outputs stay live.
Program mark_live(const Program& p, const WindowModel& w);
Program mark_all_live(const Program& p);

struct OorLowering {
  Program program;
  std::vector<Address> oor;  ///< program order; in0 before in1
};

OorLowering lower_oor(const Program& p, const WindowModel& w);

/// Builds streams from a GE assignment (one entry per program position).
StreamSet build_streams(const OorLowering& lowered, const std::vector<std::uint32_t>& ge_of,
                        std::uint32_t num_ges, const WindowModel& w);

/// Greedy in-order dispatch under the timing model with ideal memory.
StreamSet schedule_ges(const OorLowering& lowered, const SimConfig& cfg);
StreamSet schedule_ges(const OorLowering& lowered, std::uint32_t num_ges, const WindowModel& w);

TrafficReport traffic_report(const Program& p, const WindowModel& w, const StreamSet& streams);
TrafficReport traffic_report(const Program& p, const WindowModel& w);

// ---------------------------------------------------------------------------
// pass pipeline

struct PassStep {
  enum class Kind { Baseline, Full, Segment, Rename, Esw, Oor, Sched } kind;
  std::uint32_t arg = 0;  ///< segment size (0 = half window) or GE count
};

/// Parses "baseline,full,segment:N,rename,esw,oor,sched:G". Throws std::invalid_argument.
std::vector<PassStep> parse_pass_list(std::string_view text);
std::string format_pass_list(const std::vector<PassStep>& steps);

struct CompileResult {
  Program program;  ///< final program (OoR-lowered if requested)
  Program source;   ///< program just before OoR lowering (no zero operands)
  std::vector<Address> oor;
  bool lowered = false;
  bool scheduled = false;
  StreamSet streams;
  TrafficReport traffic;
};

/// Runs the pass list on the circuit. A sched:G step sets the GE count used for scheduling.
CompileResult compile(const Circuit& c, const std::vector<PassStep>& passes, const SimConfig& cfg);

}  // namespace gcaccel
