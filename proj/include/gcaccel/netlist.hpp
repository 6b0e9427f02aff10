#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gcaccel {

using WireId = std::uint32_t;

/// One bit per element, 0 or 1.
using Bits = std::vector<std::uint8_t>;

enum class GateOp : std::uint8_t { And, Xor, Inv };

const char* to_string(GateOp op);

struct Gate {
  GateOp op = GateOp::And;
  std::array<WireId, 2> in{};
  WireId out = 0;

  int arity() const { return op == GateOp::Inv ? 1 : 2; }
  friend bool operator==(const Gate&, const Gate&) = default;
};

/*! \brief Boolean netlist in single-assignment form.
 *
 * Gates are stored in a topological order. Circuits read from Bristol files
 * place inputs at wires 0..I-1 and outputs at the last O wires; internal
 * views (e.g. a compiled program) may use arbitrary wire ids.
 */
struct Circuit {
  std::uint32_t num_wires = 0;
  std::vector<std::uint32_t> input_widths;
  std::vector<std::uint32_t> output_widths;
  std::vector<WireId> inputs;
  std::vector<WireId> outputs;
  std::vector<Gate> gates;

  std::size_t and_count() const;
  bool has_inv() const;
  /// Inputs are 0..I-1, outputs the last O wires, widths add up.
  bool bristol_layout() const;

  friend bool operator==(const Circuit&, const Circuit&) = default;
};

/// Syntax or semantic problem in a Bristol file or a hand-built circuit.
class CircuitError : public std::runtime_error {
public:
  enum class Kind { Syntax, Semantic };

  CircuitError(Kind kind, std::size_t line, std::size_t column, const std::string& msg);

  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  Kind kind_;
  std::size_t line_;
  std::size_t column_;
};

/// Throws CircuitError (line 0) when single assignment, ordering or id range is broken.
void validate(const Circuit& c);

Circuit parse_bristol(std::istream& in);
Circuit parse_bristol_text(std::string_view text);
Circuit read_bristol_file(const std::string& path);

void write_bristol(std::ostream& out, const Circuit& c);
std::string write_bristol_text(const Circuit& c);

Bits plaintext_evaluate(const Circuit& c, const Bits& input_bits);

struct LevelStats {
  std::uint32_t num_levels = 0;
  std::vector<std::uint32_t> gates_per_level;
  std::size_t and_count = 0;
  double and_fraction = 0.0;
  double avg_ilp = 0.0;
};

struct LevelSchedule {
  std::vector<std::uint32_t> level;  ///< per gate, >= 1
  LevelStats stats;
};

/// ASAP levels: primary inputs at 0, a gate one past its deepest producer.
LevelSchedule level_schedule(const Circuit& c);

/*! \brief Incremental circuit construction with Bristol renumbering.
 *
 * Wire handles returned by the builder are temporary; finish() renumbers so
 * inputs come first and outputs last. Outputs must be distinct gate outputs.
 */
class CircuitBuilder {
public:
  WireId input();
  std::vector<WireId> inputs(std::size_t n);
  WireId gate(GateOp op, WireId a, WireId b = 0);
  WireId and_(WireId a, WireId b) { return gate(GateOp::And, a, b); }
  WireId xor_(WireId a, WireId b) { return gate(GateOp::Xor, a, b); }
  WireId inv(WireId a) { return gate(GateOp::Inv, a); }

  Circuit finish(std::vector<std::uint32_t> input_widths, const std::vector<WireId>& outputs,
                 std::vector<std::uint32_t> output_widths) const;

private:
  std::uint32_t num_inputs_ = 0;
  std::vector<Gate> gates_;  // temp ids: inputs 0..I-1, gate k -> kGateBase + k
  static constexpr WireId kGateBase = 0x40000000u;
};

/// Circuit families used as stand-ins for real benchmark netlists.
enum class ChainOp { Mixed, And, Xor, Inv };

Circuit gen_chain(std::size_t length, ChainOp op = ChainOp::Mixed);
Circuit gen_parallel(GateOp op, std::size_t count);
Circuit gen_xor_tree(std::size_t leaves);
Circuit gen_adder(std::size_t bits);
/// n x n by n x n integer matrix product, `bits`-wide entries, mod 2^bits.
Circuit gen_matmul(std::size_t n, std::size_t bits);
/// `width` independent chains of `depth` gates, emitted chain after chain.
Circuit gen_blocks(std::size_t width, std::size_t depth);
/// Pass/position grid where gate (p, i) reads (p, i-1) and (p-1, i); emitted pass by pass.
Circuit gen_bubble(std::size_t passes, std::size_t length);

/*! \brief Builds a circuit from a generator spec string.
 *
 * Grammar: `chain:N[:and|xor|inv|mixed]`, `parallel:N[:and|xor|inv]`,
 * `xor_tree:N`, `adder:BITS`, `matmul:N:BITS`, `blocks:WIDTH:DEPTH`,
 * `bubble:PASSES:LENGTH`. Throws std::invalid_argument on anything else.
 */
Circuit generate(std::string_view spec);

}  // namespace gcaccel
