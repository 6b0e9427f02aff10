#pragma once

#include "gcaccel/netlist.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gcaccel {

using Address = std::uint32_t;

/// Operand address that means "take the next wire from the out-of-range queue".
inline constexpr Address kOorAddress = 0;

enum class Opcode : std::uint8_t { Nop = 0, Xor = 1, And = 2 };

const char* to_string(Opcode op);

/*! \brief One gate-engine instruction.
 *
 * `out` is the output wire address. It is not part of the encoded word: once a
 * program is renamed it equals num_inputs + 1 + position.
 */
struct Instruction {
  Opcode op = Opcode::Nop;
  Address in0 = 0;
  Address in1 = 0;
  bool live = false;
  Address out = 0;

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

struct Program {
  std::vector<Instruction> instrs;
  /// Input addresses 1..num_inputs; includes the constant-one wire when present.
  std::uint32_t num_inputs = 0;
  std::vector<Address> input_addresses;  ///< circuit input i -> address
  std::optional<Address> one_address;
  std::vector<Address> output_addresses;  ///< circuit output j -> address
  std::vector<std::string> passes;
  std::uint32_t segment_size = 0;

  Address first_output() const { return num_inputs + 1; }
  Address output_of(std::size_t position) const {
    return num_inputs + 1 + static_cast<Address>(position);
  }
  bool renamed() const;
  std::size_t and_count() const;
};

/// Baseline program: one instruction per gate in netlist order, INV lowered to XOR with the one wire.
Program assemble(const Circuit& c);

/// Bits needed to address every wire of an SWW of `sww_bytes` (16-byte labels).
unsigned address_width(std::uint64_t sww_bytes);

inline constexpr unsigned kMaxAddressWidth = 30;

/// Layout: [1:0] op, [2] live, [32:3] in0, [62:33] in1, [63] zero.
std::uint64_t encode_instruction(const Instruction& i, unsigned width = kMaxAddressWidth);
Instruction decode_instruction(std::uint64_t word);

/// Plaintext semantics of a program; input_bits follow the circuit's input order.
Bits interpret(const Program& p, const Bits& input_bits);

/// Circuit inputs plus the constant-one bit when the program has one.
Bits program_input_bits(const Program& p, const Bits& circuit_bits);

/*! \brief The program as a netlist over its own addresses.
 *
 * Wire ids equal addresses, inputs are the program's input addresses (one wire
 * last), outputs the circuit outputs. OoR-lowered programs are not accepted.
 */
Circuit to_circuit(const Program& p);

void write_words(std::ostream& out, const std::vector<std::uint64_t>& words);
std::vector<std::uint64_t> read_words(std::istream& in);
void write_u32(std::ostream& out, const std::vector<std::uint32_t>& values);
std::vector<std::uint32_t> read_u32(std::istream& in);

}  // namespace gcaccel
