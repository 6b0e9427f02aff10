#include "gcaccel/isa.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace gcaccel {

const char* to_string(Opcode op) {
  switch (op) {
    case Opcode::Nop: return "NOP";
    case Opcode::Xor: return "XOR";
    case Opcode::And: return "AND";
  }
  return "?";
}

bool Program::renamed() const {
  for (std::size_t k = 0; k < instrs.size(); ++k)
    if (instrs[k].out != output_of(k)) return false;
  return true;
}

std::size_t Program::and_count() const {
  return static_cast<std::size_t>(std::count_if(
      instrs.begin(), instrs.end(), [](const Instruction& i) { return i.op == Opcode::And; }));
}

Program assemble(const Circuit& c) {
  validate(c);
  Program p;
  const bool need_one = c.has_inv();
  p.num_inputs = static_cast<std::uint32_t>(c.inputs.size()) + (need_one ? 1 : 0);

  std::vector<Address> addr(c.num_wires, 0);
  for (std::size_t i = 0; i < c.inputs.size(); ++i) {
    addr[c.inputs[i]] = static_cast<Address>(i + 1);
    p.input_addresses.push_back(static_cast<Address>(i + 1));
  }
  if (need_one) p.one_address = static_cast<Address>(c.inputs.size() + 1);

  p.instrs.reserve(c.gates.size());
  for (std::size_t k = 0; k < c.gates.size(); ++k) {
    const Gate& g = c.gates[k];
    Instruction ins;
    ins.live = true;
    ins.out = p.output_of(k);
    ins.in0 = addr[g.in[0]];
    switch (g.op) {
      case GateOp::And:
        ins.op = Opcode::And;
        ins.in1 = addr[g.in[1]];
        break;
      case GateOp::Xor:
        ins.op = Opcode::Xor;
        ins.in1 = addr[g.in[1]];
        break;
      case GateOp::Inv:
        ins.op = Opcode::Xor;
        ins.in1 = *p.one_address;
        break;
    }
    addr[g.out] = ins.out;
    p.instrs.push_back(ins);
  }
  for (WireId w : c.outputs) p.output_addresses.push_back(addr[w]);
  p.passes.push_back("baseline");
  return p;
}

unsigned address_width(std::uint64_t sww_bytes) {
  const std::uint64_t wires = sww_bytes / 16;
  if (wires < 2) throw std::invalid_argument("SWW must hold at least two wires");
  unsigned w = 0;
  while ((std::uint64_t{1} << w) < wires) ++w;
  return w;
}

std::uint64_t encode_instruction(const Instruction& i, unsigned width) {
  if (width == 0 || width > kMaxAddressWidth)
    throw std::invalid_argument("address width must be in 1..30");
  const std::uint64_t limit = std::uint64_t{1} << width;
  if (i.in0 >= limit || i.in1 >= limit)
    throw std::out_of_range("operand address does not fit in " + std::to_string(width) + " bits");
  return static_cast<std::uint64_t>(i.op) | (std::uint64_t(i.live) << 2) |
         (std::uint64_t(i.in0) << 3) | (std::uint64_t(i.in1) << 33);
}

Instruction decode_instruction(std::uint64_t word) {
  if (word >> 63) throw std::invalid_argument("instruction bit 63 must be zero");
  Instruction i;
  const auto op = word & 3u;
  if (op == 3) throw std::invalid_argument("invalid opcode 3");
  i.op = static_cast<Opcode>(op);
  i.live = (word >> 2) & 1u;
  i.in0 = static_cast<Address>((word >> 3) & 0x3fffffffu);
  i.in1 = static_cast<Address>((word >> 33) & 0x3fffffffu);
  return i;
}

Bits program_input_bits(const Program& p, const Bits& circuit_bits) {
  if (circuit_bits.size() != p.input_addresses.size())
    throw std::invalid_argument("expected " + std::to_string(p.input_addresses.size()) +
                                " input bits");
  Bits b = circuit_bits;
  if (p.one_address) b.push_back(1);
  return b;
}

Bits interpret(const Program& p, const Bits& input_bits) {
  if (input_bits.size() != p.input_addresses.size())
    throw std::invalid_argument("expected " + std::to_string(p.input_addresses.size()) +
                                " input bits");
  Address top = p.num_inputs;
  for (const auto& i : p.instrs) top = std::max(top, i.out);
  std::vector<std::uint8_t> v(std::size_t{top} + 1, 0);
  for (std::size_t i = 0; i < input_bits.size(); ++i) v[p.input_addresses[i]] = input_bits[i] & 1u;
  if (p.one_address) v[*p.one_address] = 1;
  for (const auto& i : p.instrs) {
    if (i.op == Opcode::Nop) continue;
    if (i.in0 == kOorAddress || i.in1 == kOorAddress)
      throw std::invalid_argument("interpret() needs a program without OoR markers");
    v[i.out] = i.op == Opcode::And ? (v[i.in0] & v[i.in1]) : (v[i.in0] ^ v[i.in1]);
  }
  Bits out;
  for (Address a : p.output_addresses) out.push_back(v[a]);
  return out;
}

Circuit to_circuit(const Program& p) {
  Circuit c;
  Address top = p.num_inputs;
  for (const auto& i : p.instrs) top = std::max(top, i.out);
  c.num_wires = top + 1;
  c.inputs = p.input_addresses;
  if (p.one_address) c.inputs.push_back(*p.one_address);
  c.input_widths.assign(c.inputs.size(), 1);
  c.outputs = p.output_addresses;
  c.output_widths.assign(c.outputs.size(), 1);
  for (const auto& i : p.instrs) {
    if (i.op == Opcode::Nop) continue;
    if (i.in0 == kOorAddress || i.in1 == kOorAddress)
      throw std::invalid_argument("to_circuit() needs a program without OoR markers");
    c.gates.push_back({i.op == Opcode::And ? GateOp::And : GateOp::Xor, {i.in0, i.in1}, i.out});
  }
  validate(c);
  return c;
}

void write_words(std::ostream& out, const std::vector<std::uint64_t>& words) {
  for (auto w : words) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(w >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
  }
}

std::vector<std::uint64_t> read_words(std::istream& in) {
  std::vector<std::uint64_t> v;
  unsigned char b[8];
  while (in.read(reinterpret_cast<char*>(b), 8)) {
    std::uint64_t w = 0;
    for (int i = 7; i >= 0; --i) w = (w << 8) | b[i];
    v.push_back(w);
  }
  if (in.gcount() != 0) throw std::runtime_error("truncated 64-bit word stream");
  return v;
}

void write_u32(std::ostream& out, const std::vector<std::uint32_t>& values) {
  for (auto w : values) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(w >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 4);
  }
}

std::vector<std::uint32_t> read_u32(std::istream& in) {
  std::vector<std::uint32_t> v;
  unsigned char b[4];
  while (in.read(reinterpret_cast<char*>(b), 4))
    v.push_back(std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
                (std::uint32_t(b[3]) << 24));
  if (in.gcount() != 0) throw std::runtime_error("truncated 32-bit word stream");
  return v;
}

}  // namespace gcaccel
