#include "gcaccel/pipeline.hpp"

#include <random>
#include <sstream>

namespace gcaccel {

Program restore_operands(const Program& lowered, const std::vector<Address>& oor) {
  Program p = lowered;
  std::size_t cursor = 0;
  for (auto& i : p.instrs) {
    if (i.op == Opcode::Nop) continue;
    for (Address* a : {&i.in0, &i.in1}) {
      if (*a != kOorAddress) continue;
      if (cursor >= oor.size()) throw std::invalid_argument("OoR list shorter than zero operands");
      *a = oor[cursor++];
    }
  }
  if (cursor != oor.size()) throw std::invalid_argument("OoR list longer than zero operands");
  return p;
}

Program program_from_streams(const StreamSet& s, std::optional<Address> one_address) {
  Program p;
  p.num_inputs = s.num_inputs;
  p.one_address = one_address;
  const std::uint32_t circuit_inputs = s.num_inputs - (one_address ? 1 : 0);
  for (Address a = 1; a <= circuit_inputs; ++a) p.input_addresses.push_back(a);
  p.output_addresses = s.output_addresses;
  p.instrs.assign(s.num_instructions, Instruction{});
  std::vector<std::uint8_t> seen(s.num_instructions, 0);
  // OoR entries are consumed per GE; restore each GE's operands in its own order
  for (const auto& g : s.ges) {
    std::size_t cursor = 0;
    for (std::size_t k = 0; k < g.positions.size(); ++k) {
      const auto pos = g.positions.at(k);
      if (pos >= s.num_instructions || seen[pos])
        throw std::invalid_argument("streams do not partition the program");
      seen[pos] = 1;
      Instruction i = decode_instruction(g.words.at(k));
      i.out = p.output_of(pos);
      if (i.op != Opcode::Nop) {
        for (Address* a : {&i.in0, &i.in1}) {
          if (*a != kOorAddress) continue;
          if (cursor >= g.oor.size()) throw std::invalid_argument("OoR stream too short");
          *a = g.oor[cursor++];
        }
      }
      p.instrs[pos] = i;
    }
    if (cursor != g.oor.size()) throw std::invalid_argument("OoR stream too long");
  }
  for (auto b : seen)
    if (!b) throw std::invalid_argument("streams do not cover the program");
  return p;
}

GarbledProgram garble_program(const Program& source, const Seed& seed) {
  Circuit c = to_circuit(source);
  auto [ctx, gc] = garble_circuit(c, seed);
  return {std::move(c), std::move(ctx), std::move(gc)};
}

DramImage evaluator_image(const GarbledProgram& g, const std::vector<Label>& active_inputs) {
  DramImage img;
  img.input_labels.assign(g.circuit.inputs.size(), Label{});
  for (std::size_t i = 0; i < g.circuit.inputs.size(); ++i)
    img.input_labels.at(g.circuit.inputs[i] - 1) = active_inputs.at(i);
  img.tables = g.gc.tables;
  return img;
}

DramImage garbler_image(const GarbledProgram& g) {
  DramImage img;
  img.input_labels.assign(g.circuit.inputs.size(), Label{});
  for (std::size_t i = 0; i < g.circuit.inputs.size(); ++i)
    img.input_labels.at(g.circuit.inputs[i] - 1) = g.gc.input_zero_labels[i];
  img.delta = g.ctx.delta().r;
  return img;
}

Bits random_input_bits(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  Bits b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng() & 1u);
  return b;
}

namespace {

std::string bits_text(const Bits& b) {
  std::string s;
  for (auto x : b) s += x ? '1' : '0';
  return s;
}

}  // namespace

VerifiedRun verify_streams(const Circuit& circuit, const Program& source, const StreamSet& streams,
                           const SimConfig& cfg, std::uint64_t seed, const Bits& inputs,
                           const SimOptions& opts) {
  VerifiedRun r;
  r.inputs = inputs;
  r.expected = plaintext_evaluate(circuit, inputs);
  const GarbledProgram g = garble_program(source, Seed::from_u64(seed));
  const Bits prog_bits = program_input_bits(source, inputs);
  const auto active = encode_inputs(g.ctx, g.circuit, prog_bits);

  SimOptions o = opts;
  o.functional = true;
  std::ostringstream why;
  if (cfg.mode == Mode::Evaluator) {
    r.report = simulate(streams, evaluator_image(g, active), cfg, o);
    const auto sw = eval_circuit(g.circuit, g.gc, active);
    for (std::size_t j = 0; j < sw.size(); ++j) {
      if (!(r.report.output_labels.at(j) == sw[j])) {
        why << "output " << j << " (wire " << source.output_addresses[j]
            << "): simulator label " << r.report.output_labels[j].hex() << " != software "
            << sw[j].hex();
        break;
      }
    }
    try {
      r.decoded = decode_outputs(g.ctx, g.circuit, r.report.output_labels);
    } catch (const DecodeError& e) {
      if (why.str().empty()) why << e.what();
    }
    if (why.str().empty() && r.decoded != r.expected)
      why << "decoded outputs " << bits_text(r.decoded) << " != plaintext " << bits_text(r.expected);
  } else {
    r.report = simulate(streams, garbler_image(g), cfg, o);
    for (std::size_t j = 0; j < g.gc.output_zero_labels.size(); ++j) {
      if (!(r.report.output_labels.at(j) == g.gc.output_zero_labels[j])) {
        why << "output " << j << " (wire " << source.output_addresses[j]
            << "): simulator zero label " << r.report.output_labels[j].hex() << " != software "
            << g.gc.output_zero_labels[j].hex();
        break;
      }
    }
    if (why.str().empty()) {
      if (r.report.tables.size() != g.gc.tables.size())
        why << "simulator produced " << r.report.tables.size() << " tables, software "
            << g.gc.tables.size();
      for (std::size_t k = 0; why.str().empty() && k < g.gc.tables.size(); ++k)
        if (!(r.report.tables[k].t_g == g.gc.tables[k].t_g) ||
            !(r.report.tables[k].t_e == g.gc.tables[k].t_e))
          why << "garbled table " << k << " differs from software";
    }
    if (why.str().empty()) {
      // decode the garbler's view with the active labels it would hand out
      const auto sw = eval_circuit(g.circuit, g.gc, active);
      r.decoded = decode_outputs(g.ctx, g.circuit, sw);
      if (r.decoded != r.expected)
        why << "software evaluation " << bits_text(r.decoded) << " != plaintext "
            << bits_text(r.expected);
    }
  }
  r.mismatch = why.str();
  r.match = r.mismatch.empty();
  return r;
}

VerifiedRun run_and_verify(const Circuit& circuit, const std::vector<PassStep>& passes,
                           const SimConfig& cfg, std::uint64_t seed, const Bits& inputs,
                           const SimOptions& opts) {
  const CompileResult cr = compile(circuit, passes, cfg);
  SimConfig sc = cfg;
  sc.num_ges = static_cast<std::uint32_t>(cr.streams.ges.size());
  return verify_streams(circuit, cr.source, cr.streams, sc, seed, inputs, opts);
}

}  // namespace gcaccel
