#include "gcaccel/gcrypto.hpp"

#include <istream>
#include <ostream>
#include <string>

namespace gcaccel {

namespace {

thread_local HashCounters tl_counters;

constexpr std::uint64_t kDeltaDomain = 0xde17a0000000000dULL;
constexpr std::uint64_t kLabelDomain = 0x1abe100000000001ULL;

}  // namespace

HashCounters hash_counters() { return tl_counters; }
void reset_hash_counters() { tl_counters = {}; }

Label sigma(const Label& x) { return Label::from_words(x.hi(), x.hi() ^ x.lo()); }

TweakKey::TweakKey(const Label& tweak) : aes_(tweak) { ++tl_counters.key_expansions; }

Label TweakKey::hash(const Label& x) const {
  ++tl_counters.hash_calls;
  const Label s = sigma(x);
  return aes_.encrypt(s) ^ s;
}

Label tccr_hash(const Label& x, const Label& tweak) { return TweakKey(tweak).hash(x); }

GlobalDelta gen_delta(const Seed& seed) {
  Aes128 prf(seed.value);
  Label r = prf.encrypt(Label::from_words(0, kDeltaDomain));
  r.bytes[0] |= 1u;
  return {r};
}

GarblerContext::GarblerContext(const Seed& seed)
    : seed_(seed), delta_(gen_delta(seed)), prf_(seed.value) {}

Label GarblerContext::gen_label(WireId wire) {
  if (has(wire)) throw std::logic_error("wire " + std::to_string(wire) + " already has a label");
  const Label l = prf_.encrypt(Label::from_words(wire, kLabelDomain));
  assign(wire, l);
  return l;
}

void GarblerContext::assign(WireId wire, const Label& zero_label) {
  if (wire >= zero_.size()) {
    zero_.resize(wire + 1);
    set_.resize(wire + 1, 0);
  }
  zero_[wire] = zero_label;
  set_[wire] = 1;
}

const Label& GarblerContext::zero(WireId wire) const {
  if (!has(wire)) throw std::out_of_range("wire " + std::to_string(wire) + " has no label");
  return zero_[wire];
}

std::pair<Label, GarbledTable> garble_and(const GlobalDelta& delta, const Label& wa0,
                                          const Label& wb0, std::uint64_t gate_index) {
  const Label& R = delta.r;
  const bool pa = wa0.lsb();
  const bool pb = wb0.lsb();
  const TweakKey k0(2 * gate_index);
  const TweakKey k1(2 * gate_index + 1);

  const Label ha0 = k0.hash(wa0);
  const Label ha1 = k0.hash(wa0 ^ R);
  const Label hb0 = k1.hash(wb0);
  const Label hb1 = k1.hash(wb0 ^ R);

  GarbledTable t;
  // garbler half: knows a's permute bit
  t.t_g = ha0 ^ ha1 ^ select(pb, R);
  const Label wg0 = ha0 ^ select(pa, t.t_g);
  // evaluator half: evaluator knows b
  t.t_e = hb0 ^ hb1 ^ wa0;
  const Label we0 = hb0 ^ select(pb, t.t_e ^ wa0);
  return {wg0 ^ we0, t};
}

Label eval_and(const Label& wa, const Label& wb, const GarbledTable& table,
               std::uint64_t gate_index) {
  const TweakKey k0(2 * gate_index);
  const TweakKey k1(2 * gate_index + 1);
  const Label wg = k0.hash(wa) ^ select(wa.lsb(), table.t_g);
  const Label we = k1.hash(wb) ^ select(wb.lsb(), table.t_e ^ wa);
  return wg ^ we;
}

std::pair<GarblerContext, GarbledCircuit> garble_circuit(const Circuit& c, const Seed& seed) {
  GarblerContext ctx(seed);
  GarbledCircuit gc;
  for (WireId w : c.inputs) gc.input_zero_labels.push_back(ctx.gen_label(w));
  const bool need_one = c.has_inv();
  if (need_one) {
    const WireId one = one_wire_id(c);
    ctx.gen_label(one);
    gc.one_active = ctx.one(one);
  }
  gc.tables.reserve(c.and_count());
  for (const Gate& g : c.gates) {
    switch (g.op) {
      case GateOp::Xor:
        ctx.assign(g.out, free_xor(ctx.zero(g.in[0]), ctx.zero(g.in[1])));
        break;
      case GateOp::Inv:
        ctx.assign(g.out, free_xor(ctx.zero(g.in[0]), ctx.zero(one_wire_id(c))));
        break;
      case GateOp::And: {
        auto [wc0, table] = garble_and(ctx.delta(), ctx.zero(g.in[0]), ctx.zero(g.in[1]), g.out);
        ctx.assign(g.out, wc0);
        gc.tables.push_back(table);
        break;
      }
    }
  }
  for (WireId w : c.outputs) gc.output_zero_labels.push_back(ctx.zero(w));
  return {std::move(ctx), std::move(gc)};
}

std::vector<Label> eval_circuit(const Circuit& c, const GarbledCircuit& gc,
                                const std::vector<Label>& active_inputs) {
  if (active_inputs.size() != c.inputs.size())
    throw std::invalid_argument("expected one active label per input");
  const std::size_t ands = c.and_count();
  if (gc.tables.size() < ands) throw std::runtime_error("garbled table underflow");
  if (gc.tables.size() > ands) throw std::runtime_error("garbled table overflow");
  if (c.has_inv() && !gc.one_active)
    throw std::invalid_argument("circuit has INV gates but no constant-one label");

  std::vector<Label> v(c.num_wires);
  for (std::size_t i = 0; i < c.inputs.size(); ++i) v[c.inputs[i]] = active_inputs[i];
  std::size_t next_table = 0;
  for (const Gate& g : c.gates) {
    switch (g.op) {
      case GateOp::Xor: v[g.out] = free_xor(v[g.in[0]], v[g.in[1]]); break;
      case GateOp::Inv: v[g.out] = free_xor(v[g.in[0]], *gc.one_active); break;
      case GateOp::And:
        v[g.out] = eval_and(v[g.in[0]], v[g.in[1]], gc.tables[next_table++], g.out);
        break;
    }
  }
  std::vector<Label> out;
  out.reserve(c.outputs.size());
  for (WireId w : c.outputs) out.push_back(v[w]);
  return out;
}

std::vector<Label> encode_inputs(const GarblerContext& ctx, const Circuit& c, const Bits& bits) {
  if (bits.size() != c.inputs.size())
    throw std::invalid_argument("expected " + std::to_string(c.inputs.size()) + " input bits");
  std::vector<Label> out;
  out.reserve(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i)
    out.push_back(ctx.zero(c.inputs[i]) ^ select(bits[i] & 1u, ctx.delta().r));
  return out;
}

Bits decode_outputs(const GarblerContext& ctx, const Circuit& c, const std::vector<Label>& active) {
  if (active.size() != c.outputs.size())
    throw std::invalid_argument("expected one active label per output");
  Bits out;
  out.reserve(active.size());
  for (std::size_t i = 0; i < active.size(); ++i) {
    const Label& z = ctx.zero(c.outputs[i]);
    if (active[i] == z)
      out.push_back(0);
    else if (active[i] == (z ^ ctx.delta().r))
      out.push_back(1);
    else
      throw DecodeError(i, "output " + std::to_string(i) + " (wire " +
                               std::to_string(c.outputs[i]) + ") decodes to neither label");
  }
  return out;
}

void write_tables(std::ostream& out, const std::vector<GarbledTable>& tables) {
  for (const auto& t : tables) {
    out.write(reinterpret_cast<const char*>(t.t_g.bytes.data()), 16);
    out.write(reinterpret_cast<const char*>(t.t_e.bytes.data()), 16);
  }
}

std::vector<GarbledTable> read_tables(std::istream& in) {
  std::vector<GarbledTable> v;
  GarbledTable t;
  while (in.read(reinterpret_cast<char*>(t.t_g.bytes.data()), 16)) {
    if (!in.read(reinterpret_cast<char*>(t.t_e.bytes.data()), 16))
      throw std::runtime_error("truncated table stream");
    v.push_back(t);
  }
  if (in.gcount() != 0) throw std::runtime_error("truncated table stream");
  return v;
}

void write_labels(std::ostream& out, const std::vector<Label>& labels) {
  for (const auto& l : labels) out.write(reinterpret_cast<const char*>(l.bytes.data()), 16);
}

std::vector<Label> read_labels(std::istream& in) {
  std::vector<Label> v;
  Label l;
  while (in.read(reinterpret_cast<char*>(l.bytes.data()), 16)) v.push_back(l);
  if (in.gcount() != 0) throw std::runtime_error("truncated label stream");
  return v;
}

}  // namespace gcaccel
