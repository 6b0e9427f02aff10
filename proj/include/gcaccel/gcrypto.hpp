#pragma once

#include "gcaccel/aes.hpp"
#include "gcaccel/label.hpp"
#include "gcaccel/netlist.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gcaccel {

/// 128-bit seed for every pseudorandom choice the garbler makes.
struct Seed {
  Label value;
  static Seed from_u64(std::uint64_t s) { return {Label::from_words(s, 0x5eed5eed5eed5eedULL)}; }
};

/// Global FreeXOR offset R; lsb is always 1.
struct GlobalDelta {
  Label r;
};

struct GarbledTable {
  Label t_g;
  Label t_e;
  friend bool operator==(const GarbledTable&, const GarbledTable&) = default;
};
static_assert(sizeof(GarbledTable) == 32, "garbled table must be 32 bytes");

/// Per-thread counters of hash invocations and AES key expansions in the hash path.
struct HashCounters {
  std::uint64_t hash_calls = 0;
  std::uint64_t key_expansions = 0;
};

HashCounters hash_counters();
void reset_hash_counters();

/// sigma(hi || lo) = (hi ^ lo) || hi on 64-bit halves.
Label sigma(const Label& x);

/*! \brief AES key schedule for one hash tweak.
 *
 * Constructing a TweakKey performs (and counts) one full key expansion;
 * hash() performs one counted tweakable hash AES(k, sigma(x)) ^ sigma(x).
 */
class TweakKey {
public:
  explicit TweakKey(const Label& tweak);
  explicit TweakKey(std::uint64_t tweak) : TweakKey(Label::from_words(tweak, 0)) {}
  Label hash(const Label& x) const;

private:
  Aes128 aes_;
};

/// One hash with its own key expansion.
Label tccr_hash(const Label& x, const Label& tweak);

GlobalDelta gen_delta(const Seed& seed);

class GarblerContext {
public:
  explicit GarblerContext(const Seed& seed);

  const GlobalDelta& delta() const { return delta_; }
  const Seed& seed() const { return seed_; }

  /// Draws W^0 for a fresh wire. Throws std::logic_error if the wire already has one.
  Label gen_label(WireId wire);
  /// Records a derived zero label (XOR/AND outputs).
  void assign(WireId wire, const Label& zero_label);

  bool has(WireId wire) const { return wire < set_.size() && set_[wire]; }
  const Label& zero(WireId wire) const;
  Label one(WireId wire) const { return zero(wire) ^ delta_.r; }

private:
  Seed seed_;
  GlobalDelta delta_;
  Aes128 prf_;
  std::vector<Label> zero_;
  std::vector<std::uint8_t> set_;
};

/// Half-Gate garbling of one AND: 4 hashes, 2 key expansions.
std::pair<Label, GarbledTable> garble_and(const GlobalDelta& delta, const Label& wa0,
                                          const Label& wb0, std::uint64_t gate_index);
/// Half-Gate evaluation of one AND: 2 hashes, 2 key expansions.
Label eval_and(const Label& wa, const Label& wb, const GarbledTable& table,
               std::uint64_t gate_index);

inline Label free_xor(const Label& a, const Label& b) { return a ^ b; }

struct GarbledCircuit {
  std::vector<GarbledTable> tables;  ///< AND gates in program order
  std::vector<Label> input_zero_labels;
  std::vector<Label> output_zero_labels;
  /// Active label of the public constant-one wire, present when the circuit has INV gates.
  std::optional<Label> one_active;
};

/// Wire id used for the constant-one label of a circuit with INV gates.
inline WireId one_wire_id(const Circuit& c) { return c.num_wires; }

/// Garbles every gate; the AND tweak index is the gate's output wire id.
std::pair<GarblerContext, GarbledCircuit> garble_circuit(const Circuit& c, const Seed& seed);

std::vector<Label> eval_circuit(const Circuit& c, const GarbledCircuit& gc,
                                const std::vector<Label>& active_inputs);

std::vector<Label> encode_inputs(const GarblerContext& ctx, const Circuit& c, const Bits& bits);

class DecodeError : public std::runtime_error {
public:
  DecodeError(std::size_t index, const std::string& msg)
      : std::runtime_error(msg), index_(index) {}
  std::size_t index() const { return index_; }

private:
  std::size_t index_;
};

Bits decode_outputs(const GarblerContext& ctx, const Circuit& c, const std::vector<Label>& active);

// Raw little-endian binary records: 32 bytes per table, 16 bytes per label.
void write_tables(std::ostream& out, const std::vector<GarbledTable>& tables);
std::vector<GarbledTable> read_tables(std::istream& in);
void write_labels(std::ostream& out, const std::vector<Label>& labels);
std::vector<Label> read_labels(std::istream& in);

}  // namespace gcaccel
