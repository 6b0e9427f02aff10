#pragma once

#include "gcaccel/compiler.hpp"
#include "gcaccel/gcrypto.hpp"
#include "gcaccel/simulator.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace gcaccel {

/// Undoes OoR lowering: zero operands get their addresses back from `oor`.
Program restore_operands(const Program& lowered, const std::vector<Address>& oor);

/// Rebuilds the program (positions, live bits, restored operands) from per-GE streams.
Program program_from_streams(const StreamSet& s, std::optional<Address> one_address);

/// Garbling view of a compiled program: wire ids are addresses, so AND tweaks match the hardware.
struct GarbledProgram {
  Circuit circuit;
  GarblerContext ctx;
  GarbledCircuit gc;
};

GarbledProgram garble_program(const Program& source, const Seed& seed);

DramImage evaluator_image(const GarbledProgram& g, const std::vector<Label>& active_inputs);
DramImage garbler_image(const GarbledProgram& g);

/// Reproducible circuit input bits for a seed.
Bits random_input_bits(std::size_t n, std::uint64_t seed);

struct VerifiedRun {
  SimReport report;
  Bits inputs;
  Bits expected;  ///< plaintext_evaluate of the circuit
  Bits decoded;   ///< evaluator mode: decoded simulator outputs
  bool match = false;
  std::string mismatch;  ///< first difference, empty on match
};

/*! \brief Garbles, simulates in cfg.mode and checks the result against software.
 *
 * Evaluator: output labels must equal software evaluation and decode to the
 * plaintext result. Garbler: output zero labels and every table must equal
 * software garbling.
 */
VerifiedRun verify_streams(const Circuit& circuit, const Program& source, const StreamSet& streams,
                           const SimConfig& cfg, std::uint64_t seed, const Bits& inputs,
                           const SimOptions& opts = {});

VerifiedRun run_and_verify(const Circuit& circuit, const std::vector<PassStep>& passes,
                           const SimConfig& cfg, std::uint64_t seed, const Bits& inputs,
                           const SimOptions& opts = {});

}  // namespace gcaccel
