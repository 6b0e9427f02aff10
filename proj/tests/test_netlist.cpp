#include <doctest.h>

#include "gcaccel/netlist.hpp"

#include <random>

using namespace gcaccel;

namespace {

std::uint64_t word(const Bits& b, std::size_t at, std::size_t width) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < width; ++i) v |= std::uint64_t(b[at + i]) << i;
  return v;
}

void put(Bits& b, std::size_t at, std::size_t width, std::uint64_t v) {
  for (std::size_t i = 0; i < width; ++i) b[at + i] = (v >> i) & 1;
}

CircuitError parse_error(std::string_view text) {
  try {
    parse_bristol_text(text);
  } catch (const CircuitError& e) {
    return e;
  }
  FAIL("expected a CircuitError");
  throw;
}

}  // namespace

TEST_CASE("parse a small Bristol file") {
  const char* text =
      "3 7\n"
      "2 2 1\n"
      "1 2\n"
      "2 1 0 1 3 AND\n"
      "1 1 2 4 INV\n"
      "2 1 3 4 5 XOR\n";
  // wire 6 is the single-bit output? outputs are the last wires, so widths must match
  const auto err = parse_error(text);
  CHECK(err.kind() == CircuitError::Kind::Semantic);

  const char* ok =
      "3 6\n"
      "2 2 1\n"
      "1 1\n"
      "2 1 0 1 3 AND\n"
      "1 1 2 4 INV\n"
      "2 1 3 4 5 XOR\n";
  const Circuit c = parse_bristol_text(ok);
  CHECK(c.gates.size() == 3);
  CHECK(c.inputs == std::vector<WireId>{0, 1, 2});
  CHECK(c.outputs == std::vector<WireId>{5});
  CHECK(c.has_inv());
  CHECK(c.and_count() == 1);
  for (int x = 0; x < 8; ++x) {
    const Bits in{std::uint8_t(x & 1), std::uint8_t((x >> 1) & 1), std::uint8_t((x >> 2) & 1)};
    CHECK(plaintext_evaluate(c, in) == Bits{std::uint8_t((in[0] & in[1]) ^ (in[2] ^ 1))});
  }
  CHECK(write_bristol_text(c) == ok);
}

TEST_CASE("count-only declaration lines mean one-bit values") {
  const Circuit c = parse_bristol_text("1 3\n2\n1\n2 1 0 1 2 XOR\n");
  CHECK(c.input_widths == std::vector<std::uint32_t>{1, 1});
  CHECK(c.output_widths == std::vector<std::uint32_t>{1});
}

TEST_CASE("syntax and semantic errors carry positions") {
  auto e1 = parse_error("1 3\n2 1 1\n1 1\n2 1 0 x 2 AND\n");
  CHECK(e1.kind() == CircuitError::Kind::Syntax);
  CHECK(e1.line() == 4);
  CHECK(e1.column() == 7);

  auto e2 = parse_error("1 3\n2 1 1\n1 1\n2 1 0 1 2 NAND\n");
  CHECK(e2.kind() == CircuitError::Kind::Semantic);
  CHECK(e2.column() == 11);

  auto e3 = parse_error("2 4\n2 1 1\n1 1\n2 1 0 2 3 AND\n2 1 0 1 2 XOR\n");
  CHECK(e3.kind() == CircuitError::Kind::Semantic);  // wire 2 used before definition
  CHECK(e3.line() == 4);

  auto e4 = parse_error("2 3\n2 1 1\n1 1\n2 1 0 1 2 AND\n");
  CHECK(e4.kind() == CircuitError::Kind::Syntax);  // gate count

  auto e5 = parse_error("1 4\n2 1 1\n1 1\n2 1 0 1 3 AND\n2 1 0 1 3 AND\n");
  CHECK(e5.kind() == CircuitError::Kind::Syntax);  // more lines than declared

  auto e6 = parse_error("2 4\n2 1 1\n1 1\n2 1 0 1 3 AND\n2 1 0 1 3 XOR\n");
  CHECK(e6.kind() == CircuitError::Kind::Semantic);  // double definition

  auto e7 = parse_error("1 3\n2 1 1\n1 1\n1 1 0 1 2 AND\n");
  CHECK(e7.kind() == CircuitError::Kind::Syntax);  // arity
  CHECK_THROWS_AS(parse_bristol_text(""), CircuitError);
}

TEST_CASE("generated circuits survive a Bristol round trip") {
  for (const char* spec : {"chain:10", "chain:5:inv", "parallel:7:xor", "xor_tree:9", "adder:5",
                           "matmul:2:3", "blocks:3:4", "bubble:2:3"}) {
    CAPTURE(spec);
    const Circuit c = generate(spec);
    validate(c);
    CHECK(c.bristol_layout());
    CHECK(parse_bristol_text(write_bristol_text(c)) == c);
  }
}

TEST_CASE("adder computes integer addition") {
  std::mt19937_64 r(4);
  for (std::size_t bits : {1u, 8u, 16u, 32u}) {
    const Circuit c = generate("adder:" + std::to_string(bits));
    CHECK(c.and_count() == bits);
    for (int t = 0; t < 200; ++t) {
      const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
      const std::uint64_t a = r() & mask, b = r() & mask;
      Bits in(2 * bits);
      put(in, 0, bits, a);
      put(in, bits, bits, b);
      const Bits out = plaintext_evaluate(c, in);
      REQUIRE(out.size() == bits + 1);
      CHECK(word(out, 0, bits + 1) == a + b);
    }
  }
}

TEST_CASE("matmul computes a matrix product mod 2^bits") {
  std::mt19937_64 r(8);
  const std::size_t n = 3, bits = 5;
  const Circuit c = gen_matmul(n, bits);
  for (int t = 0; t < 50; ++t) {
    std::vector<std::uint64_t> A(n * n), B(n * n);
    Bits in(2 * n * n * bits);
    for (std::size_t k = 0; k < n * n; ++k) {
      A[k] = r() & 31;
      B[k] = r() & 31;
      put(in, k * bits, bits, A[k]);
      put(in, (n * n + k) * bits, bits, B[k]);
    }
    const Bits out = plaintext_evaluate(c, in);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        std::uint64_t s = 0;
        for (std::size_t k = 0; k < n; ++k) s += A[i * n + k] * B[k * n + j];
        CHECK(word(out, (i * n + j) * bits, bits) == (s & 31));
      }
  }
}

TEST_CASE("small generators against direct formulas") {
  std::mt19937_64 r(2);
  const Circuit tree = gen_xor_tree(11);
  const Circuit par = gen_parallel(GateOp::And, 6);
  const Circuit inv = gen_chain(7, ChainOp::Inv);
  for (int t = 0; t < 100; ++t) {
    Bits x(11);
    std::uint8_t parity = 0;
    for (auto& b : x) parity ^= (b = r() & 1);
    CHECK(plaintext_evaluate(tree, x) == Bits{parity});
    Bits y(12);
    for (auto& b : y) b = r() & 1;
    const Bits o = plaintext_evaluate(par, y);
    for (int i = 0; i < 6; ++i) CHECK(o[i] == (y[2 * i] & y[2 * i + 1]));
    CHECK(plaintext_evaluate(inv, Bits{x[0]}) == Bits{std::uint8_t(x[0] ^ 1)});
  }
}

TEST_CASE("levels") {
  const auto chain = level_schedule(gen_chain(12));
  CHECK(chain.stats.num_levels == 12);
  for (std::size_t k = 0; k < 12; ++k) CHECK(chain.level[k] == k + 1);
  const auto par = level_schedule(gen_parallel(GateOp::And, 64));
  CHECK(par.stats.num_levels == 1);
  CHECK(par.stats.avg_ilp == doctest::Approx(64.0));
  CHECK(par.stats.and_fraction == doctest::Approx(1.0));
  const auto tree = level_schedule(gen_xor_tree(16));
  CHECK(tree.stats.gates_per_level == std::vector<std::uint32_t>{8, 4, 2, 1});
}

TEST_CASE("generator spec grammar") {
  CHECK(generate("chain:4:and").and_count() == 4);
  CHECK(generate("parallel:3").gates.size() == 3);
  CHECK(generate("matmul_like:2:2").gates.size() == gen_matmul(2, 2).gates.size());
  CHECK(generate("blocks:3:4").gates.size() == 12);
  CHECK(generate("bubble:2:3").gates.size() == 6);
  for (const char* bad : {"", "nope:3", "chain", "chain:x", "chain:0", "adder:3:4", "xor_tree:1",
                          "chain:3:nand", "matmul:2"})
    CHECK_THROWS_AS(generate(bad), std::invalid_argument);
}

TEST_CASE("builder renumbers inputs first and outputs last") {
  CircuitBuilder b;
  auto x = b.inputs(2);
  const WireId t = b.and_(x[0], x[1]);
  const WireId o = b.xor_(t, x[0]);
  const WireId spare = b.inv(x[1]);
  const Circuit c = b.finish({2}, {o}, {1});
  (void)spare;
  CHECK(c.bristol_layout());
  CHECK(c.outputs.back() == c.num_wires - 1);
  CHECK_THROWS(b.finish({2}, {x[0]}, {1}));  // outputs must be gate outputs
}
