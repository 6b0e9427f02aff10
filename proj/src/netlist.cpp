#include "gcaccel/netlist.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

namespace gcaccel {

const char* to_string(GateOp op) {
  switch (op) {
    case GateOp::And: return "AND";
    case GateOp::Xor: return "XOR";
    case GateOp::Inv: return "INV";
  }
  return "?";
}

std::size_t Circuit::and_count() const {
  return static_cast<std::size_t>(
      std::count_if(gates.begin(), gates.end(), [](const Gate& g) { return g.op == GateOp::And; }));
}

bool Circuit::has_inv() const {
  return std::any_of(gates.begin(), gates.end(),
                     [](const Gate& g) { return g.op == GateOp::Inv; });
}

bool Circuit::bristol_layout() const {
  auto sum = [](const std::vector<std::uint32_t>& v) {
    return std::accumulate(v.begin(), v.end(), std::size_t{0});
  };
  if (sum(input_widths) != inputs.size() || sum(output_widths) != outputs.size()) return false;
  if (outputs.size() > num_wires || inputs.size() > num_wires) return false;
  for (std::size_t i = 0; i < inputs.size(); ++i)
    if (inputs[i] != i) return false;
  const std::size_t first_out = num_wires - outputs.size();
  for (std::size_t i = 0; i < outputs.size(); ++i)
    if (outputs[i] != first_out + i) return false;
  return true;
}

CircuitError::CircuitError(Kind kind, std::size_t line, std::size_t column, const std::string& msg)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << (kind == Kind::Syntax ? "syntax error" : "semantic error");
        if (line) os << " at line " << line << ", column " << column;
        os << ": " << msg;
        return os.str();
      }()),
      kind_(kind),
      line_(line),
      column_(column) {}

void validate(const Circuit& c) {
  auto fail = [](const std::string& msg) {
    throw CircuitError(CircuitError::Kind::Semantic, 0, 0, msg);
  };
  std::vector<std::uint8_t> defined(c.num_wires, 0);
  for (WireId w : c.inputs) {
    if (w >= c.num_wires) fail("input wire " + std::to_string(w) + " out of range");
    if (defined[w]) fail("input wire " + std::to_string(w) + " declared twice");
    defined[w] = 1;
  }
  for (std::size_t k = 0; k < c.gates.size(); ++k) {
    const Gate& g = c.gates[k];
    for (int i = 0; i < g.arity(); ++i) {
      if (g.in[i] >= c.num_wires || !defined[g.in[i]])
        fail("gate " + std::to_string(k) + " reads wire " + std::to_string(g.in[i]) +
             " before definition");
    }
    if (g.out >= c.num_wires) fail("gate " + std::to_string(k) + " writes wire out of range");
    if (defined[g.out]) fail("wire " + std::to_string(g.out) + " defined more than once");
    defined[g.out] = 1;
  }
  for (WireId w : c.outputs)
    if (w >= c.num_wires || !defined[w]) fail("output wire " + std::to_string(w) + " undefined");
}

namespace {

struct Token {
  std::string_view text;
  std::size_t column;
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

class BristolReader {
public:
  explicit BristolReader(std::istream& in) : in_(in) {}

  Circuit read() {
    Circuit c;
    auto header = next_line();
    if (!header) syntax(line_no_, 1, "missing header");
    expect_count(*header, 2, "header must be '<num_gates> <num_wires>'");
    const auto num_gates = number((*header)[0]);
    c.num_wires = static_cast<std::uint32_t>(number((*header)[1]));

    c.input_widths = widths_line("input");
    c.output_widths = widths_line("output");
    const std::size_t in_bits =
        std::accumulate(c.input_widths.begin(), c.input_widths.end(), std::size_t{0});
    const std::size_t out_bits =
        std::accumulate(c.output_widths.begin(), c.output_widths.end(), std::size_t{0});
    if (in_bits > c.num_wires || out_bits > c.num_wires)
      semantic(line_no_, 1, "declared input/output bits exceed wire count");

    std::vector<std::uint8_t> defined(c.num_wires, 0);
    for (std::uint32_t w = 0; w < in_bits; ++w) {
      c.inputs.push_back(w);
      defined[w] = 1;
    }

    c.gates.reserve(num_gates);
    while (auto toks = next_line()) {
      if (c.gates.size() == num_gates)
        syntax(line_no_, (*toks)[0].column, "more gate lines than declared");
      c.gates.push_back(gate_line(*toks, c.num_wires, defined));
    }
    if (c.gates.size() != num_gates)
      syntax(line_no_ + 1, 1,
             "expected " + std::to_string(num_gates) + " gates, found " +
                 std::to_string(c.gates.size()));

    for (std::size_t i = 0; i < out_bits; ++i) {
      const WireId w = static_cast<WireId>(c.num_wires - out_bits + i);
      if (!defined[w]) semantic(line_no_, 1, "output wire " + std::to_string(w) + " undefined");
      c.outputs.push_back(w);
    }
    return c;
  }

private:
  std::optional<std::vector<Token>> next_line() {
    while (std::getline(in_, buf_)) {
      ++line_no_;
      auto toks = tokenize(buf_);
      if (!toks.empty()) return toks;
    }
    return std::nullopt;
  }

  [[noreturn]] void syntax(std::size_t line, std::size_t col, const std::string& msg) {
    throw CircuitError(CircuitError::Kind::Syntax, line, col, msg);
  }
  [[noreturn]] void semantic(std::size_t line, std::size_t col, const std::string& msg) {
    throw CircuitError(CircuitError::Kind::Semantic, line, col, msg);
  }

  void expect_count(const std::vector<Token>& t, std::size_t n, const char* msg) {
    if (t.size() != n) syntax(line_no_, t.size() > n ? t[n].column : t.back().column, msg);
  }

  std::uint64_t number(const Token& t) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc{} || p != t.text.data() + t.text.size() || v > 0xffffffffu)
      syntax(line_no_, t.column, "expected a non-negative integer, got '" + std::string(t.text) + "'");
    return v;
  }

  std::vector<std::uint32_t> widths_line(const char* what) {
    auto toks = next_line();
    if (!toks) syntax(line_no_ + 1, 1, std::string("missing ") + what + " declaration line");
    const auto count = number((*toks)[0]);
    std::vector<std::uint32_t> w;
    if (toks->size() == 1) {
      w.assign(count, 1);  // widths omitted: one bit per value
      return w;
    }
    if (toks->size() != count + 1)
      syntax(line_no_, (*toks)[0].column,
             std::string(what) + " line declares " + std::to_string(count) + " values but lists " +
                 std::to_string(toks->size() - 1) + " widths");
    for (std::size_t i = 1; i < toks->size(); ++i)
      w.push_back(static_cast<std::uint32_t>(number((*toks)[i])));
    return w;
  }

  Gate gate_line(const std::vector<Token>& t, std::uint32_t num_wires,
                 std::vector<std::uint8_t>& defined) {
    if (t.size() < 4) syntax(line_no_, t.back().column, "gate line too short");
    const auto n_in = number(t[0]);
    const auto n_out = number(t[1]);
    if (t.size() != 2 + n_in + n_out + 1)
      syntax(line_no_, t.back().column, "gate line token count does not match its arity");
    const Token& tag = t.back();
    Gate g;
    if (tag.text == "AND")
      g.op = GateOp::And;
    else if (tag.text == "XOR")
      g.op = GateOp::Xor;
    else if (tag.text == "INV")
      g.op = GateOp::Inv;
    else
      semantic(line_no_, tag.column, "unsupported gate '" + std::string(tag.text) + "'");
    if (n_out != 1) syntax(line_no_, t[1].column, "gates must have exactly one output");
    if (n_in != static_cast<std::uint64_t>(g.arity()))
      syntax(line_no_, t[0].column,
             std::string(to_string(g.op)) + " takes " + std::to_string(g.arity()) + " inputs");
    for (std::size_t i = 0; i < n_in; ++i) {
      const Token& tok = t[2 + i];
      const auto w = number(tok);
      if (w >= num_wires) semantic(line_no_, tok.column, "wire " + std::to_string(w) + " out of range");
      if (!defined[w])
        semantic(line_no_, tok.column, "wire " + std::to_string(w) + " used before definition");
      g.in[i] = static_cast<WireId>(w);
    }
    const Token& otok = t[2 + n_in];
    const auto out = number(otok);
    if (out >= num_wires) semantic(line_no_, otok.column, "wire " + std::to_string(out) + " out of range");
    if (defined[out])
      semantic(line_no_, otok.column, "wire " + std::to_string(out) + " defined more than once");
    defined[out] = 1;
    g.out = static_cast<WireId>(out);
    return g;
  }

  std::istream& in_;
  std::string buf_;
  std::size_t line_no_ = 0;
};

}  // namespace

Circuit parse_bristol(std::istream& in) { return BristolReader(in).read(); }

Circuit parse_bristol_text(std::string_view text) {
  std::istringstream is{std::string(text)};
  return parse_bristol(is);
}

Circuit read_bristol_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open circuit file '" + path + "'");
  return parse_bristol(f);
}

void write_bristol(std::ostream& out, const Circuit& c) {
  if (!c.bristol_layout())
    throw std::invalid_argument("circuit does not use the Bristol wire layout");
  out << c.gates.size() << ' ' << c.num_wires << '\n';
  out << c.input_widths.size();
  for (auto w : c.input_widths) out << ' ' << w;
  out << '\n' << c.output_widths.size();
  for (auto w : c.output_widths) out << ' ' << w;
  out << '\n';
  for (const Gate& g : c.gates) {
    out << g.arity() << " 1";
    for (int i = 0; i < g.arity(); ++i) out << ' ' << g.in[i];
    out << ' ' << g.out << ' ' << to_string(g.op) << '\n';
  }
}

std::string write_bristol_text(const Circuit& c) {
  std::ostringstream os;
  write_bristol(os, c);
  return os.str();
}

Bits plaintext_evaluate(const Circuit& c, const Bits& input_bits) {
  if (input_bits.size() != c.inputs.size())
    throw std::invalid_argument("expected " + std::to_string(c.inputs.size()) + " input bits, got " +
                                std::to_string(input_bits.size()));
  std::vector<std::uint8_t> v(c.num_wires, 0);
  for (std::size_t i = 0; i < c.inputs.size(); ++i) v[c.inputs[i]] = input_bits[i] & 1u;
  for (const Gate& g : c.gates) {
    switch (g.op) {
      case GateOp::And: v[g.out] = v[g.in[0]] & v[g.in[1]]; break;
      case GateOp::Xor: v[g.out] = v[g.in[0]] ^ v[g.in[1]]; break;
      case GateOp::Inv: v[g.out] = v[g.in[0]] ^ 1u; break;
    }
  }
  Bits out;
  out.reserve(c.outputs.size());
  for (WireId w : c.outputs) out.push_back(v[w]);
  return out;
}

LevelSchedule level_schedule(const Circuit& c) {
  LevelSchedule s;
  std::vector<std::uint32_t> wire_level(c.num_wires, 0);
  s.level.reserve(c.gates.size());
  for (const Gate& g : c.gates) {
    std::uint32_t lv = wire_level[g.in[0]];
    if (g.arity() == 2) lv = std::max(lv, wire_level[g.in[1]]);
    ++lv;
    wire_level[g.out] = lv;
    s.level.push_back(lv);
    s.stats.num_levels = std::max(s.stats.num_levels, lv);
  }
  s.stats.gates_per_level.assign(s.stats.num_levels, 0);
  for (auto lv : s.level) ++s.stats.gates_per_level[lv - 1];
  s.stats.and_count = c.and_count();
  if (!c.gates.empty()) {
    s.stats.and_fraction = double(s.stats.and_count) / double(c.gates.size());
    s.stats.avg_ilp = double(c.gates.size()) / double(s.stats.num_levels);
  }
  return s;
}

// ---------------------------------------------------------------------------
// builder

WireId CircuitBuilder::input() {
  if (!gates_.empty()) throw std::logic_error("declare all inputs before adding gates");
  return num_inputs_++;
}

std::vector<WireId> CircuitBuilder::inputs(std::size_t n) {
  std::vector<WireId> v(n);
  for (auto& w : v) w = input();
  return v;
}

WireId CircuitBuilder::gate(GateOp op, WireId a, WireId b) {
  Gate g;
  g.op = op;
  g.in = {a, op == GateOp::Inv ? 0u : b};
  g.out = kGateBase + static_cast<WireId>(gates_.size());
  gates_.push_back(g);
  return g.out;
}

Circuit CircuitBuilder::finish(std::vector<std::uint32_t> input_widths,
                               const std::vector<WireId>& outputs,
                               std::vector<std::uint32_t> output_widths) const {
  const std::uint32_t n_gates = static_cast<std::uint32_t>(gates_.size());
  const std::uint32_t n_wires = num_inputs_ + n_gates;
  std::vector<WireId> gate_map(n_gates, 0);
  std::vector<std::uint8_t> is_out(n_gates, 0);
  for (WireId w : outputs) {
    if (w < kGateBase) throw std::invalid_argument("builder outputs must be gate outputs");
    const auto k = w - kGateBase;
    if (is_out[k]) throw std::invalid_argument("duplicate builder output");
    is_out[k] = 1;
  }
  const std::uint32_t first_out = n_wires - static_cast<std::uint32_t>(outputs.size());
  for (std::size_t j = 0; j < outputs.size(); ++j)
    gate_map[outputs[j] - kGateBase] = first_out + static_cast<WireId>(j);
  WireId next = num_inputs_;
  for (std::uint32_t k = 0; k < n_gates; ++k)
    if (!is_out[k]) gate_map[k] = next++;

  auto map = [&](WireId w) { return w < kGateBase ? w : gate_map[w - kGateBase]; };

  Circuit c;
  c.num_wires = n_wires;
  c.input_widths = std::move(input_widths);
  c.output_widths = std::move(output_widths);
  for (WireId i = 0; i < num_inputs_; ++i) c.inputs.push_back(i);
  for (WireId w : outputs) c.outputs.push_back(map(w));
  c.gates.reserve(n_gates);
  for (const Gate& g : gates_) {
    Gate m = g;
    m.in[0] = map(g.in[0]);
    m.in[1] = g.op == GateOp::Inv ? 0u : map(g.in[1]);
    m.out = map(g.out);
    c.gates.push_back(m);
  }
  validate(c);
  return c;
}

// ---------------------------------------------------------------------------
// generators

namespace {

void require_positive(std::size_t v, const char* what) {
  if (v == 0) throw std::invalid_argument(std::string(what) + " must be positive");
}

std::vector<std::uint32_t> ones(std::size_t n) { return std::vector<std::uint32_t>(n, 1); }

// Truncated ripple-carry sum of two equal-width words; carry out dropped.
std::vector<WireId> add_truncated(CircuitBuilder& b, const std::vector<WireId>& x,
                                  const std::vector<WireId>& y) {
  const std::size_t m = x.size();
  std::vector<WireId> s(m);
  s[0] = b.xor_(x[0], y[0]);
  if (m == 1) return s;
  WireId carry = b.and_(x[0], y[0]);
  for (std::size_t i = 1; i < m; ++i) {
    const WireId t1 = b.xor_(x[i], carry);
    const WireId t2 = b.xor_(y[i], carry);
    s[i] = b.xor_(t1, y[i]);
    if (i + 1 < m) carry = b.xor_(b.and_(t1, t2), carry);
  }
  return s;
}

// Product of two words modulo 2^width by shift-and-add.
std::vector<WireId> multiply_truncated(CircuitBuilder& b, const std::vector<WireId>& x,
                                       const std::vector<WireId>& y) {
  const std::size_t w = x.size();
  std::vector<WireId> acc(w);
  for (std::size_t s = 0; s < w; ++s) acc[s] = b.and_(x[s], y[0]);
  for (std::size_t t = 1; t < w; ++t) {
    std::vector<WireId> row, cur;
    for (std::size_t s = t; s < w; ++s) {
      row.push_back(b.and_(x[s - t], y[t]));
      cur.push_back(acc[s]);
    }
    auto sum = add_truncated(b, cur, row);
    for (std::size_t s = t; s < w; ++s) acc[s] = sum[s - t];
  }
  return acc;
}

}  // namespace

Circuit gen_chain(std::size_t length, ChainOp op) {
  require_positive(length, "chain length");
  CircuitBuilder b;
  if (op == ChainOp::Inv) {
    WireId x = b.input();
    WireId prev = x;
    for (std::size_t k = 0; k < length; ++k) prev = b.inv(prev);
    return b.finish({1}, {prev}, {1});
  }
  auto x = b.inputs(2);
  WireId prev = x[0];
  for (std::size_t k = 0; k < length; ++k) {
    GateOp g = GateOp::And;
    if (op == ChainOp::Xor || (op == ChainOp::Mixed && k % 2 == 1)) g = GateOp::Xor;
    prev = b.gate(g, prev, x[(k + 1) % 2]);
  }
  return b.finish(ones(2), {prev}, {1});
}

Circuit gen_parallel(GateOp op, std::size_t count) {
  require_positive(count, "parallel gate count");
  CircuitBuilder b;
  std::vector<WireId> outs;
  if (op == GateOp::Inv) {
    auto x = b.inputs(count);
    for (auto w : x) outs.push_back(b.inv(w));
    return b.finish(ones(count), outs, ones(count));
  }
  auto x = b.inputs(2 * count);
  for (std::size_t i = 0; i < count; ++i) outs.push_back(b.gate(op, x[2 * i], x[2 * i + 1]));
  return b.finish(ones(2 * count), outs, ones(count));
}

Circuit gen_xor_tree(std::size_t leaves) {
  if (leaves < 2) throw std::invalid_argument("xor tree needs at least 2 leaves");
  CircuitBuilder b;
  auto layer = b.inputs(leaves);
  while (layer.size() > 1) {
    std::vector<WireId> next;
    for (std::size_t i = 0; i + 1 < layer.size(); i += 2) next.push_back(b.xor_(layer[i], layer[i + 1]));
    if (layer.size() % 2) next.push_back(layer.back());
    layer = std::move(next);
  }
  return b.finish(ones(leaves), {layer[0]}, {1});
}

Circuit gen_adder(std::size_t bits) {
  require_positive(bits, "adder width");
  CircuitBuilder b;
  auto a = b.inputs(bits);
  auto y = b.inputs(bits);
  std::vector<WireId> outs;
  outs.push_back(b.xor_(a[0], y[0]));
  WireId carry = b.and_(a[0], y[0]);
  for (std::size_t i = 1; i < bits; ++i) {
    const WireId t1 = b.xor_(a[i], carry);
    const WireId t2 = b.xor_(y[i], carry);
    outs.push_back(b.xor_(t1, y[i]));
    carry = b.xor_(b.and_(t1, t2), carry);
  }
  outs.push_back(carry);
  const auto w = static_cast<std::uint32_t>(bits);
  return b.finish({w, w}, outs, {w, 1});
}

Circuit gen_matmul(std::size_t n, std::size_t bits) {
  require_positive(n, "matrix dimension");
  require_positive(bits, "entry width");
  CircuitBuilder b;
  auto word_grid = [&] {
    std::vector<std::vector<std::vector<WireId>>> m(n, std::vector<std::vector<WireId>>(n));
    for (auto& row : m)
      for (auto& e : row) e = b.inputs(bits);
    return m;
  };
  auto A = word_grid();
  auto B = word_grid();
  std::vector<WireId> outs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<std::vector<WireId>> terms;
      for (std::size_t k = 0; k < n; ++k) terms.push_back(multiply_truncated(b, A[i][k], B[k][j]));
      while (terms.size() > 1) {
        std::vector<std::vector<WireId>> next;
        for (std::size_t t = 0; t + 1 < terms.size(); t += 2)
          next.push_back(add_truncated(b, terms[t], terms[t + 1]));
        if (terms.size() % 2) next.push_back(terms.back());
        terms = std::move(next);
      }
      outs.insert(outs.end(), terms[0].begin(), terms[0].end());
    }
  }
  const auto w = static_cast<std::uint32_t>(bits);
  return b.finish(std::vector<std::uint32_t>(2 * n * n, w), outs,
                  std::vector<std::uint32_t>(n * n, w));
}

Circuit gen_blocks(std::size_t width, std::size_t depth) {
  require_positive(width, "block width");
  require_positive(depth, "block depth");
  CircuitBuilder b;
  auto x = b.inputs(width + 1);
  std::vector<WireId> outs;
  for (std::size_t i = 0; i < width; ++i) {
    WireId prev = b.and_(x[i], x[width]);
    for (std::size_t d = 1; d < depth; ++d)
      prev = b.gate(d % 2 ? GateOp::Xor : GateOp::And, prev, x[(i + d) % width]);
    outs.push_back(prev);
  }
  return b.finish(ones(width + 1), outs, ones(width));
}

Circuit gen_bubble(std::size_t passes, std::size_t length) {
  require_positive(passes, "pass count");
  require_positive(length, "pass length");
  CircuitBuilder b;
  auto column_in = b.inputs(length);  // feeds pass 0
  auto row_in = b.inputs(passes);     // feeds position 0 of each pass
  std::vector<WireId> prev_pass = column_in;
  for (std::size_t p = 0; p < passes; ++p) {
    std::vector<WireId> cur(length);
    WireId left = row_in[p];
    for (std::size_t i = 0; i < length; ++i) {
      cur[i] = b.gate((p + i) % 2 ? GateOp::Xor : GateOp::And, left, prev_pass[i]);
      left = cur[i];
    }
    prev_pass = std::move(cur);
  }
  return b.finish(ones(length + passes), prev_pass, ones(length));
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto p = s.find(sep, start);
    out.push_back(s.substr(start, p == std::string_view::npos ? s.npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

std::size_t to_size(std::string_view s, std::string_view spec) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || v == 0)
    throw std::invalid_argument("bad size '" + std::string(s) + "' in generator spec '" +
                                std::string(spec) + "'");
  return v;
}

}  // namespace

Circuit generate(std::string_view spec) {
  auto parts = split(spec, ':');
  const auto kind = parts[0];
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (parts.size() < lo + 1 || parts.size() > hi + 1)
      throw std::invalid_argument("wrong number of parameters in generator spec '" +
                                  std::string(spec) + "'");
  };
  if (kind == "chain") {
    need(1, 2);
    ChainOp op = ChainOp::Mixed;
    if (parts.size() == 3) {
      if (parts[2] == "and") op = ChainOp::And;
      else if (parts[2] == "xor") op = ChainOp::Xor;
      else if (parts[2] == "inv") op = ChainOp::Inv;
      else if (parts[2] != "mixed") throw std::invalid_argument("unknown chain op in '" + std::string(spec) + "'");
    }
    return gen_chain(to_size(parts[1], spec), op);
  }
  if (kind == "parallel") {
    need(1, 2);
    GateOp op = GateOp::And;
    if (parts.size() == 3) {
      if (parts[2] == "xor") op = GateOp::Xor;
      else if (parts[2] == "inv") op = GateOp::Inv;
      else if (parts[2] != "and") throw std::invalid_argument("unknown gate op in '" + std::string(spec) + "'");
    }
    return gen_parallel(op, to_size(parts[1], spec));
  }
  if (kind == "xor_tree") {
    need(1, 1);
    return gen_xor_tree(to_size(parts[1], spec));
  }
  if (kind == "adder") {
    need(1, 1);
    return gen_adder(to_size(parts[1], spec));
  }
  if (kind == "matmul" || kind == "matmul_like") {
    need(2, 2);
    return gen_matmul(to_size(parts[1], spec), to_size(parts[2], spec));
  }
  if (kind == "blocks") {
    need(2, 2);
    return gen_blocks(to_size(parts[1], spec), to_size(parts[2], spec));
  }
  if (kind == "bubble") {
    need(2, 2);
    return gen_bubble(to_size(parts[1], spec), to_size(parts[2], spec));
  }
  throw std::invalid_argument("unsupported circuit kind '" + std::string(kind) + "'");
}

}  // namespace gcaccel
