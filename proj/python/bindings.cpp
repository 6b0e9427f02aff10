#include "gcaccel/pipeline.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace gcaccel;

namespace {

SimConfig config_of(const std::string& text) { return SimConfig::parse(text); }

py::dict run_dict(const VerifiedRun& r) {
  py::dict d;
  d["match"] = r.match;
  d["mismatch"] = r.mismatch;
  d["inputs"] = r.inputs;
  d["expected"] = r.expected;
  d["decoded"] = r.decoded;
  d["total_cycles"] = r.report.total_cycles;
  d["gates_per_cycle"] = r.report.gates_per_cycle;
  d["steady_gates_per_cycle"] = r.report.steady_gates_per_cycle;
  d["report_json"] = r.report.to_json();
  return d;
}

}  // namespace

PYBIND11_MODULE(_gcaccel, m) {
  m.doc() = "Garbled-circuit compiler and accelerator simulator";

  py::class_<Circuit>(m, "Circuit")
      .def_readonly("num_wires", &Circuit::num_wires)
      .def_property_readonly("num_inputs", [](const Circuit& c) { return c.inputs.size(); })
      .def_property_readonly("num_outputs", [](const Circuit& c) { return c.outputs.size(); })
      .def_property_readonly("num_gates", [](const Circuit& c) { return c.gates.size(); })
      .def("and_count", &Circuit::and_count)
      .def("to_bristol", [](const Circuit& c) { return write_bristol_text(c); });

  m.def("generate", [](const std::string& spec) { return generate(spec); }, py::arg("spec"));
  m.def("parse_bristol", [](const std::string& text) { return parse_bristol_text(text); },
        py::arg("text"));
  m.def("plaintext_evaluate", &plaintext_evaluate, py::arg("circuit"), py::arg("bits"));
  m.def("random_input_bits", &random_input_bits, py::arg("n"), py::arg("seed"));

  m.def("config_text", [](const std::string& text) { return config_of(text).to_text(); },
        py::arg("text") = "", "Normalised key = value config text (validates it).");

  m.def(
      "traffic",
      [](const Circuit& c, const std::string& passes, const std::string& config) {
        return compile(c, parse_pass_list(passes), config_of(config)).traffic.to_json();
      },
      py::arg("circuit"), py::arg("passes") = "full,rename,esw,oor", py::arg("config") = "",
      "Compiles and returns the traffic report as JSON text.");

  m.def(
      "run",
      [](const Circuit& c, const std::string& passes, const std::string& config,
         std::uint64_t seed, std::optional<Bits> inputs, bool ideal_memory) {
        SimConfig cfg = config_of(config);
        const Bits in = inputs ? *inputs : random_input_bits(c.inputs.size(), seed);
        SimOptions opts;
        opts.ideal_memory = ideal_memory;
        py::gil_scoped_release release;
        auto r = run_and_verify(c, parse_pass_list(passes), cfg, seed, in, opts);
        py::gil_scoped_acquire acquire;
        return run_dict(r);
      },
      py::arg("circuit"), py::arg("passes") = "full,rename,esw,oor", py::arg("config") = "",
      py::arg("seed") = 1, py::arg("inputs") = py::none(), py::arg("ideal_memory") = false,
      "Compiles, simulates and checks the result against software garbling.");

  m.def(
      "half_gate_check",
      [](std::uint64_t seed) {
        Label r = Label::from_words(seed * 3 + 1, seed * 7 + 5);
        r.bytes[0] |= 1u;
        const Label a0 = Label::from_words(seed, 1), b0 = Label::from_words(seed, 2);
        reset_hash_counters();
        const auto [c0, t] = garble_and(GlobalDelta{r}, a0, b0, seed);
        const auto garbler_hashes = hash_counters().hash_calls;
        bool ok = true;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            ok = ok && eval_and(a0 ^ select(a, r), b0 ^ select(b, r), t, seed) == (c0 ^ select(a & b, r));
        return py::make_tuple(ok, garbler_hashes);
      },
      py::arg("seed") = 1, "Returns (all four cases decode, garbler hash calls).");
}
