"""Garbled-circuit compiler and cycle-accurate accelerator simulator."""

import json

from ._gcaccel import (  # noqa: F401
    Circuit,
    config_text,
    generate,
    half_gate_check,
    parse_bristol,
    plaintext_evaluate,
    random_input_bits,
    run,
)
from ._gcaccel import traffic as _traffic


def traffic(circuit, passes="full,rename,esw,oor", config=""):
    """Traffic report of a compiled circuit as a dict."""
    return json.loads(_traffic(circuit, passes, config))


__all__ = [
    "Circuit",
    "config_text",
    "generate",
    "half_gate_check",
    "parse_bristol",
    "plaintext_evaluate",
    "random_input_bits",
    "run",
    "traffic",
]
