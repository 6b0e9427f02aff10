import json

import gcaccel


def test_generate_and_evaluate():
    c = gcaccel.generate("adder:8")
    assert c.num_inputs == 16 and c.num_outputs == 9  # sum plus carry
    bits = [1, 0, 0, 0, 0, 0, 0, 0] + [1, 1, 0, 0, 0, 0, 0, 0]  # 1 + 3, lsb first
    assert gcaccel.plaintext_evaluate(c, bits) == [0, 0, 1, 0, 0, 0, 0, 0, 0]
    again = gcaccel.parse_bristol(c.to_bristol())
    assert again.num_gates == c.num_gates


def test_run_matches_software_in_both_modes():
    c = gcaccel.generate("matmul:2:4")
    for mode in ("evaluator", "garbler"):
        r = gcaccel.run(c, config=f"mode = {mode}\nsww_bytes = 256\nges = 4", seed=3)
        assert r["match"], r["mismatch"]
        report = json.loads(r["report_json"])
        assert report["total_cycles"] == r["total_cycles"] > 0
    ev = gcaccel.run(c, config="sww_bytes = 256")
    assert ev["decoded"] == ev["expected"]


def test_traffic_and_config():
    t = gcaccel.traffic(gcaccel.generate("bubble:4:64"), config="sww_bytes = 256")
    assert t["live_wires"] >= 0 and t["oor_wires"] >= 0
    assert "ges = 16" in gcaccel.config_text("")


def test_half_gate():
    ok, hashes = gcaccel.half_gate_check(5)
    assert ok and hashes == 4
