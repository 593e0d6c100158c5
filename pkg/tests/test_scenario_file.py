import json
import math
from pathlib import Path

import pytest

from contextleak.scenario_file import NEGATIVE_NOTE, ScenarioError, evaluate, format_value, parse_scenario

LN2 = math.log(2)
SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"

BASIC = {
    "state": {"kind": "maximally_mixed", "dim": 2},
    "observables": {"z": {"kind": "pauli", "axis": "z"}, "x": {"kind": "pauli", "axis": "x"}},
    "context": {"x": "z", "y": "x"},
    "outputs": ["ipc_modified"],
}


def run(doc):
    text = doc if isinstance(doc, str) else json.dumps(doc, indent=2)
    return evaluate(parse_scenario(text))


def test_basic_ipc_modified():
    rep = run(BASIC)
    assert abs(rep.values["ipc_modified"] - LN2) < 1e-12
    assert format_value(rep.values["ipc_modified"]) == "0.693147"
    assert format_value(rep.values["ipc_modified"], bits=True) == "1.000000"


def test_negativity_witness_file():
    rep = run((SCENARIOS / "negativity-witness.json").read_text())
    assert abs(rep.values["old_ipc_generalized"] + LN2) < 1e-9
    assert rep.values["leak"] >= 0
    assert NEGATIVE_NOTE in rep.notes


def test_shipped_files_evaluate():
    ex1 = run((SCENARIOS / "example1.json").read_text())
    assert abs(ex1.values["old_ipc"]) < 1e-12 and abs(ex1.values["ipc_modified"] - LN2) < 1e-12
    ex2 = run((SCENARIOS / "example2.json").read_text())
    h = -(0.25 * math.log(0.25) + 0.75 * math.log(0.75))
    assert abs(ex2.values["memory_gap.new"] - h) < 1e-9


def test_literal_matrices_and_instruments():
    doc = {
        "state": {"kind": "matrix", "matrix": [[0.5, [0, -0.5]], [[0, 0.5], 0.5]]},
        "observables": {
            "y": {"kind": "effects", "effects": [[[0.5, [0, -0.5]], [[0, 0.5], 0.5]], [[0.5, [0, 0.5]], [[0, -0.5], 0.5]]]},
            "z": {"kind": "pauli", "axis": "z"},
            "anc_z": {"kind": "pauli", "axis": "z"},
        },
        "alice": {"type": "model", "ancilla": {"kind": "basis", "dim": 2, "index": 0},
                  "unitary": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], "pointer": "anc_z"},
        "eve": {"type": "post_process", "unitary": [[0, 1], [1, 0]], "inner": {"type": "luders", "observable": "y"}},
        "context": {"x": "y", "y": "z"},
        "outputs": ["old_ipc", "chi_alice", "leak"],
    }
    rep = run(doc)
    # the state is the +1 eigenstate of sigma_y, so measuring sigma_y disturbs nothing
    assert abs(rep.values["old_ipc"] - LN2) < 1e-12
    assert abs(rep.values["chi_alice"] - LN2) < 1e-12
    assert abs(rep.values["leak"] - LN2) < 1e-12


def test_parent_dilated_output_dimension():
    doc = {
        "state": {"kind": "random", "dim": 2, "seed": 3},
        "observables": {"t": {"kind": "trine"}, "y6": {"kind": "random_pvm", "dim": 6, "seed": 1}},
        "alice": {"type": "parent", "observable": "t"},
        "context": {"x": "t", "y": "y6"},
        "outputs": ["chi_alice", "min_leak_over_eve", "ipc_modified"],
    }
    rep = run(doc)
    assert abs(rep.values["min_leak_over_eve"] - rep.values["ipc_modified"]) < 1e-12


def test_json_syntax_error_has_position():
    text = '{\n  "outputs": ["ipc_modified",]\n}'
    with pytest.raises(ScenarioError) as err:
        parse_scenario(text)
    assert err.value.line == 2 and err.value.col == 30
    assert text.splitlines()[1][29] == "]"


def test_unknown_key_is_an_error():
    doc = dict(BASIC, extra=1)
    with pytest.raises(ScenarioError) as err:
        run(doc)
    assert "unknown key 'extra'" in str(err.value)
    assert err.value.line is not None


def test_unknown_nested_key_position():
    text = json.dumps(BASIC, indent=2).replace('"axis": "x"', '"axis": "x", "colour": "red"')
    with pytest.raises(ScenarioError) as err:
        parse_scenario(text)
    line = text.splitlines()[err.value.line - 1]
    assert '"colour"' in line[err.value.col - 1:]


def test_malformed_effect_matrix():
    doc = dict(BASIC, observables={"bad": {"kind": "effects", "effects": [[[1, 0], [0]]]}, **BASIC["observables"]})
    with pytest.raises(ScenarioError) as err:
        run(doc)
    assert "observables.bad.effects" in str(err.value)


def test_invalid_povm_is_reported():
    doc = dict(BASIC, observables={"bad": {"kind": "effects", "effects": [[[1, 0], [0, 0]], [[1, 0], [0, 0]]]},
                                   **BASIC["observables"]})
    with pytest.raises(ScenarioError):
        run(doc)


def test_dimension_mismatch_names_objects():
    doc = dict(BASIC, state={"kind": "maximally_mixed", "dim": 3})
    with pytest.raises(ScenarioError) as err:
        run(doc)
    assert "'z'" in str(err.value) and "dimension 3" in str(err.value)
    doc = {
        "state": {"kind": "maximally_mixed", "dim": 2},
        "observables": {"t": {"kind": "trine"}, "x": {"kind": "pauli", "axis": "x"}},
        "alice": {"type": "parent", "observable": "t"},
        "eve": {"type": "luders", "observable": "x"},
        "outputs": ["leak"],
    }
    with pytest.raises(ScenarioError) as err:
        run(doc)
    assert "parent(t)" in str(err.value) and "luders(x)" in str(err.value)


def test_missing_block_and_unknown_output():
    with pytest.raises(ScenarioError) as err:
        run({"outputs": ["leak"]})
    assert "'state'" in str(err.value)
    with pytest.raises(ScenarioError):
        run(dict(BASIC, outputs=["entropy_of_everything"]))
    with pytest.raises(ScenarioError):
        run(dict(BASIC, context={"x": "z", "y": "nope"}))


def test_negative_zero_is_printed_as_zero():
    assert format_value(-1e-17) == "0.000000"
