"""
JSON scenario files for ``contextleak run``.

Complex numbers are ``[re, im]`` pairs and matrices are row-major lists of
such pairs; a bare real number is also accepted for an entry. Unknown keys
are errors. See ``docs/scenario-format.md`` for the schema.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContextLeakError
from .instruments import depolarizing_instrument, luders_instrument, parent_instrument, post_process
from .ipc import (
    MemoryContext,
    chi_alice,
    ipc_modified,
    leak,
    memory_gap,
    min_leak_over_eve,
    new_ipc_mem,
    old_ipc,
    old_ipc_generalized,
    old_ipc_mem,
    sharp_relation_residual,
)
from .maps import Instrument, unitary_channel
from .measurements import (
    MeasurementModel,
    Observable,
    model_to_instrument,
    pauli_observable,
    random_povm,
    random_pvm,
    trine_povm,
    trivial_observable,
)
from .scenarios import Example2Config, build_example2_state
from .states import DensityMatrix, basis_state, maximally_mixed, pure, random_density

OUTPUTS = (
    "old_ipc",
    "old_ipc_generalized",
    "chi_alice",
    "leak",
    "min_leak_over_eve",
    "ipc_modified",
    "sharp_relation_residual",
    "old_ipc_mem",
    "new_ipc_mem",
    "memory_gap",
)

NEGATIVE_NOTE = (
    "negative entropy-difference value: Eve's channel lowered the output entropy, "
    "so this measure reports information gained rather than leaked"
)


class ScenarioError(ContextLeakError):
    """Scenario could not be parsed or evaluated; carries a JSON path and a source position."""

    def __init__(self, message: str, path: str = "", line: int | None = None, col: int | None = None):
        self.message, self.path, self.line, self.col = message, path, line, col
        where = f"line {line}, column {col}" if line is not None else "unknown position"
        prefix = f"{where}: " + (f"{path}: " if path else "")
        super().__init__(prefix + message)


def _locate(text: str, path: list) -> tuple[int | None, int | None]:
    """Best-effort line/column of the last object key along ``path``."""
    offset = 0
    found = None
    for part in path:
        if isinstance(part, int):
            continue
        pos = text.find(json.dumps(part), offset)
        if pos < 0:
            break
        found = offset = pos
    if found is None:
        return 1, 1
    line = text.count("\n", 0, found) + 1
    col = found - (text.rfind("\n", 0, found) + 1) + 1
    return line, col


def _fmt_path(path: list) -> str:
    out = ""
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text

    def fail(self, msg: str, path: list):
        line, col = _locate(self.text, path)
        raise ScenarioError(msg, _fmt_path(path), line, col)

    def obj(self, node, path, required=(), optional=()):
        if not isinstance(node, dict):
            self.fail("expected an object", path)
        allowed = set(required) | set(optional)
        for key in node:
            if key not in allowed:
                self.fail(f"unknown key {key!r} (allowed: {', '.join(sorted(allowed))})", path + [key])
        for key in required:
            if key not in node:
                self.fail(f"missing required key {key!r}", path)
        return node

    def number(self, node, path, integer=False):
        if isinstance(node, bool) or not isinstance(node, (int, float)):
            self.fail("expected a number", path)
        if integer and not float(node).is_integer():
            self.fail("expected an integer", path)
        return int(node) if integer else float(node)

    def complex_(self, node, path) -> complex:
        if isinstance(node, (int, float)) and not isinstance(node, bool):
            return complex(node)
        if (isinstance(node, list) and len(node) == 2
                and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in node)):
            return complex(node[0], node[1])
        self.fail("expected a complex number [re, im]", path)

    def vector(self, node, path) -> np.ndarray:
        if not isinstance(node, list) or not node:
            self.fail("expected a non-empty list of complex numbers", path)
        return np.array([self.complex_(v, path + [i]) for i, v in enumerate(node)])

    def matrix(self, node, path) -> np.ndarray:
        if not isinstance(node, list) or not node:
            self.fail("expected a matrix (list of rows)", path)
        rows = [self.vector(r, path + [i]) for i, r in enumerate(node)]
        if len({len(r) for r in rows}) != 1:
            self.fail("matrix rows have different lengths", path)
        return np.array(rows)

    def dims(self, node, path):
        if node is None:
            return ()
        if not isinstance(node, list) or not node:
            self.fail("dims must be a non-empty list of positive integers", path)
        return tuple(self.number(d, path + [i], integer=True) for i, d in enumerate(node))

    def guarded(self, fn, path):
        try:
            return fn()
        except ScenarioError:
            raise
        except ContextLeakError as exc:
            self.fail(str(exc), path)

    # states

    def state(self, node, path) -> DensityMatrix:
        node = self.obj(node, path, required=("kind",), optional=(
            "dim", "index", "vector", "matrix", "dims", "rank", "seed", "alpha", "p", "eigenbasis"))
        kind = node["kind"]
        keys = set(node) - {"kind"}

        def only(*allowed):
            extra = keys - set(allowed)
            if extra:
                self.fail(f"key(s) {sorted(extra)} not valid for state kind {kind!r}", path + [sorted(extra)[0]])

        def need(key):
            if key not in node:
                self.fail(f"state kind {kind!r} needs key {key!r}", path)
            return node[key]

        if kind == "maximally_mixed":
            only("dim", "dims")
            d = self.number(need("dim"), path + ["dim"], integer=True)
            return self.guarded(lambda: maximally_mixed(d).with_dims(self.dims(node.get("dims"), path + ["dims"]) or (d,)), path)
        if kind == "basis":
            only("dim", "index")
            d = self.number(need("dim"), path + ["dim"], integer=True)
            i = self.number(need("index"), path + ["index"], integer=True)
            if not 0 <= i < d:
                self.fail(f"basis index {i} out of range for dimension {d}", path + ["index"])
            return basis_state(d, i)
        if kind == "pure":
            only("vector", "dims")
            v = self.vector(need("vector"), path + ["vector"])
            return self.guarded(lambda: pure(v, self.dims(node.get("dims"), path + ["dims"])), path)
        if kind == "matrix":
            only("matrix", "dims")
            m = self.matrix(need("matrix"), path + ["matrix"])
            return self.guarded(lambda: DensityMatrix(m, self.dims(node.get("dims"), path + ["dims"])), path)
        if kind == "random":
            only("dim", "rank", "seed", "dims")
            d = self.number(need("dim"), path + ["dim"], integer=True)
            rank = self.number(node["rank"], path + ["rank"], integer=True) if "rank" in node else None
            seed = self.number(need("seed"), path + ["seed"], integer=True)
            dims = self.dims(node.get("dims"), path + ["dims"])
            return self.guarded(lambda: random_density(d, rank, seed).with_dims(dims or (d,)), path)
        if kind == "example2":
            only("alpha", "p", "eigenbasis")
            alpha = self.number(node.get("alpha", 0.25), path + ["alpha"])
            p = self.number(need("p"), path + ["p"])
            basis = node.get("eigenbasis", "y")
            return self.guarded(lambda: build_example2_state(Example2Config(alpha, (p,), basis), p), path)
        self.fail(f"unknown state kind {kind!r}", path + ["kind"])

    # observables

    def observable(self, node, path) -> Observable:
        node = self.obj(node, path, required=("kind",), optional=(
            "axis", "effects", "labels", "dim", "outcomes", "seed", "weights"))
        kind = node["kind"]
        if kind == "pauli":
            return self.guarded(lambda: pauli_observable(str(node.get("axis", ""))), path + ["axis"])
        if kind == "trine":
            return trine_povm()
        if kind == "effects":
            if "effects" not in node:
                self.fail("observable kind 'effects' needs key 'effects'", path)
            if not isinstance(node["effects"], list) or not node["effects"]:
                self.fail("effects must be a non-empty list of matrices", path + ["effects"])
            effects = tuple(self.matrix(e, path + ["effects", i]) for i, e in enumerate(node["effects"]))
            labels = tuple(str(lab) for lab in node.get("labels", ()))
            return self.guarded(lambda: Observable(effects, labels), path + ["effects"])
        if kind == "random_povm":
            d = self.number(node.get("dim", 2), path + ["dim"], integer=True)
            n = self.number(node.get("outcomes", 2), path + ["outcomes"], integer=True)
            seed = self.number(node.get("seed", 0), path + ["seed"], integer=True)
            return random_povm(d, n, seed)
        if kind == "random_pvm":
            d = self.number(node.get("dim", 2), path + ["dim"], integer=True)
            seed = self.number(node.get("seed", 0), path + ["seed"], integer=True)
            return random_pvm(d, seed)
        if kind == "trivial":
            d = self.number(node.get("dim", 2), path + ["dim"], integer=True)
            w = [self.number(v, path + ["weights", i]) for i, v in enumerate(node.get("weights", [1.0]))]
            return self.guarded(lambda: trivial_observable(d, w), path)
        self.fail(f"unknown observable kind {kind!r}", path + ["kind"])

    # instruments

    def instrument(self, node, path, observables) -> tuple[Instrument, str]:
        node = self.obj(node, path, required=("type",), optional=(
            "observable", "target", "ancilla", "unitary", "pointer", "inner"))
        kind = node["type"]

        def obs_ref(key="observable"):
            name = node.get(key)
            if name not in observables:
                self.fail(f"unknown observable {name!r} (defined: {', '.join(observables) or 'none'})", path + [key])
            return name, observables[name]

        if kind in ("luders", "parent", "parent_dilated"):
            name, obs = obs_ref()
            build = {
                "luders": luders_instrument,
                "parent": parent_instrument,
                "parent_dilated": lambda o: parent_instrument(o, force_dilation=True),
            }[kind]
            return build(obs), f"{kind}({name})"
        if kind == "depolarizing":
            name, obs = obs_ref()
            if "target" not in node:
                self.fail("depolarizing instrument needs a 'target' state", path)
            eta = self.state(node["target"], path + ["target"])
            if eta.dim != obs.dim:
                self.fail(f"target state has dimension {eta.dim}, observable {name!r} acts on {obs.dim}",
                          path + ["target"])
            return self.guarded(lambda: depolarizing_instrument(obs, eta), path), f"depolarizing({name})"
        if kind == "model":
            anc = self.state(node.get("ancilla"), path + ["ancilla"])
            u = self.matrix(node.get("unitary"), path + ["unitary"])
            name, pointer = obs_ref("pointer")
            inst = self.guarded(lambda: model_to_instrument(MeasurementModel(anc, u, pointer)), path)
            return inst, f"model({name})"
        if kind == "post_process":
            if "inner" not in node:
                self.fail("post_process needs an 'inner' instrument", path)
            inner, desc = self.instrument(node["inner"], path + ["inner"], observables)
            u = self.matrix(node.get("unitary"), path + ["unitary"])
            if u.shape != (inner.out_dim, inner.out_dim):
                self.fail(f"unitary has shape {u.shape}, inner instrument {desc} outputs dimension {inner.out_dim}",
                          path + ["unitary"])
            return self.guarded(lambda: post_process(unitary_channel(u), inner), path), f"post_process({desc})"
        self.fail(f"unknown instrument type {kind!r}", path + ["type"])


@dataclass
class Scenario:
    state: DensityMatrix | None = None
    observables: dict[str, Observable] = field(default_factory=dict)
    alice: tuple[Instrument, str] | None = None
    eve: tuple[Instrument, str] | None = None
    context: tuple[str, str] | None = None
    memory: tuple[DensityMatrix, str, str] | None = None
    outputs: tuple[str, ...] = ()
    text: str = ""


def parse_scenario(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(exc.msg, "", exc.lineno, exc.colno) from None
    p = _Parser(text)
    doc = p.obj(doc, [], required=("outputs",), optional=("state", "observables", "alice", "eve", "context", "memory"))
    sc = Scenario(text=text)
    if "state" in doc:
        sc.state = p.state(doc["state"], ["state"])
    obs_node = doc.get("observables", {})
    if not isinstance(obs_node, dict):
        p.fail("observables must be an object mapping names to observables", ["observables"])
    for name, node in obs_node.items():
        sc.observables[name] = p.observable(node, ["observables", name])
    if "alice" in doc:
        sc.alice = p.instrument(doc["alice"], ["alice"], sc.observables)
    if "eve" in doc:
        sc.eve = p.instrument(doc["eve"], ["eve"], sc.observables)
    if "context" in doc:
        node = p.obj(doc["context"], ["context"], required=("x", "y"))
        for key in ("x", "y"):
            if node[key] not in sc.observables:
                p.fail(f"unknown observable {node[key]!r}", ["context", key])
        sc.context = (node["x"], node["y"])
    if "memory" in doc:
        node = p.obj(doc["memory"], ["memory"], required=("joint_state", "x", "y"))
        js = p.state(node["joint_state"], ["memory", "joint_state"])
        for key in ("x", "y"):
            if node[key] not in sc.observables:
                p.fail(f"unknown observable {node[key]!r}", ["memory", key])
        sc.memory = (js, node["x"], node["y"])
    outs = doc["outputs"]
    if not isinstance(outs, list) or not outs:
        p.fail("outputs must be a non-empty list", ["outputs"])
    for i, o in enumerate(outs):
        if o not in OUTPUTS:
            p.fail(f"unknown output {o!r} (allowed: {', '.join(OUTPUTS)})", ["outputs", i])
    sc.outputs = tuple(outs)
    return sc


@dataclass
class Report:
    values: dict[str, float]
    notes: list[str]


def evaluate(sc: Scenario) -> Report:
    """Compute every requested output; dimension problems name the objects involved."""
    p = _Parser(sc.text)
    values: dict[str, float] = {}
    notes: list[str] = []

    def need(what, out):
        if getattr(sc, what) is None:
            p.fail(f"output {out!r} needs a {what!r} block", ["outputs"])
        return getattr(sc, what)

    def ctx(out):
        state = need("state", out)
        xn, yn = need("context", out)
        x, y = sc.observables[xn], sc.observables[yn]
        if x.dim != state.dim:
            p.fail(f"{out}: observable {xn!r} acts on dimension {x.dim} but the state has dimension {state.dim}",
                   ["context", "x"])
        return state, (xn, x), (yn, y)

    def chain(out, with_eve=True):
        state = need("state", out)
        inst_a, desc_a = need("alice", out)
        if inst_a.in_dim != state.dim:
            p.fail(f"{out}: alice instrument {desc_a} takes dimension {inst_a.in_dim} "
                   f"but the state has dimension {state.dim}", ["alice"])
        if not with_eve:
            return state, inst_a, None
        inst_b, desc_b = need("eve", out)
        if inst_b.in_dim != inst_a.out_dim:
            p.fail(f"{out}: eve instrument {desc_b} takes dimension {inst_b.in_dim} "
                   f"but alice instrument {desc_a} outputs dimension {inst_a.out_dim}", ["eve"])
        return state, inst_a, (inst_b, desc_b)

    for out in sc.outputs:
        if out == "old_ipc":
            state, (xn, x), (yn, y) = ctx(out)
            if y.dim != state.dim:
                p.fail(f"old_ipc: observable {yn!r} acts on dimension {y.dim}, state has {state.dim}", ["context", "y"])
            values[out] = p.guarded(lambda: old_ipc(state, x, y), ["context"])
        elif out == "ipc_modified":
            state, (xn, x), (yn, y) = ctx(out)
            values[out] = p.guarded(lambda: ipc_modified(state, x, y), ["context"])
        elif out == "sharp_relation_residual":
            state, (xn, x), (yn, y) = ctx(out)
            values[out] = p.guarded(lambda: sharp_relation_residual(state, x, y), ["context"])
        elif out == "chi_alice":
            state, inst_a, _ = chain(out, with_eve=False)
            values[out] = chi_alice(state, inst_a)[0]
        elif out == "old_ipc_generalized":
            state, inst_a, (inst_b, _) = chain(out)
            val = old_ipc_generalized(state, inst_a, inst_b)
            values[out] = val
            if val < -1e-9:
                notes.append(NEGATIVE_NOTE)
        elif out == "leak":
            state, inst_a, (inst_b, desc_b) = chain(out)
            rep = leak(state, inst_a, inst_b, desc_b)
            values["leak.chi_alice"] = rep.chi_alice
            values["leak.chi_after_eve"] = rep.chi_after_eve
            values[out] = rep.leak
        elif out == "min_leak_over_eve":
            state, inst_a, _ = chain(out, with_eve=False)
            yn = need("context", out)[1]
            y = sc.observables[yn]
            if y.dim != inst_a.out_dim:
                p.fail(f"min_leak_over_eve: observable {yn!r} acts on dimension {y.dim} "
                       f"but alice instrument {sc.alice[1]} outputs dimension {inst_a.out_dim}", ["context", "y"])
            values[out] = min_leak_over_eve(state, inst_a, y).leak
        elif out in ("old_ipc_mem", "new_ipc_mem", "memory_gap"):
            js, xn, yn = need("memory", out)
            mc = p.guarded(lambda: MemoryContext(js, sc.observables[xn], sc.observables[yn]), ["memory"])
            if out == "old_ipc_mem":
                values[out] = old_ipc_mem(mc)
            elif out == "new_ipc_mem":
                values[out] = new_ipc_mem(mc)
            else:
                old_gap, new_gap = memory_gap(mc)
                values["memory_gap.old"] = old_gap
                values["memory_gap.new"] = new_gap
    return Report({k: float(v) for k, v in values.items()}, notes)


def format_value(v: float, bits: bool = False) -> str:
    v = v / math.log(2) if bits else v
    s = f"{v:.6f}"
    return "0.000000" if s == "-0.000000" else s


__all__ = ["OUTPUTS", "Report", "Scenario", "ScenarioError", "evaluate", "format_value", "parse_scenario"]
