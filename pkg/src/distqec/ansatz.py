"""Parameterized gate programs and the seeded randomized entangling ansatz.

An :class:`Ansatz` is an ordered gate program with named parameter slots.
:func:`generate_rea` builds the randomized entangling ansatz: one
parameterized single-qubit rotation per qubit, followed by a number of
two-qubit blocks, each placing an entangling gate on an edge drawn
uniformly at random from a connectivity layout and dressing both involved
qubits with fresh single-qubit rotations.  The draw is driven by a seeded
PCG64 generator, so (seed, layout, depth) fully determines the program.
"""

from __future__ import annotations

import ast
import json
import math
import re
from dataclasses import dataclass

import numpy as np

from . import qmat
from .channels import NoiseSpec, build_channel, kraus_apply_batch

GATE_SLOTS = {
    "rx": 1,
    "ry": 1,
    "rz": 1,
    "u3": 3,
    "rzyz": 3,
    "rzxz": 3,
    "prx": 2,
    "cz": 0,
    "controlled_v": 3,
}
TWO_QUBIT_GATES = ("cz", "controlled_v")
SINGLE_QUBIT_GATES = tuple(k for k in GATE_SLOTS if k not in TWO_QUBIT_GATES)

LAYOUT_NAMES = ("full", "dense", "square", "star", "hexagonal", "custom")

# Five-qubit connectivity layouts, qubit 0 = data qubit, 1..4 = ancillas.
# The dense and square edge sets are transcriptions of hand-drawn layouts
# and are deliberately kept as editable data here; star and hexagonal are
# pinned by tests.
_DENSE_5 = ((0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (2, 4), (3, 4))
_SQUARE_5 = ((0, 1), (0, 2), (0, 3), (2, 4), (3, 4))
_STAR_5 = ((0, 1), (0, 2), (0, 3), (0, 4))
# Path-with-branch: data qubit bonded to two chain ends and one arm qubit,
# arm continues to the last ancilla.  Truncating the arm gives n = 4, 3.
_HEX = {
    5: ((0, 1), (0, 2), (0, 3), (3, 4)),
    4: ((0, 1), (0, 2), (0, 3)),
    3: ((0, 1), (0, 2)),
}


def _canonical_edges(edges, n: int) -> tuple[tuple[int, int], ...]:
    out = []
    seen = set()
    for a, b in edges:
        a, b = int(a), int(b)
        if a == b:
            raise ValueError(f"self-loop edge ({a}, {b})")
        if not (0 <= a < n and 0 <= b < n):
            raise ValueError(f"edge ({a}, {b}) references a qubit outside 0..{n - 1}")
        e = (min(a, b), max(a, b))
        if e in seen:
            raise ValueError(f"duplicate edge {e}")
        seen.add(e)
        out.append(e)
    return tuple(sorted(out))


@dataclass(frozen=True)
class Layout:
    """Undirected connectivity graph restricting two-qubit gate placement."""

    name: str
    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.name not in LAYOUT_NAMES:
            raise ValueError(f"unknown layout name {self.name!r}")
        object.__setattr__(self, "edges", _canonical_edges(self.edges, self.n))


def build_layout(name: str, n: int, edges=None) -> Layout:
    """Named connectivity layout.

    ``full`` is the complete graph on any n; ``dense``, ``square`` and
    ``star`` are fixed five-qubit layouts; ``hexagonal`` is defined for
    n = 3, 4, 5 (heavy-hex style patch, arm truncated for smaller n);
    ``custom`` takes explicit edges.
    """
    if name == "full":
        return Layout("full", n, tuple((a, b) for a in range(n) for b in range(a + 1, n)))
    if name == "custom":
        if edges is None:
            raise ValueError("custom layout needs explicit edges")
        return Layout("custom", n, tuple(tuple(e) for e in edges))
    if name == "dense":
        if n != 5:
            raise ValueError("dense layout is defined for n = 5 only")
        return Layout("dense", 5, _DENSE_5)
    if name == "square":
        if n != 5:
            raise ValueError("square layout is defined for n = 5 only")
        return Layout("square", 5, _SQUARE_5)
    if name == "star":
        if n != 5:
            raise ValueError("star layout is defined for n = 5 only")
        return Layout("star", 5, _STAR_5)
    if name == "hexagonal":
        if n not in _HEX:
            raise ValueError("hexagonal layout is defined for n in {3, 4, 5}")
        return Layout("hexagonal", n, _HEX[n])
    raise ValueError(f"unsupported layout {name!r}")


@dataclass(frozen=True)
class Gate:
    """One gate of a program: kind, target qubits, and parameter-slot indices."""

    kind: str
    targets: tuple[int, ...]
    param_slots: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in GATE_SLOTS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "targets", tuple(int(q) for q in self.targets))
        object.__setattr__(self, "param_slots", tuple(int(s) for s in self.param_slots))
        want = 2 if self.kind in TWO_QUBIT_GATES else 1
        if len(self.targets) != want:
            raise ValueError(f"{self.kind} acts on {want} qubit(s), got {self.targets}")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"repeated target in {self.targets}")
        if len(self.param_slots) != GATE_SLOTS[self.kind]:
            raise ValueError(
                f"{self.kind} takes {GATE_SLOTS[self.kind]} parameter(s), "
                f"got slots {self.param_slots}"
            )


@dataclass(frozen=True)
class Ansatz:
    """Ordered gate program with named parameter slots.

    ``seed``, ``layout`` and ``depth_blocks`` record provenance for programs
    produced by :func:`generate_rea`; hand-built programs may leave them None.
    """

    n: int
    gates: tuple[Gate, ...]
    num_params: int
    seed: int | None = None
    layout: Layout | None = None
    depth_blocks: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        used = [s for g in self.gates for s in g.param_slots]
        if used and (min(used) < 0 or max(used) >= self.num_params):
            raise ValueError("parameter slot outside 0..num_params-1")
        if len(used) != len(set(used)):
            raise ValueError("parameter slots must not be shared between gates")
        for g in self.gates:
            for q in g.targets:
                if not 0 <= q < self.n:
                    raise ValueError(f"gate target {q} outside register of {self.n}")


@dataclass(frozen=True)
class BoundCircuit:
    """An ansatz together with a bound parameter vector."""

    ansatz: Ansatz
    params: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.params, dtype=float)
        if p.shape != (self.ansatz.num_params,):
            raise ValueError(
                f"parameter vector length {p.shape} does not match "
                f"num_params = {self.ansatz.num_params}"
            )
        p.flags.writeable = False
        object.__setattr__(self, "params", p)


def _rx(t):
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def _ry(t):
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(t):
    return np.array([[np.exp(-0.5j * t), 0], [0, np.exp(0.5j * t)]], dtype=complex)


def _u3(theta, phi, lam):
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [[c, -np.exp(1j * lam) * s], [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]],
        dtype=complex,
    )


_CZ = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)


def gate_matrix(kind: str, params) -> np.ndarray:
    """Dense matrix of a gate, given its bound parameter values."""
    if kind == "rx":
        return _rx(params[0])
    if kind == "ry":
        return _ry(params[0])
    if kind == "rz":
        return _rz(params[0])
    if kind == "u3":
        return _u3(*params)
    if kind == "rzyz":
        return _rz(params[2]) @ _ry(params[1]) @ _rz(params[0])
    if kind == "rzxz":
        return _rz(params[2]) @ _rx(params[1]) @ _rz(params[0])
    if kind == "prx":
        theta, phi = params
        return _rz(phi) @ _rx(theta) @ _rz(-phi)
    if kind == "cz":
        return _CZ
    if kind == "controlled_v":
        w = np.eye(4, dtype=complex)
        w[2:, 2:] = _rz(params[2]) @ _ry(params[1]) @ _rz(params[0])
        return w
    raise ValueError(f"unknown gate kind {kind!r}")


def generate_rea(
    n: int,
    depth_blocks: int,
    layout: Layout,
    seed: int,
    single_gate_kind: str = "rzyz",
    two_gate_kind: str = "cz",
) -> Ansatz:
    """Seeded randomized entangling ansatz on ``n`` qubits.

    Edges are drawn uniformly with replacement from ``layout.edges`` using
    PCG64 seeded with (seed, 0); the control/target orientation of each
    block is flipped with probability 1/2 (only meaningful for asymmetric
    two-qubit gates; the draw happens either way to keep the stream fixed).
    """
    if layout.n != n:
        raise ValueError(f"layout is for {layout.n} qubits, ansatz wants {n}")
    if single_gate_kind not in SINGLE_QUBIT_GATES:
        raise ValueError(f"{single_gate_kind!r} is not a single-qubit gate kind")
    if two_gate_kind not in TWO_QUBIT_GATES:
        raise ValueError(f"{two_gate_kind!r} is not a two-qubit gate kind")
    if depth_blocks < 0:
        raise ValueError("depth_blocks must be nonnegative")
    if depth_blocks > 0 and not layout.edges:
        raise ValueError("layout has no edges but depth_blocks > 0")

    rng = np.random.default_rng(np.random.PCG64(np.random.SeedSequence([seed, 0])))
    n_v = GATE_SLOTS[single_gate_kind]
    n_w = GATE_SLOTS[two_gate_kind]
    gates: list[Gate] = []
    slot = 0

    def take(count):
        nonlocal slot
        slots = tuple(range(slot, slot + count))
        slot += count
        return slots

    for q in range(n):
        gates.append(Gate(single_gate_kind, (q,), take(n_v)))
    for _ in range(depth_blocks):
        edge = layout.edges[int(rng.integers(len(layout.edges)))]
        if rng.integers(2):
            edge = (edge[1], edge[0])
        gates.append(Gate(two_gate_kind, edge, take(n_w)))
        gates.append(Gate(single_gate_kind, (edge[0],), take(n_v)))
        gates.append(Gate(single_gate_kind, (edge[1],), take(n_v)))

    expected = n * n_v + depth_blocks * (n_w + 2 * n_v)
    assert slot == expected
    return Ansatz(
        n=n,
        gates=tuple(gates),
        num_params=expected,
        seed=seed,
        layout=layout,
        depth_blocks=depth_blocks,
    )


def _bound_params(gate: Gate, params: np.ndarray):
    return [params[s] for s in gate.param_slots]


def circuit_unitary(ansatz: Ansatz, params) -> np.ndarray:
    """Product of the embedded gates in program order."""
    params = np.asarray(params, dtype=float)
    if params.shape != (ansatz.num_params,):
        raise ValueError(
            f"expected {ansatz.num_params} parameters, got shape {params.shape}"
        )
    u = np.eye(2**ansatz.n, dtype=complex)
    for g in ansatz.gates:
        u = qmat.apply_gate(u, gate_matrix(g.kind, _bound_params(g, params)), g.targets, ansatz.n)
    return u


def apply_circuit(
    rho: np.ndarray,
    ansatz: Ansatz,
    params,
    gate_noise: NoiseSpec | None = None,
) -> np.ndarray:
    """Run the circuit on a density matrix by conjugation, gate by gate.

    With ``gate_noise`` set (correlated two-qubit depolarizing), the lifted
    channel is applied on each two-qubit gate's pair right after that gate,
    in circuit order.
    """
    params = np.asarray(params, dtype=float)
    if params.shape != (ansatz.num_params,):
        raise ValueError(
            f"expected {ansatz.num_params} parameters, got shape {params.shape}"
        )
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2**ansatz.n, 2**ansatz.n):
        raise ValueError(f"state shape {rho.shape} does not match {ansatz.n} qubits")
    noise_ops = None
    if gate_noise is not None:
        if gate_noise.kind != "correlated_depolarizing_2q":
            raise ValueError("gate noise must be correlated_depolarizing_2q")
        noise_ops = build_channel(gate_noise).operators
    out = rho[None]
    n = ansatz.n
    for g in ansatz.gates:
        m = gate_matrix(g.kind, _bound_params(g, params))
        out = qmat.apply_gate(out, m, g.targets, n)
        out = np.conj(np.swapaxes(out, -1, -2))
        out = qmat.apply_gate(out, m, g.targets, n)
        out = np.conj(np.swapaxes(out, -1, -2))
        if noise_ops is not None and len(g.targets) == 2:
            out = kraus_apply_batch(out, noise_ops, g.targets, n)
    return out[0]


def encoder_unitary(encoder, n: int | None = None) -> tuple[np.ndarray, int]:
    """Normalize an encoder argument to (unitary, n).

    Accepts None (identity on ``n`` qubits), a dense unitary, a
    BoundCircuit, or an (Ansatz, params) pair.
    """
    if encoder is None:
        if n is None:
            raise ValueError("identity encoder needs an explicit qubit count")
        return np.eye(2**n, dtype=complex), n
    if isinstance(encoder, BoundCircuit):
        return circuit_unitary(encoder.ansatz, encoder.params), encoder.ansatz.n
    if isinstance(encoder, tuple) and len(encoder) == 2 and isinstance(encoder[0], Ansatz):
        a, p = encoder
        return circuit_unitary(a, p), a.n
    u = np.asarray(encoder, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"encoder must be square, got shape {u.shape}")
    m = qmat.num_qubits(u.shape[0])
    if n is not None and m != n:
        raise ValueError(f"encoder acts on {m} qubits, expected {n}")
    return u, m


def encode(rho_k: np.ndarray, encoder, n: int) -> np.ndarray:
    """Embed a k-qubit state into n qubits: U (rho ⊗ |0><0|^(n-k)) U†.

    Data qubits occupy indices 0..k-1 (most significant), ancillas k..n-1
    start in |0>.
    """
    rho_k = np.asarray(rho_k, dtype=complex)
    k = qmat.num_qubits(rho_k.shape[0])
    if k > n:
        raise ValueError(f"k = {k} exceeds n = {n}")
    u, un = encoder_unitary(encoder, n)
    if un != n:
        raise ValueError(f"encoder acts on {un} qubits, expected {n}")
    anc = np.zeros((2 ** (n - k), 2 ** (n - k)), dtype=complex)
    anc[0, 0] = 1.0
    full = qmat.tensor(rho_k, anc)
    return u @ full @ u.conj().T


def encode_vectors(psis: np.ndarray, u: np.ndarray, n: int) -> np.ndarray:
    """Fast path: encode a stack of pure k-qubit states into n-qubit vectors."""
    psis = np.atleast_2d(np.asarray(psis, dtype=complex))
    k = qmat.num_qubits(psis.shape[1])
    vecs = np.zeros((psis.shape[0], 2**n), dtype=complex)
    vecs[:, :: 2 ** (n - k)] = psis
    return vecs @ u.T


# ---------------------------------------------------------------------------
# Serialization: circuit JSON and OpenQASM 2.0
# ---------------------------------------------------------------------------

_CIRCUIT_FORMAT = "distqec-circuit"
_CIRCUIT_VERSION = 1


def circuit_to_json(ansatz: Ansatz, params=None, note: str | None = None) -> str:
    """Serialize a gate program (optionally with bound parameters) to JSON."""
    doc = {
        "format": _CIRCUIT_FORMAT,
        "version": _CIRCUIT_VERSION,
        "n": ansatz.n,
        "num_params": ansatz.num_params,
        "seed": ansatz.seed,
        "depth_blocks": ansatz.depth_blocks,
        "layout": None
        if ansatz.layout is None
        else {
            "name": ansatz.layout.name,
            "n": ansatz.layout.n,
            "edges": [list(e) for e in ansatz.layout.edges],
        },
        "gates": [
            {"kind": g.kind, "targets": list(g.targets), "param_slots": list(g.param_slots)}
            for g in ansatz.gates
        ],
        "params": None if params is None else [float(x) for x in np.asarray(params)],
    }
    if note:
        doc["note"] = note
    return json.dumps(doc, indent=2)


def circuit_from_json(text: str) -> tuple[Ansatz, np.ndarray | None]:
    """Inverse of circuit_to_json; returns (ansatz, params-or-None)."""
    doc = json.loads(text)
    if not isinstance(doc, dict) or doc.get("format") != _CIRCUIT_FORMAT:
        raise ValueError("not a distqec circuit document")
    allowed = {
        "format", "version", "n", "num_params", "seed", "depth_blocks",
        "layout", "gates", "params", "note",
    }
    unknown = set(doc) - allowed
    if unknown:
        raise ValueError(f"unknown circuit keys: {sorted(unknown)}")
    layout = None
    if doc.get("layout") is not None:
        ld = doc["layout"]
        layout = Layout(ld["name"], ld["n"], tuple(tuple(e) for e in ld["edges"]))
    gates = tuple(
        Gate(g["kind"], tuple(g["targets"]), tuple(g.get("param_slots", ())))
        for g in doc["gates"]
    )
    ansatz = Ansatz(
        n=int(doc["n"]),
        gates=gates,
        num_params=int(doc["num_params"]),
        seed=doc.get("seed"),
        layout=layout,
        depth_blocks=doc.get("depth_blocks"),
    )
    params = doc.get("params")
    return ansatz, (None if params is None else np.asarray(params, dtype=float))


def _controlled_v_qasm(control: int, target: int, a: float, b: float, c: float) -> list[str]:
    """ABC decomposition of a controlled Rz·Ry·Rz into rz/ry/cz/u3 lines.

    With V = Rz(c) Ry(b) Rz(a) (special unitary), the standard two-CNOT
    construction uses A = Rz(c) Ry(b/2), B = Ry(-b/2) Rz(-(a+c)/2),
    C = Rz((a-c)/2), each CNOT realized as H·CZ·H.
    """
    h = f"u3({_fmt(math.pi / 2)},0.0,{_fmt(math.pi)}) q[{target}];"
    cnot = [h, f"cz q[{control}],q[{target}];", h]
    lines = [f"rz({_fmt((a - c) / 2)}) q[{target}];"]
    lines += cnot
    lines += [f"rz({_fmt(-(a + c) / 2)}) q[{target}];", f"ry({_fmt(-b / 2)}) q[{target}];"]
    lines += cnot
    lines += [f"ry({_fmt(b / 2)}) q[{target}];", f"rz({_fmt(c)}) q[{target}];"]
    return lines


def _fmt(x: float) -> str:
    return repr(float(x))


def export_qasm(ansatz: Ansatz, params, note: str | None = None) -> str:
    """OpenQASM 2.0 text for a bound circuit, using rz/ry/rx/cz/u3 only.

    The header comment records seed and layout (and any caller-supplied
    note, e.g. the noise spec the circuit was trained on) so the file
    round-trips its provenance.
    """
    params = np.asarray(params, dtype=float)
    if params.shape != (ansatz.num_params,):
        raise ValueError(f"expected {ansatz.num_params} bound parameters")
    lines = ["// distqec circuit export"]
    lines.append(f"// seed: {ansatz.seed}  layout: "
                 f"{None if ansatz.layout is None else ansatz.layout.name}  "
                 f"depth_blocks: {ansatz.depth_blocks}")
    if note:
        for row in note.splitlines():
            lines.append(f"// {row}")
    lines += ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{ansatz.n}];"]
    for g in ansatz.gates:
        p = _bound_params(g, params)
        q = g.targets
        if g.kind in ("rx", "ry", "rz"):
            lines.append(f"{g.kind}({_fmt(p[0])}) q[{q[0]}];")
        elif g.kind == "u3":
            lines.append(f"u3({_fmt(p[0])},{_fmt(p[1])},{_fmt(p[2])}) q[{q[0]}];")
        elif g.kind == "rzyz":
            lines.append(f"rz({_fmt(p[0])}) q[{q[0]}];")
            lines.append(f"ry({_fmt(p[1])}) q[{q[0]}];")
            lines.append(f"rz({_fmt(p[2])}) q[{q[0]}];")
        elif g.kind == "rzxz":
            lines.append(f"rz({_fmt(p[0])}) q[{q[0]}];")
            lines.append(f"rx({_fmt(p[1])}) q[{q[0]}];")
            lines.append(f"rz({_fmt(p[2])}) q[{q[0]}];")
        elif g.kind == "prx":
            lines.append(f"rz({_fmt(-p[1])}) q[{q[0]}];")
            lines.append(f"rx({_fmt(p[0])}) q[{q[0]}];")
            lines.append(f"rz({_fmt(p[1])}) q[{q[0]}];")
        elif g.kind == "cz":
            lines.append(f"cz q[{q[0]}],q[{q[1]}];")
        elif g.kind == "controlled_v":
            lines += _controlled_v_qasm(q[0], q[1], *p)
        else:
            raise ValueError(f"gate kind {g.kind!r} has no QASM export")
    return "\n".join(lines) + "\n"


class QasmParseError(ValueError):
    """Raised on malformed OpenQASM input, with a line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"QASM line {line_no}: {message}")
        self.line_no = line_no


def _eval_angle(expr: str, line_no: int) -> float:
    """Evaluate a numeric QASM angle expression (literals, pi, + - * / and parens)."""
    try:
        node = ast.parse(expr.strip(), mode="eval")
    except SyntaxError:
        raise QasmParseError(line_no, f"bad angle expression {expr!r}") from None

    def walk(e):
        if isinstance(e, ast.Expression):
            return walk(e.body)
        if isinstance(e, ast.Constant) and isinstance(e.value, (int, float)):
            return float(e.value)
        if isinstance(e, ast.Name) and e.id == "pi":
            return math.pi
        if isinstance(e, ast.UnaryOp) and isinstance(e.op, (ast.USub, ast.UAdd)):
            v = walk(e.operand)
            return -v if isinstance(e.op, ast.USub) else v
        if isinstance(e, ast.BinOp) and isinstance(e.op, (ast.Add, ast.Sub, ast.Mult, ast.Div)):
            a, b = walk(e.left), walk(e.right)
            if isinstance(e.op, ast.Add):
                return a + b
            if isinstance(e.op, ast.Sub):
                return a - b
            if isinstance(e.op, ast.Mult):
                return a * b
            return a / b
        raise QasmParseError(line_no, f"unsupported angle expression {expr!r}")

    return walk(node)


# one-qubit qelib gates expressible as a single native gate with fixed angles
_QASM_FIXED = {
    "h": ("u3", (math.pi / 2, 0.0, math.pi)),
    "x": ("u3", (math.pi, 0.0, math.pi)),
    "y": ("u3", (math.pi, math.pi / 2, math.pi / 2)),
    "z": ("rz", (math.pi,)),
    "s": ("rz", (math.pi / 2,)),
    "sdg": ("rz", (-math.pi / 2,)),
    "t": ("rz", (math.pi / 4,)),
    "tdg": ("rz", (-math.pi / 4,)),
    "id": ("rz", (0.0,)),
}

_GATE_LINE = re.compile(r"^(?P<name>[a-z_][a-z0-9_]*)\s*(\((?P<args>[^)]*)\))?\s*(?P<qubits>[^;]*);?$")
_QREG = re.compile(r"^qreg\s+(?P<name>\w+)\s*\[\s*(?P<size>\d+)\s*\]\s*;?$")


def parse_qasm(text: str) -> BoundCircuit:
    """Parse an OpenQASM 2.0 subset into a bound circuit.

    Supports a single quantum register, the gates rx/ry/rz/u3/cz/cx plus the
    fixed qelib1 one-qubit gates (h, x, y, z, s, sdg, t, tdg, id); barriers
    and comments are ignored.  cx is expanded into H·CZ·H.
    """
    n = None
    reg = None
    gates: list[Gate] = []
    params: list[float] = []

    def add(kind, targets, values):
        slots = tuple(range(len(params), len(params) + len(values)))
        params.extend(float(v) for v in values)
        gates.append(Gate(kind, tuple(targets), slots))

    def parse_qubits(spec: str, line_no: int) -> list[int]:
        out = []
        for tok in [t.strip() for t in spec.split(",") if t.strip()]:
            m = re.fullmatch(rf"{reg}\s*\[\s*(\d+)\s*\]", tok)
            if not m:
                raise QasmParseError(line_no, f"bad qubit reference {tok!r}")
            q = int(m.group(1))
            if q >= n:
                raise QasmParseError(line_no, f"qubit {q} outside register of size {n}")
            out.append(q)
        return out

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0].strip()
        if not line:
            continue
        if line.startswith("OPENQASM"):
            if "2.0" not in line:
                raise QasmParseError(line_no, "only OPENQASM 2.0 is supported")
            continue
        if line.startswith("include"):
            continue
        if line.startswith("barrier"):
            continue
        m = _QREG.match(line)
        if m:
            if n is not None:
                raise QasmParseError(line_no, "multiple qreg declarations are not supported")
            reg, n = m.group("name"), int(m.group("size"))
            continue
        if n is None:
            raise QasmParseError(line_no, "gate before qreg declaration")
        if line.startswith(("creg", "measure", "reset", "if")):
            raise QasmParseError(line_no, f"unsupported statement {line.split()[0]!r}")
        g = _GATE_LINE.match(line)
        if not g:
            raise QasmParseError(line_no, f"cannot parse {line!r}")
        name = g.group("name")
        args = [a for a in (g.group("args") or "").split(",") if a.strip()]
        qubits = parse_qubits(g.group("qubits"), line_no)
        if name in ("rx", "ry", "rz"):
            if len(args) != 1 or len(qubits) != 1:
                raise QasmParseError(line_no, f"{name} takes 1 angle and 1 qubit")
            add(name, qubits, [_eval_angle(args[0], line_no)])
        elif name in ("u3", "u"):
            if len(args) != 3 or len(qubits) != 1:
                raise QasmParseError(line_no, "u3 takes 3 angles and 1 qubit")
            add("u3", qubits, [_eval_angle(a, line_no) for a in args])
        elif name in _QASM_FIXED:
            if args or len(qubits) != 1:
                raise QasmParseError(line_no, f"{name} takes no angles and 1 qubit")
            kind, vals = _QASM_FIXED[name]
            add(kind, qubits, list(vals))
        elif name == "cz":
            if args or len(qubits) != 2:
                raise QasmParseError(line_no, "cz takes no angles and 2 qubits")
            add("cz", qubits, [])
        elif name == "cx":
            if args or len(qubits) != 2:
                raise QasmParseError(line_no, "cx takes no angles and 2 qubits")
            kind, vals = _QASM_FIXED["h"]
            add(kind, [qubits[1]], list(vals))
            add("cz", qubits, [])
            add(kind, [qubits[1]], list(vals))
        else:
            raise QasmParseError(line_no, f"unsupported gate {name!r}")

    if n is None:
        raise QasmParseError(1, "missing qreg declaration")
    ansatz = Ansatz(n=n, gates=tuple(gates), num_params=len(params))
    return BoundCircuit(ansatz, np.asarray(params, dtype=float))
