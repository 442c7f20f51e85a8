"""Standard encoder circuits and the potential-code-distance probe.

The probe drives single-error Pauli channels N_p(rho) = (1-p) rho + p E rho E†
at p = 0.5 through an encoder and asks whether the worst-case two-design
distinguishability loss stays at zero (exact probe) or below a small
epsilon (approximate probe), weight by weight.  The first failing weight
is reported as the potential code distance d*; it matches the true code
distance on every standard code we ship, but is reported as "potential"
rather than proven.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import qmat
from .ansatz import Ansatz, BoundCircuit, Gate, circuit_unitary, encode_vectors
from .designs import StateSet, two_design

EXACT_PROBE_TOL = 1e-9
PROBE_NOISE_P = 0.5

STANDARD_CODES = ("bit_flip_3", "perfect_5", "approximate_4", "css_422")


@dataclass(frozen=True)
class PauliError:
    """A Pauli string error; weight counts the non-identity positions."""

    paulis: str
    weight: int

    def __post_init__(self):
        if set(self.paulis) - set("IXYZ"):
            raise ValueError(f"invalid Pauli string {self.paulis!r}")
        if self.weight != sum(1 for c in self.paulis if c != "I"):
            raise ValueError("stored weight does not match the string")


@dataclass(frozen=True)
class CodeSpec:
    """An [[n, k(, d)]] code: metadata plus its encoder circuit."""

    name: str
    n: int
    k: int
    claimed_distance: int | None
    circuit: BoundCircuit

    def unitary(self) -> np.ndarray:
        u = circuit_unitary(self.circuit.ansatz, self.circuit.params)
        qmat.check_unitary(u)
        return u


def num_errors(n: int, w: int) -> int:
    """Closed form C(n, w) * 3**w for the number of weight-w Pauli errors."""
    return math.comb(n, w) * 3**w


def enumerate_pauli_errors(n: int, w: int) -> list[PauliError]:
    """All weight-w Pauli strings on n qubits, in lexicographic order."""
    if not 0 <= w <= n:
        raise ValueError(f"weight {w} out of range for n={n}")
    if w == 0:
        return [PauliError("I" * n, 0)]
    strings = []
    for pos in itertools.combinations(range(n), w):
        for letters in itertools.product("XYZ", repeat=w):
            chars = ["I"] * n
            for q, c in zip(pos, letters):
                chars[q] = c
            strings.append("".join(chars))
    strings.sort()
    return [PauliError(s, w) for s in strings]


def pauli_matrix(paulis: str) -> np.ndarray:
    """Dense matrix of a Pauli string (qubit 0 most significant)."""
    from .channels import PAULIS

    out = np.array([[1.0 + 0j]])
    for c in paulis:
        out = np.kron(out, PAULIS[c])
    return out


def apply_pauli(vecs: np.ndarray, paulis: str) -> np.ndarray:
    """Apply a Pauli string to a stack of state vectors via bit arithmetic."""
    vecs = np.atleast_2d(vecs)
    n = len(paulis)
    dim = 2**n
    if vecs.shape[1] != dim:
        raise ValueError(f"vectors of dim {vecs.shape[1]} vs {n}-qubit Pauli")
    idx = np.arange(dim)
    flip = 0
    sign_mask = 0
    y_count = 0
    for q, c in enumerate(paulis):
        bit = 1 << (n - 1 - q)
        if c in ("X", "Y"):
            flip |= bit
        if c in ("Z", "Y"):
            sign_mask |= bit
        if c == "Y":
            y_count += 1
    phases = (1j**y_count) * np.where(
        (np.bitwise_count(idx & sign_mask) % 2).astype(bool), -1.0, 1.0
    )
    out = np.zeros_like(vecs)
    out[:, idx ^ flip] = vecs * phases
    return out


def _pairwise_rank4_tdist(
    clean: np.ndarray, flipped: np.ndarray, p: float, left: np.ndarray, right: np.ndarray
) -> np.ndarray:
    """T(N_p(rho_i), N_p(rho_j)) for rank-2 mixtures of pure encoded states.

    Each difference matrix lives in the span of four vectors, so its
    nonzero spectrum is read off a projected 4x4 matrix instead of the
    full register dimension.
    """
    span = np.stack(
        [clean[left], flipped[left], clean[right], flipped[right]], axis=2
    )  # (P, D, 4)
    q, _ = np.linalg.qr(span)
    coeff = np.array([1 - p, p, -(1 - p), -p])
    a = np.einsum("pdr,pdu->pru", q.conj(), span)
    m = np.einsum("pru,u,psu->prs", a, coeff, a.conj())
    w = np.linalg.eigvalsh((m + np.conj(np.swapaxes(m, 1, 2))) / 2)
    return 0.5 * np.abs(w).sum(axis=1)


def potential_distance(
    code: CodeSpec,
    eps: float = 0.0,
    stateset: StateSet | None = None,
    probe_p: float = PROBE_NOISE_P,
) -> tuple[int, dict[int, float]]:
    """Potential (approximate) code distance from the distinguishability loss.

    For w = 1, 2, ... every weight-w Pauli channel at strength ``probe_p``
    is applied to the encoded two-design; a weight passes while the
    worst-case loss stays below the threshold (1e-9 for the exact probe
    eps=0, else eps).  Returns the first failing weight as d* together
    with the per-weight maxima seen so far.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    threshold = EXACT_PROBE_TOL if eps == 0 else eps
    if stateset is None:
        stateset = two_design(code.k)
    if stateset.k != code.k:
        raise ValueError(f"state set is for k={stateset.k}, code has k={code.k}")
    u = code.unitary()
    clean = encode_vectors(stateset.states, u, code.n)
    left, right = np.triu_indices(len(stateset), k=1)
    ov = np.abs(
        np.einsum("pi,pi->p", stateset.states[left].conj(), stateset.states[right])
    ) ** 2
    t_in = np.sqrt(np.clip(1.0 - ov, 0.0, None))
    per_weight: dict[int, float] = {}
    for w in range(1, code.n + 1):
        worst = 0.0
        for err in enumerate_pauli_errors(code.n, w):
            flipped = apply_pauli(clean, err.paulis)
            t_out = _pairwise_rank4_tdist(clean, flipped, probe_p, left, right)
            worst = max(worst, float((t_in - t_out).max()))
        per_weight[w] = worst
        if worst > threshold:
            return w, per_weight
    raise RuntimeError(
        f"no undetectable error found up to weight {code.n}; "
        "the encoder does not look like a nontrivial code"
    )


# ---------------------------------------------------------------------------
# Standard encoders, as explicit H/CZ-style circuits (H written as u3).
# ---------------------------------------------------------------------------

_H_PARAMS = (math.pi / 2, 0.0, math.pi)


class _CircuitBuilder:
    def __init__(self, n: int):
        self.n = n
        self.gates: list[Gate] = []
        self.params: list[float] = []

    def _add(self, kind, targets, values):
        slots = tuple(range(len(self.params), len(self.params) + len(values)))
        self.params.extend(values)
        self.gates.append(Gate(kind, tuple(targets), slots))

    def h(self, q):
        self._add("u3", (q,), list(_H_PARAMS))

    def cz(self, a, b):
        self._add("cz", (a, b), [])

    def cnot(self, control, target):
        self.h(target)
        self.cz(control, target)
        self.h(target)

    def build(self) -> BoundCircuit:
        ansatz = Ansatz(n=self.n, gates=tuple(self.gates), num_params=len(self.params))
        return BoundCircuit(ansatz, np.asarray(self.params, dtype=float))


def _bit_flip_3() -> BoundCircuit:
    b = _CircuitBuilder(3)
    b.cnot(0, 1)
    b.cnot(0, 2)
    return b.build()


def _perfect_5() -> BoundCircuit:
    # Ring realization of the five-qubit perfect code: fan the data qubit
    # out to all ancillas, rotate into the X basis, entangle along a
    # 5-cycle.  Codewords are the pentagon graph state and its all-Z image.
    b = _CircuitBuilder(5)
    for t in (1, 2, 3, 4):
        b.cnot(0, t)
    for q in range(5):
        b.h(q)
    for a, bq in ((0, 1), (1, 2), (2, 3), (3, 4), (4, 0)):
        b.cz(a, bq)
    return b.build()


def _approximate_4() -> BoundCircuit:
    # Amplitude-damping-tailored code with codewords
    # (|0000> + |1111>)/sqrt2 and (|0011> + |1100>)/sqrt2.
    b = _CircuitBuilder(4)
    b.cnot(0, 2)
    b.cnot(2, 0)
    b.cnot(0, 2)  # swap data onto wire 2
    b.cnot(2, 3)
    b.h(0)
    b.cnot(0, 1)
    b.cnot(0, 2)
    b.cnot(0, 3)
    return b.build()


def _css_422() -> BoundCircuit:
    # [[4,2,2]] with stabilizers XXXX and ZZZZ: parity into wire 2, then
    # superpose every codeword with its complement through wire 3.
    b = _CircuitBuilder(4)
    b.cnot(0, 2)
    b.cnot(1, 2)
    b.h(3)
    b.cnot(3, 0)
    b.cnot(3, 1)
    b.cnot(3, 2)
    return b.build()


def standard_encoder(name: str) -> CodeSpec:
    """Shipped standard codes: bit_flip_3, perfect_5, approximate_4, css_422."""
    if name == "bit_flip_3":
        return CodeSpec("bit_flip_3", n=3, k=1, claimed_distance=1, circuit=_bit_flip_3())
    if name == "perfect_5":
        return CodeSpec("perfect_5", n=5, k=1, claimed_distance=3, circuit=_perfect_5())
    if name == "approximate_4":
        return CodeSpec("approximate_4", n=4, k=1, claimed_distance=2, circuit=_approximate_4())
    if name == "css_422":
        return CodeSpec("css_422", n=4, k=2, claimed_distance=2, circuit=_css_422())
    raise ValueError(f"unknown code {name!r}; shipped codes: {STANDARD_CODES}")
