"""Noise channels as Kraus-operator sets.

Every channel is an explicit list of Kraus operators satisfying the
completeness relation sum_k K†K = I, applied as N(rho) = sum_k K rho K†.
Single-qubit channels compose over a register qubit-by-qubit; the
correlated two-qubit depolarizing channel models faulty entangling gates.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import qmat

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = {"I": PAULI_I, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}

COMPLETENESS_ATOL = 1e-10

SINGLE_QUBIT_KINDS = (
    "bit_flip",
    "depolarizing",
    "asym_depolarizing",
    "amplitude_damping",
    "phase_damping",
    "amp_phase_damping",
    "thermal_relaxation",
)
TWO_QUBIT_KINDS = ("correlated_depolarizing_2q",)
KINDS = SINGLE_QUBIT_KINDS + TWO_QUBIT_KINDS


@dataclass(frozen=True)
class KrausChannel:
    """An ordered set of Kraus operators acting on a fixed qubit subset.

    ``num_qubits`` is the arity the operators act on (1 or 2 for the
    primitive channels, n after lifting); ``targets`` records which qubits
    of a larger register the channel addresses, when known.
    """

    num_qubits: int
    operators: np.ndarray  # (m, 2**num_qubits, 2**num_qubits)
    targets: tuple[int, ...] | None = None

    def __post_init__(self):
        ops = np.asarray(self.operators, dtype=complex)
        d = 2**self.num_qubits
        if ops.ndim != 3 or ops.shape[1:] != (d, d):
            raise ValueError(
                f"operator stack shape {ops.shape} does not match arity {self.num_qubits}"
            )
        comp = np.einsum("kji,kjl->il", ops.conj(), ops)
        dev = np.max(np.abs(comp - np.eye(d)))
        if dev > COMPLETENESS_ATOL:
            raise ValueError(f"Kraus completeness violated: max |sum K†K - I| = {dev:.3e}")
        ops.flags.writeable = False
        object.__setattr__(self, "operators", ops)


@dataclass(frozen=True)
class NoiseSpec:
    """Declarative description of a primitive noise channel.

    Parameter ranges: 0 <= p <= 1, 0 <= gamma <= 1, c > 0, times positive
    (t_us >= 0) with t2_us <= 2*t1_us.
    """

    kind: str
    p: float | None = None
    c: float | None = None
    gamma: float | None = None
    t1_us: float | None = None
    t2_us: float | None = None
    t_us: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}; expected one of {KINDS}")
        if self.kind in ("bit_flip", "depolarizing", "correlated_depolarizing_2q"):
            self._require(p=self.p)
        elif self.kind == "asym_depolarizing":
            self._require(p=self.p, c=self.c)
            if self.c <= 0:
                raise ValueError(f"asymmetry c must be positive, got {self.c}")
        elif self.kind in ("amplitude_damping", "phase_damping", "amp_phase_damping"):
            if self.gamma is None or not 0 <= self.gamma <= 1:
                raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")
        elif self.kind == "thermal_relaxation":
            if self.t1_us is None or self.t2_us is None or self.t_us is None:
                raise ValueError("thermal_relaxation needs t1_us, t2_us and t_us")
            if self.t1_us <= 0 or self.t2_us <= 0:
                raise ValueError("relaxation times must be positive")
            if self.t_us < 0:
                raise ValueError("noise duration must be nonnegative")
            if self.t2_us > 2 * self.t1_us + 1e-12:
                raise ValueError(f"T2 = {self.t2_us} exceeds 2*T1 = {2 * self.t1_us}")

    def _require(self, **params):
        for name, value in params.items():
            if value is None:
                raise ValueError(f"{self.kind} needs parameter {name!r}")
            if name == "p" and not 0 <= value <= 1:
                raise ValueError(f"probability p must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class CompositeNoise:
    """Independent per-qubit noise, plus optional two-qubit gate noise.

    ``per_qubit`` is applied to every qubit of the register; ``gate_noise``
    (correlated two-qubit depolarizing) is injected by the circuit
    evaluator right after each two-qubit gate, on that gate's qubit pair.
    """

    per_qubit: NoiseSpec
    gate_noise: NoiseSpec | None = None

    def __post_init__(self):
        if self.per_qubit.kind not in SINGLE_QUBIT_KINDS:
            raise ValueError(
                f"per-qubit noise must be a single-qubit kind, got {self.per_qubit.kind!r}"
            )
        if self.gate_noise is not None and self.gate_noise.kind != "correlated_depolarizing_2q":
            raise ValueError("gate noise must be of kind correlated_depolarizing_2q")


def solve_asymmetric_rates(p: float, c: float, residual_tol: float = 1e-12):
    """Pauli rates (p_x, p_y, p_z) of the asymmetric depolarizing channel.

    Solves 2*p_x + p_x**c - p = 0 for p_x by bisection on (0, p/2]; the
    left-hand side is monotone increasing there, so the root is unique.
    p_y = p_x and p_z = p - 2*p_x.
    """
    if not 0 < p < 1:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if c <= 0:
        raise ValueError(f"c must be positive, got {c}")

    def f(x):
        return 2 * x + x**c - p

    lo, hi = 1e-15, p / 2
    if f(lo) > 0 or f(hi) < 0:
        raise ValueError(f"no root of 2x + x^{c} - {p} in (0, p/2]")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) <= 0:
            lo = mid
        else:
            hi = mid
        if abs(f(0.5 * (lo + hi))) < residual_tol:
            break
    px = 0.5 * (lo + hi)
    if abs(f(px)) > residual_tol:
        raise ValueError(f"asymmetric-rate bisection did not converge: residual {f(px):.3e}")
    pz = p - 2 * px
    return float(px), float(px), float(pz)


def _prune_zero_ops(ops: list[np.ndarray]) -> np.ndarray:
    kept = [k for k in ops if np.max(np.abs(k)) > 1e-15]
    return np.stack(kept) if kept else np.stack(ops[:1])


def _compose_ops(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """Kraus operators of (second ∘ first)."""
    return _prune_zero_ops([b @ a for b in second for a in first])


def _amplitude_damping_ops(gamma: float) -> np.ndarray:
    k0 = np.array([[1, 0], [0, math.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, math.sqrt(gamma)], [0, 0]], dtype=complex)
    return _prune_zero_ops([k0, k1])


def _phase_damping_ops(gamma: float) -> np.ndarray:
    k0 = np.array([[1, 0], [0, math.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, 0], [0, math.sqrt(gamma)]], dtype=complex)
    return _prune_zero_ops([k0, k1])


def thermal_relaxation_kraus(t1_us: float, t2_us: float, t_us: float) -> KrausChannel:
    """Thermal relaxation for an idle time t, from T1/T2 device times.

    Realized as amplitude damping with gamma_1 = 1 - exp(-t/T1) followed by
    phase damping with gamma_phi = 1 - exp(-2t/T_phi), where the pure
    dephasing rate is 1/T_phi = 1/T2 - 1/(2*T1).  This reproduces the
    textbook Bloch contractions exp(-t/T1) (population) and exp(-t/T2)
    (coherence).
    """
    spec = NoiseSpec(kind="thermal_relaxation", t1_us=t1_us, t2_us=t2_us, t_us=t_us)
    del spec  # validation only
    g1 = 1.0 - math.exp(-t_us / t1_us)
    inv_tphi = 1.0 / t2_us - 1.0 / (2.0 * t1_us)
    gphi = 1.0 - math.exp(-2.0 * t_us * max(inv_tphi, 0.0))
    ops = _compose_ops(_amplitude_damping_ops(g1), _phase_damping_ops(gphi))
    return KrausChannel(num_qubits=1, operators=ops)


def build_channel(spec: NoiseSpec) -> KrausChannel:
    """Construct the Kraus channel described by a NoiseSpec."""
    kind = spec.kind
    if kind == "bit_flip":
        ops = [math.sqrt(1 - spec.p) * PAULI_I, math.sqrt(spec.p) * PAULI_X]
        return KrausChannel(1, _prune_zero_ops(ops))
    if kind == "depolarizing":
        r = spec.p / 3
        ops = [
            math.sqrt(1 - spec.p) * PAULI_I,
            math.sqrt(r) * PAULI_X,
            math.sqrt(r) * PAULI_Y,
            math.sqrt(r) * PAULI_Z,
        ]
        return KrausChannel(1, _prune_zero_ops(ops))
    if kind == "asym_depolarizing":
        if spec.p == 0:
            return KrausChannel(1, np.stack([PAULI_I]))
        px, py, pz = solve_asymmetric_rates(spec.p, spec.c)
        ops = [
            math.sqrt(1 - spec.p) * PAULI_I,
            math.sqrt(px) * PAULI_X,
            math.sqrt(py) * PAULI_Y,
            math.sqrt(pz) * PAULI_Z,
        ]
        return KrausChannel(1, _prune_zero_ops(ops))
    if kind == "amplitude_damping":
        return KrausChannel(1, _amplitude_damping_ops(spec.gamma))
    if kind == "phase_damping":
        return KrausChannel(1, _phase_damping_ops(spec.gamma))
    if kind == "amp_phase_damping":
        ops = _compose_ops(_amplitude_damping_ops(spec.gamma), _phase_damping_ops(spec.gamma))
        return KrausChannel(1, ops)
    if kind == "thermal_relaxation":
        return thermal_relaxation_kraus(spec.t1_us, spec.t2_us, spec.t_us)
    if kind == "correlated_depolarizing_2q":
        ops = [math.sqrt(1 - spec.p) * np.kron(PAULI_I, PAULI_I)]
        for a, b in itertools.product("IXYZ", repeat=2):
            if (a, b) == ("I", "I"):
                continue
            ops.append(math.sqrt(spec.p / 15) * np.kron(PAULIS[a], PAULIS[b]))
        return KrausChannel(2, _prune_zero_ops(ops))
    raise ValueError(f"unknown noise kind {kind!r}")


def lift(channel: KrausChannel, targets, n: int) -> KrausChannel:
    """Embed a primitive channel so it acts on ``targets`` of an n-qubit register."""
    targets = tuple(targets)
    if len(targets) != channel.num_qubits:
        raise ValueError(
            f"channel arity {channel.num_qubits} does not match targets {targets}"
        )
    ops = np.stack([qmat.embed(k, targets, n) for k in channel.operators])
    return KrausChannel(num_qubits=n, operators=ops, targets=targets)


def kraus_apply_batch(mats: np.ndarray, ops: np.ndarray, targets, n: int) -> np.ndarray:
    """sum_k K rho K† over a stack (..., 2**n, 2**n), gate acting on ``targets``."""
    targets = tuple(targets)
    if len(targets) == 1:
        # hot path: one einsum over the whole operator stack
        lead = mats.shape[:-2]
        dim = 2**n
        q = targets[0]
        a, b = 2**q, 2 ** (n - 1 - q)
        r = np.asarray(mats, dtype=complex).reshape((-1, a, 2, b, a, 2, b))
        out = np.einsum("kab,sxbyXcY,kdc->sxayXdY", ops, r, ops.conj(), optimize=True)
        return out.reshape(lead + (dim, dim))
    out = None
    for k in ops:
        t = qmat.apply_gate(mats, k, targets, n)
        t = qmat.apply_gate(np.conj(np.swapaxes(t, -1, -2)), k, targets, n)
        t = np.conj(np.swapaxes(t, -1, -2))
        out = t if out is None else out + t
    return out


def composite_apply_batch(mats: np.ndarray, spec: NoiseSpec, n: int) -> np.ndarray:
    """Apply the same single-qubit channel to every qubit, in index order."""
    ops = build_channel(spec).operators
    for q in range(n):
        mats = kraus_apply_batch(mats, ops, (q,), n)
    return mats


def apply(rho: np.ndarray, noise, check: bool = True) -> np.ndarray:
    """Apply a noise channel to a density matrix.

    ``noise`` is a CompositeNoise (per-qubit channels applied qubit-by-qubit
    in index order; gate noise is ignored here, it only acts inside circuit
    evaluation) or a KrausChannel, either of full arity or carrying targets
    to be lifted into the register.
    """
    rho = np.asarray(rho, dtype=complex)
    n = qmat.num_qubits(rho.shape[0])
    if isinstance(noise, CompositeNoise):
        out = composite_apply_batch(rho[None], noise.per_qubit, n)[0]
    elif isinstance(noise, KrausChannel):
        if noise.num_qubits == n:
            out = kraus_apply_batch(rho[None], noise.operators, tuple(range(n)), n)[0]
        elif noise.targets is not None:
            out = kraus_apply_batch(rho[None], noise.operators, noise.targets, n)[0]
        else:
            raise ValueError(
                f"channel arity {noise.num_qubits} does not match state on {n} qubits "
                "and no targets are set"
            )
    else:
        raise TypeError(f"unsupported noise object {type(noise).__name__}")
    if check:
        qmat.check_density_matrix(out)
    return out


def noise_to_config(noise: CompositeNoise) -> dict:
    """Flat config-dict form (keys: kind, p, c, gamma, t1_us, t2_us, t_us, gate_noise_p)."""
    spec = noise.per_qubit
    out = {"kind": spec.kind}
    for key in ("p", "c", "gamma", "t1_us", "t2_us", "t_us"):
        value = getattr(spec, key)
        if value is not None:
            out[key] = value
    if noise.gate_noise is not None:
        out["gate_noise_p"] = noise.gate_noise.p
    return out


def noise_from_config(cfg: dict) -> CompositeNoise:
    """Inverse of noise_to_config; rejects unknown keys."""
    allowed = {"kind", "p", "c", "gamma", "t1_us", "t2_us", "t_us", "gate_noise_p"}
    unknown = set(cfg) - allowed
    if unknown:
        raise ValueError(f"unknown noise config keys: {sorted(unknown)}")
    if "kind" not in cfg:
        raise ValueError("noise config needs a 'kind' key")
    gate_p = cfg.get("gate_noise_p")
    spec = NoiseSpec(
        kind=cfg["kind"],
        p=cfg.get("p"),
        c=cfg.get("c"),
        gamma=cfg.get("gamma"),
        t1_us=cfg.get("t1_us"),
        t2_us=cfg.get("t2_us"),
        t_us=cfg.get("t_us"),
    )
    gate_noise = None
    if gate_p is not None:
        gate_noise = NoiseSpec(kind="correlated_depolarizing_2q", p=gate_p)
    return CompositeNoise(per_qubit=spec, gate_noise=gate_noise)
