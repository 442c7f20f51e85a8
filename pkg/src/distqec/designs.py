"""Finite ensembles of pure input states used to estimate the losses.

Three kinds: the exact spherical two-designs for one and two data qubits,
weighted variants of those, and seeded Haar-random samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_SQ2 = np.sqrt(2.0)

# |0>, |1>, |+>, |->, |+i>, |-i>
_STATES_1Q = np.array(
    [
        [1, 0],
        [0, 1],
        [1 / _SQ2, 1 / _SQ2],
        [1 / _SQ2, -1 / _SQ2],
        [1 / _SQ2, 1j / _SQ2],
        [1 / _SQ2, -1j / _SQ2],
    ],
    dtype=complex,
)

KINDS = ("two_design", "weighted_two_design", "haar_sample")


@dataclass(frozen=True)
class StateSet:
    """Pure states with weights; the ensemble every loss is estimated on."""

    k: int
    states: np.ndarray  # (m, 2**k)
    weights: np.ndarray  # (m,)
    kind: str
    seed: int | None = None

    def __post_init__(self):
        states = np.asarray(self.states, dtype=complex)
        weights = np.asarray(self.weights, dtype=float)
        if self.kind not in KINDS:
            raise ValueError(f"unknown state-set kind {self.kind!r}")
        if states.ndim != 2 or states.shape[1] != 2**self.k:
            raise ValueError(f"state array shape {states.shape} does not match k={self.k}")
        if weights.shape != (states.shape[0],):
            raise ValueError("one weight per state required")
        norms = np.linalg.norm(states, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-10:
            raise ValueError("states must be normalized")
        if np.any(weights < 0):
            raise ValueError("weights must be nonnegative")
        states.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.states.shape[0]


def _two_design_states_2q() -> np.ndarray:
    kron = np.kron
    z0, z1, plus, minus, pi, mi = _STATES_1Q
    product = [
        kron(z0, z0), kron(z0, z1), kron(z1, z0), kron(z1, z1),
        kron(plus, plus), kron(plus, minus), kron(minus, plus), kron(minus, minus),
        kron(pi, pi), kron(pi, mi), kron(mi, pi), kron(mi, mi),
    ]
    bell = [
        (kron(z0, z0) + kron(z1, z1)) / _SQ2,
        (kron(z0, z0) - kron(z1, z1)) / _SQ2,
        (kron(z0, z1) + kron(z1, z0)) / _SQ2,
        (kron(z0, z1) - kron(z1, z0)) / _SQ2,
    ]
    return np.stack(product + bell)


def two_design(k: int) -> StateSet:
    """Exact two-design: 6 states for k=1, 16 (12 product + 4 entangled) for k=2.

    Larger k is unsupported; the ensemble size grows as 4**k and the paper
    trail stops at two data qubits.
    """
    if k == 1:
        states = _STATES_1Q.copy()
    elif k == 2:
        states = _two_design_states_2q()
    else:
        raise ValueError(f"two-designs are provided for k in {{1, 2}} only, got k={k}")
    return StateSet(k=k, states=states, weights=np.ones(len(states)), kind="two_design")


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian with phase fix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / _SQ2
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def haar_sample(k: int, count: int, seed: int) -> StateSet:
    """``count`` Haar-random pure k-qubit states, deterministic per seed.

    Each state is the first column of a Haar-distributed unitary.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = np.random.default_rng(np.random.PCG64(seed))
    dim = 2**k
    states = np.stack([haar_unitary(dim, rng)[:, 0] for _ in range(count)])
    return StateSet(k=k, states=states, weights=np.ones(count), kind="haar_sample", seed=seed)


def weighted(base: StateSet, weights) -> StateSet:
    """Weighted variant of a two-design; weights are rescaled to sum to |S|.

    Prior knowledge about the channel enters here, e.g. for amplitude
    damping one de-emphasizes |0> (unaffected) and emphasizes |1>.
    """
    w = np.asarray(weights, dtype=float)
    if w.shape != (len(base),):
        raise ValueError(f"need {len(base)} weights, got shape {w.shape}")
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    total = w.sum()
    if total <= 0:
        raise ValueError("weights must not all be zero")
    w = w * (len(base) / total)
    return StateSet(k=base.k, states=base.states, weights=w, kind="weighted_two_design",
                    seed=base.seed)


def amplitude_damping_weights() -> np.ndarray:
    """Two-design weights tilting toward |1> for amplitude-damping noise."""
    return np.array([0.95, 1.05, 1.0, 1.0, 1.0, 1.0])
