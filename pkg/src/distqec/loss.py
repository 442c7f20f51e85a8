"""Loss functionals: lost trace distance, distinguishability loss, fidelity loss.

The distinguishability loss compares the trace distance of a pair of pure
data states before encoding with the trace distance of their encoded,
noise-afflicted images; the fidelity loss scores a full
encode-noise-recover-decode cycle against the original state.  Both come
in average-case and worst-case flavours, estimated over a finite state
set (two-design, weighted two-design, or Haar sample).
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import multiprocessing as mp

import numpy as np

from . import qmat
from .ansatz import BoundCircuit, encoder_unitary, encode_vectors
from .channels import CompositeNoise, KrausChannel, composite_apply_batch, kraus_apply_batch
from .designs import StateSet

NEG_TOL = 1e-9


@dataclass(frozen=True)
class LossReport:
    """Evaluated loss values plus estimator metadata.

    ``d_avg``/``d_worst`` are the average and worst-case distinguishability
    losses; ``f_avg``/``f_worst`` the fidelity losses when a recovery was
    evaluated.  ``pairs`` optionally retains the per-pair lost-trace matrix.
    """

    d_avg: float | None = None
    d_worst: float | None = None
    f_avg: float | None = None
    f_worst: float | None = None
    estimator: dict = field(default_factory=dict)
    pairs: np.ndarray | None = None

    def __post_init__(self):
        if self.d_avg is not None and self.d_worst is not None:
            if self.d_worst < self.d_avg - NEG_TOL:
                raise ValueError(
                    f"worst-case loss {self.d_worst} below average {self.d_avg}"
                )
        for name in ("d_avg", "d_worst", "f_avg", "f_worst"):
            v = getattr(self, name)
            if v is not None and v < -NEG_TOL:
                raise ValueError(f"{name} = {v} is negative beyond tolerance")

    def to_json(self) -> str:
        doc = {
            "d_avg": self.d_avg,
            "d_worst": self.d_worst,
            "f_avg": self.f_avg,
            "f_worst": self.f_worst,
            "estimator": self.estimator,
            "pairs": None if self.pairs is None else np.asarray(self.pairs).tolist(),
        }
        return json.dumps(doc, indent=2)

    @staticmethod
    def from_json(text: str) -> "LossReport":
        doc = json.loads(text)
        pairs = doc.get("pairs")
        return LossReport(
            d_avg=doc.get("d_avg"),
            d_worst=doc.get("d_worst"),
            f_avg=doc.get("f_avg"),
            f_worst=doc.get("f_worst"),
            estimator=doc.get("estimator", {}),
            pairs=None if pairs is None else np.asarray(pairs),
        )


def estimator_tag(stateset: StateSet) -> dict:
    tag = {"kind": stateset.kind, "count": len(stateset)}
    if stateset.seed is not None:
        tag["seed"] = stateset.seed
    return tag


def apply_noise_batch(rhos: np.ndarray, noise, n: int) -> np.ndarray:
    """Apply a CompositeNoise or full/lifted KrausChannel to a state stack."""
    if noise is None:
        return rhos
    if isinstance(noise, CompositeNoise):
        return composite_apply_batch(rhos, noise.per_qubit, n)
    if isinstance(noise, KrausChannel):
        if noise.num_qubits == n:
            return kraus_apply_batch(rhos, noise.operators, tuple(range(n)), n)
        if noise.targets is not None:
            return kraus_apply_batch(rhos, noise.operators, noise.targets, n)
        raise ValueError(
            f"channel arity {noise.num_qubits} does not match register of {n}"
        )
    raise TypeError(f"unsupported noise object {type(noise).__name__}")


def _encoded_noisy(stateset: StateSet, encoder, noise):
    """Encode all set states, apply the channel; returns (rhos, n).

    When the noise carries a gate-noise component, the encoder must be a
    circuit and encoding runs gate by gate with the correlated channel
    injected after every two-qubit gate (non-ideal encoding operations);
    otherwise the much faster unitary path is used.
    """
    gate_noise = noise.gate_noise if isinstance(noise, CompositeNoise) else None
    if gate_noise is not None:
        from .ansatz import Ansatz, apply_circuit

        if isinstance(encoder, BoundCircuit):
            ansatz, params = encoder.ansatz, encoder.params
        elif isinstance(encoder, tuple) and len(encoder) == 2 and isinstance(encoder[0], Ansatz):
            ansatz, params = encoder
        else:
            raise ValueError("gate-noise evaluation needs a circuit encoder")
        n = ansatz.n
        k = stateset.k
        base = np.zeros((len(stateset), 2**n), dtype=complex)
        base[:, :: 2 ** (n - k)] = stateset.states
        rhos = np.stack(
            [apply_circuit(np.outer(v, v.conj()), ansatz, params, gate_noise) for v in base]
        )
        return apply_noise_batch(rhos, CompositeNoise(noise.per_qubit), n), n
    u, n = encoder_unitary(encoder, None if encoder is not None else stateset.k)
    if n < stateset.k:
        raise ValueError(f"encoder register n={n} smaller than k={stateset.k}")
    vecs = encode_vectors(stateset.states, u, n)
    rhos = np.einsum("si,sj->sij", vecs, vecs.conj())
    return apply_noise_batch(rhos, noise, n), n


def pure_trace_distances(states: np.ndarray, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """T for pure-state pairs via sqrt(1 - |<psi|phi>|^2)."""
    ov = np.abs(np.einsum("pi,pi->p", states[left].conj(), states[right])) ** 2
    return np.sqrt(np.clip(1.0 - ov, 0.0, None))


# -- optional process pool for the big all-pairs evaluations ---------------

_POOL_STATES = None
_POOL_BLAS = None


def limit_worker_blas():
    """Pin BLAS to one thread inside pool workers (cores go to the pool)."""
    global _POOL_BLAS
    try:
        from threadpoolctl import threadpool_limits

        _POOL_BLAS = threadpool_limits(limits=1)
    except ImportError:
        pass


def _pool_init(states):
    global _POOL_STATES
    _POOL_STATES = states
    limit_worker_blas()


def _pool_chunk(args):
    left, right = args
    return qmat.trace_distance_pairs(_POOL_STATES, left, right)


def noisy_trace_distances(
    states: np.ndarray,
    left: np.ndarray,
    right: np.ndarray,
    workers: int = 1,
    chunk: int = 4096,
) -> np.ndarray:
    """Pairwise trace distances of a (possibly large) stack, optionally parallel.

    The pair list is split at fixed chunk boundaries, so results are
    bitwise identical for any worker count.
    """
    if workers <= 1 or left.shape[0] < 4 * chunk:
        return qmat.trace_distance_pairs(states, left, right, chunk=chunk)
    jobs = [
        (left[s : s + chunk], right[s : s + chunk])
        for s in range(0, left.shape[0], chunk)
    ]
    out = np.empty(left.shape[0], dtype=float)
    ctx = mp.get_context("fork")
    with ProcessPoolExecutor(
        max_workers=workers, mp_context=ctx, initializer=_pool_init, initargs=(states,)
    ) as pool:
        pos = 0
        for part in pool.map(_pool_chunk, jobs):
            out[pos : pos + part.shape[0]] = part
            pos += part.shape[0]
    return out


def lost_trace(rho: np.ndarray, sigma: np.ndarray, encoder, noise) -> float:
    """Lost trace distance T(rho, sigma) - T(N(rho_L), N(sigma_L)) for pure inputs."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    k = qmat.num_qubits(rho.shape[0])
    u, n = encoder_unitary(encoder, None if encoder is not None else k)
    vecs = encode_vectors(np.stack([rho, sigma]), u, n)
    rhos = np.einsum("si,sj->sij", vecs, vecs.conj())
    noisy = apply_noise_batch(rhos, noise, n)
    # eigenvalue route rather than sqrt(1 - |<a|b>|^2): exact zero for
    # identical inputs instead of ~1e-8 cancellation noise
    t_in = qmat.trace_distance(qmat.pure_to_density(rho), qmat.pure_to_density(sigma))
    t_out = qmat.trace_distance(noisy[0], noisy[1])
    return t_in - t_out


def dloss(
    stateset: StateSet,
    encoder,
    noise,
    keep_pairs: bool = False,
    workers: int = 1,
) -> LossReport:
    """Distinguishability loss over a state set.

    The average is the full double sum 1/|S|^2 sum_{rho,sigma} Delta_T,
    computed over unordered pairs (the diagonal vanishes and Delta_T is
    symmetric); the worst case is the maximum over distinct pairs.  For
    weighted sets each pair term carries w_rho * w_sigma and the average
    normalizes by (sum w)^2.
    """
    if len(stateset) < 2:
        raise ValueError("state set needs at least two states")
    noisy, _ = _encoded_noisy(stateset, encoder, noise)
    left, right = np.triu_indices(len(stateset), k=1)
    t_in = pure_trace_distances(stateset.states, left, right)
    t_out = noisy_trace_distances(noisy, left, right, workers=workers)
    delta = t_in - t_out
    w = stateset.weights
    ww = w[left] * w[right]
    weighted_delta = ww * delta
    total_weight = w.sum() ** 2
    d_avg = float(2.0 * weighted_delta.sum() / total_weight)
    d_worst = float(weighted_delta.max())
    pairs = None
    if keep_pairs:
        m = len(stateset)
        pairs = np.zeros((m, m))
        pairs[left, right] = delta
        pairs[right, left] = delta
    return LossReport(
        d_avg=d_avg, d_worst=d_worst, estimator=estimator_tag(stateset), pairs=pairs
    )


def _ptrace_keep_front(mats: np.ndarray, keep_dim: int, drop_dim: int) -> np.ndarray:
    """Trace out the trailing factor: (m, K*D, K*D) -> (m, K, K)."""
    m = mats.shape[0]
    t = mats.reshape(m, keep_dim, drop_dim, keep_dim, drop_dim)
    return np.einsum("maibi->mab", t)


def recovered_states(
    stateset: StateSet,
    encoder,
    recovery,
    noise,
    r: int = 0,
) -> np.ndarray:
    """Decoded outputs of the full cycle for every set state: (m, 2**k, 2**k).

    Cycle: encode k -> n, apply channel, adjoin r recovery qubits in |0>,
    apply the recovery unitary on n+r, trace the recovery register, undo
    the encoder, trace the encoding ancillas.
    """
    if r < 0:
        raise ValueError("recovery register size must be nonnegative")
    u_enc, n = encoder_unitary(encoder, None if encoder is not None else stateset.k)
    noisy, _ = _encoded_noisy(stateset, encoder, noise)
    m = len(stateset)
    if recovery is None:
        u_rec = None
    else:
        u_rec, n_rec = encoder_unitary(recovery, None)
        if n_rec != n + r:
            raise ValueError(f"recovery acts on {n_rec} qubits, expected n+r = {n + r}")
    work = noisy
    if r > 0:
        anc = np.zeros((2**r, 2**r), dtype=complex)
        anc[0, 0] = 1.0
        work = np.stack([np.kron(s, anc) for s in work])
    if u_rec is not None:
        work = qmat.conjugate_batch(work, u_rec)
    if r > 0:
        work = _ptrace_keep_front(work, 2**n, 2**r)
    work = qmat.conjugate_batch(work, u_enc.conj().T)
    return _ptrace_keep_front(work, 2**stateset.k, 2 ** (n - stateset.k))


def floss(
    stateset: StateSet,
    encoder,
    recovery,
    noise,
    r: int = 0,
) -> LossReport:
    """Fidelity loss of a full recovery cycle over a state set.

    f_avg = 1 - weighted mean of F(rho, rho_hat); f_worst = 1 - min F.
    For the pure inputs of a state set, F is the overlap <psi|rho_hat|psi>.
    """
    decoded = recovered_states(stateset, encoder, recovery, noise, r=r)
    fids = np.einsum("si,sij,sj->s", stateset.states.conj(), decoded, stateset.states).real
    fids = np.clip(fids, 0.0, 1.0)
    w = stateset.weights
    f_avg = float(1.0 - (w * fids).sum() / w.sum())
    f_worst = float(1.0 - fids.min())
    return LossReport(
        f_avg=f_avg, f_worst=f_worst, estimator=estimator_tag(stateset)
    )


def fidelity_bounds(d_worst: float) -> tuple[float, float]:
    """Bounds on the worst-case fidelity loss implied by the worst-case
    distinguishability loss: (d_worst^2, 1 - (1 - d_worst)^2)."""
    if not -NEG_TOL <= d_worst <= 1 + NEG_TOL:
        raise ValueError(f"d_worst must lie in [0, 1], got {d_worst}")
    d = min(max(d_worst, 0.0), 1.0)
    return d * d, 1.0 - (1.0 - d) ** 2
