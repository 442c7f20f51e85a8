"""Dense complex linear algebra and quantum-state primitives.

Conventions used throughout the package:

* States and operators are plain ``numpy`` arrays with dtype ``complex128``.
* Qubit 0 is the *most significant* bit of a basis index, so the basis
  state ``|q0 q1 ... q_{n-1}>`` has index ``q0*2^(n-1) + ... + q_{n-1}``.
* A pure state is a 1-D array of length ``2**n`` with unit norm; a density
  matrix is a ``2**n x 2**n`` Hermitian, unit-trace, PSD matrix.

All functions are pure; nothing here holds mutable state.
"""

from __future__ import annotations

import math

import numpy as np

# Largest supported register: dense 1024 x 1024 matrices.
MAX_QUBITS = 10

HERMITIAN_ATOL = 1e-10
TRACE_ATOL = 1e-10
PSD_ATOL = 1e-9
UNITARY_ATOL = 1e-10


def num_qubits(dim: int) -> int:
    """Number of qubits for a Hilbert-space dimension, validating 2**n form."""
    n = int(round(math.log2(dim)))
    if 2**n != dim or n < 0:
        raise ValueError(f"dimension {dim} is not a power of two")
    if n > MAX_QUBITS:
        raise ValueError(f"{n} qubits exceeds the supported maximum of {MAX_QUBITS}")
    return n


def basis_state(index: int, n: int) -> np.ndarray:
    """Computational basis ket |index> on n qubits."""
    if not 0 <= index < 2**n:
        raise ValueError(f"basis index {index} out of range for {n} qubits")
    v = np.zeros(2**n, dtype=complex)
    v[index] = 1.0
    return v


def pure_to_density(psi: np.ndarray) -> np.ndarray:
    """Rank-one projector |psi><psi|."""
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with ``a`` as the more significant qubit block."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def check_unitary(u: np.ndarray, atol: float = UNITARY_ATOL) -> None:
    """Raise ValueError unless U†U = I within ``atol`` (max-abs entry norm)."""
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {u.shape}")
    dev = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if dev > atol:
        raise ValueError(f"matrix is not unitary: max |U†U - I| = {dev:.3e} > {atol:.1e}")


def check_density_matrix(
    rho: np.ndarray,
    herm_atol: float = HERMITIAN_ATOL,
    trace_atol: float = TRACE_ATOL,
    psd_atol: float = PSD_ATOL,
) -> None:
    """Validate the density-matrix invariants (Hermitian, unit trace, PSD)."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    num_qubits(rho.shape[0])
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > herm_atol:
        raise ValueError(f"not Hermitian: max |rho - rho†| = {herm:.3e}")
    tr = rho.trace()
    if abs(tr - 1.0) > trace_atol:
        raise ValueError(f"trace {tr} deviates from 1 by more than {trace_atol:.1e}")
    wmin = np.linalg.eigvalsh((rho + rho.conj().T) / 2).min()
    if wmin < -psd_atol:
        raise ValueError(f"not positive semidefinite: min eigenvalue {wmin:.3e}")


def hermitian_eigvals(h: np.ndarray, herm_atol: float = 1e-8) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, ascending.

    The input is symmetrized as (H + H†)/2 before decomposition to suppress
    tiny asymmetries accumulated by long gate products; inputs that deviate
    from Hermiticity by more than ``herm_atol`` are rejected.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    dev = np.max(np.abs(h - h.conj().T))
    if dev > herm_atol:
        raise ValueError(f"not Hermitian: max |H - H†| = {dev:.3e} > {herm_atol:.1e}")
    return np.linalg.eigvalsh((h + h.conj().T) / 2)


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Trace distance T(rho, sigma) = half the trace norm of rho - sigma."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    w = hermitian_eigvals(rho - sigma)
    return float(0.5 * np.abs(w).sum())


def _psd_sqrt(rho: np.ndarray, psd_atol: float = PSD_ATOL) -> np.ndarray:
    """Matrix square root of a PSD matrix via eigendecomposition.

    Eigenvalues in [-psd_atol, 0) clamp to zero, anything more negative
    raises.  Positive eigenvalues below the eigensolver noise floor
    (relative 64*eps) are also zeroed so that sqrt does not amplify them.
    """
    w, v = np.linalg.eigh((rho + rho.conj().T) / 2)
    if w.min() < -psd_atol:
        raise ValueError(f"matrix is not PSD: min eigenvalue {w.min():.3e}")
    floor = 64 * np.finfo(float).eps * max(w.max(), 0.0)
    w = np.where(w < floor, 0.0, w)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity F(rho, sigma) = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.

    Computed from the PSD square roots of both states: the eigenvalues of
    sqrt(rho) sigma sqrt(rho) are the squared singular values of
    sqrt(sigma) sqrt(rho), so F = (sum of those singular values)^2.  The
    singular values enter linearly, which keeps near-pure inputs accurate.
    For pure inputs this reduces to the squared overlap.
    """
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    product = _psd_sqrt(sigma) @ _psd_sqrt(rho)
    f = float(np.linalg.svd(product, compute_uv=False).sum() ** 2)
    return min(f, 1.0)


def conjugate(rho: np.ndarray, u: np.ndarray, unitary_atol: float = 1e-8) -> np.ndarray:
    """Unitary conjugation U rho U†."""
    rho = np.asarray(rho, dtype=complex)
    u = np.asarray(u, dtype=complex)
    if u.shape != rho.shape:
        raise ValueError(f"dimension mismatch: state {rho.shape} vs unitary {u.shape}")
    check_unitary(u, atol=unitary_atol)
    return u @ rho @ u.conj().T


def partial_trace(rho: np.ndarray, keep) -> np.ndarray:
    """Reduced state on the kept qubits, in the order given.

    ``keep`` is a sequence of distinct qubit indices; all other qubits are
    traced out.  The kept qubits appear in the output in the order listed,
    so ``keep=(1, 0)`` also swaps the two surviving subsystems.
    """
    rho = np.asarray(rho, dtype=complex)
    n = num_qubits(rho.shape[0])
    keep = list(keep)
    if len(set(keep)) != len(keep):
        raise ValueError(f"duplicate qubit index in keep={keep}")
    for q in keep:
        if not 0 <= q < n:
            raise ValueError(f"qubit index {q} out of range for {n} qubits")
    t = rho.reshape((2,) * (2 * n))
    row = list(range(n))
    col = [n + q if q in keep else q for q in range(n)]
    out = [q for q in keep] + [n + q for q in keep]
    return np.einsum(t, row + col, out).reshape(2 ** len(keep), 2 ** len(keep))


def apply_gate(mats: np.ndarray, gate: np.ndarray, targets, n: int) -> np.ndarray:
    """Left-multiply the embedded ``gate`` onto a (stack of) 2**n matrices.

    ``mats`` has shape (..., 2**n, 2**n); the gate acts on the row index
    only, i.e. this computes G_embedded @ M for every matrix in the stack.
    """
    mats = np.asarray(mats, dtype=complex)
    targets = list(targets)
    m = len(targets)
    dim = 2**n
    lead = mats.shape[:-2]
    t = mats.reshape(lead + (2,) * n + (dim,))
    axes = tuple(len(lead) + q for q in targets)
    g = np.asarray(gate, dtype=complex).reshape((2,) * (2 * m))
    t = np.tensordot(g, t, axes=(tuple(range(m, 2 * m)), axes))
    t = np.moveaxis(t, range(m), axes)
    return t.reshape(lead + (dim, dim))


def embed(gate: np.ndarray, targets, n: int) -> np.ndarray:
    """Lift a 1- or 2-qubit gate to the full n-qubit unitary.

    Acts as ``gate`` on ``targets`` (qubit 0 most significant within the
    target list) and as identity elsewhere.
    """
    gate = np.asarray(gate, dtype=complex)
    targets = list(targets)
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate target index in {targets}")
    for q in targets:
        if not 0 <= q < n:
            raise ValueError(f"target index {q} out of range for {n} qubits")
    if gate.shape != (2 ** len(targets), 2 ** len(targets)):
        raise ValueError(
            f"gate shape {gate.shape} does not match {len(targets)} target qubit(s)"
        )
    return apply_gate(np.eye(2**n, dtype=complex), gate, targets, n)


def conjugate_batch(rhos: np.ndarray, u: np.ndarray) -> np.ndarray:
    """U rho U† over a stack of density matrices (no unitarity check)."""
    return np.einsum("ij,sjk,lk->sil", u, rhos, u.conj(), optimize=True)


def trace_distance_pairs(
    states: np.ndarray,
    left_idx: np.ndarray,
    right_idx: np.ndarray,
    chunk: int = 4096,
) -> np.ndarray:
    """Trace distances T(states[i], states[j]) for index pairs, chunked.

    ``states`` is a stack (m, d, d) of density matrices.  Memory use is
    bounded by processing ``chunk`` pairs at a time through the batched
    Hermitian eigensolver.
    """
    states = np.asarray(states)
    left_idx = np.asarray(left_idx)
    right_idx = np.asarray(right_idx)
    out = np.empty(left_idx.shape[0], dtype=float)
    d = states.shape[-1]
    for start in range(0, left_idx.shape[0], chunk):
        sl = slice(start, start + chunk)
        diff = states[left_idx[sl]] - states[right_idx[sl]]
        if d == 2:
            # Closed form for 2x2 Hermitian: eigenvalues are m +- r.
            a = diff[:, 0, 0].real
            c = diff[:, 1, 1].real
            mid = 0.5 * (a + c)
            rad = np.sqrt((0.5 * (a - c)) ** 2 + np.abs(diff[:, 0, 1]) ** 2)
            out[sl] = 0.5 * (np.abs(mid + rad) + np.abs(mid - rad))
        else:
            w = np.linalg.eigvalsh(diff)
            out[sl] = 0.5 * np.abs(w).sum(axis=1)
    return out


def purity(rho: np.ndarray) -> float:
    """Tr(rho^2); equals 1 for pure states."""
    rho = np.asarray(rho)
    return float(np.einsum("ij,ji->", rho, rho).real)
