"""Gradient machinery and the two training procedures.

Encoding training minimizes the average-case two-design distinguishability
loss over a sweep of ansatz seeds (L-BFGS with central finite differences);
recovery training minimizes the fidelity loss for a fixed encoder, or for
both circuits end to end.  Worst-case losses are evaluation-only.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import multiprocessing as mp

import numpy as np

from . import qmat
from .ansatz import (
    Ansatz,
    BoundCircuit,
    Layout,
    build_layout,
    circuit_from_json,
    circuit_to_json,
    circuit_unitary,
    encoder_unitary,
    gate_matrix,
    generate_rea,
)
from .channels import CompositeNoise, noise_from_config, noise_to_config
from .designs import StateSet, haar_sample, two_design
from .loss import LossReport, apply_noise_batch, dloss, floss

DEFAULT_EVAL_SEED = 1905
DEFAULT_EVAL_HAAR = 1000
ARMIJO_C1 = 1e-4
BACKTRACK = 0.5


@dataclass(frozen=True)
class OptimConfig:
    """L-BFGS budget and tolerances.

    The iteration budget is epochs * iters_per_epoch; finite-difference
    gradients use the central step ``grad_step``.
    """

    epochs: int = 10
    iters_per_epoch: int = 10
    history_size: int = 100
    grad_step: float = 1e-5
    convergence_tol: float = 1e-9
    line_search_max_evals: int = 20

    def __post_init__(self):
        for name in ("epochs", "iters_per_epoch", "history_size", "line_search_max_evals"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.grad_step <= 0 or self.convergence_tol <= 0:
            raise ValueError("grad_step and convergence_tol must be positive")

    @property
    def max_iters(self) -> int:
        return self.epochs * self.iters_per_epoch


RECOVERY_OPTIM = OptimConfig(epochs=50)


def fd_gradient(f, params, step: float) -> np.ndarray:
    """Central finite differences (f(x+h e_i) - f(x-h e_i)) / (2h)."""
    if step <= 0:
        raise ValueError("step must be positive")
    params = np.asarray(params, dtype=float)
    grad = np.empty(params.shape[0])
    for i in range(params.shape[0]):
        up = params.copy()
        dn = params.copy()
        up[i] += step
        dn[i] -= step
        fu, fd = f(up), f(dn)
        if not (math.isfinite(fu) and math.isfinite(fd)):
            raise ValueError(f"non-finite loss at coordinate {i}")
        grad[i] = (fu - fd) / (2 * step)
    return grad


@dataclass
class LbfgsResult:
    params: np.ndarray
    trajectory: list[float]
    line_search_failed: bool = False
    iterations: int = 0


def lbfgs_minimize(f, params0, cfg: OptimConfig, grad=None) -> LbfgsResult:
    """Two-loop-recursion L-BFGS with Armijo backtracking line search.

    Stops after cfg.max_iters iterations or when the gradient norm drops
    below cfg.convergence_tol.  A failed line search returns the best
    iterate so far with ``line_search_failed`` set instead of raising.
    """
    if grad is None:
        grad = lambda x: fd_gradient(f, x, cfg.grad_step)
    x = np.asarray(params0, dtype=float).copy()
    fx = float(f(x))
    if not math.isfinite(fx):
        raise ValueError("non-finite loss at the initial point")
    g = grad(x)
    s_hist: list[np.ndarray] = []
    y_hist: list[np.ndarray] = []
    traj = [fx]
    failed = False
    it = 0
    while it < cfg.max_iters:
        if np.linalg.norm(g) < cfg.convergence_tol:
            break
        q = g.copy()
        alphas = []
        for s, y in zip(reversed(s_hist), reversed(y_hist)):
            rho = 1.0 / float(y @ s)
            a = rho * float(s @ q)
            q -= a * y
            alphas.append((a, rho))
        gamma = float(s_hist[-1] @ y_hist[-1]) / float(y_hist[-1] @ y_hist[-1]) if s_hist else 1.0
        r = gamma * q
        for (a, rho), s, y in zip(reversed(alphas), s_hist, y_hist):
            b = rho * float(y @ r)
            r += (a - b) * s
        d = -r
        gd = float(g @ d)
        if gd >= 0:
            d = -g
            gd = -float(g @ g)
        step = 1.0
        accepted = False
        for _ in range(cfg.line_search_max_evals):
            xn = x + step * d
            fn = float(f(xn))
            if math.isfinite(fn) and fn <= fx + ARMIJO_C1 * step * gd:
                accepted = True
                break
            step *= BACKTRACK
        if not accepted:
            failed = True
            break
        gn = grad(xn)
        s_v, y_v = xn - x, gn - g
        # Powell damping: an Armijo-only search does not enforce the
        # curvature condition, so blend y toward B0 s (B0 = I/gamma) when
        # s.y is too small; keeps the inverse-Hessian estimate positive
        # definite without stalling on stale history.
        curv = float(s_v @ y_v)
        s_b_s = float(s_v @ s_v) / gamma
        if s_b_s > 0:
            if curv < 0.2 * s_b_s:
                theta = 0.8 * s_b_s / (s_b_s - curv)
                y_v = theta * y_v + (1 - theta) * s_v / gamma
            s_hist.append(s_v)
            y_hist.append(y_v)
            if len(s_hist) > cfg.history_size:
                s_hist.pop(0)
                y_hist.pop(0)
        x, fx, g = xn, fn, gn
        traj.append(fx)
        it += 1
    return LbfgsResult(params=x, trajectory=traj, line_search_failed=failed, iterations=it)


# ---------------------------------------------------------------------------
# Fast circuit-loss evaluation: shared prefix/suffix products let one
# finite-difference sweep reuse all unperturbed gates.
# ---------------------------------------------------------------------------


class _CircuitJet:
    """Builds the unitary of an ansatz and all one-slot FD perturbations."""

    def __init__(self, ansatz: Ansatz):
        self.ansatz = ansatz
        self.n = ansatz.n
        self.dim = 2**ansatz.n
        self.slot_gate = {}
        for gi, g in enumerate(ansatz.gates):
            for s in g.param_slots:
                self.slot_gate[s] = gi

    def _gate_full(self, gate, values) -> np.ndarray:
        return qmat.apply_gate(
            np.eye(self.dim, dtype=complex), gate_matrix(gate.kind, values), gate.targets, self.n
        )

    def _gate_mats(self, params) -> list[np.ndarray]:
        return [
            self._gate_full(g, [params[s] for s in g.param_slots]) for g in self.ansatz.gates
        ]

    def unitary(self, params) -> np.ndarray:
        u = np.eye(self.dim, dtype=complex)
        for g in self.ansatz.gates:
            u = qmat.apply_gate(u, gate_matrix(g.kind, [params[s] for s in g.param_slots]),
                                g.targets, self.n)
        return u

    def perturbed(self, params, h: float) -> np.ndarray:
        """Unitaries for params with slot j shifted by +h / -h.

        Returns a (2P, dim, dim) stack ordered [+h(0), -h(0), +h(1), ...].
        """
        mats = self._gate_mats(params)
        m = len(mats)
        pre = [np.eye(self.dim, dtype=complex)]
        for g in mats:
            pre.append(g @ pre[-1])
        suf = [None] * (m + 1)
        suf[m] = np.eye(self.dim, dtype=complex)
        for i in range(m - 1, -1, -1):
            suf[i] = suf[i + 1] @ mats[i]
        p = self.ansatz.num_params
        out = np.empty((2 * p, self.dim, self.dim), dtype=complex)
        for j in range(p):
            gi = self.slot_gate[j]
            gate = self.ansatz.gates[gi]
            base = [params[s] for s in gate.param_slots]
            local = gate.param_slots.index(j)
            for which, sign in ((0, +h), (1, -h)):
                vals = list(base)
                vals[local] += sign
                out[2 * j + which] = suf[gi + 1] @ (self._gate_full(gate, vals) @ pre[gi])
        return out


class _EncodingObjective:
    """Average distinguishability loss as a function of encoder parameters."""

    def __init__(self, ansatz: Ansatz, stateset: StateSet, noise):
        self.jet = _CircuitJet(ansatz)
        self.stateset = stateset
        self.noise = noise
        self.n = ansatz.n
        k = stateset.k
        m = len(stateset)
        self.base = np.zeros((m, 2**self.n), dtype=complex)
        self.base[:, :: 2 ** (self.n - k)] = stateset.states
        self.left, self.right = np.triu_indices(m, k=1)
        ov = np.abs(
            np.einsum("pi,pi->p", stateset.states[self.left].conj(), stateset.states[self.right])
        ) ** 2
        self.t_in = np.sqrt(np.clip(1.0 - ov, 0.0, None))
        w = stateset.weights
        self.pair_w = w[self.left] * w[self.right]
        self.norm = float(w.sum() ** 2)

    def from_unitaries(self, us: np.ndarray) -> np.ndarray:
        """(B, dim, dim) unitaries -> (B,) average losses."""
        b = us.shape[0]
        m = self.base.shape[0]
        enc = np.einsum("bij,sj->bsi", us, self.base)
        rhos = np.einsum("bsi,bsj->bsij", enc, enc.conj()).reshape(b * m, self.jet.dim, -1)
        noisy = apply_noise_batch(rhos, self.noise, self.n).reshape(b, m, self.jet.dim, -1)
        diffs = (noisy[:, self.left] - noisy[:, self.right]).reshape(-1, self.jet.dim, self.jet.dim)
        t_out = np.empty(diffs.shape[0])
        chunk = 8192
        for s in range(0, diffs.shape[0], chunk):
            w = np.linalg.eigvalsh(diffs[s : s + chunk])
            t_out[s : s + chunk] = 0.5 * np.abs(w).sum(axis=1)
        delta = self.t_in[None, :] - t_out.reshape(b, -1)
        return 2.0 * (self.pair_w[None, :] * delta).sum(axis=1) / self.norm

    def value(self, params) -> float:
        return float(self.from_unitaries(self.jet.unitary(params)[None])[0])

    def gradient(self, params, h: float) -> np.ndarray:
        vals = self.from_unitaries(self.jet.perturbed(params, h))
        if not np.all(np.isfinite(vals)):
            raise ValueError("non-finite loss during gradient evaluation")
        return (vals[0::2] - vals[1::2]) / (2 * h)


class _RecoveryObjective:
    """Average fidelity loss as a function of recovery parameters.

    The encoder and channel are fixed, so the noisy encoded states (with
    the recovery register adjoined) and the decode-side operators are
    precomputed; each loss evaluation is a sandwich of the recovery
    unitary between them.
    """

    def __init__(self, u_enc: np.ndarray, n: int, recovery: Ansatz, stateset: StateSet, noise,
                 r: int):
        if recovery.n != n + r:
            raise ValueError(f"recovery ansatz acts on {recovery.n}, expected {n + r}")
        self.jet = _CircuitJet(recovery)
        self.weights = stateset.weights / stateset.weights.sum()
        k = stateset.k
        m = len(stateset)
        base = np.zeros((m, 2**n), dtype=complex)
        base[:, :: 2 ** (n - k)] = stateset.states
        enc = base @ u_enc.T
        rhos = np.einsum("si,sj->sij", enc, enc.conj())
        noisy = apply_noise_batch(rhos, noise, n)
        if r > 0:
            anc = np.zeros((2**r, 2**r), dtype=complex)
            anc[0, 0] = 1.0
            noisy = np.stack([np.kron(s, anc) for s in noisy])
        self.noisy = noisy
        # A_s = (U_enc (P_psi ⊗ I_{n-k}) U_enc†) ⊗ I_r pulls the decode,
        # both partial traces and the overlap into one fixed operator:
        # F_s = Tr[U_rec rho_s U_rec† A_s].
        eye_rest = np.eye(2 ** (n - k), dtype=complex)
        ops = []
        for psi in stateset.states:
            proj = qmat.tensor(np.outer(psi, psi.conj()), eye_rest)
            a = u_enc @ proj @ u_enc.conj().T
            if r > 0:
                a = qmat.tensor(a, np.eye(2**r, dtype=complex))
            ops.append(a)
        self.a_ops = np.stack(ops)

    def fidelities(self, us: np.ndarray) -> np.ndarray:
        """(B, dim, dim) recovery unitaries -> (B, m) cycle fidelities."""
        out = np.empty((us.shape[0], self.noisy.shape[0]))
        chunk = 128
        for s in range(0, us.shape[0], chunk):
            u = us[s : s + chunk]
            t = np.einsum("bij,sjk->bsik", u, self.noisy, optimize=True)
            ua = np.einsum("bji,sjk->bsik", u.conj(), self.a_ops, optimize=True)
            out[s : s + chunk] = np.einsum("bsik,bski->bs", t, ua, optimize=True).real
        return out

    def from_unitaries(self, us: np.ndarray) -> np.ndarray:
        fids = self.fidelities(us)
        return 1.0 - fids @ self.weights

    def value(self, params) -> float:
        return float(self.from_unitaries(self.jet.unitary(params)[None])[0])

    def gradient(self, params, h: float) -> np.ndarray:
        vals = self.from_unitaries(self.jet.perturbed(params, h))
        if not np.all(np.isfinite(vals)):
            raise ValueError("non-finite loss during gradient evaluation")
        return (vals[0::2] - vals[1::2]) / (2 * h)


class _QvectorObjective:
    """End-to-end fidelity loss over concatenated encoder+recovery parameters."""

    def __init__(self, encoder: Ansatz, recovery: Ansatz, stateset: StateSet, noise, r: int):
        self.encoder = encoder
        self.recovery = recovery
        self.stateset = stateset
        self.noise = noise
        self.r = r
        self.p_enc = encoder.num_params
        self.enc_jet = _CircuitJet(encoder)
        self.rec_jet = _CircuitJet(recovery)

    def _loss_for(self, u_enc_stack: np.ndarray, u_rec_stack: np.ndarray) -> np.ndarray:
        """Pairs one encoder unitary with one recovery unitary per batch row."""
        out = np.empty(u_enc_stack.shape[0])
        for i, (ue, ur) in enumerate(zip(u_enc_stack, u_rec_stack)):
            obj = _RecoveryObjective(ue, self.encoder.n, self.recovery, self.stateset,
                                     self.noise, self.r)
            out[i] = obj.from_unitaries(ur[None])[0]
        return out

    def value(self, params) -> float:
        theta, phi = params[: self.p_enc], params[self.p_enc :]
        return float(
            self._loss_for(self.enc_jet.unitary(theta)[None], self.rec_jet.unitary(phi)[None])[0]
        )

    def gradient(self, params, h: float) -> np.ndarray:
        theta, phi = params[: self.p_enc], params[self.p_enc :]
        u_enc = self.enc_jet.unitary(theta)
        u_rec = self.rec_jet.unitary(phi)
        enc_pert = self.enc_jet.perturbed(theta, h)
        rec_pert = self.rec_jet.perturbed(phi, h)
        g = np.empty(params.shape[0])
        vals_enc = self._loss_for(enc_pert, np.broadcast_to(u_rec, enc_pert.shape).copy())
        g[: self.p_enc] = (vals_enc[0::2] - vals_enc[1::2]) / (2 * h)
        obj = _RecoveryObjective(u_enc, self.encoder.n, self.recovery, self.stateset,
                                 self.noise, self.r)
        vals_rec = obj.from_unitaries(rec_pert)
        g[self.p_enc :] = (vals_rec[0::2] - vals_rec[1::2]) / (2 * h)
        if not np.all(np.isfinite(g)):
            raise ValueError("non-finite loss during gradient evaluation")
        return g


# ---------------------------------------------------------------------------
# Training drivers
# ---------------------------------------------------------------------------


@dataclass
class TrainReport:
    """The persisted artifact of a training run."""

    best_seed: int
    params: np.ndarray
    loss_trajectory: list[float]
    final: dict[str, LossReport]
    ansatz: Ansatz
    noise: CompositeNoise | None
    wall_time: float
    mode: str = "encoding"
    seed_results: list[dict] = field(default_factory=list)

    @property
    def circuit(self) -> BoundCircuit:
        return BoundCircuit(self.ansatz, self.params)

    def to_json(self) -> str:
        doc = {
            "mode": self.mode,
            "best_seed": self.best_seed,
            "params": [float(x) for x in self.params],
            "loss_trajectory": [float(x) for x in self.loss_trajectory],
            "final": {k: json.loads(v.to_json()) for k, v in self.final.items()},
            "ansatz": json.loads(circuit_to_json(self.ansatz)),
            "noise": None if self.noise is None else noise_to_config(self.noise),
            "wall_time": self.wall_time,
            "seed_results": self.seed_results,
        }
        return json.dumps(doc, indent=2)

    @staticmethod
    def from_json(text: str) -> "TrainReport":
        doc = json.loads(text)
        ansatz, _ = circuit_from_json(json.dumps(doc["ansatz"]))
        final = {k: LossReport.from_json(json.dumps(v)) for k, v in doc["final"].items()}
        return TrainReport(
            best_seed=doc["best_seed"],
            params=np.asarray(doc["params"], dtype=float),
            loss_trajectory=list(doc["loss_trajectory"]),
            final=final,
            ansatz=ansatz,
            noise=None if doc.get("noise") is None else noise_from_config(doc["noise"]),
            wall_time=doc.get("wall_time", 0.0),
            mode=doc.get("mode", "encoding"),
            seed_results=doc.get("seed_results", []),
        )


def initial_params(seed: int, count: int, scale: float = math.pi) -> np.ndarray:
    """Seeded uniform(-scale, scale) start vector (PCG64 stream [seed, 1])."""
    rng = np.random.default_rng(np.random.PCG64(np.random.SeedSequence([seed, 1])))
    return rng.uniform(-scale, scale, count)


def _train_one_seed(args):
    (n, k, depth_blocks, layout, noise, stateset, seed, cfg, single_kind, two_kind,
     init_scale, eval_set) = args
    ansatz = generate_rea(n, depth_blocks, layout, seed, single_kind, two_kind)
    obj = _EncodingObjective(ansatz, stateset, noise)
    x0 = initial_params(seed, ansatz.num_params, init_scale)
    result = lbfgs_minimize(
        obj.value, x0, cfg, grad=lambda x: obj.gradient(x, cfg.grad_step)
    )
    d_eval = dloss(eval_set, (ansatz, result.params), noise)
    return {
        "seed": seed,
        "params": result.params,
        "trajectory": result.trajectory,
        "final_objective": result.trajectory[-1],
        "d_worst_eval": d_eval.d_worst,
        "d_avg_eval": d_eval.d_avg,
        "line_search_failed": result.line_search_failed,
    }


def train_encoding(
    n: int,
    k: int,
    depth_blocks: int,
    layout: Layout,
    noise,
    stateset: StateSet,
    seeds,
    cfg: OptimConfig = OptimConfig(),
    single_gate_kind: str = "rzyz",
    two_gate_kind: str = "cz",
    init_scale: float = math.pi,
    eval_haar_count: int = DEFAULT_EVAL_HAAR,
    eval_seed: int = DEFAULT_EVAL_SEED,
    workers: int = 1,
) -> TrainReport:
    """Seed-swept encoding training on the distinguishability loss.

    Each seed generates its own randomized entangling ansatz and start
    vector, minimizes the average-case loss on ``stateset``, and is scored
    by the worst-case loss on a shared Haar evaluation sample; the report
    carries the winner (ties broken by lowest seed).  Optimizer failures
    are recorded per seed and do not abort the sweep.
    """
    if stateset.k != k:
        raise ValueError(f"state set is for k={stateset.k}, expected {k}")
    if layout.n != n:
        raise ValueError(f"layout is for n={layout.n}, expected {n}")
    seeds = list(seeds)
    if not seeds:
        raise ValueError("need at least one seed")
    t0 = time.perf_counter()
    eval_set = haar_sample(k, eval_haar_count, eval_seed)
    jobs = [
        (n, k, depth_blocks, layout, noise, stateset, seed, cfg,
         single_gate_kind, two_gate_kind, init_scale, eval_set)
        for seed in seeds
    ]
    outcomes = []
    if workers > 1 and len(jobs) > 1:
        from .loss import limit_worker_blas

        ctx = mp.get_context("fork")
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx,
                                 initializer=limit_worker_blas) as pool:
            futures = [pool.submit(_train_one_seed, job) for job in jobs]
            for seed, fut in zip(seeds, futures):
                try:
                    outcomes.append(fut.result())
                except Exception as exc:  # noqa: BLE001 - per-seed failures are data
                    outcomes.append({"seed": seed, "error": str(exc)})
    else:
        for job in jobs:
            try:
                outcomes.append(_train_one_seed(job))
            except Exception as exc:  # noqa: BLE001
                outcomes.append({"seed": job[6], "error": str(exc)})
    ok = [o for o in outcomes if "error" not in o]
    if not ok:
        raise RuntimeError(f"all {len(outcomes)} seeds failed; first error: "
                           f"{outcomes[0].get('error')}")
    best = min(ok, key=lambda o: (o["d_worst_eval"], o["seed"]))
    ansatz = generate_rea(n, depth_blocks, layout, best["seed"], single_gate_kind, two_gate_kind)
    encoder = (ansatz, best["params"])
    design_set = stateset if stateset.kind != "haar_sample" else two_design(k)
    final = {
        "two_design": dloss(design_set, encoder, noise),
        "haar": dloss(eval_set, encoder, noise),
    }
    summaries = []
    for o in outcomes:
        row = {"seed": o["seed"]}
        if "error" in o:
            row["error"] = o["error"]
        else:
            row.update(
                final_objective=o["final_objective"],
                d_worst_eval=o["d_worst_eval"],
                d_avg_eval=o["d_avg_eval"],
                line_search_failed=o["line_search_failed"],
            )
        summaries.append(row)
    return TrainReport(
        best_seed=best["seed"],
        params=np.asarray(best["params"]),
        loss_trajectory=list(best["trajectory"]),
        final=final,
        ansatz=ansatz,
        noise=noise if isinstance(noise, CompositeNoise) else None,
        wall_time=time.perf_counter() - t0,
        mode="encoding",
        seed_results=summaries,
    )


def _resolve_encoder(encoding):
    """Encoder argument of train_recovery -> (ansatz-or-None, unitary, n)."""
    if isinstance(encoding, TrainReport):
        u = circuit_unitary(encoding.ansatz, encoding.params)
        return encoding.ansatz, encoding.params, u, encoding.ansatz.n
    if isinstance(encoding, BoundCircuit):
        return encoding.ansatz, encoding.params, circuit_unitary(encoding.ansatz, encoding.params), encoding.ansatz.n
    if isinstance(encoding, tuple) and len(encoding) == 2 and isinstance(encoding[0], Ansatz):
        a, p = encoding
        return a, np.asarray(p, dtype=float), circuit_unitary(a, p), a.n
    u, n = encoder_unitary(encoding, None)
    return None, None, u, n


def train_recovery(
    encoding,
    recovery_depth: int,
    r: int,
    noise,
    stateset: StateSet,
    cfg: OptimConfig = RECOVERY_OPTIM,
    mode: str = "recovery_only",
    recovery_seed: int = 0,
    single_gate_kind: str = "rzyz",
    two_gate_kind: str = "cz",
    init_scale: float = math.pi,
    eval_haar_count: int = DEFAULT_EVAL_HAAR,
    eval_seed: int = DEFAULT_EVAL_SEED,
) -> TrainReport:
    """Recovery training on the fidelity loss.

    ``recovery_only`` keeps the encoder fixed and trains a recovery
    ansatz on n + r qubits; ``qvector_end_to_end`` re-initializes the
    encoder parameters and trains both blocks jointly.  The report's
    ``final`` carries fidelity losses plus the encoder's distinguishability
    losses, so one run yields a full table row.
    """
    if mode not in ("recovery_only", "qvector_end_to_end"):
        raise ValueError(f"unknown mode {mode!r}")
    enc_ansatz, enc_params, u_enc, n = _resolve_encoder(encoding)
    rec_layout = build_layout("full", n + r)
    recovery = generate_rea(n + r, recovery_depth, rec_layout, recovery_seed,
                            single_gate_kind, two_gate_kind)
    t0 = time.perf_counter()
    phi0 = initial_params(recovery_seed, recovery.num_params, init_scale)
    if mode == "recovery_only":
        obj = _RecoveryObjective(u_enc, n, recovery, stateset, noise, r)
        result = lbfgs_minimize(obj.value, phi0, cfg,
                                grad=lambda x: obj.gradient(x, cfg.grad_step))
        best_enc_params = enc_params
        rec_params = result.params
    else:
        if enc_ansatz is None:
            raise ValueError("qvector mode needs an ansatz-based encoder")
        obj = _QvectorObjective(enc_ansatz, recovery, stateset, noise, r)
        theta0 = initial_params(recovery_seed + 1, enc_ansatz.num_params, init_scale)
        result = lbfgs_minimize(obj.value, np.concatenate([theta0, phi0]), cfg,
                                grad=lambda x: obj.gradient(x, cfg.grad_step))
        best_enc_params = result.params[: enc_ansatz.num_params]
        rec_params = result.params[enc_ansatz.num_params:]
        u_enc = circuit_unitary(enc_ansatz, best_enc_params)
    encoder_arg = u_enc if enc_ansatz is None else (enc_ansatz, best_enc_params)
    f_report = floss(stateset, encoder_arg, (recovery, rec_params), noise, r=r)
    eval_set = haar_sample(stateset.k, eval_haar_count, eval_seed)
    final = {
        "fidelity": f_report,
        "encoder_two_design": dloss(
            stateset if stateset.kind != "haar_sample" else two_design(stateset.k),
            encoder_arg, noise),
        "encoder_haar": dloss(eval_set, encoder_arg, noise),
    }
    return TrainReport(
        best_seed=recovery_seed,
        params=np.asarray(rec_params),
        loss_trajectory=list(result.trajectory),
        final=final,
        ansatz=recovery,
        noise=noise if isinstance(noise, CompositeNoise) else None,
        wall_time=time.perf_counter() - t0,
        mode=mode,
        seed_results=[{
            "seed": recovery_seed,
            "final_objective": result.trajectory[-1],
            "line_search_failed": result.line_search_failed,
        }],
    )
