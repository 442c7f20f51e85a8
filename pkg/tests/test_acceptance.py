"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s``.  Criterion 9 (recovery
training, hours-long) is the documented long test and only runs with
RUN_LONG_TESTS=1.  Not covered anywhere by design: hardware figures, the
full 100-seed many-noise sweeps (single representative points are
reproduced instead), and k=2 training tables (k=2 designs and losses are
covered by property tests).
"""

import json
import os
import time

import numpy as np
import pytest

from distqec import qmat
from distqec.ansatz import build_layout, encode, generate_rea, parse_qasm, export_qasm
from distqec.channels import (
    CompositeNoise,
    NoiseSpec,
    apply,
    build_channel,
    solve_asymmetric_rates,
)
from distqec.cli import main
from distqec.codes import enumerate_pauli_errors, num_errors, potential_distance, standard_encoder
from distqec.designs import haar_sample, two_design
from distqec.loss import dloss, fidelity_bounds, floss
from distqec.train import OptimConfig, train_encoding, train_recovery

from conftest import random_density, random_pure_state, random_unitary

REPRO = os.path.join(os.path.dirname(__file__), "..", "repro")
WORKERS = min(os.cpu_count() or 1, 2)

DEPOL = CompositeNoise(NoiseSpec(kind="depolarizing", p=0.1))
BITFLIP = CompositeNoise(NoiseSpec(kind="bit_flip", p=0.1))

SEEDS_20 = list(range(20))


def report(num, text):
    print(f"\nACCEPTANCE {num}: PASS — {text}")


def test_criterion_01_analytic_depolarizing_baseline(capsys):
    t0 = time.perf_counter()
    code = main(["baseline", "--config", os.path.join(REPRO, "baseline_depolarizing.toml"),
                 "--estimator", "haar:1000:7", "--workers", str(WORKERS)])
    out = capsys.readouterr().out
    elapsed = time.perf_counter() - t0
    assert code == 0
    doc = json.loads(out)
    haar = doc["reports"]["haar:1000:7"]
    assert haar["d_worst"] == pytest.approx(4 * 0.1 / 3, abs=0.005)
    assert haar["d_avg"] == pytest.approx(8 * 0.1 / 9, abs=0.005)
    assert elapsed < 30
    report(1, f"baseline d_worst={haar['d_worst']:.5f} (0.13333), "
              f"d_avg={haar['d_avg']:.5f} (0.08889), {elapsed:.1f}s")


def test_criterion_02_haar_average_lemma():
    t0 = time.perf_counter()
    means = {}
    for k, expected in ((1, 2 / 3), (2, 6 / 7)):
        sample = haar_sample(k, 40_000, seed=31 + k)
        a, b = sample.states[:20_000], sample.states[20_000:]
        ov = np.abs(np.einsum("si,si->s", a.conj(), b)) ** 2
        t = np.sqrt(np.clip(1 - ov, 0, None))
        means[k] = t.mean()
        assert means[k] == pytest.approx(expected, abs=0.01)
    elapsed = time.perf_counter() - t0
    assert elapsed < 120
    report(2, f"mean trace distance k=1: {means[1]:.4f} (2/3), "
              f"k=2: {means[2]:.4f} (6/7), {elapsed:.1f}s")


def test_criterion_03_channel_table_baselines():
    t0 = time.perf_counter()
    rows = [
        (CompositeNoise(NoiseSpec(kind="bit_flip", p=0.1)), 0.200),
        (CompositeNoise(NoiseSpec(kind="amplitude_damping", gamma=0.1)), 0.100),
        (CompositeNoise(NoiseSpec(kind="amp_phase_damping", gamma=0.1)), 0.100),
        (CompositeNoise(NoiseSpec(kind="thermal_relaxation",
                                  t1_us=200, t2_us=100, t_us=10)), 0.095),
        (CompositeNoise(NoiseSpec(kind="asym_depolarizing", p=0.1, c=0.5)), 0.185),
    ]
    eval_set = haar_sample(1, 1000, seed=7)
    got = []
    for noise, expected in rows:
        d_haar = dloss(eval_set, None, noise).d_worst
        d_design = dloss(two_design(1), None, noise).d_worst
        assert d_haar == pytest.approx(expected, abs=0.005), noise.per_qubit.kind
        assert d_design == pytest.approx(expected, abs=0.005), noise.per_qubit.kind
        got.append(f"{noise.per_qubit.kind}={d_haar:.4f}")
    elapsed = time.perf_counter() - t0
    assert elapsed < 120
    report(3, ", ".join(got) + f", {elapsed:.1f}s")


def test_criterion_04_perfect_code_evaluation():
    t0 = time.perf_counter()
    code = standard_encoder("perfect_5")
    d = dloss(haar_sample(1, 1000, seed=7), code.circuit, DEPOL, workers=WORKERS).d_worst
    elapsed = time.perf_counter() - t0
    assert d == pytest.approx(0.106, abs=0.003)
    assert elapsed < 60
    report(4, f"[[5,1,3]] under depolarizing p=0.1: d_worst={d:.5f} (0.106), {elapsed:.1f}s")


def test_criterion_05_distance_probe():
    t0 = time.perf_counter()
    expected = {"bit_flip_3": 1, "approximate_4": 2, "css_422": 2, "perfect_5": 3}
    stars = {}
    for name, want in expected.items():
        code = standard_encoder(name)
        d_star, per_weight = potential_distance(code, eps=0.0)
        assert d_star == want, name
        stars[name] = d_star
        for w in per_weight:
            assert len(enumerate_pauli_errors(code.n, w)) == num_errors(code.n, w)
    assert num_errors(5, 1) == 15 and num_errors(5, 2) == 90 and num_errors(5, 3) == 270
    elapsed = time.perf_counter() - t0
    assert elapsed < 300
    report(5, ", ".join(f"{k}: d*={v}" for k, v in stars.items()) + f", {elapsed:.1f}s")


def test_criterion_06_asymmetric_rate_solver():
    t0 = time.perf_counter()
    px, py, pz = solve_asymmetric_rates(0.1, 0.5)
    elapsed = time.perf_counter() - t0
    assert pz == pytest.approx(0.085, abs=0.001)
    assert abs(2 * px + px**0.5 - 0.1) < 1e-12
    assert elapsed < 1
    report(6, f"p_x=p_y={px:.6f}, p_z={pz:.6f} (0.085), residual<1e-12, {elapsed * 1e3:.0f}ms")


@pytest.fixture(scope="module")
def trained_5q():
    """Criterion 7 training run; reused by criterion 9 when enabled."""
    return train_encoding(
        n=5, k=1, depth_blocks=12, layout=build_layout("full", 5),
        noise=DEPOL, stateset=two_design(1), seeds=SEEDS_20,
        cfg=OptimConfig(), workers=WORKERS,
    )


def test_criterion_07_training_regression(trained_5q):
    best = trained_5q.final["haar"].d_worst
    assert best <= 0.110
    assert trained_5q.wall_time < 2 * 3600
    report(7, f"[[5,1]] trained on depolarizing: best d_worst={best:.5f} <= 0.110 "
              f"(seed {trained_5q.best_seed}, {trained_5q.wall_time:.0f}s, 20 seeds)")


def test_criterion_08_bit_flip_parity():
    t0 = time.perf_counter()
    trained = train_encoding(
        n=3, k=1, depth_blocks=2, layout=build_layout("full", 3),
        noise=BITFLIP, stateset=two_design(1), seeds=SEEDS_20,
        cfg=OptimConfig(), workers=WORKERS,
    )
    repetition = dloss(haar_sample(1, 1000, seed=1905),
                       standard_encoder("bit_flip_3").circuit, BITFLIP).d_worst
    best = trained.final["haar"].d_worst
    elapsed = time.perf_counter() - t0
    assert best == pytest.approx(repetition, abs=2e-3)
    assert elapsed < 15 * 60
    report(8, f"[[3,1]] trained on bit-flip: d_worst={best:.5f} vs repetition "
              f"{repetition:.5f} (|diff|={abs(best - repetition):.2e}), {elapsed:.0f}s")


@pytest.mark.skipif(
    not os.environ.get("RUN_LONG_TESTS"),
    reason="criterion 9 is the documented long test (hours); set RUN_LONG_TESTS=1",
)
def test_criterion_09_recovery_regression(trained_5q):
    t0 = time.perf_counter()
    recovery = train_recovery(
        encoding=trained_5q, recovery_depth=200, r=0, noise=DEPOL,
        stateset=two_design(1), cfg=OptimConfig(epochs=50), recovery_seed=0,
    )
    f_worst = recovery.final["fidelity"].f_worst
    d_worst = recovery.final["encoder_haar"].d_worst
    lower, upper = fidelity_bounds(d_worst)
    elapsed = time.perf_counter() - t0
    assert f_worst <= 0.058
    assert lower - 1e-9 <= f_worst <= upper + 1e-9
    assert elapsed < 6 * 3600
    report(9, f"recovery on trained [[5,1]]: f_worst={f_worst:.5f} <= 0.058, "
              f"sandwich {lower:.4f} <= {f_worst:.4f} <= {upper:.4f}, {elapsed:.0f}s")


def test_criterion_10_property_suites():
    t0 = time.perf_counter()
    rng = np.random.default_rng(424242)

    # Kraus completeness across the parameter grid
    for p in np.linspace(0, 1, 21):
        for kind in ("bit_flip", "depolarizing", "correlated_depolarizing_2q"):
            build_channel(NoiseSpec(kind=kind, p=p))
        for kind in ("amplitude_damping", "phase_damping", "amp_phase_damping"):
            build_channel(NoiseSpec(kind=kind, gamma=p))
        if 0 < p < 1:
            build_channel(NoiseSpec(kind="asym_depolarizing", p=p, c=2.0))
    # (completeness is enforced by the KrausChannel constructor)

    # data-processing inequality: 1000 random (channel, pair) draws
    kinds = ("bit_flip", "depolarizing", "asym_depolarizing", "amplitude_damping",
             "phase_damping", "amp_phase_damping", "thermal_relaxation")
    for _ in range(1000):
        kind = kinds[rng.integers(len(kinds))]
        if kind == "thermal_relaxation":
            t1 = float(rng.uniform(50, 300))
            spec = NoiseSpec(kind=kind, t1_us=t1, t2_us=float(rng.uniform(1, 2 * t1)),
                             t_us=float(rng.uniform(0, 30)))
        elif kind == "asym_depolarizing":
            spec = NoiseSpec(kind=kind, p=float(rng.uniform(0.01, 0.99)),
                             c=float(rng.uniform(0.3, 3.0)))
        elif kind in ("amplitude_damping", "phase_damping", "amp_phase_damping"):
            spec = NoiseSpec(kind=kind, gamma=float(rng.uniform(0, 1)))
        else:
            spec = NoiseSpec(kind=kind, p=float(rng.uniform(0, 1)))
        noise = CompositeNoise(spec)
        a = random_density(2, rng)
        b = random_density(2, rng)
        assert qmat.trace_distance(apply(a, noise, check=False), apply(b, noise, check=False)) \
            <= qmat.trace_distance(a, b) + 1e-9

    # Fuchs-van de Graaf on 1000 random pairs
    for _ in range(1000):
        a = random_density(4, rng)
        b = random_density(4, rng)
        t = qmat.trace_distance(a, b)
        f = qmat.fidelity(a, b)
        assert 1 - np.sqrt(f) <= t + 1e-9
        assert t <= np.sqrt(1 - f) + 1e-9

    # trace-distance unitary invariance
    for _ in range(100):
        a = random_density(4, rng)
        b = random_density(4, rng)
        u = random_unitary(4, rng)
        assert qmat.trace_distance(qmat.conjugate(a, u), qmat.conjugate(b, u)) == \
            pytest.approx(qmat.trace_distance(a, b), abs=1e-9)

    # encode purity and trace-distance preservation
    layout = build_layout("full", 3)
    for seed in range(5):
        ansatz = generate_rea(3, 2, layout, seed)
        params = rng.uniform(-np.pi, np.pi, ansatz.num_params)
        a = qmat.pure_to_density(random_pure_state(2, rng))
        b = qmat.pure_to_density(random_pure_state(2, rng))
        ea = encode(a, (ansatz, params), 3)
        eb = encode(b, (ansatz, params), 3)
        assert qmat.purity(ea) == pytest.approx(1.0, abs=1e-9)
        assert qmat.trace_distance(ea, eb) == pytest.approx(
            qmat.trace_distance(a, b), abs=1e-10)

    # two-design second-moment check
    ts = two_design(1)
    for _ in range(20):
        phi = random_pure_state(2, rng)
        assert np.mean(np.abs(ts.states @ phi.conj()) ** 4) == pytest.approx(1 / 3, abs=1e-10)

    # determinism: generate_rea and a train_encoding smoke run
    assert generate_rea(4, 6, build_layout("full", 4), 9) == \
        generate_rea(4, 6, build_layout("full", 4), 9)
    smoke_kwargs = dict(
        n=2, k=1, depth_blocks=1, layout=build_layout("full", 2), noise=DEPOL,
        stateset=two_design(1), seeds=[0, 1], cfg=OptimConfig(epochs=1),
        eval_haar_count=100,
    )
    ra = train_encoding(**smoke_kwargs)
    rb = train_encoding(**smoke_kwargs)
    ja, jb = json.loads(ra.to_json()), json.loads(rb.to_json())
    ja.pop("wall_time")
    jb.pop("wall_time")
    assert ja == jb

    elapsed = time.perf_counter() - t0
    assert elapsed < 180
    report(10, f"property suites (completeness grid, data processing x1000, "
               f"FvdG x1000, invariance, encode, moments, determinism), {elapsed:.0f}s")
