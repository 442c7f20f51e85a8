"""Noise channels: Kraus construction, rate solving, lifting, application."""

import numpy as np
import pytest
from scipy.optimize import brentq

from distqec import qmat
from distqec.channels import (
    CompositeNoise,
    KrausChannel,
    NoiseSpec,
    apply,
    build_channel,
    kraus_apply_batch,
    lift,
    noise_from_config,
    noise_to_config,
    solve_asymmetric_rates,
    thermal_relaxation_kraus,
)

from conftest import random_density


def completeness_deviation(channel):
    ops = channel.operators
    comp = np.einsum("kji,kjl->il", ops.conj(), ops)
    return np.max(np.abs(comp - np.eye(ops.shape[1])))


class TestBuildChannel:
    def test_depolarizing_noiseless_limit(self):
        ch = build_channel(NoiseSpec(kind="depolarizing", p=0.0))
        assert ch.operators.shape == (1, 2, 2)
        np.testing.assert_allclose(ch.operators[0], np.eye(2))

    def test_correlated_two_qubit_weights(self):
        p = 0.3
        ch = build_channel(NoiseSpec(kind="correlated_depolarizing_2q", p=p))
        assert ch.operators.shape == (16, 4, 4)
        np.testing.assert_allclose(ch.operators[0], np.sqrt(1 - p) * np.eye(4))
        for k in ch.operators[1:]:
            # each Pauli term carries weight p/15: tr K†K = 4 p / 15
            assert np.trace(k.conj().T @ k).real == pytest.approx(4 * p / 15)

    def test_bit_flip_fixes_plus_state(self):
        plus = qmat.pure_to_density(np.array([1, 1]) / np.sqrt(2))
        noisy = apply(plus, build_channel(NoiseSpec(kind="bit_flip", p=0.1)))
        np.testing.assert_allclose(noisy, plus, atol=1e-12)

    @pytest.mark.parametrize(
        "spec",
        [
            NoiseSpec(kind="bit_flip", p=0.25),
            NoiseSpec(kind="depolarizing", p=0.4),
            NoiseSpec(kind="asym_depolarizing", p=0.1, c=0.5),
            NoiseSpec(kind="amplitude_damping", gamma=0.3),
            NoiseSpec(kind="phase_damping", gamma=0.3),
            NoiseSpec(kind="amp_phase_damping", gamma=0.2),
            NoiseSpec(kind="thermal_relaxation", t1_us=200, t2_us=100, t_us=10),
            NoiseSpec(kind="correlated_depolarizing_2q", p=0.15),
        ],
    )
    def test_completeness(self, spec):
        assert completeness_deviation(build_channel(spec)) < 1e-10

    def test_completeness_parameter_grid(self):
        for p in np.linspace(0, 1, 21):
            for kind in ("bit_flip", "depolarizing", "correlated_depolarizing_2q"):
                assert completeness_deviation(build_channel(NoiseSpec(kind=kind, p=p))) < 1e-10
            for kind in ("amplitude_damping", "phase_damping", "amp_phase_damping"):
                assert completeness_deviation(build_channel(NoiseSpec(kind=kind, gamma=p))) < 1e-10
            if 0 < p < 1:
                spec = NoiseSpec(kind="asym_depolarizing", p=p, c=0.5)
                assert completeness_deviation(build_channel(spec)) < 1e-10


class TestNoiseSpecValidation:
    def test_rejects_bad_probability(self):
        with pytest.raises(ValueError):
            NoiseSpec(kind="bit_flip", p=1.2)

    def test_rejects_t2_above_twice_t1(self):
        with pytest.raises(ValueError):
            NoiseSpec(kind="thermal_relaxation", t1_us=100, t2_us=201, t_us=1)

    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError):
            NoiseSpec(kind="sparkle", p=0.1)

    def test_composite_rejects_two_qubit_per_qubit(self):
        with pytest.raises(ValueError):
            CompositeNoise(NoiseSpec(kind="correlated_depolarizing_2q", p=0.1))

    def test_composite_gate_noise_kind(self):
        with pytest.raises(ValueError):
            CompositeNoise(
                NoiseSpec(kind="depolarizing", p=0.1), NoiseSpec(kind="bit_flip", p=0.1)
            )


class TestAsymmetricRates:
    def test_symmetric_case(self):
        px, py, pz = solve_asymmetric_rates(0.1, 1.0)
        assert px == pytest.approx(1 / 30, abs=1e-12)
        assert py == pytest.approx(1 / 30, abs=1e-12)
        assert pz == pytest.approx(1 / 30, abs=1e-12)

    def test_phase_biased_rates(self):
        # c = 0.5 concentrates the budget on Z errors
        px, py, pz = solve_asymmetric_rates(0.1, 0.5)
        assert pz == pytest.approx(0.085, abs=1e-3)
        assert px == pytest.approx(0.0075, abs=5e-4)
        assert px == py
        assert abs(2 * px + px**0.5 - 0.1) < 1e-12

    def test_against_independent_root_finder(self):
        for p, c in [(0.1, 2.0), (0.3, 0.7), (0.05, 1.4)]:
            px, _, pz = solve_asymmetric_rates(p, c)
            ref = brentq(lambda x: 2 * x + x**c - p, 1e-15, p / 2, xtol=1e-15)
            assert px == pytest.approx(ref, abs=1e-10)
            assert 0 <= pz <= 1
        px_big, _, pz_big = solve_asymmetric_rates(0.1, 2.0)
        assert pz_big < px_big  # bit-flip dominated for c > 1

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            solve_asymmetric_rates(0.0, 1.0)
        with pytest.raises(ValueError):
            solve_asymmetric_rates(0.5, -1.0)


class TestThermalRelaxation:
    def test_zero_time_is_identity(self):
        ch = thermal_relaxation_kraus(200, 100, 0.0)
        assert ch.operators.shape == (1, 2, 2)
        np.testing.assert_allclose(ch.operators[0], np.eye(2))

    def test_bloch_contraction_factors(self):
        t1, t2, t = 200.0, 100.0, 10.0
        ch = thermal_relaxation_kraus(t1, t2, t)
        one = qmat.pure_to_density(qmat.basis_state(1, 1))
        plus = qmat.pure_to_density(np.array([1, 1]) / np.sqrt(2))
        pop = apply(one, ch)[1, 1].real
        coh = apply(plus, ch)[0, 1].real
        assert pop == pytest.approx(np.exp(-t / t1), abs=1e-12)
        assert 2 * coh == pytest.approx(np.exp(-t / t2), abs=1e-12)

    def test_t2_equal_2t1_pure_amplitude_damping(self):
        ch = thermal_relaxation_kraus(100, 200, 10)
        ref = build_channel(NoiseSpec(kind="amplitude_damping", gamma=1 - np.exp(-0.1)))
        one = qmat.pure_to_density(qmat.basis_state(1, 1))
        np.testing.assert_allclose(apply(one, ch), apply(one, ref), atol=1e-12)


class TestLiftAndApply:
    def test_lift_identity(self):
        ident = KrausChannel(1, np.eye(2)[None])
        lifted = lift(ident, [0], 3)
        assert lifted.num_qubits == 3
        np.testing.assert_allclose(lifted.operators[0], np.eye(8))

    def test_lift_bit_flip_on_second_qubit(self):
        p = 0.2
        ch = lift(build_channel(NoiseSpec(kind="bit_flip", p=p)), [1], 2)
        rho = qmat.pure_to_density(qmat.basis_state(0b00, 2))
        out = apply(rho, ch)
        expected = (1 - p) * rho + p * qmat.pure_to_density(qmat.basis_state(0b01, 2))
        np.testing.assert_allclose(out, expected, atol=1e-12)

    def test_lifted_correlated_completeness(self):
        ch = lift(build_channel(NoiseSpec(kind="correlated_depolarizing_2q", p=0.3)), [0, 2], 3)
        assert completeness_deviation(ch) < 1e-10

    def test_apply_depolarizing_closed_form(self, rng):
        p = 0.17
        rho = random_density(2, rng)
        out = apply(rho, CompositeNoise(NoiseSpec(kind="depolarizing", p=p)))
        expected = (1 - 4 * p / 3) * rho + (2 * p / 3) * np.eye(2)
        np.testing.assert_allclose(out, expected, atol=1e-12)

    def test_amplitude_damping_populations(self):
        gamma = 0.3
        one = qmat.pure_to_density(qmat.basis_state(1, 1))
        out = apply(one, build_channel(NoiseSpec(kind="amplitude_damping", gamma=gamma)))
        np.testing.assert_allclose(out, np.diag([gamma, 1 - gamma]), atol=1e-12)

    def test_unital_kinds_fix_maximally_mixed(self):
        mixed = np.eye(4) / 4
        for kind in ("bit_flip", "depolarizing"):
            out = apply(mixed, CompositeNoise(NoiseSpec(kind=kind, p=0.3)))
            np.testing.assert_allclose(out, mixed, atol=1e-12)

    def test_apply_preserves_trace_and_hermiticity(self, rng):
        for _ in range(20):
            rho = random_density(4, rng)
            out = apply(rho, CompositeNoise(NoiseSpec(kind="amp_phase_damping", gamma=0.25)))
            assert out.trace().real == pytest.approx(1.0, abs=1e-10)
            assert np.max(np.abs(out - out.conj().T)) < 1e-10

    def test_composite_order_independence(self, rng):
        # single-qubit channels on disjoint qubits commute
        rho = random_density(8, rng)
        spec = NoiseSpec(kind="amp_phase_damping", gamma=0.2)
        ops = build_channel(spec).operators
        forward = rho[None]
        backward = rho[None]
        for q in range(3):
            forward = kraus_apply_batch(forward, ops, (q,), 3)
        for q in reversed(range(3)):
            backward = kraus_apply_batch(backward, ops, (q,), 3)
        np.testing.assert_allclose(forward, backward, atol=1e-12)

    def test_dimension_mismatch(self, rng):
        ch = build_channel(NoiseSpec(kind="bit_flip", p=0.1))
        with pytest.raises(ValueError):
            apply(random_density(4, rng), ch)


class TestDataProcessing:
    def test_trace_distance_contracts_under_channels(self, rng):
        # spot check here; the 1000-draw sweep runs in the acceptance suite
        specs = [
            NoiseSpec(kind="bit_flip", p=0.2),
            NoiseSpec(kind="depolarizing", p=0.15),
            NoiseSpec(kind="amplitude_damping", gamma=0.35),
            NoiseSpec(kind="thermal_relaxation", t1_us=150, t2_us=90, t_us=20),
        ]
        for spec in specs:
            for _ in range(25):
                a = random_density(2, rng)
                b = random_density(2, rng)
                noise = CompositeNoise(spec)
                before = qmat.trace_distance(a, b)
                after = qmat.trace_distance(apply(a, noise), apply(b, noise))
                assert after <= before + 1e-9


class TestConfigRoundTrip:
    def test_round_trip(self):
        noise = CompositeNoise(
            NoiseSpec(kind="asym_depolarizing", p=0.1, c=0.5),
            NoiseSpec(kind="correlated_depolarizing_2q", p=0.02),
        )
        again = noise_from_config(noise_to_config(noise))
        assert again == noise

    def test_rejects_unknown_keys(self):
        with pytest.raises(ValueError):
            noise_from_config({"kind": "bit_flip", "p": 0.1, "fancy": True})
