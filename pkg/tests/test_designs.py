"""State ensembles: two-designs, Haar samples, weighted variants."""

import numpy as np
import pytest

from distqec import qmat
from distqec.designs import (
    amplitude_damping_weights,
    haar_sample,
    two_design,
    weighted,
)

from conftest import random_pure_state


class TestTwoDesign:
    def test_single_qubit_set(self):
        ts = two_design(1)
        assert len(ts) == 6
        overlaps = np.abs(ts.states @ ts.states.conj().T) ** 2
        off = overlaps[~np.eye(6, dtype=bool)]
        assert set(np.round(off, 12)) <= {0.0, 0.5}

    def test_two_qubit_set(self):
        ts = two_design(2)
        assert len(ts) == 16
        np.testing.assert_allclose(np.linalg.norm(ts.states, axis=1), 1.0, atol=1e-12)
        # exactly 4 states carry one ebit of entanglement entropy
        entropies = []
        for psi in ts.states:
            marg = qmat.partial_trace(qmat.pure_to_density(psi), [0])
            w = np.clip(qmat.hermitian_eigvals(marg), 1e-16, None)
            entropies.append(float(-(w * np.log(w)).sum()))
        entangled = [e for e in entropies if e > 1e-9]
        assert len(entangled) == 4
        np.testing.assert_allclose(entangled, np.log(2), atol=1e-9)

    def test_second_moment_matches_haar(self, rng):
        # for any fixed state, the set average of |<psi|phi>|^4 equals the
        # Haar moment 2/(d(d+1)); closed form for d=2 is 1/3
        ts = two_design(1)
        for _ in range(10):
            phi = random_pure_state(2, rng)
            moment = np.mean(np.abs(ts.states @ phi.conj()) ** 4)
            assert moment == pytest.approx(1 / 3, abs=1e-10)

    def test_single_qubit_frame_operator_exact(self):
        # (1/|S|) sum (ss†)^⊗2 equals the Haar frame (I + SWAP)/(d(d+1))
        ts = two_design(1)
        frame = sum(
            np.kron(qmat.pure_to_density(s), qmat.pure_to_density(s)) for s in ts.states
        ) / len(ts)
        swap = np.eye(4)[[0, 2, 1, 3]]
        np.testing.assert_allclose(frame, (np.eye(4) + swap) / 6, atol=1e-12)

    def test_two_qubit_set_is_only_approximately_a_design(self):
        # the 12-product + 4-Bell listing covers 4 of the 5 mutually
        # unbiased bases of d=4 and misses the exact 2-design property;
        # the frame deviation is pinned so a silent change would be seen
        ts = two_design(2)
        frame = sum(
            np.kron(qmat.pure_to_density(s), qmat.pure_to_density(s)) for s in ts.states
        ) / len(ts)
        swap = np.zeros((16, 16))
        for i in range(4):
            for j in range(4):
                swap[i * 4 + j, j * 4 + i] = 1
        deviation = np.max(np.abs(frame - (np.eye(16) + swap) / 20))
        assert deviation == pytest.approx(0.0625, abs=1e-12)

    def test_unsupported_k(self):
        with pytest.raises(ValueError, match="k in"):
            two_design(3)


class TestHaarSample:
    def test_determinism(self):
        a = haar_sample(1, 50, seed=9)
        b = haar_sample(1, 50, seed=9)
        np.testing.assert_array_equal(a.states, b.states)
        c = haar_sample(1, 50, seed=10)
        assert not np.allclose(a.states, c.states)

    def test_mean_pairwise_trace_distance_single_qubit(self):
        # Haar average of T is (d-1)/(d-1/2) = 2/3 for qubits
        sample = haar_sample(1, 4000, seed=3)
        half = 2000
        a, b = sample.states[:half], sample.states[half:]
        t = np.sqrt(1 - np.abs(np.einsum("si,si->s", a.conj(), b)) ** 2)
        assert t.mean() == pytest.approx(2 / 3, abs=0.02)

    def test_mean_squared_overlap(self):
        # |<psi|phi>|^2 ~ Beta(1, d-1); mean 1/d
        sample = haar_sample(1, 5000, seed=4)
        phi = np.array([1.0, 0.0])
        ov = np.abs(sample.states @ phi.conj()) ** 2
        assert ov.mean() == pytest.approx(0.5, abs=0.02)

    def test_estimator_convergence_rate(self):
        # doubling the sample count shrinks the std error by ~1/sqrt(2)
        def stderr(count, seed):
            s = haar_sample(1, 2 * count, seed=seed)
            a, b = s.states[:count], s.states[count:]
            t = np.sqrt(np.clip(1 - np.abs(np.einsum("si,si->s", a.conj(), b)) ** 2, 0, None))
            return t.std(ddof=1) / np.sqrt(count)

        small = np.mean([stderr(2000, s) for s in range(8)])
        big = np.mean([stderr(4000, s) for s in range(8)])
        assert big / small == pytest.approx(1 / np.sqrt(2), rel=0.15)


class TestAxisSymmetry:
    def test_loss_invariant_under_bloch_axis_relabeling(self):
        # the 6-state set is one antipodal pair per Bloch axis; permuting
        # the axes must leave both losses unchanged when the channel is
        # symmetric depolarizing
        from distqec.channels import CompositeNoise, NoiseSpec
        from distqec.designs import StateSet
        from distqec.loss import dloss

        noise = CompositeNoise(NoiseSpec(kind="depolarizing", p=0.13))
        base = two_design(1)
        ref = dloss(base, None, noise)
        for order in [(2, 3, 4, 5, 0, 1), (4, 5, 0, 1, 2, 3), (2, 3, 0, 1, 4, 5)]:
            permuted = StateSet(
                k=1, states=base.states[list(order)], weights=np.ones(6), kind="two_design"
            )
            rep = dloss(permuted, None, noise)
            assert rep.d_avg == pytest.approx(ref.d_avg, abs=1e-12)
            assert rep.d_worst == pytest.approx(ref.d_worst, abs=1e-12)


class TestWeighted:
    def test_equal_weights_unchanged(self):
        base = two_design(1)
        w = weighted(base, np.full(6, 2.0))
        np.testing.assert_allclose(w.weights, np.ones(6))
        assert w.kind == "weighted_two_design"

    def test_amplitude_damping_preset(self):
        w = weighted(two_design(1), amplitude_damping_weights())
        np.testing.assert_allclose(w.weights, [0.95, 1.05, 1, 1, 1, 1])
        assert w.weights.sum() == pytest.approx(6.0)

    def test_rescaling(self):
        w = weighted(two_design(1), np.full(6, 2.0))
        np.testing.assert_allclose(w.weights, np.ones(6))

    def test_all_zero_rejected(self):
        with pytest.raises(ValueError):
            weighted(two_design(1), np.zeros(6))
