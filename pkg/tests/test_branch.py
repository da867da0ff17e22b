import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kerrsim.branch import (
    BranchState,
    TruncationError,
    apply_cross_kerr,
    fock_cutoff,
    fock_window,
    make_coherent_product,
)

from oracles import poisson_tail_above


class TestFockCutoff:
    def test_vacuum(self):
        assert fock_cutoff(0.0, 8.0) == 10

    def test_sqrt30(self):
        cutoff = fock_cutoff(math.sqrt(30), 8.0)
        assert cutoff == 84
        assert poisson_tail_above(30.0, cutoff) < 1e-10

    def test_bright(self):
        cutoff = fock_cutoff(50.0, 8.0)
        assert cutoff == 2910
        assert poisson_tail_above(2500.0, cutoff) < 1e-10

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            fock_cutoff(-1.0)
        with pytest.raises(ValueError):
            fock_cutoff(1.0, 0.0)

    def test_window_tails(self):
        n_min, n_max = fock_window(10.0)
        assert n_min == 0 or n_min < 100 < n_max
        state = make_coherent_product(1.0, 10.0, n_max, n_min=n_min)
        assert state.deficit < 1e-10


class TestMakeCoherentProduct:
    def test_vacuum_signal(self):
        state = make_coherent_product(1.0, 0.0, 12)
        assert state.coeffs[0] == pytest.approx(1.0)
        assert np.all(state.coeffs[1:] == 0.0)
        assert np.all(state.probe_amps == 1.0)
        assert np.all(state.decoherence == 1.0)

    def test_norm_deficit_small(self):
        state = make_coherent_product(math.sqrt(10), math.sqrt(10), 60)
        # direct-summation oracle for the same coefficients
        direct = sum(
            math.exp(-10.0) * 10.0**n / math.factorial(n) for n in range(61)
        )
        assert state.norm_sq == pytest.approx(direct, abs=1e-14)
        assert -1e-12 < state.deficit < 1e-10

    def test_bright_poisson_mean(self):
        state = make_coherent_product(50.0, 50.0, fock_cutoff(50.0, 8.0))
        weights = np.abs(state.coeffs) ** 2
        mean = float(weights @ state.ns)
        assert mean == pytest.approx(2500.0, abs=1e-6)

    def test_windowed_layout_matches_full(self):
        full = make_coherent_product(2.0, 10.0, 190)
        part = make_coherent_product(2.0, 10.0, 190, n_min=10)
        np.testing.assert_allclose(part.coeffs, full.coeffs[10:], rtol=0, atol=0)
        assert part.cutoff == full.cutoff == 190
        assert part.ns[0] == 10

    def test_truncation_error_carries_deficit(self):
        with pytest.raises(TruncationError) as info:
            make_coherent_product(1.0, 3.0, 5)
        assert info.value.deficit > 1e-10
        assert info.value.deficit == pytest.approx(poisson_tail_above(9.0, 5), rel=1e-9)


class TestApplyCrossKerr:
    def test_zero_phase_identity(self):
        state = make_coherent_product(1.5, 1.0, 20)
        rotated = apply_cross_kerr(state, 0.0)
        np.testing.assert_array_equal(rotated.probe_amps, state.probe_amps)

    def test_branch_phases(self):
        state = make_coherent_product(math.sqrt(10), math.sqrt(10), 60)
        rotated = apply_cross_kerr(state, 0.4)
        assert rotated.probe_amps[5] == pytest.approx(
            math.sqrt(10) * np.exp(-2.0j), abs=1e-12
        )
        np.testing.assert_allclose(
            np.abs(rotated.probe_amps), math.sqrt(10), rtol=0, atol=1e-12
        )

    def test_mean_branch_rotation_wraps(self):
        cutoff = fock_cutoff(math.sqrt(30))
        state = make_coherent_product(math.sqrt(30), math.sqrt(30), cutoff)
        rotated = apply_cross_kerr(state, 0.4)
        phase = -np.angle(rotated.probe_amps[30]) % (2 * math.pi)
        assert phase == pytest.approx(12.0 - 2 * math.pi, abs=1e-12)
        assert phase == pytest.approx(5.716814, abs=1e-6)

    @given(phi=st.floats(-10.0, 10.0, allow_nan=False))
    @settings(max_examples=25, deadline=None)
    def test_preserves_norm_and_magnitudes(self, phi):
        state = make_coherent_product(1.2, 1.8, 25)
        rotated = apply_cross_kerr(state, phi)
        assert rotated.norm_sq == pytest.approx(state.norm_sq, abs=0)
        np.testing.assert_allclose(
            np.abs(rotated.probe_amps), np.abs(state.probe_amps), atol=1e-12
        )

    def test_reversible(self):
        state = make_coherent_product(2.0, 1.5, 30)
        back = apply_cross_kerr(apply_cross_kerr(state, 0.73), -0.73)
        np.testing.assert_allclose(back.probe_amps, state.probe_amps, atol=1e-13)

    def test_full_turn_disentangles(self):
        state = make_coherent_product(1.0, 1.5, 25)
        rotated = apply_cross_kerr(state, 2 * math.pi)
        np.testing.assert_allclose(rotated.probe_amps, 1.0, atol=1e-9)


class TestBranchState:
    def test_validate_passes_on_fresh_state(self):
        make_coherent_product(1.0, 1.0, 20).validate()

    def test_validate_rejects_bad_decoherence(self):
        state = make_coherent_product(1.0, 1.0, 20)
        bad = state.decoherence.copy()
        bad[0, 1] = 0.5
        broken = BranchState(state.coeffs, state.probe_amps, bad)
        with pytest.raises(ValueError, match="Hermitian"):
            broken.validate()

    def test_shape_mismatch_rejected(self):
        state = make_coherent_product(1.0, 1.0, 20)
        with pytest.raises(ValueError):
            BranchState(state.coeffs[:-1], state.probe_amps, state.decoherence)
