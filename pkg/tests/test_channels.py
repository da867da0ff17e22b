import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kerrsim.branch import apply_cross_kerr, make_coherent_product
from kerrsim.channels import (
    SignalDensity,
    apply_probe_loss,
    apply_signal_loss,
    coherent_overlap,
)
from kerrsim.heterodyne import project_heterodyne

from oracles import (
    coherent_vector,
    partial_trace_second,
    two_mode_beamsplitter,
)

complex_amp = st.complex_numbers(max_magnitude=2.5, allow_nan=False,
                                 allow_infinity=False)


class TestCoherentOverlap:
    def test_self_overlap_is_one(self):
        assert coherent_overlap(1.3 - 0.2j, 1.3 - 0.2j) == pytest.approx(1.0)

    def test_vacuum_overlap(self):
        nu = 0.7 + 0.4j
        assert coherent_overlap(0.0, nu) == pytest.approx(
            math.exp(-abs(nu) ** 2 / 2)
        )

    def test_unit_and_i(self):
        assert coherent_overlap(1.0, 1.0j) == pytest.approx(np.exp(-1 + 1j))

    @given(mu=complex_amp, nu=complex_amp)
    @settings(max_examples=40, deadline=None)
    def test_magnitude_bounded_and_conjugate_symmetric(self, mu, nu):
        ov = coherent_overlap(mu, nu)
        assert abs(ov) <= 1.0 + 1e-12
        assert ov == pytest.approx(np.conj(coherent_overlap(nu, mu)), abs=1e-12)

    def test_against_fock_expansion(self):
        dim = 60
        for mu, nu in [(0.5, 1.5j), (1.2 - 0.3j, -0.7 + 0.9j), (2.0, 2.0)]:
            direct = np.vdot(coherent_vector(mu, dim), coherent_vector(nu, dim))
            assert coherent_overlap(mu, nu) == pytest.approx(direct, abs=1e-12)


class TestApplyProbeLoss:
    def _post_kerr(self, alpha=math.sqrt(10), beta=math.sqrt(10), phi0=0.4,
                   cutoff=60):
        return apply_cross_kerr(
            make_coherent_product(alpha, beta, cutoff), phi0
        )

    def test_lossless_identity(self):
        state = self._post_kerr()
        out = apply_probe_loss(state, 1.0)
        np.testing.assert_array_equal(out.probe_amps, state.probe_amps)
        np.testing.assert_array_equal(out.decoherence, state.decoherence)

    def test_full_loss_decoheres_into_environment(self):
        state = self._post_kerr(cutoff=50)
        out = apply_probe_loss(state, 0.0)
        np.testing.assert_allclose(out.probe_amps, 0.0, atol=1e-300)
        mu = state.probe_amps
        expected = coherent_overlap(mu[:, None], mu[None, :]).conj()
        np.testing.assert_allclose(out.decoherence, expected, atol=1e-12)

    def test_closed_form_offdiagonal(self):
        state = self._post_kerr()
        out = apply_probe_loss(state, 0.7)
        expected = math.exp(-(1 - 0.7) * 10.0 * (1 - math.cos(0.4)))
        assert abs(out.decoherence[0, 1]) == pytest.approx(expected, rel=1e-12)

    def test_against_beamsplitter_partial_trace(self):
        # one branch pair |mu_m><mu_n| (x) |0><0| through the beamsplitter
        state = self._post_kerr(alpha=1.4, beta=1.0, phi0=0.5, cutoff=18)
        out = apply_probe_loss(state, 0.6)
        dim = 24
        bs = two_mode_beamsplitter(0.6, dim)
        vac = np.zeros(dim, dtype=complex)
        vac[0] = 1.0
        for m, n in [(0, 0), (0, 1), (2, 5)]:
            mu_m, mu_n = state.probe_amps[m], state.probe_amps[n]
            joint = np.outer(
                bs @ np.kron(coherent_vector(mu_m, dim), vac),
                np.conj(bs @ np.kron(coherent_vector(mu_n, dim), vac)),
            )
            reduced = partial_trace_second(joint, dim)
            factor = out.decoherence[m, n] / state.decoherence[m, n]
            expected = factor * np.outer(
                coherent_vector(out.probe_amps[m], dim),
                np.conj(coherent_vector(out.probe_amps[n], dim)),
            )
            np.testing.assert_allclose(reduced, expected, atol=1e-10)

    def test_semigroup(self):
        state = self._post_kerr(cutoff=40)
        once = apply_probe_loss(state, 0.7 * 0.6)
        twice = apply_probe_loss(apply_probe_loss(state, 0.7), 0.6)
        np.testing.assert_allclose(once.decoherence, twice.decoherence, atol=1e-12)
        np.testing.assert_allclose(once.probe_amps, twice.probe_amps, atol=1e-12)

    def test_populations_and_diagonal_invariant(self):
        state = self._post_kerr(cutoff=40)
        out = apply_probe_loss(state, 0.35)
        assert out.norm_sq == pytest.approx(state.norm_sq, abs=0)
        np.testing.assert_allclose(np.diagonal(out.decoherence), 1.0, atol=1e-12)
        assert np.all(
            np.abs(out.decoherence) <= np.abs(state.decoherence) + 1e-12
        )

    def test_rejects_out_of_range(self):
        state = self._post_kerr(cutoff=50)
        with pytest.raises(ValueError):
            apply_probe_loss(state, 1.2)


def _coherent_density(gamma: complex, dim: int) -> SignalDensity:
    vec = coherent_vector(gamma, dim)
    return SignalDensity(rho=np.outer(vec, np.conj(vec)))


class TestApplySignalLoss:
    def test_identity_channel(self):
        rho = _coherent_density(1.2, 30)
        out = apply_signal_loss(rho, 1.0)
        np.testing.assert_array_equal(out.rho, rho.rho)

    def test_single_photon_binomial(self):
        one = np.zeros((4, 4), dtype=complex)
        one[1, 1] = 1.0
        out = apply_signal_loss(SignalDensity(rho=one), 0.5)
        assert out.rho[0, 0] == pytest.approx(0.5, abs=1e-14)
        assert out.rho[1, 1] == pytest.approx(0.5, abs=1e-14)

    def test_coherent_family_fixed_point(self):
        rho = _coherent_density(1.2, 45)
        out = apply_signal_loss(rho, 0.64)
        expected = _coherent_density(1.2 * 0.8, out.size)
        np.testing.assert_allclose(out.rho, expected.rho, atol=1e-8)

    def test_trace_preserved(self):
        state = apply_cross_kerr(make_coherent_product(1.5, 1.5, 30), 0.3)
        rho = project_heterodyne(state, 1.4).normalized()
        for eta in (0.9, 0.5, 0.17):
            out = apply_signal_loss(rho, eta)
            assert out.trace == pytest.approx(1.0, abs=1e-12)
            out.validate()

    def test_composition_law(self):
        rho = _coherent_density(1.0 + 0.5j, 35)
        a = apply_signal_loss(apply_signal_loss(rho, 0.8), 0.55)
        b = apply_signal_loss(rho, 0.8 * 0.55)
        n = min(a.size, b.size)
        np.testing.assert_allclose(a.rho[:n, :n], b.rho[:n, :n], atol=1e-10)

    def test_full_loss_gives_vacuum(self):
        rho = _coherent_density(1.5, 30)
        out = apply_signal_loss(rho, 0.0)
        assert out.size == 1
        assert out.rho[0, 0] == pytest.approx(1.0, abs=1e-12)

    def test_windowed_matches_full(self):
        beta = 10.0
        full = apply_cross_kerr(make_coherent_product(2.0, beta, 190), 0.01)
        part = apply_cross_kerr(
            make_coherent_product(2.0, beta, 190, n_min=10), 0.01
        )
        delta = 2.0 * np.exp(-1j * 0.01 * beta**2)
        rho_full = apply_signal_loss(project_heterodyne(full, delta).normalized(), 0.6)
        rho_part = apply_signal_loss(project_heterodyne(part, delta).normalized(), 0.6)
        lo = rho_part.n_min
        hi = lo + rho_part.size
        np.testing.assert_allclose(
            rho_full.rho[lo:hi, lo:hi], rho_part.rho, atol=1e-12
        )
        assert abs(rho_part.trace - rho_full.trace) < 1e-10

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            apply_signal_loss(_coherent_density(1.0, 20), -0.1)


class TestSignalDensity:
    def test_normalized_keeps_raw_trace(self):
        rho = _coherent_density(1.0, 25)
        scaled = SignalDensity(rho=0.3 * rho.rho, trace_raw=0.3)
        norm = scaled.normalized()
        assert norm.trace == pytest.approx(1.0)
        assert norm.trace_raw == 0.3

    def test_validate_rejects_non_hermitian(self):
        bad = np.array([[1.0, 0.5], [0.2, 0.0]], dtype=complex)
        with pytest.raises(ValueError, match="Hermitian"):
            SignalDensity(rho=bad).validate()

    def test_validate_rejects_negative_eigenvalue(self):
        bad = np.array([[0.2, 0.6], [0.6, 0.2]], dtype=complex)
        with pytest.raises(ValueError, match="negative"):
            SignalDensity(rho=bad).validate()
