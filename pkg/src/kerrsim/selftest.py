"""Quick self-contained property suite behind ``kerrsim selftest``.

A fast subset of the package invariants, runnable without pytest: channel
semigroups, kernel limits, Williamson round trips, click-model anchors and
the Gaussian-vs-Fock pipeline cross-check on a down-scaled configuration.
"""

from __future__ import annotations

import math

import numpy as np

from .branch import apply_cross_kerr, make_coherent_product
from .channels import apply_probe_loss, apply_signal_loss, SignalDensity
from .gaussian import (
    GaussianState,
    apply_symplectic,
    beamsplitter_symplectic,
    joint_vacuum_probability,
    moments_from_density,
    symplectic_form,
    vacuum,
    williamson,
)
from .harness import compare_gaussian_vs_fock
from .heterodyne import HeterodyneSettings, project_heterodyne, project_heterodyne_averaged, postselection_probability
from .params import Parameters
from .photon_stats import g2_click, g2_exact


def _small_state():
    state = make_coherent_product(2.0, 1.5, 40)
    return apply_probe_loss(apply_cross_kerr(state, 0.3), 0.8)


def _checks():
    yield "kerr norm and reversibility", _check_kerr
    yield "probe loss semigroup", _check_probe_semigroup
    yield "signal loss trace and composition", _check_signal_loss
    yield "averaged kernel sharp limit", _check_sharp_limit
    yield "post-selection monotone in epsilon", _check_postselection
    yield "williamson round trip", _check_williamson
    yield "beamsplitter symplectic", _check_beamsplitter
    yield "vacuum probabilities", _check_vacuum_probs
    yield "g2 anchors", _check_g2_anchors
    yield "gaussian vs fock pipeline", _check_gaussian_vs_fock


def _check_kerr() -> float:
    state = make_coherent_product(1.0, 2.0, 40)
    rotated = apply_cross_kerr(state, 0.7)
    back = apply_cross_kerr(rotated, -0.7)
    err = float(np.abs(back.probe_amps - state.probe_amps).max())
    err = max(err, abs(rotated.norm_sq - state.norm_sq))
    assert err < 1e-12, err
    return err


def _check_probe_semigroup() -> float:
    state = apply_cross_kerr(make_coherent_product(1.5, 1.0, 25), 0.4)
    once = apply_probe_loss(state, 0.7 * 0.6)
    twice = apply_probe_loss(apply_probe_loss(state, 0.7), 0.6)
    err = float(np.abs(once.decoherence - twice.decoherence).max())
    err = max(err, float(np.abs(once.probe_amps - twice.probe_amps).max()))
    assert err < 1e-12, err
    return err


def _check_signal_loss() -> float:
    rho = project_heterodyne(_small_state(), 1.5).normalized()
    lossy = apply_signal_loss(rho, 0.6)
    err = abs(lossy.trace - 1.0)
    a = apply_signal_loss(apply_signal_loss(rho, 0.9), 0.7)
    b = apply_signal_loss(rho, 0.63)
    n = min(a.size, b.size)
    err = max(err, float(np.abs(a.rho[:n, :n] - b.rho[:n, :n]).max()))
    assert err < 1e-10, err
    return err


def _check_sharp_limit() -> float:
    state = _small_state()
    sharp = project_heterodyne(state, 1.2 + 0.4j)
    settings = HeterodyneSettings(delta=1.2 + 0.4j, epsilon=1e-4)
    smooth = project_heterodyne_averaged(state, settings)
    err = float(np.abs(smooth.rho - sharp.rho).max() / np.abs(sharp.rho).max())
    assert err < 1e-6, err
    return err


def _check_postselection() -> float:
    state = _small_state()
    probs = [postselection_probability(state, 1.2 + 0.4j, eps)
             for eps in (0.1, 0.3, 1.0, 3.0, 1e6)]
    assert all(b >= a for a, b in zip(probs, probs[1:])), probs
    assert abs(probs[-1] - 1.0) < 1e-6, probs[-1]
    return abs(probs[-1] - 1.0)


def _check_williamson() -> float:
    rng = np.random.default_rng(7)
    err = 0.0
    for _ in range(20):
        r = rng.uniform(0.0, 1.2)
        v = rng.uniform(1.0, 3.0)
        th = rng.uniform(0.0, math.pi)
        c, s = math.cos(th), math.sin(th)
        rot = np.array([[c, -s], [s, c]])
        m = v * rot @ np.diag([math.exp(2 * r), math.exp(-2 * r)]) @ rot.T
        r2, v2, th2 = williamson(GaussianState(m, np.zeros(2)))
        c2, s2 = math.cos(th2), math.sin(th2)
        rot2 = np.array([[c2, -s2], [s2, c2]])
        m2 = v2 * rot2 @ np.diag([math.exp(2 * r2), math.exp(-2 * r2)]) @ rot2.T
        err = max(err, float(np.abs(m2 - m).max()))
    assert err < 1e-10, err
    return err


def _check_beamsplitter() -> float:
    omega = symplectic_form(2)
    err = 0.0
    for t in (0.0, 0.37, 0.5, 1.0):
        s = beamsplitter_symplectic(t)
        err = max(err, float(np.abs(s @ omega @ s.T - omega).max()))
    two_vac = apply_symplectic(vacuum(2), beamsplitter_symplectic(0.5))
    err = max(err, float(np.abs(two_vac.cov - np.eye(4)).max()))
    assert err < 1e-12, err
    return err


def _check_vacuum_probs() -> float:
    nbar = 0.8
    coh = GaussianState(np.eye(2), np.array([2 * math.sqrt(nbar), 0.0]))
    err = abs(joint_vacuum_probability(coh) - math.exp(-nbar))
    thermal = GaussianState((2 * nbar + 1) * np.eye(2), np.zeros(2))
    err = max(err, abs(joint_vacuum_probability(thermal) - 1 / (1 + nbar)))
    assert err < 1e-12, err
    return err


def _check_g2_anchors() -> float:
    err = 0.0
    for amp in (0.3, 1.0, 2.5):
        coh = GaussianState(np.eye(2), np.array([2 * amp, 0.0]))
        err = max(err, abs(g2_click(coh, 0.0) - 1.0))
    one = np.zeros((3, 3), dtype=complex)
    one[1, 1] = 1.0
    err = max(err, abs(g2_exact(SignalDensity(rho=one))))
    nbar = 0.4
    ns = np.arange(120)
    pops = (nbar / (1 + nbar)) ** ns / (1 + nbar)
    err = max(err, abs(g2_exact(SignalDensity(rho=np.diag(pops.astype(complex)))) - 2.0))
    assert err < 1e-6, err
    return err


def _check_gaussian_vs_fock() -> float:
    params = Parameters(eta=0.6, nu=0.7, delta_phi=0.005, epsilon=0.3,
                        p_dark=0.0, phi0=0.098 / 25.0, alpha=5.0, beta=5.0)
    g2_gauss, g2_fock, rel = compare_gaussian_vs_fock(params)
    assert rel < 0.05, (g2_gauss, g2_fock, rel)
    return rel


def run_selftest(verbose: bool = True) -> int:
    """Run every quick check; returns the number of failures."""
    failures = 0
    for name, check in _checks():
        try:
            err = check()
            if verbose:
                print(f"PASS {name} (err {err:.3g})")
        except AssertionError as exc:
            failures += 1
            if verbose:
                print(f"FAIL {name}: {exc}")
        except Exception as exc:  # pragma: no cover - diagnostic path
            failures += 1
            if verbose:
                print(f"FAIL {name}: {type(exc).__name__}: {exc}")
    if verbose:
        print("selftest:", "all checks passed" if failures == 0
              else f"{failures} check(s) failed")
    return failures
