"""Second-order coherence, two ways.

``g2_exact`` evaluates the Fock-basis definition
``Tr[rho a+ a+ a a] / Tr[rho a+ a]^2`` and serves as the oracle.  The
experimental estimate splits the state on a balanced beamsplitter and forms
``g2 = P_cc / (P_ca P_ac)`` from click/no-click probabilities, where a
detector clicks unless its mode is empty and no dark count fires.  With
``q = 1 - p_dark`` and vacuum probabilities ``P(na), P(an), P(nn)`` of the
split state,

    P_ca = 1 - P(na) q,   P_ac = 1 - P(an) q,
    P_cc = P_ac - P(na) q + P(nn) q^2,

the inclusion-exclusion combination that keeps probabilities nonnegative and
makes coherent states give exactly 1.  A real measurement would first
displace the state; the optimizer scans the displacement magnitude along the
squeezed principal axis for the deepest g2 dip.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy.linalg import expm

from .channels import SignalDensity
from .gaussian import (
    GaussianState,
    apply_symplectic,
    beamsplitter_symplectic,
    joint_vacuum_probability,
    reduce_mode,
    tensor,
    vacuum,
    williamson,
)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def g2_exact(rho: SignalDensity) -> float:
    """Fock-basis ``g2(0) = <a+ a+ a a> / <a+ a>^2`` of a signal matrix."""
    t = rho.trace
    if not t > 0:
        raise ValueError("density matrix trace must be positive")
    ns = rho.ns.astype(float)
    diag = np.real(np.diagonal(rho.rho)) / t
    n_mean = float(diag @ ns)
    if n_mean <= 0:
        raise ValueError("g2 undefined for zero mean photon number")
    pairs = float(diag @ (ns * (ns - 1.0)))
    return pairs / n_mean**2


class ClickProbabilities(NamedTuple):
    p_ca: float
    p_ac: float
    p_cc: float


def _split_vacuum_probs(g: GaussianState) -> tuple[float, float, float]:
    """Vacuum probabilities (mode 1, mode 2, joint) after a balanced split."""
    if g.n_modes != 1:
        raise ValueError("expected a single-mode state before the beamsplitter")
    split = apply_symplectic(tensor(g, vacuum(1)), beamsplitter_symplectic(0.5))
    p_na = joint_vacuum_probability(reduce_mode(split, 0))
    p_an = joint_vacuum_probability(reduce_mode(split, 1))
    p_nn = joint_vacuum_probability(split)
    return p_na, p_an, p_nn


def click_probabilities(g: GaussianState, p_dark: float) -> ClickProbabilities:
    """Singles and coincidence probabilities for the split-and-click setup."""
    if not 0.0 <= p_dark < 1.0:
        raise ValueError("p_dark must lie in [0, 1)")
    p_na, p_an, p_nn = _split_vacuum_probs(g)
    q = 1.0 - p_dark
    p_ca = 1.0 - p_na * q
    p_ac = 1.0 - p_an * q
    p_cc = p_ac - p_na * q + p_nn * q * q
    return ClickProbabilities(p_ca, p_ac, p_cc)


def g2_click(g: GaussianState, p_dark: float) -> float:
    """Click-model estimate ``P_cc / (P_ca P_ac)`` of g2(0)."""
    p = click_probabilities(g, p_dark)
    if p.p_ca * p.p_ac <= 0.0:
        raise ValueError("g2 undefined: a detector never clicks")
    return p.p_cc / (p.p_ca * p.p_ac)


def _displaced(g: GaussianState, n_disp: float, axis: float) -> GaussianState:
    """Same covariance, mean set to ``n_disp`` photons along ``axis``."""
    d = 2.0 * math.sqrt(n_disp)
    return GaussianState(g.cov, np.array([d * math.cos(axis), d * math.sin(axis)]))


def squeezed_axis(g: GaussianState) -> float:
    """Angle of the principal axis with the smaller quadrature variance."""
    _, _, theta = williamson(g)
    return theta + 0.5 * math.pi


def g2_at_displacement(g: GaussianState, p_dark: float, n_disp: float,
                       axis: float | None = None) -> float:
    """Click g2 after displacing to ``n_disp`` mean photons along ``axis``.

    ``axis`` defaults to the squeezed principal axis, the direction that
    turns quadrature squeezing into sub-Poissonian number statistics.
    """
    if n_disp < 0:
        raise ValueError("displacement photon number must be >= 0")
    if axis is None:
        axis = squeezed_axis(g)
    return g2_click(_displaced(g, n_disp, axis), p_dark)


def _golden_min(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    x = c if fc <= fd else d
    return x, min(fc, fd)


class DisplacementOptimum(NamedTuple):
    n_opt: float
    g2_min: float


def optimize_displacement(g: GaussianState, p_dark: float, *,
                          n_lo: float = 1e-3, n_hi: float = 4.0,
                          tol: float = 1e-4) -> DisplacementOptimum:
    """Minimize the click g2 over the displacement mean photon number.

    The displacement direction is aligned with a principal axis of the
    covariance matrix; both axes are tried and the squeezed one wins.  The
    magnitude is bracketed on ``[n_lo, n_hi]`` (g2 grows without bound as the
    displacement vanishes for squeezed states, so the lower edge is never the
    true optimum) and refined by golden-section search to ``tol``.
    """
    if g.n_modes != 1:
        raise ValueError("expected a single-mode state")
    theta = squeezed_axis(g)
    best: DisplacementOptimum | None = None
    for axis in (theta, theta - 0.5 * math.pi):
        def f(n_disp: float, _axis=axis) -> float:
            return g2_click(_displaced(g, n_disp, _axis), p_dark)

        grid = np.geomspace(n_lo, n_hi, 25)
        vals = [f(x) for x in grid]
        i = int(np.argmin(vals))
        lo = grid[max(i - 1, 0)]
        hi = grid[min(i + 1, len(grid) - 1)]
        x, fx = _golden_min(f, lo, hi, tol)
        if best is None or fx < best.g2_min:
            best = DisplacementOptimum(float(x), float(fx))
    return best


def g2_curvature(g: GaussianState, p_dark: float, n_opt: float,
                 step: float | None = None) -> float:
    """Second derivative of the click g2 at ``n_opt`` (flatness report).

    A small curvature means detector or laser miscalibration around the
    optimal displacement barely moves the measured g2.
    """
    axis = squeezed_axis(g)
    h = step if step is not None else max(1e-3, 0.05 * n_opt)

    def f(n_disp: float) -> float:
        return g2_click(_displaced(g, n_disp, axis), p_dark)

    return (f(n_opt + h) - 2.0 * f(n_opt) + f(max(n_opt - h, 1e-6))) / h**2


# -- Fock-basis oracle path ------------------------------------------------
#
# Splitting |n> against vacuum sends all photons to one output with
# probability 2^-n, and the joint output is empty only if the input was, so
# the exact click probabilities of a Fock matrix are one diagonal sum and one
# matrix element.  These bypass the Gaussian reduction entirely.

def fock_click_probabilities(rho: SignalDensity, p_dark: float) -> ClickProbabilities:
    """Exact split-and-click probabilities of a Fock-basis signal matrix."""
    if not 0.0 <= p_dark < 1.0:
        raise ValueError("p_dark must lie in [0, 1)")
    t = rho.trace
    if not t > 0:
        raise ValueError("density matrix trace must be positive")
    diag = np.real(np.diagonal(rho.rho)) / t
    with np.errstate(under="ignore"):
        p_single = float(diag @ np.exp(-math.log(2.0) * rho.ns))
    p_joint = float(np.real(rho.rho[0, 0]) / t) if rho.n_min == 0 else 0.0
    q = 1.0 - p_dark
    p_ca = 1.0 - p_single * q
    p_cc = p_ca - p_single * q + p_joint * q * q
    return ClickProbabilities(p_ca, p_ca, p_cc)


def g2_click_fock(rho: SignalDensity, p_dark: float) -> float:
    p = fock_click_probabilities(rho, p_dark)
    if p.p_ca * p.p_ac <= 0.0:
        raise ValueError("g2 undefined: a detector never clicks")
    return p.p_cc / (p.p_ca * p.p_ac)


def displace_fock(rho: SignalDensity, zeta: complex, *, pad: int = 30) -> SignalDensity:
    """Displace a Fock matrix by ``zeta`` (exact operator, padded cutoff)."""
    if rho.n_min != 0:
        raise ValueError("fock displacement needs a window starting at 0")
    dim = rho.size + pad
    a = np.diag(np.sqrt(np.arange(1.0, dim)), k=1)
    d_op = expm(zeta * a.conj().T - np.conj(zeta) * a)
    big = np.zeros((dim, dim), dtype=complex)
    big[:rho.size, :rho.size] = rho.rho
    out = d_op @ big @ d_op.conj().T
    return SignalDensity(rho=out, n_min=0, trace_raw=rho.trace_raw)


def fock_mean_amplitude(rho: SignalDensity) -> complex:
    """Normalized ``<a>`` of a Fock matrix (for centering before displacement)."""
    t = rho.trace
    ns = rho.ns.astype(float)
    return complex(np.sum(np.sqrt(ns[1:]) * np.diagonal(rho.rho, offset=-1)) / t)
