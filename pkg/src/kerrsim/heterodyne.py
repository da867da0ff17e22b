"""Noisy, binned heterodyne measurement of the probe.

An ideal heterodyne outcome is a coherent-state projection ``<delta'|.|delta'>``
drawn with Husimi density.  Binning the outcomes around a target ``delta``
with a Gaussian acceptance envelope, and technical phase noise on each
outcome, both wash the conditional state out in the same way: the sharp
projector is replaced by its average over a single Gaussian envelope whose
width is the quadrature sum of the sampling width and the phase-noise
contribution.  The averaged projection kernel has the closed form

    K(mu_m, mu_n; delta, Delta)
        = w * exp(-w * conj(delta - mu_n) * (delta - mu_m)) * <mu_n|mu_m>,
    w = 1 / (1 + 2 Delta^2),

which reduces exactly to the sharp kernel ``<delta|mu_m><mu_n|delta>`` at
``Delta = 0`` and costs O(1) per branch pair.  Acceptance statistics use the
sampling width only: noise scrambles outcomes but does not reject them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .branch import BranchState
from .channels import SignalDensity, coherent_overlap

# Raw traces below this are indistinguishable from a bin nothing ever lands in.
_UNDERFLOW = 1e-300


class EmptyBinError(ArithmeticError):
    """Post-selection bin so unlikely that its raw trace underflows."""


def envelope_width(epsilon: float, delta_phi: float, gamma: float) -> float:
    """Total Gaussian envelope width: sampling and phase noise in quadrature.

    ``Delta = sqrt(epsilon^2 + (gamma * tan(delta_phi / 2))^2)`` where
    ``gamma`` is the probe amplitude reaching the detector.
    """
    if epsilon < 0 or gamma < 0:
        raise ValueError("epsilon and gamma must be nonnegative")
    if not 0.0 <= delta_phi < math.pi:
        raise ValueError("delta_phi must lie in [0, pi)")
    return math.hypot(epsilon, gamma * math.tan(0.5 * delta_phi))


@dataclass(frozen=True)
class HeterodyneSettings:
    """Post-selection target and the widths entering the envelope.

    ``delta`` is the heterodyne-plane bin center, ``epsilon`` the sampling
    envelope width, ``delta_phi`` the technical phase noise and ``gamma`` the
    amplitude its contribution scales with (the post-loss probe amplitude).
    """

    delta: complex
    epsilon: float
    delta_phi: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")
        if not 0.0 <= self.delta_phi < math.pi:
            raise ValueError("delta_phi must lie in [0, pi)")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")

    @property
    def width(self) -> float:
        return envelope_width(self.epsilon, self.delta_phi, self.gamma)


def _kernel(mu_m, mu_n, delta: complex, w: float):
    """Projection kernel for envelope weight ``w = 1/(1 + 2 Delta^2)``."""
    dm = delta - mu_m
    dn = delta - mu_n
    with np.errstate(under="ignore"):
        return w * np.exp(-w * np.conj(dn) * dm) * coherent_overlap(mu_n, mu_m)


def averaged_projection_kernel(mu_m: complex, mu_n: complex,
                               delta: complex, width: float) -> complex:
    """Gaussian-envelope average of ``<delta'|mu_m><mu_n|delta'>``.

    Evaluates ``(1/2 pi width^2) * integral exp(-|d'-delta|^2 / 2 width^2)
    <d'|mu_m><mu_n|d'> d^2 d'`` in closed form.
    """
    if width <= 0:
        raise ValueError("width must be > 0")
    w = 1.0 / (1.0 + 2.0 * width * width)
    return complex(_kernel(mu_m, mu_n, delta, w))


def _project(state: BranchState, delta: complex, w: float) -> SignalDensity:
    mu = state.probe_amps
    kern = _kernel(mu[:, None], mu[None, :], delta, w)
    c = state.coeffs
    rho = (c[:, None] * np.conj(c)[None, :]) * state.decoherence * kern / math.pi
    trace = float(np.real(np.trace(rho)))
    if trace < _UNDERFLOW:
        raise EmptyBinError(
            f"post-selection at delta={delta} has vanishing density ({trace:.3e})"
        )
    return SignalDensity(rho=rho, n_min=state.n_min, trace_raw=trace)


def project_heterodyne(state: BranchState, delta: complex) -> SignalDensity:
    """Sharp coherent-state projection of the probe at outcome ``delta``.

    Returns the unnormalized conditional signal matrix
    ``rho[m,n] = c_m conj(c_n) D[m,n] <delta|mu_m><mu_n|delta> / pi`` whose
    raw trace is the Husimi density of the probe at ``delta``.
    """
    return _project(state, delta, 1.0)


def project_heterodyne_averaged(state: BranchState,
                                settings: HeterodyneSettings) -> SignalDensity:
    """Envelope-averaged projection: sharp kernel smoothed over width Delta."""
    width = settings.width
    w = 1.0 / (1.0 + 2.0 * width * width)
    return _project(state, settings.delta, w)


def postselection_probability(state: BranchState, delta: complex,
                              epsilon: float) -> float:
    """Probability that a heterodyne outcome falls in the acceptance envelope.

    An outcome ``delta'`` drawn with Husimi density is accepted with weight
    ``exp(-|delta'-delta|^2 / 2 epsilon^2)``; integrating out the outcome
    gives, per branch, ``(2 eps^2 / (1 + 2 eps^2)) *
    exp(-|mu_n - delta|^2 / (1 + 2 eps^2))``.  Only the sampling envelope
    selects; phase noise reshuffles outcomes without rejecting them.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    v = 1.0 / (1.0 + 2.0 * epsilon * epsilon)
    weights = np.abs(state.coeffs) ** 2
    with np.errstate(under="ignore"):
        accept = np.exp(-v * np.abs(state.probe_amps - delta) ** 2)
    return float((1.0 - v) * np.sum(weights * accept))
