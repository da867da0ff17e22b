"""Coherent-branch representation of the Kerr-entangled two-mode state.

A product of coherent states ``|beta>|alpha>`` expanded over the signal Fock
basis stays, under cross-Kerr evolution, photon loss and heterodyne
projection, within the family

    rho = sum_{m,n} c_m conj(c_n) D[m,n] |m><n| (x) |mu_m><mu_n|,

where ``c_n`` are the signal Fock amplitudes, ``mu_n`` the per-branch probe
coherent amplitudes and ``D`` a Hermitian matrix of pairwise decoherence
factors (all ones for a pure state).  Every probe operation then reduces to
closed-form coherent-state overlaps, which is what keeps amplitudes of 50-70
tractable: the signal arrays are O(N) and only pairwise matrices are O(N^2).

Branch arrays may start at a nonzero Fock index ``n_min``: for a bright
signal the Poisson weight is concentrated in ``beta^2 +- k*beta`` and the
discarded tails are checked against the truncation tolerance, never assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import gammaln


class TruncationError(ValueError):
    """Fock-space truncation discards more weight than the tolerance allows."""

    def __init__(self, deficit: float, tol: float):
        self.deficit = deficit
        self.tol = tol
        super().__init__(
            f"truncated weight {deficit:.3e} exceeds tolerance {tol:.3e}"
        )


def fock_cutoff(beta: float, k_sigma: float = 8.0) -> int:
    """Upper Fock index needed to hold a coherent state of amplitude ``beta``.

    Returns ``ceil(beta^2 + k_sigma*beta + 10)``; with the default
    ``k_sigma = 8`` the omitted Poisson tail mass stays below 1e-10.
    """
    if beta < 0:
        raise ValueError("beta must be >= 0")
    if k_sigma <= 0:
        raise ValueError("k_sigma must be > 0")
    return math.ceil(beta * beta + k_sigma * beta + 10.0)


def fock_window(beta: float, k_sigma: float = 8.0) -> tuple[int, int]:
    """Two-sided Fock support window ``(n_min, n_max)`` for amplitude ``beta``.

    The upper edge is :func:`fock_cutoff`; the lower edge mirrors it below the
    Poisson mean.  The weight outside the window is symmetric-tail small and
    is re-checked by :func:`make_coherent_product`.
    """
    n_max = fock_cutoff(beta, k_sigma)
    n_min = max(0, math.floor(beta * beta - k_sigma * beta - 10.0))
    return n_min, n_max


@dataclass(frozen=True)
class BranchState:
    """Signal-Fock-indexed coherent branches of the two-mode state.

    ``coeffs[i]``, ``probe_amps[i]`` and ``decoherence[i, j]`` refer to the
    absolute Fock indices ``n_min + i`` and ``n_min + j``.  Treat instances as
    immutable; operations return new states.
    """

    coeffs: np.ndarray
    probe_amps: np.ndarray
    decoherence: np.ndarray
    n_min: int = 0

    def __post_init__(self):
        n = len(self.coeffs)
        if len(self.probe_amps) != n or self.decoherence.shape != (n, n):
            raise ValueError("branch array sizes disagree")
        if self.n_min < 0:
            raise ValueError("n_min must be >= 0")

    @property
    def size(self) -> int:
        return len(self.coeffs)

    @property
    def cutoff(self) -> int:
        """Largest absolute Fock index stored."""
        return self.n_min + self.size - 1

    @property
    def ns(self) -> np.ndarray:
        """Absolute Fock indices of the stored branches."""
        return np.arange(self.n_min, self.n_min + self.size)

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))

    @property
    def deficit(self) -> float:
        """Weight lost to truncation, ``1 - sum |c_n|^2``."""
        return 1.0 - self.norm_sq

    def validate(self, tol: float = 1e-10) -> None:
        """Check the representation invariants within ``tol``."""
        if self.deficit > tol:
            raise TruncationError(self.deficit, tol)
        d = self.decoherence
        if not np.allclose(d, d.conj().T, atol=1e-12):
            raise ValueError("decoherence matrix is not Hermitian")
        if not np.allclose(np.diagonal(d), 1.0, atol=1e-12):
            raise ValueError("decoherence diagonal must stay 1")


def make_coherent_product(alpha: float, beta: float, cutoff: int, *,
                          n_min: int = 0,
                          trunc_tol: float = 1e-10) -> BranchState:
    """Build the initial product ``|beta>|alpha>`` in branch form.

    Signal amplitudes ``c_n = exp(-beta^2/2) beta^n / sqrt(n!)`` are laid out
    on Fock indices ``n_min .. cutoff``; every branch carries the same probe
    amplitude ``alpha`` and the decoherence matrix starts at all ones.

    Raises
    ------
    TruncationError
        If the stored window misses more than ``trunc_tol`` of the weight.
    """
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    if cutoff < n_min:
        raise ValueError("cutoff must be >= n_min")
    ns = np.arange(n_min, cutoff + 1)
    if beta == 0.0:
        coeffs = np.zeros(len(ns), dtype=complex)
        if n_min == 0:
            coeffs[0] = 1.0
    else:
        # log-space keeps beta ~ 70 (n ~ 5000) finite
        log_c = -0.5 * beta * beta + ns * math.log(beta) - 0.5 * gammaln(ns + 1.0)
        with np.errstate(under="ignore"):
            coeffs = np.exp(log_c).astype(complex)
    state = BranchState(
        coeffs=coeffs,
        probe_amps=np.full(len(ns), alpha, dtype=complex),
        decoherence=np.ones((len(ns), len(ns)), dtype=complex),
        n_min=n_min,
    )
    if state.deficit > trunc_tol:
        raise TruncationError(state.deficit, trunc_tol)
    return state


def apply_cross_kerr(state: BranchState, phi0: float) -> BranchState:
    """Rotate each probe branch by the photon-number-dependent Kerr phase.

    ``mu_n -> mu_n * exp(-i*phi0*n)``; signal amplitudes and decoherence are
    untouched.  Exact within the stored truncation.
    """
    phases = np.exp(-1j * phi0 * state.ns)
    return replace(state, probe_amps=state.probe_amps * phases)
