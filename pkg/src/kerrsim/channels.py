"""Photon-loss channels for both arms.

Probe loss acts analytically on the coherent branches: a beamsplitter sends
``|mu> -> |sqrt(nu) mu>`` and tracing the environment multiplies each branch
pair by the overlap of the environment states, shrinking off-diagonal
decoherence factors while leaving populations alone.  Signal loss is the
standard amplitude-damping Kraus sum on the Fock density matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import gammaln

from .branch import BranchState


def coherent_overlap(mu: complex, nu: complex) -> complex:
    """Overlap ``<mu|nu>`` of two coherent states.

    ``<mu|nu> = exp(-|mu|^2/2 - |nu|^2/2 + conj(mu)*nu)``; magnitude <= 1.
    Accepts scalars or broadcastable arrays.
    """
    mu = np.asarray(mu, dtype=complex)
    nu = np.asarray(nu, dtype=complex)
    with np.errstate(under="ignore"):
        out = np.exp(-0.5 * (np.abs(mu) ** 2 + np.abs(nu) ** 2) + np.conj(mu) * nu)
    return out if out.ndim else complex(out)


def apply_probe_loss(state: BranchState, nu: float) -> BranchState:
    """Transmit the probe through a beamsplitter of transmission ``nu``.

    ``mu_n -> sqrt(nu) mu_n`` and ``D[m,n] -> D[m,n] * <l mu_n | l mu_m>``
    with ``l = sqrt(1-nu)``, i.e. populations (the diagonal) are untouched and
    the coherences pick up the environment-overlap penalty.
    """
    if not 0.0 <= nu <= 1.0:
        raise ValueError(f"probe transmission must lie in [0, 1], got {nu}")
    if nu == 1.0:
        return state
    lost = math.sqrt(1.0 - nu) * state.probe_amps
    overlap = coherent_overlap(lost[:, None], lost[None, :]).conj()
    return replace(
        state,
        probe_amps=math.sqrt(nu) * state.probe_amps,
        decoherence=state.decoherence * overlap,
    )


@dataclass(frozen=True)
class SignalDensity:
    """Truncated Fock-basis density matrix of the signal mode.

    ``rho[i, j]`` refers to absolute Fock indices ``n_min + i`` and
    ``n_min + j``.  The matrix is kept unnormalized as produced by
    post-selection; ``trace_raw`` records the raw trace (the post-selection
    density) even after :meth:`normalized`.
    """

    rho: np.ndarray
    n_min: int = 0
    trace_raw: float = 1.0

    def __post_init__(self):
        if self.rho.ndim != 2 or self.rho.shape[0] != self.rho.shape[1]:
            raise ValueError("rho must be square")
        if self.n_min < 0:
            raise ValueError("n_min must be >= 0")

    @property
    def size(self) -> int:
        return self.rho.shape[0]

    @property
    def cutoff(self) -> int:
        return self.n_min + self.size - 1

    @property
    def ns(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_min + self.size)

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.rho)))

    @property
    def populations(self) -> np.ndarray:
        return np.real(np.diagonal(self.rho))

    def normalized(self) -> "SignalDensity":
        """Rescale to unit trace; ``trace_raw`` keeps the original weight."""
        t = self.trace
        if t <= 0.0:
            raise ValueError("cannot normalize a non-positive trace")
        return replace(self, rho=self.rho / t)

    def validate(self, psd_tol: float = 1e-10) -> None:
        """Check Hermiticity and numerical positive semidefiniteness."""
        scale = max(float(np.abs(self.rho).max()), 1e-300)
        if not np.allclose(self.rho, self.rho.conj().T, atol=1e-12 * scale):
            raise ValueError("rho is not Hermitian")
        h = 0.5 * (self.rho + self.rho.conj().T)
        lo = float(np.linalg.eigvalsh(h).min())
        if lo < -psd_tol * max(self.trace, scale):
            raise ValueError(f"rho has negative eigenvalue {lo:.3e}")


def _damping_weights(ns: np.ndarray, k: int, eta: float) -> np.ndarray:
    """Per-index factors ``sqrt(C(n,k) eta^(n-k) (1-eta)^k)`` for one Kraus term."""
    log_w = 0.5 * (
        gammaln(ns + 1.0) - gammaln(k + 1.0) - gammaln(ns - k + 1.0)
        + (ns - k) * math.log(eta) + k * math.log1p(-eta)
    )
    with np.errstate(under="ignore"):
        return np.exp(log_w)


def _kraus_range(ns: np.ndarray, eta: float, guard: float = 9.0) -> tuple[int, int]:
    # k ~ Binomial(n, 1-eta); beyond guard sigmas the per-term weight is
    # < exp(-guard^2/2) ~ 3e-18, so the dropped mass stays below 1e-13.
    p = 1.0 - eta
    lo_mean = ns[0] * p
    hi_mean = ns[-1] * p
    sigma = math.sqrt(max(ns[-1] * p * eta, 1.0))
    k_lo = max(0, math.floor(lo_mean - guard * sigma - 10))
    k_hi = min(int(ns[-1]), math.ceil(hi_mean + guard * sigma + 10))
    return k_lo, k_hi


def apply_signal_loss(rho: SignalDensity, eta: float) -> SignalDensity:
    """Amplitude-damping channel of transmission ``eta`` on the signal mode.

    Implements ``rho -> sum_k A_k rho A_k^dag`` with
    ``A_k |n> = sqrt(C(n,k) eta^(n-k) (1-eta)^k) |n-k>``.  The Kraus sum runs
    over every ``k`` carrying weight above double-precision noise (all of
    them for a window starting at 0), preserving the trace to better than
    1e-12.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"signal transmission must lie in [0, 1], got {eta}")
    if eta == 1.0:
        return rho
    if eta == 0.0:
        out = np.zeros((1, 1), dtype=complex)
        out[0, 0] = rho.trace
        return SignalDensity(rho=out, n_min=0, trace_raw=rho.trace_raw)

    ns = rho.ns
    k_lo, k_hi = _kraus_range(ns, eta)
    # output support: binomial concentration of n-k, clipped to [0, n_max]
    p = 1.0 - eta
    sigma = math.sqrt(max(ns[-1] * p * eta, 1.0))
    out_lo = max(0, math.floor(ns[0] * eta - 9.0 * sigma - 10))
    out_hi = min(int(ns[-1]) - k_lo,
                 math.ceil(ns[-1] * eta + 9.0 * sigma + 10))
    if rho.n_min == 0:
        out_lo = 0
    size_out = out_hi - out_lo + 1
    out = np.zeros((size_out, size_out), dtype=complex)

    for k in range(k_lo, k_hi + 1):
        w = _damping_weights(ns[ns >= k].astype(float), k, eta)
        # absolute output indices n-k for the rows that survive k losses
        src0 = max(0, k - rho.n_min)          # first surviving row in rho
        m_abs0 = int(ns[src0]) - k            # its output index
        t0 = m_abs0 - out_lo
        if t0 < 0:
            w = w[-t0:]
            src0 -= t0
            t0 = 0
        n_rows = min(len(w), size_out - t0)
        if n_rows <= 0:
            continue
        w = w[:n_rows]
        block = rho.rho[src0:src0 + n_rows, src0:src0 + n_rows]
        out[t0:t0 + n_rows, t0:t0 + n_rows] += (w[:, None] * w[None, :]) * block

    return SignalDensity(rho=out, n_min=out_lo, trace_raw=rho.trace_raw)
