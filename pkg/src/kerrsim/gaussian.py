"""Gaussian-state algebra on covariance matrices and displacement vectors.

Convention used throughout the package: quadratures ``x = a + a^dag`` and
``p = -i (a - a^dag)``, ordered ``(x1, p1, x2, p2, ...)``, so the vacuum
covariance matrix is the identity and a coherent state of amplitude ``gamma``
sits at displacement ``(2 Re gamma, 2 Im gamma)`` with mean photon number
``|d|^2 / 4``.  The Wigner density of a state ``(M, d)`` is the normalized
Gaussian with covariance ``M`` (so the vacuum peaks at ``1 / 2 pi``), and a
symplectic transformation acts as ``M -> S M S^T``, ``d -> S d``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .channels import SignalDensity


class ValidityError(ArithmeticError):
    """A covariance matrix violates the uncertainty relation beyond tolerance."""


def symplectic_form(n_modes: int) -> np.ndarray:
    """Standard symplectic form Omega in (x1, p1, x2, p2, ...) ordering."""
    block = np.array([[0.0, 1.0], [-1.0, 0.0]])
    omega = np.zeros((2 * n_modes, 2 * n_modes))
    for k in range(n_modes):
        omega[2 * k:2 * k + 2, 2 * k:2 * k + 2] = block
    return omega


@dataclass(frozen=True)
class GaussianState:
    """Covariance matrix ``cov`` (2n x 2n) and displacement ``mean`` (2n)."""

    cov: np.ndarray
    mean: np.ndarray

    def __post_init__(self):
        cov = np.asarray(self.cov, dtype=float)
        mean = np.asarray(self.mean, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
            raise ValueError("cov must be square with even dimension")
        if mean.shape != (cov.shape[0],):
            raise ValueError("mean length must match cov dimension")
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "mean", mean)

    @property
    def n_modes(self) -> int:
        return self.cov.shape[0] // 2

    def symplectic_eigenvalues(self) -> np.ndarray:
        """Symplectic spectrum of ``cov`` (each value >= 1 for physical states)."""
        ev = np.linalg.eigvals(symplectic_form(self.n_modes) @ self.cov)
        nus = np.sort(np.abs(ev.imag))
        return nus[len(nus) // 2:]

    def validate(self, tol: float = 1e-8) -> None:
        scale = max(float(np.abs(self.cov).max()), 1.0)
        if not np.allclose(self.cov, self.cov.T, atol=1e-10 * scale):
            raise ValidityError("covariance matrix is not symmetric")
        lo = float(self.symplectic_eigenvalues().min())
        if lo < 1.0 - tol:
            raise ValidityError(
                f"uncertainty relation violated: min symplectic eigenvalue {lo:.12g}"
            )

    @property
    def mean_photons(self) -> float:
        """Total mean photon number ``(tr M - 2n)/4 + |d|^2/4``."""
        n = self.n_modes
        return float((np.trace(self.cov) - 2 * n) / 4.0 + self.mean @ self.mean / 4.0)


def vacuum(n_modes: int = 1) -> GaussianState:
    return GaussianState(np.eye(2 * n_modes), np.zeros(2 * n_modes))


def coherent(gamma: complex) -> GaussianState:
    return GaussianState(np.eye(2), np.array([2 * gamma.real, 2 * gamma.imag]))


def tensor(a: GaussianState, b: GaussianState) -> GaussianState:
    """Product state of two Gaussian states (block-diagonal covariance)."""
    na, nb = 2 * a.n_modes, 2 * b.n_modes
    cov = np.zeros((na + nb, na + nb))
    cov[:na, :na] = a.cov
    cov[na:, na:] = b.cov
    return GaussianState(cov, np.concatenate([a.mean, b.mean]))


def reduce_mode(g: GaussianState, mode: int) -> GaussianState:
    """Trace out all modes except ``mode``."""
    if not 0 <= mode < g.n_modes:
        raise ValueError("mode index out of range")
    s = slice(2 * mode, 2 * mode + 2)
    return GaussianState(g.cov[s, s].copy(), g.mean[s].copy())


def moments_from_density(rho: SignalDensity, *, tol: float = 1e-6) -> GaussianState:
    """Extract (M, d) from the first and second moments of a Fock matrix.

    Uses ``<a>``, ``<a^2>`` and ``<a^dag a>`` of the (normalized) matrix; the
    moment sums are exact within the stored truncation.  Raises
    :class:`ValidityError` if the resulting covariance matrix falls below the
    uncertainty bound by more than ``tol``, which signals that a Gaussian
    description of this state is not trustworthy.
    """
    t = rho.trace
    if not t > 0:
        raise ValueError("density matrix trace must be positive")
    r = rho.rho / t
    ns = rho.ns.astype(float)

    diag = np.real(np.diagonal(r))
    n_mean = float(diag @ ns)
    a_mean = complex(np.sum(np.sqrt(ns[1:]) * np.diagonal(r, offset=-1)))
    if rho.size > 2:
        a2_mean = complex(
            np.sum(np.sqrt(ns[2:] * (ns[2:] - 1.0)) * np.diagonal(r, offset=-2))
        )
    else:
        a2_mean = 0.0 + 0.0j

    dx = 2.0 * a_mean.real
    dp = 2.0 * a_mean.imag
    mxx = 2.0 * a2_mean.real + 2.0 * n_mean + 1.0 - dx * dx
    mpp = -2.0 * a2_mean.real + 2.0 * n_mean + 1.0 - dp * dp
    mxp = 2.0 * a2_mean.imag - dx * dp
    g = GaussianState(np.array([[mxx, mxp], [mxp, mpp]]), np.array([dx, dp]))
    g.validate(tol=tol)
    return g


def williamson(g: GaussianState) -> tuple[float, float, float]:
    """Single-mode Williamson form ``M = V R(th) diag(e^2r, e^-2r) R(th)^T``.

    Returns ``(r, V, theta)`` with squeezing ``r >= 0``, thermal variance
    ``V >= 1`` and principal-axis angle ``theta in [0, pi)`` (the axis of the
    larger variance).
    """
    if g.n_modes != 1:
        raise ValueError("williamson form implemented for single-mode states")
    evals, evecs = np.linalg.eigh(g.cov)
    lo, hi = float(evals[0]), float(evals[1])
    if lo <= 0:
        raise ValidityError("covariance matrix is not positive definite")
    v = math.sqrt(lo * hi)
    if v < 1.0 - 1e-8:
        raise ValidityError(f"thermal variance {v:.12g} below the vacuum limit")
    r = 0.25 * math.log(hi / lo)
    vec = evecs[:, 1]
    theta = math.atan2(vec[1], vec[0]) % math.pi
    return r, v, theta


def rotation_symplectic(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])


def beamsplitter_symplectic(transmissivity: float) -> np.ndarray:
    """Two-mode beamsplitter with ``cos(theta_BS) = sqrt(T)``."""
    if not 0.0 <= transmissivity <= 1.0:
        raise ValueError("transmissivity must lie in [0, 1]")
    c = math.sqrt(transmissivity)
    s = math.sqrt(1.0 - transmissivity)
    eye = np.eye(2)
    return np.block([[c * eye, s * eye], [-s * eye, c * eye]])


def apply_symplectic(g: GaussianState, s: np.ndarray,
                     *, tol: float = 1e-10) -> GaussianState:
    """Transform ``M -> S M S^T`` and ``d -> S d`` for a symplectic ``S``."""
    s = np.asarray(s, dtype=float)
    n = g.n_modes
    if s.shape != (2 * n, 2 * n):
        raise ValueError("symplectic matrix has the wrong shape")
    omega = symplectic_form(n)
    if not np.allclose(s @ omega @ s.T, omega, atol=tol):
        raise ValueError("matrix is not symplectic")
    return GaussianState(s @ g.cov @ s.T, s @ g.mean)


def displace(g: GaussianState, d0: np.ndarray) -> GaussianState:
    """Shift the displacement vector; the covariance matrix is unchanged."""
    d0 = np.asarray(d0, dtype=float)
    if d0.shape != g.mean.shape:
        raise ValueError("displacement length must match the state")
    return replace(g, mean=g.mean + d0)


def attenuate(g: GaussianState, transmission: float) -> GaussianState:
    """Pure-loss channel: beamsplit each mode against vacuum and keep it.

    Equivalent to ``M -> T M + (1-T) I``, ``d -> sqrt(T) d``, applied mode by
    mode through :func:`beamsplitter_symplectic`.
    """
    out = g
    for mode in range(g.n_modes):
        joint = tensor(out, vacuum(1))
        n = joint.n_modes
        s = np.eye(2 * n)
        idx = np.r_[2 * mode:2 * mode + 2, 2 * n - 2:2 * n]
        s[np.ix_(idx, idx)] = beamsplitter_symplectic(transmission)
        mixed = apply_symplectic(joint, s)
        keep = np.r_[0:2 * n - 2]
        out = GaussianState(mixed.cov[np.ix_(keep, keep)], mixed.mean[keep])
    return out


def wigner_value(g: GaussianState, r: np.ndarray) -> float:
    """Wigner density at phase-space point ``r``; integrates to 1."""
    r = np.asarray(r, dtype=float)
    if r.shape != g.mean.shape:
        raise ValueError("phase-space point has the wrong dimension")
    det = float(np.linalg.det(g.cov))
    if det <= 0:
        raise ValidityError("covariance matrix is singular")
    diff = r - g.mean
    n = g.n_modes
    norm = (2.0 * math.pi) ** n * math.sqrt(det)
    return float(math.exp(-0.5 * diff @ np.linalg.solve(g.cov, diff)) / norm)


def joint_vacuum_probability(g: GaussianState) -> float:
    """Probability ``<0...0| rho |0...0>`` of finding every mode empty.

    ``2^n / sqrt(det(M + I)) * exp(-d^T (M + I)^{-1} d / 2)``; reduces to
    ``e^{-nbar}`` for a coherent state and ``1/(1+nbar)`` for a thermal one.
    """
    n = g.n_modes
    mpi = g.cov + np.eye(2 * n)
    det = float(np.linalg.det(mpi))
    if det <= 0:
        raise ValidityError("covariance matrix is unphysical")
    quad = float(g.mean @ np.linalg.solve(mpi, g.mean))
    return float(2.0 ** n / math.sqrt(det) * math.exp(-0.5 * quad))
