"""Independent brute-force oracles for the test suite.

Everything here is built from first principles on dense truncated Fock
matrices (operator exponentials, direct summation, grid quadrature) so the
closed forms in the package are checked against a separate route.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from kerrsim.channels import SignalDensity


def destroy(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1.0, dim)), k=1).astype(complex)


def coherent_vector(gamma: complex, dim: int) -> np.ndarray:
    ns = np.arange(dim)
    log_mag = -0.5 * abs(gamma) ** 2 + ns * np.log(abs(gamma) + 1e-300) \
        - 0.5 * gammaln(ns + 1.0)
    phases = np.exp(1j * ns * np.angle(gamma)) if gamma != 0 else np.ones(dim)
    vec = np.exp(log_mag) * phases
    if gamma == 0:
        vec = np.zeros(dim, dtype=complex)
        vec[0] = 1.0
    return vec


def displacement_op(zeta: complex, dim: int) -> np.ndarray:
    a = destroy(dim)
    return expm(zeta * a.conj().T - np.conj(zeta) * a)


def squeeze_op(r: float, theta: float, dim: int) -> np.ndarray:
    # squeezes the quadrature along angle theta for r > 0
    a = destroy(dim)
    xi = r * np.exp(2j * theta)
    return expm(0.5 * (np.conj(xi) * (a @ a) - xi * (a.conj().T @ a.conj().T)))


def thermal_matrix(nbar: float, dim: int) -> np.ndarray:
    if nbar == 0:
        rho = np.zeros((dim, dim), dtype=complex)
        rho[0, 0] = 1.0
        return rho
    ns = np.arange(dim)
    pops = (nbar / (1.0 + nbar)) ** ns / (1.0 + nbar)
    return np.diag(pops.astype(complex))


def gaussian_fock_matrix(r: float, v: float, theta: float, disp: complex,
                         dim: int, pad: int = 40) -> np.ndarray:
    """Displaced squeezed thermal state as a dense Fock matrix.

    Thermal variance ``v = 2 nbar + 1``; the anti-squeezed axis ends up along
    ``theta`` to match the package's Williamson convention.
    """
    big = dim + pad
    nbar = 0.5 * (v - 1.0)
    rho = thermal_matrix(nbar, big)
    # squeeze_op(r, theta+pi/2) shrinks the quadrature at theta+pi/2,
    # leaving the larger variance along theta
    s = squeeze_op(r, theta + 0.5 * math.pi, big)
    rho = s @ rho @ s.conj().T
    d = displacement_op(disp, big)
    rho = d @ rho @ d.conj().T
    return rho[:dim, :dim]


def two_mode_beamsplitter(transmissivity: float, dim: int) -> np.ndarray:
    """Unitary with a_out = sqrt(T) a + sqrt(1-T) b on a dim^2 Fock space."""
    a = np.kron(destroy(dim), np.eye(dim))
    b = np.kron(np.eye(dim), destroy(dim))
    theta = math.acos(math.sqrt(transmissivity))
    return expm(theta * (a.conj().T @ b - a @ b.conj().T))


def partial_trace_second(rho: np.ndarray, dim: int) -> np.ndarray:
    r = rho.reshape(dim, dim, dim, dim)
    return np.einsum("ikjk->ij", r)


def partial_trace_first(rho: np.ndarray, dim: int) -> np.ndarray:
    r = rho.reshape(dim, dim, dim, dim)
    return np.einsum("kikj->ij", r)


def fock_moments(rho: np.ndarray) -> tuple[complex, complex, float]:
    """(<a>, <a^2>, <n>) of a dense Fock matrix (trace-normalized)."""
    dim = rho.shape[0]
    a = destroy(dim)
    t = np.trace(rho)
    return (
        complex(np.trace(rho @ a) / t),
        complex(np.trace(rho @ a @ a) / t),
        float(np.real(np.trace(rho @ (a.conj().T @ a)) / t)),
    )


def kernel_quadrature(mu_m: complex, mu_n: complex, delta: complex,
                      width: float, extent: float = 12.0,
                      points: int = 401) -> complex:
    """2-D grid quadrature of the envelope-averaged projection kernel."""
    xs = np.linspace(delta.real - extent, delta.real + extent, points)
    ys = np.linspace(delta.imag - extent, delta.imag + extent, points)
    x, y = np.meshgrid(xs, ys)
    dp = x + 1j * y
    envelope = np.exp(-np.abs(dp - delta) ** 2 / (2.0 * width * width))
    envelope /= 2.0 * math.pi * width * width
    proj = np.exp(
        -np.abs(dp) ** 2
        - 0.5 * (abs(mu_m) ** 2 + abs(mu_n) ** 2)
        + np.conj(dp) * mu_m
        + dp * np.conj(mu_n)
    )
    dx = xs[1] - xs[0]
    dy = ys[1] - ys[0]
    return complex(np.sum(envelope * proj) * dx * dy)


def oscillator_wavefunctions(dim: int, xs: np.ndarray) -> np.ndarray:
    """Real eigenfunctions psi_n(x) in the x = a + a^dag scale (vacuum var 1)."""
    psi = np.zeros((dim, len(xs)))
    psi[0] = (2.0 * math.pi) ** (-0.25) * np.exp(-xs * xs / 4.0)
    if dim > 1:
        psi[1] = xs * psi[0]
    for n in range(1, dim - 1):
        psi[n + 1] = (xs * psi[n] - math.sqrt(n) * psi[n - 1]) / math.sqrt(n + 1)
    return psi


def quadrature_distribution(rho: SignalDensity, xs: np.ndarray) -> np.ndarray:
    """<x|rho|x> of a Fock matrix (normalized), window starting at 0."""
    assert rho.n_min == 0
    psi = oscillator_wavefunctions(rho.size, xs)
    r = rho.rho / rho.trace
    return np.real(np.einsum("mx,mn,nx->x", psi, r, psi))


def poisson_tail_above(mean: float, cutoff: int, extra: int = 4000) -> float:
    """Upper-tail Poisson mass above ``cutoff`` by direct log-space summation."""
    ns = np.arange(cutoff + 1, cutoff + extra)
    log_p = -mean + ns * math.log(mean) - gammaln(ns + 1.0)
    return float(np.exp(log_p).sum())
