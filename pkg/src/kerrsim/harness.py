"""Pipeline composition, parameter sweeps and result emission.

The full chain builds the coherent product, applies the cross-Kerr phase,
probe loss, the envelope-averaged heterodyne post-selection, signal loss and
the Gaussian reduction, returning the signal state just before the
displacement and click measurement together with the post-selection success
probability.

Signal-arm loss commutes exactly with everything done to the probe (they act
on different tensor factors), and extracting first/second moments commutes
exactly with amplitude damping (``<a> -> sqrt(eta) <a>``, ``<a^2> -> eta
<a^2>``, ``<n> -> eta <n>``), so the loss can equivalently be applied to the
covariance matrix.  Large-amplitude runs use that route; the Kraus route on
the Fock matrix is the default at small size and the two are tested equal.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

from . import __version__
from .branch import BranchState, apply_cross_kerr, fock_cutoff, fock_window, make_coherent_product
from .channels import SignalDensity, apply_probe_loss, apply_signal_loss
from .gaussian import GaussianState, attenuate, moments_from_density
from .heterodyne import (
    HeterodyneSettings,
    postselection_probability,
    project_heterodyne_averaged,
)
from .params import ConfigError, Parameters
from .photon_stats import (
    displace_fock,
    fock_mean_amplitude,
    g2_at_displacement,
    g2_click_fock,
    optimize_displacement,
)

# Above this many stored Fock indices the Kraus loop gets expensive and the
# pipeline switches to the (exactly equivalent) covariance-side loss route.
_SMALL_WINDOW = 400
_FOCK_ORACLE_LIMIT = 600


def default_gamma(params: Parameters) -> float:
    """Noise-scaling amplitude: the probe amplitude reaching the detector."""
    return math.sqrt(params.nu) * params.alpha


def default_delta(params: Parameters) -> complex:
    """Post-selection bin center: the post-loss branch at the mean rotation."""
    return default_gamma(params) * np.exp(-1j * params.phi0 * params.beta**2)


@lru_cache(maxsize=4)
def _lossy_branch(alpha: float, beta: float, phi0: float, nu: float,
                  n_min: int, cutoff: int, trunc_tol: float) -> BranchState:
    state = make_coherent_product(alpha, beta, cutoff, n_min=n_min,
                                  trunc_tol=trunc_tol)
    return apply_probe_loss(apply_cross_kerr(state, phi0), nu)


@dataclass(frozen=True)
class PipelineResult:
    """Signal Gaussian state before displacement, plus run diagnostics."""

    state: GaussianState
    success_prob: float
    delta: complex
    width: float
    n_min: int
    cutoff: int
    trace_raw: float


def estimate_footprint(beta: float, k_sigma: float = 8.0,
                       use_window: bool = True) -> int:
    """Bytes needed for the pairwise branch matrices of one pipeline run."""
    if use_window:
        n_min, n_hi = fock_window(beta, k_sigma)
    else:
        n_min, n_hi = 0, fock_cutoff(beta, k_sigma)
    size = n_hi - n_min + 1
    return 3 * size * size * 16


def run_pipeline(params: Parameters, *,
                 delta: complex | None = None,
                 gamma: float | None = None,
                 k_sigma: float = 8.0,
                 trunc_tol: float = 1e-10,
                 use_window: bool = True,
                 signal_loss: str = "auto",
                 loss_order: str = "after",
                 allow_large: bool = False,
                 memory_limit: int = 1_500_000_000) -> PipelineResult:
    """Run the full squeezing pipeline for one configuration.

    ``delta`` defaults to the mean-rotation branch and ``gamma`` to the
    post-loss probe amplitude; both can be overridden.  ``signal_loss``
    selects the Kraus route on the Fock matrix ("fock"), the covariance route
    ("gaussian") or a size-based choice ("auto").  ``loss_order`` places the
    signal loss before or after the post-selection; in this model the two
    provably coincide (signal and probe operations commute), the flag exists
    for sensitivity studies and forces the Kraus route when set to "before".
    """
    if signal_loss not in ("auto", "fock", "gaussian"):
        raise ConfigError(f"unknown signal_loss route {signal_loss!r}")
    if loss_order not in ("after", "before"):
        raise ConfigError(f"unknown loss_order {loss_order!r}")

    footprint = estimate_footprint(params.beta, k_sigma, use_window)
    if footprint > memory_limit and not allow_large:
        raise ConfigError(
            f"estimated branch-matrix footprint {footprint/1e9:.2f} GB exceeds "
            f"{memory_limit/1e9:.2f} GB; rerun with allow_large"
        )

    if use_window:
        n_min, n_hi = fock_window(params.beta, k_sigma)
    else:
        n_min, n_hi = 0, fock_cutoff(params.beta, k_sigma)
    lossy = _lossy_branch(params.alpha, params.beta, params.phi0, params.nu,
                          n_min, n_hi, trunc_tol)

    gam = default_gamma(params) if gamma is None else float(gamma)
    delt = default_delta(params) if delta is None else complex(delta)
    settings = HeterodyneSettings(delta=delt, epsilon=params.epsilon,
                                  delta_phi=params.delta_phi, gamma=gam)
    conditional = project_heterodyne_averaged(lossy, settings)
    success = postselection_probability(lossy, delt, params.epsilon)

    size = n_hi - n_min + 1
    route = signal_loss
    if loss_order == "before":
        route = "fock"
    elif route == "auto":
        route = "fock" if size <= _SMALL_WINDOW else "gaussian"

    if route == "fock":
        lossy_rho = apply_signal_loss(conditional, params.eta)
        state = moments_from_density(lossy_rho.normalized())
    else:
        state = attenuate(moments_from_density(conditional.normalized()), params.eta)

    return PipelineResult(state=state, success_prob=success, delta=delt,
                          width=settings.width, n_min=n_min, cutoff=n_hi,
                          trace_raw=conditional.trace_raw)


def run_pipeline_fock(params: Parameters, *,
                      delta: complex | None = None,
                      gamma: float | None = None,
                      k_sigma: float = 8.0,
                      trunc_tol: float = 1e-10) -> tuple[SignalDensity, float]:
    """Oracle variant: exact Fock matrix, no Gaussian reduction.

    Only the heterodyne model and the loss channels act; photon statistics
    can then be taken exactly.  Restricted to small amplitudes, where the
    full matrix from Fock index 0 is affordable.
    """
    cutoff = fock_cutoff(params.beta, k_sigma)
    if cutoff > _FOCK_ORACLE_LIMIT:
        raise ConfigError(
            f"fock-oracle pipeline limited to cutoff <= {_FOCK_ORACLE_LIMIT}, "
            f"got {cutoff}; use the Gaussian pipeline for bright states"
        )
    state = make_coherent_product(params.alpha, params.beta, cutoff,
                                  trunc_tol=trunc_tol)
    lossy = apply_probe_loss(apply_cross_kerr(state, params.phi0), params.nu)
    gam = default_gamma(params) if gamma is None else float(gamma)
    delt = default_delta(params) if delta is None else complex(delta)
    settings = HeterodyneSettings(delta=delt, epsilon=params.epsilon,
                                  delta_phi=params.delta_phi, gamma=gam)
    conditional = project_heterodyne_averaged(lossy, settings)
    success = postselection_probability(lossy, delt, params.epsilon)
    out = apply_signal_loss(conditional.normalized(), params.eta)
    return out, success


def g2_click_fock_at(rho: SignalDensity, p_dark: float, n_disp: float,
                     axis: float) -> float:
    """Exact click g2 of a Fock matrix displaced to ``n_disp`` photons."""
    target = math.sqrt(n_disp) * complex(math.cos(axis), math.sin(axis))
    shift = target - fock_mean_amplitude(rho)
    pad = int(30 + 8 * abs(shift) + abs(shift) ** 2)
    return g2_click_fock(displace_fock(rho.normalized(), shift, pad=pad), p_dark)


def compare_gaussian_vs_fock(params: Parameters, *,
                             delta: complex | None = None) -> tuple[float, float, float]:
    """g2 from the Gaussian pipeline vs the exact Fock oracle, plus rel. diff.

    Both paths are evaluated at the Gaussian pipeline's optimal displacement
    so the comparison isolates the Gaussian reduction itself.
    """
    from .gaussian import williamson

    result = run_pipeline(params, delta=delta)
    opt = optimize_displacement(result.state, params.p_dark)
    g2_gauss = opt.g2_min
    _, _, theta = williamson(result.state)
    axis = theta + 0.5 * math.pi
    rho, _ = run_pipeline_fock(params, delta=delta)
    g2_fock = g2_click_fock_at(rho, params.p_dark, opt.n_opt, axis)
    rel = abs(g2_gauss - g2_fock) / abs(g2_fock)
    return g2_gauss, g2_fock, rel


SWEEPABLE = ("eta", "nu", "delta_phi", "epsilon", "p_dark", "phi0",
             "alpha", "beta", "displacement")


class SweepRow(NamedTuple):
    swept_name: str
    swept_value: float
    n_displacement: float
    g2: float
    success_prob: float


@dataclass
class SweepResult:
    """Rows of (swept value, displacement, g2, success) plus run metadata."""

    rows: list[SweepRow]
    metadata: dict

    def __post_init__(self):
        if not self.rows:
            raise ValueError("sweep produced no rows")


def _sweep_point(params: Parameters, name: str, value: float,
                 displacement_grid: Sequence[float] | None,
                 pipeline_kwargs: dict) -> list[SweepRow]:
    if name == "displacement":
        point = params
    else:
        point = params.replace(**{name: value})
    result = run_pipeline(point, **pipeline_kwargs)
    rows: list[SweepRow] = []
    if name == "displacement":
        g2 = g2_at_displacement(result.state, point.p_dark, value)
        rows.append(SweepRow(name, value, value, g2, result.success_prob))
        return rows
    opt = optimize_displacement(result.state, point.p_dark)
    rows.append(SweepRow(name, value, opt.n_opt, opt.g2_min, result.success_prob))
    if displacement_grid is not None:
        for n_disp in displacement_grid:
            g2 = g2_at_displacement(result.state, point.p_dark, float(n_disp))
            rows.append(SweepRow(name, value, float(n_disp), g2,
                                 result.success_prob))
    return rows


def sweep(params: Parameters, name: str, values: Iterable[float],
          displacement_grid: Sequence[float] | None = None,
          map_fn: Callable = map,
          **pipeline_kwargs) -> SweepResult:
    """Sweep one parameter, optimizing the displacement at every point.

    For each swept value the first emitted row carries the optimizer result;
    when ``displacement_grid`` is given it is followed by one row per grid
    point with the g2 of that fixed displacement.  Points are independent:
    any order-preserving ``map_fn`` (e.g. an executor map) may evaluate them
    concurrently, results are merged in input order.
    """
    if name not in SWEEPABLE:
        raise ConfigError(
            f"cannot sweep {name!r}; choose one of {', '.join(SWEEPABLE)}"
        )
    values = [float(v) for v in values]
    if not values:
        raise ConfigError("sweep needs at least one value")
    t0 = time.perf_counter()
    chunks = list(map_fn(
        lambda v: _sweep_point(params, name, v, displacement_grid, pipeline_kwargs),
        values,
    ))
    rows = [row for chunk in chunks for row in chunk]
    metadata = {
        "parameters": params.asdict(),
        "swept": name,
        "values": values,
        "displacement_grid": (list(map(float, displacement_grid))
                              if displacement_grid is not None else None),
        "pipeline": "gaussian",
        "code_version": __version__,
        "wall_time_s": time.perf_counter() - t0,
    }
    return SweepResult(rows=rows, metadata=metadata)


CSV_COLUMNS = ("swept_name", "swept_value", "n_displacement", "g2", "success_prob")


def emit(result: SweepResult, fmt: str, path: str | Path) -> None:
    """Write a sweep result as headered CSV rows or one JSON document.

    CSV holds the rows only and is byte-deterministic for identical inputs;
    JSON adds the metadata (including wall time) and reads back exactly.
    """
    if not result.rows:
        raise ValueError("refusing to emit an empty sweep")
    path = Path(path)
    if fmt == "csv":
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for row in result.rows:
                writer.writerow([row.swept_name, repr(row.swept_value),
                                 repr(row.n_displacement), repr(row.g2),
                                 repr(row.success_prob)])
    elif fmt == "json":
        doc = {
            "rows": [row._asdict() for row in result.rows],
            "metadata": result.metadata,
        }
        with path.open("w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        raise ConfigError(f"unknown output format {fmt!r}")


def load_json(path: str | Path) -> SweepResult:
    """Read back a JSON document written by :func:`emit`."""
    doc = json.loads(Path(path).read_text())
    rows = [SweepRow(**row) for row in doc["rows"]]
    return SweepResult(rows=rows, metadata=doc["metadata"])
