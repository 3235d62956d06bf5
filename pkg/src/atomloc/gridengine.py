"""
Normalized conditional-probability grids over the standing-wave cell.

A `FilterGrid` holds W(u, v) = |N|^2 |b_out(u, v)|^2 sampled on a
rectangular grid of standing-wave phases, normalized so that

    sum(values) * du * dv = 1

(midpoint-cell quadrature with the node spacings du, dv).  Because the
emitted amplitude depends on position only through the Rabi value
Omega(u, v), grids factor through a 1D profile in Omega; `omega_profile`
exposes that structure and an optional table-lookup fast path exploits
it for sweeps.

Axes of symmetric domains are built exactly mirror-symmetric
(u[i] == -u[n-1-i] bitwise), so point reflections and the equal-Omega
metamorphic identity hold at machine precision on default grids.

Setting the environment variable ATOMLOC_THREADS partitions the solver
evaluation across worker threads by row blocks; assembly order and the
normalization reduction are fixed, so outputs are byte-identical to the
sequential path.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import closedform, oracle
from .model import (EmissionQuery, InitialState, StandingWaveField,
                    SystemParams, rabi_at, validate)

SOLVERS = ("general", "paper-form", "oracle")

#: Table size for the Omega-interpolation fast path.
TABLE_SIZE = 4001


@dataclass(frozen=True)
class GridSpec:
    """Rectangular sampling of the (u, v) = (k1 x, k2 y) plane.

    Odd node counts (the default) sample the axes and the center exactly.
    """

    u_min: float = -math.pi
    u_max: float = math.pi
    v_min: float = -math.pi
    v_max: float = math.pi
    nx: int = 201
    ny: int = 201

    def __post_init__(self) -> None:
        if not (self.u_max > self.u_min and self.v_max > self.v_min):
            raise ValueError("grid bounds must satisfy u_max > u_min, v_max > v_min")
        if self.nx < 3 or self.ny < 3:
            raise ValueError(f"need at least 3 nodes per axis (nx={self.nx}, ny={self.ny})")

    @property
    def du(self) -> float:
        return (self.u_max - self.u_min) / (self.nx - 1)

    @property
    def dv(self) -> float:
        return (self.v_max - self.v_min) / (self.ny - 1)

    @property
    def symmetric(self) -> bool:
        return (abs(self.u_min + self.u_max) <= 1e-12 * max(1.0, abs(self.u_max))
                and abs(self.v_min + self.v_max) <= 1e-12 * max(1.0, abs(self.v_max)))

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return (_axis(self.u_min, self.u_max, self.nx),
                _axis(self.v_min, self.v_max, self.ny))


def _axis(lo: float, hi: float, n: int) -> np.ndarray:
    x = np.linspace(lo, hi, n)
    if abs(lo + hi) <= 1e-12 * max(1.0, abs(hi)):
        # force exact mirror symmetry so reflections are bitwise clean
        x[: n // 2] = -x[::-1][: n // 2]
        if n % 2:
            x[n // 2] = 0.0
    return x


@dataclass(frozen=True)
class FilterGrid:
    """Normalized W values with the parameter snapshot that produced them.

    Grids re-imported from bare CSV carry no snapshot (fields are None)
    and norm_constant NaN; JSON round-trips are lossless.
    """

    values: np.ndarray
    norm_constant: float
    spec: GridSpec
    system: SystemParams | None = None
    field: StandingWaveField | None = None
    init: InitialState | None = None
    query: EmissionQuery | None = None
    solver: str | None = None

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return self.spec.axes()

    def cell_area(self) -> float:
        return self.spec.du * self.spec.dv

    def total_mass(self) -> float:
        return float(self.values.sum() * self.cell_area())


def _solver_values(system: SystemParams, init: InitialState,
                   query: EmissionQuery, solver: str, omega: np.ndarray,
                   table_size: int) -> np.ndarray:
    if solver == "general":
        return np.abs(closedform.amplitude_general_array(system, init, query, omega)) ** 2
    if solver == "paper-form":
        return np.abs(closedform.amplitude_paper_array(system, init, query, omega)) ** 2
    if solver == "oracle":
        # always table-based: one batched integration per distinct table node
        lo, hi = float(omega.min()), float(omega.max())
        if lo == hi:
            amp = oracle.emitted_amplitude_numeric(
                system, init, lo, query, oracle.IntegrationConfig.for_params(system))
            return np.full_like(omega, abs(amp) ** 2)
        tab = np.linspace(lo, hi, table_size)
        amps = oracle.emitted_amplitudes_batch(
            system, init, query, tab, oracle.IntegrationConfig.for_params(system))
        return np.interp(omega, tab, np.abs(amps) ** 2)
    raise ValueError(f"unknown solver {solver!r}; expected one of {SOLVERS}")


def _thread_count() -> int:
    raw = os.environ.get("ATOMLOC_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def compute_grid(system: SystemParams, init: InitialState,
                 field: StandingWaveField, query: EmissionQuery,
                 spec: GridSpec | None = None, solver: str = "general",
                 use_table: bool = False,
                 table_size: int = TABLE_SIZE) -> FilterGrid:
    """Evaluate the normalized conditional probability over a grid.

    solver selects the closed-form route ("general" is exact,
    "paper-form" the simplified bare-Rabi variant) or the numeric
    "oracle".  use_table switches the closed-form routes to a
    table-plus-interpolation fast path over Omega; the oracle route is
    always table-based.
    """
    spec = spec or GridSpec()
    report = validate(system, field, init)
    report.raise_if_errors()
    if not math.isfinite(query.delta_k):
        raise ValueError("delta_k must be finite")
    if solver not in SOLVERS:
        raise ValueError(f"unknown solver {solver!r}; expected one of {SOLVERS}")

    u, v = spec.axes()
    omega = rabi_at(field, u[:, None], v[None, :])

    if solver == "oracle" or (use_table and solver != "oracle"):
        if solver == "oracle":
            raw = _solver_values(system, init, query, solver, omega, table_size)
        else:
            lo, hi = float(omega.min()), float(omega.max())
            tab = np.linspace(lo, hi, table_size) if hi > lo else np.array([lo])
            gtab = _solver_values(system, init, query, solver, tab, table_size)
            raw = np.interp(omega, tab, gtab)
    else:
        nthreads = _thread_count()
        if nthreads == 1 or spec.nx < 2 * nthreads:
            raw = _solver_values(system, init, query, solver, omega, table_size)
        else:
            blocks = np.array_split(np.arange(spec.nx), nthreads)
            with ThreadPoolExecutor(max_workers=nthreads) as pool:
                parts = list(pool.map(
                    lambda idx: _solver_values(system, init, query, solver,
                                               omega[idx], table_size), blocks))
            raw = np.concatenate(parts, axis=0)

    norm = 1.0 / (float(raw.sum()) * spec.du * spec.dv)
    return FilterGrid(values=raw * norm, norm_constant=norm, spec=spec,
                      system=system, field=field, init=init, query=query,
                      solver=solver)


def transform_compare(a: FilterGrid, b: FilterGrid, mapping: str = "identity") -> float:
    """Max |a(u,v) - b(map(u,v))| over nodes.

    mapping is "identity" or "point-reflection"; the latter requires a
    symmetric domain so reflected nodes are again grid nodes.
    """
    if a.values.shape != b.values.shape or a.spec != b.spec:
        raise ValueError("grids must share an identical GridSpec")
    if mapping == "identity":
        mapped = b.values
    elif mapping == "point-reflection":
        if not a.spec.symmetric:
            raise ValueError("point-reflection needs a symmetric domain")
        mapped = b.values[::-1, ::-1]
    else:
        raise ValueError(f"unknown mapping {mapping!r}")
    return float(np.max(np.abs(a.values - mapped)))


def omega_profile(grid: FilterGrid, nbins: int = 512):
    """Level-set profile of the grid: per-Omega-bin maximum of W.

    Returns (bin centers, profile).  Requires the field snapshot; the
    factorization of W through Omega makes the per-bin max representative
    of the whole level set.
    """
    if grid.field is None:
        raise ValueError("omega_profile needs a grid with field metadata")
    u, v = grid.axes()
    omega = rabi_at(grid.field, u[:, None], v[None, :])
    lo, hi = float(omega.min()), float(omega.max())
    if hi <= lo:
        return np.array([lo]), np.array([float(grid.values.max())])
    edges = np.linspace(lo, hi, nbins + 1)
    idx = np.clip(np.digitize(omega.ravel(), edges) - 1, 0, nbins - 1)
    prof = np.zeros(nbins)
    np.maximum.at(prof, idx, grid.values.ravel())
    centers = 0.5 * (edges[:-1] + edges[1:])
    return centers, prof
