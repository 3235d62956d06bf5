"""
Peak detection, localization metrics, and pattern classification.

Patterns follow the qualitative vocabulary of the localization
landscapes: isolated "spike(n)" maxima, a "crater" ring of near-equal
maxima around a local minimum, a "lattice" of ridges along the
near-zero level set of the Rabi value, and "distributed" for everything
else.  Because the landscape factors through Omega(u, v), crater and
lattice detection operate on the 1D level-set profile from
`gridengine.omega_profile` rather than on raw 2D morphology; grids
without field metadata (bare CSV imports) fall back to a morphological
test that cannot distinguish lattices.

Peak masses are cell-quadrature integrals over the disk of radius
`mass_radius` around each peak, with every node assigned to its nearest
reported peak, so per-peak masses never overlap and their sum cannot
exceed the total probability.  The default radius 1.2 rad captures the
full basin of a Gamma-limited spike (half width ~0.45 rad); it is what
makes "probability 1/2 per spike" a checkable number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gridengine import FilterGrid, omega_profile
from .model import rabi_at

DEFAULT_REL_THRESHOLD = 0.5
DEFAULT_MIN_SEP = 0.3
DEFAULT_MASS_RADIUS = 1.2

# pattern-classification constants (see classify_pattern)
PROFILE_BINS = 512
EDGE_BINS = 2.5          # bins from the Omega extreme still counting as "at the antinode"
LATTICE_FRAC = 0.05      # |Omega*| below this fraction of the extreme -> lattice
RING_BAND_BINS = 3.0     # half-width of the level-set band, in bins
RING_EXTENT_MAX = 1.6    # rad; wider rings read as distributed, not crater
RING_MIN_PEAKS = 4
RING_HEIGHT_SPREAD = 0.10
SPIKE_MASS_FRAC = 0.80

_FULL_PERIOD_TOL = 1e-9


@dataclass(frozen=True)
class Peak:
    u: float
    v: float
    height: float
    mass: float
    quadrant: str

    def as_dict(self) -> dict:
        return {"u": self.u, "v": self.v, "height": self.height,
                "mass": self.mass, "quadrant": self.quadrant}


@dataclass(frozen=True)
class PeakReport:
    peaks: tuple[Peak, ...]          # sorted by descending height
    pattern: str
    quadrant_mass: tuple[float, float, float, float]  # I, II, III, IV

    def as_dict(self) -> dict:
        return {"peaks": [p.as_dict() for p in self.peaks],
                "pattern": self.pattern,
                "quadrant_mass": list(self.quadrant_mass)}


def _wraps(lo: float, hi: float) -> bool:
    return abs((hi - lo) - 2.0 * math.pi) <= _FULL_PERIOD_TOL


def _axis_dist(diff, span: float, wrap: bool):
    d = np.abs(diff)
    return np.minimum(d, span - d) if wrap else d


def _quadrant(u: float, v: float) -> str:
    # boundary peaks (coordinate exactly 0) count toward the positive side
    if u >= 0:
        return "I" if v >= 0 else "IV"
    return "II" if v >= 0 else "III"


def _shifted(arr: np.ndarray, d: int, axis: int, wrap: bool) -> np.ndarray:
    if wrap:
        return np.roll(arr, d, axis=axis)
    out = np.full_like(arr, -np.inf)
    src = [slice(None), slice(None)]
    dst = [slice(None), slice(None)]
    if d > 0:
        dst[axis], src[axis] = slice(d, None), slice(None, -d)
    else:
        dst[axis], src[axis] = slice(None, d), slice(-d, None)
    out[tuple(dst)] = arr[tuple(src)]
    return out


def find_peaks(grid: FilterGrid, rel_threshold: float = DEFAULT_REL_THRESHOLD,
               min_sep: float = DEFAULT_MIN_SEP,
               mass_radius: float = DEFAULT_MASS_RADIUS) -> PeakReport:
    """Detect 8-neighbor local maxima and report masses and pattern.

    Candidates at or above rel_threshold times the global maximum are
    deduplicated greedily within min_sep (highest first; ties broken by
    coordinates, so output order is deterministic).  Domains spanning a
    full period are treated periodically, which also collapses the
    duplicated boundary nodes.
    """
    vals = grid.values
    if vals.size == 0:
        raise ValueError("empty grid")
    u, v = grid.axes()
    spec = grid.spec
    wrap_u = _wraps(spec.u_min, spec.u_max)
    wrap_v = _wraps(spec.v_min, spec.v_max)
    span_u = spec.u_max - spec.u_min
    span_v = spec.v_max - spec.v_min

    # duplicated endpoints carry the same physical point on a periodic axis
    core = vals[: -1 if wrap_u else None, : -1 if wrap_v else None]
    uu = u[: -1] if wrap_u else u
    vv = v[: -1] if wrap_v else v

    at_least = np.ones_like(core, dtype=bool)
    above_one = np.zeros_like(core, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            nb = _shifted(core, di, 0, wrap_u)
            nb = _shifted(nb, dj, 1, wrap_v)
            at_least &= core >= nb
            above_one |= core > nb
    gmax = float(core.max()) if core.size else 0.0
    cand_mask = at_least & above_one & (core >= rel_threshold * gmax)

    cand = sorted(((float(core[i, j]), float(uu[i]), float(vv[j]))
                   for i, j in np.argwhere(cand_mask)),
                  key=lambda t: (-t[0], t[1], t[2]))
    kept: list[tuple[float, float, float]] = []
    for h, pu, pv in cand:
        close = False
        for _, ku, kv in kept:
            d = math.hypot(float(_axis_dist(pu - ku, span_u, wrap_u)),
                           float(_axis_dist(pv - kv, span_v, wrap_v)))
            if d < min_sep:
                close = True
                break
        if not close:
            kept.append((h, pu, pv))

    masses = _peak_masses(grid, kept, mass_radius, wrap_u, wrap_v)
    peaks = tuple(Peak(pu, pv, h, m, _quadrant(pu, pv))
                  for (h, pu, pv), m in zip(kept, masses))
    qmass = quadrant_mass(grid) if spec.symmetric else (math.nan,) * 4
    report = PeakReport(peaks, "", qmass)
    return PeakReport(peaks, classify_pattern(report, grid), qmass)


def _peak_masses(grid: FilterGrid, kept, radius: float,
                 wrap_u: bool, wrap_v: bool) -> list[float]:
    if not kept:
        return []
    u, v = grid.axes()
    spec = grid.spec
    cell = grid.cell_area()
    du_ = [_axis_dist(u - pu, spec.u_max - spec.u_min, wrap_u) for _, pu, _ in kept]
    dv_ = [_axis_dist(v - pv, spec.v_max - spec.v_min, wrap_v) for _, _, pv in kept]
    dist = np.stack([np.hypot(a[:, None], b[None, :]) for a, b in zip(du_, dv_)])
    nearest = np.argmin(dist, axis=0)  # ties resolve to the higher peak
    out = []
    for k in range(len(kept)):
        sel = (nearest == k) & (dist[k] <= radius)
        out.append(float(grid.values[sel].sum() * cell))
    return out


def quadrant_mass(grid: FilterGrid) -> tuple[float, float, float, float]:
    """Probability fractions of the four open quadrants (I, II, III, IV).

    Mass on the axes is split evenly between the adjacent quadrants.
    Requires a symmetric domain.
    """
    if not grid.spec.symmetric:
        raise ValueError("quadrant masses need a symmetric domain")
    u, v = grid.axes()
    xs = np.where(u > 0, 1.0, np.where(u < 0, 0.0, 0.5))[:, None]
    ys = np.where(v > 0, 1.0, np.where(v < 0, 0.0, 0.5))[None, :]
    m = grid.values
    total = float(m.sum())
    if total == 0.0:
        return (0.0, 0.0, 0.0, 0.0)
    q1 = float((m * xs * ys).sum()) / total
    q2 = float((m * (1.0 - xs) * ys).sum()) / total
    q3 = float((m * (1.0 - xs) * (1.0 - ys)).sum()) / total
    q4 = float((m * xs * (1.0 - ys)).sum()) / total
    return (q1, q2, q3, q4)


def classify_pattern(report: PeakReport, grid: FilterGrid) -> str:
    """Label the landscape as spike(n), crater, lattice, or distributed.

    With field metadata the decision runs on the Omega level-set profile:
    a maximum at the attainable extreme is a spike candidate (confirmed
    when at most two peaks carry >= 80% of the probability), a maximum
    near Omega = 0 with >= 4 aligned peaks is a lattice, and an interior
    maximum is a crater when its level set stays within RING_EXTENT_MAX
    of the enclosed antinode with near-equal ring maxima.  Without field
    metadata a morphological fallback covers spike and crater only.
    """
    if not report.peaks:
        return "distributed"
    if grid.field is None:
        return _classify_fallback(report, grid)

    centers, prof = omega_profile(grid, PROFILE_BINS)
    total = grid.total_mass()
    if centers.size < 2:
        return _spike_or_distributed(report, total)
    binw = centers[1] - centers[0]
    k = int(np.argmax(prof))
    om_star = float(centers[k])
    lo = centers[0] - 0.5 * binw
    hi = centers[-1] + 0.5 * binw
    scale = max(abs(lo), abs(hi))

    if om_star >= hi - EDGE_BINS * binw or om_star <= lo + EDGE_BINS * binw:
        return _spike_or_distributed(report, total)

    u, v = grid.axes()
    omega = rabi_at(grid.field, u[:, None], v[None, :])
    in_band = [p for p in report.peaks
               if abs(rabi_at(grid.field, p.u, p.v) - om_star) <= RING_BAND_BINS * binw]

    if abs(om_star) <= LATTICE_FRAC * scale:
        return "lattice" if len(in_band) >= RING_MIN_PEAKS else "distributed"

    if len(in_band) < RING_MIN_PEAKS:
        return _spike_or_distributed(report, total)
    hmax = max(p.height for p in in_band)
    hmin = min(p.height for p in in_band)
    if (hmax - hmin) > RING_HEIGHT_SPREAD * hmax:
        return "distributed"

    # extent of the level set around the antinode it encloses
    flat = int(np.argmax(omega) if om_star > 0 else np.argmin(omega))
    ai, aj = np.unravel_index(flat, omega.shape)
    band = np.abs(omega - om_star) <= RING_BAND_BINS * binw
    spec = grid.spec
    du_ = _axis_dist(u - u[ai], spec.u_max - spec.u_min, _wraps(spec.u_min, spec.u_max))
    dv_ = _axis_dist(v - v[aj], spec.v_max - spec.v_min, _wraps(spec.v_min, spec.v_max))
    dist = np.hypot(du_[:, None], dv_[None, :])
    extent = float(dist[band].max()) if band.any() else math.inf
    enclosed_lower = grid.values[ai, aj] <= 0.9 * prof[k]
    if extent <= RING_EXTENT_MAX and enclosed_lower:
        return "crater"
    return "distributed"


def _spike_or_distributed(report: PeakReport, total: float) -> str:
    if total <= 0:
        return "distributed"
    m1 = report.peaks[0].mass if report.peaks else 0.0
    m2 = report.peaks[1].mass if len(report.peaks) > 1 else 0.0
    if m1 >= SPIKE_MASS_FRAC * total:
        return "spike(1)"
    if m1 + m2 >= SPIKE_MASS_FRAC * total:
        return "spike(2)"
    return "distributed"


def _classify_fallback(report: PeakReport, grid: FilterGrid) -> str:
    label = _spike_or_distributed(report, grid.total_mass())
    if label != "distributed":
        return label
    vals = grid.values
    u, v = grid.axes()
    near = np.argwhere(vals >= 0.9 * vals.max())
    if len(near) < RING_MIN_PEAKS:
        return "distributed"
    spec = grid.spec
    wrap_u = _wraps(spec.u_min, spec.u_max)
    wrap_v = _wraps(spec.v_min, spec.v_max)
    pu, pv = u[near[:, 0]], v[near[:, 1]]
    # circular centroid and signed offsets on periodic axes
    cu = float(np.angle(np.mean(np.exp(1j * pu)))) if wrap_u else float(np.mean(pu))
    cv = float(np.angle(np.mean(np.exp(1j * pv)))) if wrap_v else float(np.mean(pv))
    su = np.angle(np.exp(1j * (pu - cu))) if wrap_u else pu - cu
    sv = np.angle(np.exp(1j * (pv - cv))) if wrap_v else pv - cv
    r = np.hypot(su, sv)
    if r.max() > RING_EXTENT_MAX or r.max() <= 0:
        return "distributed"
    if (r.max() - r.min()) > 0.5 * r.max():
        return "distributed"
    ang = np.sort(np.arctan2(sv, su))
    gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * math.pi]]))
    if gaps.max() > math.radians(60):
        return "distributed"
    ic = int(np.argmin(np.abs(u - cu)))
    jc = int(np.argmin(np.abs(v - cv)))
    if vals[ic, jc] <= 0.5 * vals.max():
        return "crater"
    return "distributed"
