"""
Deterministic grid serialization: CSV, JSON, raster heatmaps, plot script.

CSV carries the header line `# atomloc-grid v1` followed by `u,v,W`
rows, v in the outer loop ascending and u in the inner loop ascending,
17 significant digits per number so round-trips are lossless and
re-exports byte-identical.  CSV holds no parameter metadata; the JSON
form additionally embeds the grid spec, the parameter snapshot, the
solver, and the applied normalization constant.

Heatmaps are binary PPM (P6), one pixel per grid node, top row at
v_max, intensity linear in W scaled by the global maximum.  The default
palette is grayscale; "fire" is a 256-entry black-red-yellow-white
table with exact byte values

    index i <= 85:        (3i, 0, 0)
    86 <= i <= 170:       (255, 3(i-85), 0)
    171 <= i <= 255:      (255, 255, 3(i-170)) capped at 255.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .gridengine import FilterGrid, GridSpec
from .model import EmissionQuery, InitialState, StandingWaveField, SystemParams

CSV_HEADER = "# atomloc-grid v1"
JSON_FORMAT = "atomloc-grid"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


# --------------------------------------------------------------------------
# CSV
# --------------------------------------------------------------------------

def grid_to_csv(grid: FilterGrid) -> bytes:
    u, v = grid.axes()
    lines = [CSV_HEADER]
    vals = grid.values
    for j in range(grid.spec.ny):
        vs = _fmt(v[j])
        for i in range(grid.spec.nx):
            lines.append(f"{_fmt(u[i])},{vs},{_fmt(vals[i, j])}")
    return ("\n".join(lines) + "\n").encode("ascii")


def grid_from_csv(data: bytes) -> FilterGrid:
    lines = data.decode("ascii").splitlines()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise ValueError(f"not an atomloc grid CSV (expected header {CSV_HEADER!r})")
    rows = [ln for ln in lines[1:] if ln.strip()]
    triples = np.array([[float(x) for x in ln.split(",")] for ln in rows])
    if triples.ndim != 2 or triples.shape[1] != 3:
        raise ValueError("grid CSV rows must be u,v,W triples")
    us, vs, ws = triples[:, 0], triples[:, 1], triples[:, 2]
    nx = int(np.argmax(vs != vs[0])) or len(vs)
    if len(us) % nx:
        raise ValueError("grid CSV does not form a rectangular grid")
    ny = len(us) // nx
    u = us[:nx]
    v = vs[::nx]
    spec = GridSpec(u_min=float(u[0]), u_max=float(u[-1]),
                    v_min=float(v[0]), v_max=float(v[-1]), nx=nx, ny=ny)
    values = ws.reshape(ny, nx).T.copy()
    return FilterGrid(values=values, norm_constant=math.nan, spec=spec)


# --------------------------------------------------------------------------
# JSON
# --------------------------------------------------------------------------

def grid_to_json(grid: FilterGrid) -> bytes:
    params = None
    if grid.system is not None:
        params = {
            "gamma1": grid.system.gamma1, "gamma2": grid.system.gamma2,
            "delta": grid.system.delta, "omega21": grid.system.omega21,
            "alpha_c": grid.system.alpha_c, "p": grid.system.p,
            "omega1": grid.field.omega1, "omega2": grid.field.omega2,
            "xi": grid.init.xi, "alpha_p": grid.init.alpha_p,
            "delta_k": grid.query.delta_k,
        }
    doc = {
        "format": JSON_FORMAT,
        "version": 1,
        "gridspec": {"u_min": grid.spec.u_min, "u_max": grid.spec.u_max,
                     "v_min": grid.spec.v_min, "v_max": grid.spec.v_max,
                     "nx": grid.spec.nx, "ny": grid.spec.ny},
        "params": params,
        "solver": grid.solver,
        "norm_constant": None if math.isnan(grid.norm_constant) else grid.norm_constant,
        "values": [float(x) for x in grid.values.ravel()],  # row-major, u outer
    }
    return (json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n").encode("ascii")


def grid_from_json(data: bytes) -> FilterGrid:
    try:
        doc = json.loads(data.decode("utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"not an atomloc grid JSON: {exc.msg}") from exc
    if not isinstance(doc, dict) or doc.get("format") != JSON_FORMAT:
        raise ValueError("not an atomloc grid JSON (missing format marker)")
    gs = doc["gridspec"]
    spec = GridSpec(u_min=gs["u_min"], u_max=gs["u_max"], v_min=gs["v_min"],
                    v_max=gs["v_max"], nx=int(gs["nx"]), ny=int(gs["ny"]))
    values = np.array(doc["values"], dtype=float).reshape(spec.nx, spec.ny)
    system = field = init = query = None
    if doc.get("params") is not None:
        pr = doc["params"]
        system = SystemParams(gamma1=pr["gamma1"], gamma2=pr["gamma2"],
                              delta=pr["delta"], omega21=pr["omega21"],
                              alpha_c=pr["alpha_c"], p=pr["p"])
        field = StandingWaveField(omega1=pr["omega1"], omega2=pr["omega2"])
        init = InitialState(xi=pr["xi"], alpha_p=pr["alpha_p"])
        query = EmissionQuery(delta_k=pr["delta_k"])
    nc = doc.get("norm_constant")
    return FilterGrid(values=values, norm_constant=math.nan if nc is None else float(nc),
                      spec=spec, system=system, field=field, init=init,
                      query=query, solver=doc.get("solver"))


def load_grid(path: str | Path) -> FilterGrid:
    """Load a grid from CSV or JSON, sniffing the format."""
    data = Path(path).read_bytes()
    head = data.lstrip()[:1]
    if head == b"#":
        return grid_from_csv(data)
    if head == b"{":
        return grid_from_json(data)
    raise ValueError(f"{path}: unrecognized grid format")


# --------------------------------------------------------------------------
# PPM heatmap
# --------------------------------------------------------------------------

def _fire_palette() -> np.ndarray:
    i = np.arange(256)
    r = np.minimum(255, 3 * i)
    g = np.clip(3 * (i - 85), 0, 255)
    b = np.clip(3 * (i - 170), 0, 255)
    return np.stack([r, g, b], axis=1).astype(np.uint8)


PALETTES = {
    "gray": np.repeat(np.arange(256, dtype=np.uint8)[:, None], 3, axis=1),
    "fire": _fire_palette(),
}


def render_heatmap(grid: FilterGrid, palette: str = "gray") -> bytes:
    """Render the grid as a binary PPM, one pixel per node.

    Intensity is value/global-max mapped linearly onto the 256-entry
    palette; columns run u ascending, rows v descending (v_max on top).
    """
    if palette not in PALETTES:
        raise ValueError(f"unknown palette {palette!r}; expected one of {sorted(PALETTES)}")
    table = PALETTES[palette]
    vals = grid.values
    vmax = float(vals.max())
    scaled = np.zeros_like(vals) if vmax <= 0 else vals / vmax
    idx = np.rint(255.0 * scaled).astype(np.int64)
    # image layout: rows = v descending, cols = u ascending
    img = table[idx.T[::-1, :]]
    header = f"P6\n{grid.spec.nx} {grid.spec.ny}\n255\n".encode("ascii")
    return header + img.tobytes()


# --------------------------------------------------------------------------
# Plot script
# --------------------------------------------------------------------------

def plot_script(csv_name: str) -> bytes:
    """Gnuplot script producing a surface-map view of an exported CSV."""
    lines = [
        "# surface map of an exported conditional-probability grid",
        'set datafile separator ","',
        "set pm3d map",
        'set xlabel "k1 x"',
        'set ylabel "k2 y"',
        'set cblabel "W"',
        "set size square",
        f'splot "{csv_name}" using 1:2:3 with pm3d notitle',
        "",
    ]
    return "\n".join(lines).encode("ascii")
