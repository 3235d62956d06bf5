"""
Scenario configuration: named presets and JSON files.

A scenario bundles every input of a grid computation.  The on-disk form
is a single flat JSON object with snake_case keys matching the type
definitions (angles in radians, rates in units of Gamma):

    {
      "name": "fig2d", "gamma1": 1.0, "gamma2": 1.0, "delta": 2.5,
      "omega21": 20.0, "alpha_c": 1.5707963267948966, "p": 0.0,
      "omega1": 5.0, "omega2": 5.0, "xi": 0.7853981633974483,
      "alpha_p": 0.0, "delta_k": 0.1,
      "u_min": -3.141592653589793, "u_max": 3.141592653589793,
      "v_min": -3.141592653589793, "v_max": 3.141592653589793,
      "nx": 201, "ny": 201, "solver": "paper-form"
    }

Grid bounds, node counts, and solver are optional and default to the
principal cell at 201 x 201 with the exact "general" solver.

The built-in presets fig2a..fig2d, fig3a..fig3d, fig4a..fig4d, fig5a,
fig5b mirror the standard figure parameter bundles (all rates in units
of Gamma): Delta = 2.5, omega21 = 20, Omega1 = Omega2 = 5, with the
coupling phase, photon detuning, and preparation angle varying per
panel.  Presets select the "paper-form" solver: the spike / crater /
lattice landscapes they are meant to reproduce are drawn from the
simplified amplitude, while the "general" solver is the exact form the
numeric oracle confirms (see `atomloc.closedform`).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

from .gridengine import GridSpec, SOLVERS, compute_grid, FilterGrid
from .model import (EmissionQuery, InitialState, StandingWaveField,
                    SystemParams, validate)


class ScenarioError(ValueError):
    """Malformed or inadmissible scenario input."""

    def __init__(self, message: str, details: tuple[str, ...] = ()):
        super().__init__(message if not details
                         else message + ": " + "; ".join(details))
        self.details = details


@dataclass(frozen=True)
class Scenario:
    name: str
    system: SystemParams
    field: StandingWaveField
    init: InitialState
    query: EmissionQuery
    gridspec: GridSpec
    solver: str = "general"

    def compute(self, spec: GridSpec | None = None, **kwargs) -> FilterGrid:
        return compute_grid(self.system, self.init, self.field, self.query,
                            spec or self.gridspec, solver=self.solver, **kwargs)

    def with_grid(self, nx: int | None = None, ny: int | None = None) -> "Scenario":
        spec = self.gridspec
        return replace(self, gridspec=replace(
            spec, nx=nx or spec.nx, ny=ny or spec.ny))


def _preset(name: str, alpha_c: float, delta_k: float,
            xi: float = math.pi / 4) -> Scenario:
    return Scenario(
        name=name,
        system=SystemParams(gamma1=1.0, gamma2=1.0, delta=2.5, omega21=20.0,
                            alpha_c=alpha_c, p=0.0),
        field=StandingWaveField(omega1=5.0, omega2=5.0),
        init=InitialState(xi=xi, alpha_p=0.0),
        query=EmissionQuery(delta_k=delta_k),
        gridspec=GridSpec(),
        solver="paper-form",
    )


PRESETS: dict[str, Scenario] = {s.name: s for s in (
    _preset("fig2a", math.pi / 2, 9.3),
    _preset("fig2b", math.pi / 2, 5.3),
    _preset("fig2c", math.pi / 2, 2.9),
    _preset("fig2d", math.pi / 2, 0.1),
    _preset("fig3a", 0.0, 12.4),
    _preset("fig3b", 0.0, 9.5),
    _preset("fig3c", 0.0, 6.0),
    _preset("fig3d", 0.0, 2.4),
    _preset("fig4a", math.pi, 12.4),
    _preset("fig4b", math.pi, 9.5),
    _preset("fig4c", math.pi, 6.0),
    _preset("fig4d", math.pi, 2.4),
    _preset("fig5a", math.pi, 2.4, xi=0.0),
    _preset("fig5b", math.pi, 2.4, xi=math.pi / 2),
)}

_REQUIRED = ("name", "gamma1", "gamma2", "delta", "omega21", "alpha_c", "p",
             "omega1", "omega2", "xi", "alpha_p", "delta_k")
_OPTIONAL = {"u_min": -math.pi, "u_max": math.pi, "v_min": -math.pi,
             "v_max": math.pi, "nx": 201, "ny": 201, "solver": "general"}
_NUMERIC = set(_REQUIRED[1:]) | {"u_min", "u_max", "v_min", "v_max"}


def scenario_from_dict(doc: dict) -> Scenario:
    """Build and validate a Scenario from a flat mapping."""
    problems: list[str] = []
    missing = [k for k in _REQUIRED if k not in doc]
    if missing:
        problems.append("missing fields: " + ", ".join(missing))
    unknown = [k for k in doc if k not in _REQUIRED and k not in _OPTIONAL]
    if unknown:
        problems.append("unknown fields: " + ", ".join(sorted(unknown)))
    for key in _NUMERIC:
        if key in doc and not isinstance(doc.get(key), (int, float)):
            problems.append(f"field {key!r} must be a number")
    for key in ("nx", "ny"):
        if key in doc and not isinstance(doc.get(key), int):
            problems.append(f"field {key!r} must be an integer")
    if problems:
        raise ScenarioError("invalid scenario document", tuple(problems))

    get = lambda k: doc.get(k, _OPTIONAL.get(k))
    solver = get("solver")
    if solver not in SOLVERS:
        raise ScenarioError("invalid scenario document",
                            (f"solver must be one of {SOLVERS} (got {solver!r})",))
    system = SystemParams(gamma1=float(doc["gamma1"]), gamma2=float(doc["gamma2"]),
                          delta=float(doc["delta"]), omega21=float(doc["omega21"]),
                          alpha_c=float(doc["alpha_c"]), p=float(doc["p"]))
    field = StandingWaveField(omega1=float(doc["omega1"]), omega2=float(doc["omega2"]))
    init = InitialState(xi=float(doc["xi"]), alpha_p=float(doc["alpha_p"]))
    query = EmissionQuery(delta_k=float(doc["delta_k"]))
    try:
        gridspec = GridSpec(u_min=float(get("u_min")), u_max=float(get("u_max")),
                            v_min=float(get("v_min")), v_max=float(get("v_max")),
                            nx=int(get("nx")), ny=int(get("ny")))
    except ValueError as exc:
        raise ScenarioError("invalid scenario document", (str(exc),)) from exc
    if not math.isfinite(query.delta_k):
        raise ScenarioError("invalid scenario document", ("delta_k must be finite",))

    report = validate(system, field, init)
    if report.errors:
        raise ScenarioError("scenario fails validation",
                            tuple(v.message for v in report.errors))
    return Scenario(name=str(doc["name"]), system=system, field=field,
                    init=init, query=query, gridspec=gridspec, solver=solver)


def scenario_to_dict(sc: Scenario) -> dict:
    return {
        "name": sc.name,
        "gamma1": sc.system.gamma1, "gamma2": sc.system.gamma2,
        "delta": sc.system.delta, "omega21": sc.system.omega21,
        "alpha_c": sc.system.alpha_c, "p": sc.system.p,
        "omega1": sc.field.omega1, "omega2": sc.field.omega2,
        "xi": sc.init.xi, "alpha_p": sc.init.alpha_p,
        "delta_k": sc.query.delta_k,
        "u_min": sc.gridspec.u_min, "u_max": sc.gridspec.u_max,
        "v_min": sc.gridspec.v_min, "v_max": sc.gridspec.v_max,
        "nx": sc.gridspec.nx, "ny": sc.gridspec.ny,
        "solver": sc.solver,
    }


def load_scenario(source: str | Path) -> Scenario:
    """Load a scenario from a preset id or a JSON file path.

    Preset ids resolve first; anything else is treated as a path.
    Parse errors carry line/column diagnostics, validation errors the
    violated constraints.
    """
    key = str(source)
    if key in PRESETS:
        return PRESETS[key]
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}", (str(exc),)) from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(
            f"cannot parse scenario {path}",
            (f"line {exc.lineno}, column {exc.colno}: {exc.msg}",)) from exc
    if not isinstance(doc, dict):
        raise ScenarioError(f"cannot parse scenario {path}",
                            ("top-level JSON value must be an object",))
    return scenario_from_dict(doc)
