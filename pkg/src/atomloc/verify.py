"""
Closed-form-versus-oracle equivalence sweeps.

Samples quasi-random (Halton) positions over a scenario's grid domain,
evaluates the exact closed-form emitted amplitude and the numeric
oracle at each, and reports the largest absolute deviation.  All
sampled cases, across all scenarios, are advanced in one shared batch
integration, so a full preset sweep costs one oracle run.
"""

from __future__ import annotations

import numpy as np

from . import closedform, oracle
from .model import rabi_at
from .scenario import Scenario


def halton(n: int, base: int, skip: int = 1) -> np.ndarray:
    """First n entries of the Halton sequence for the given base."""
    out = np.empty(n)
    for k in range(n):
        i = k + skip
        f, x = 1.0, 0.0
        while i > 0:
            f /= base
            x += f * (i % base)
            i //= base
        out[k] = x
    return out


def sample_points(scenario: Scenario, n: int) -> tuple[np.ndarray, np.ndarray]:
    """n quasi-random (u, v) points covering the scenario's grid domain."""
    gs = scenario.gridspec
    u = gs.u_min + (gs.u_max - gs.u_min) * halton(n, 2)
    v = gs.v_min + (gs.v_max - gs.v_min) * halton(n, 3)
    return u, v


def oracle_deviation(scenarios: list[Scenario], samples: int = 25,
                     cfg: oracle.IntegrationConfig | None = None) -> dict[str, float]:
    """Max |closed-form - numeric| per scenario over Halton-sampled points."""
    cases = []
    closed = []
    for sc in scenarios:
        u, v = sample_points(sc, samples)
        om = np.asarray(rabi_at(sc.field, u, v), dtype=float)
        closed.append(closedform.amplitude_general_array(
            sc.system, sc.init, sc.query, om))
        cases.extend((sc.system, sc.init, sc.query, float(w)) for w in om)
    numeric = oracle.emitted_amplitudes_multi(cases, cfg)
    out: dict[str, float] = {}
    pos = 0
    for sc, cl in zip(scenarios, closed):
        nm = numeric[pos:pos + len(cl)]
        out[sc.name] = float(np.max(np.abs(cl - nm)))
        pos += len(cl)
    return out
