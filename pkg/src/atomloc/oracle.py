"""
Independent numeric verifier for the closed-form solution.

This module integrates the reduced amplitude equations

    db1/dt = -(Gamma1/2) b1 - i Omega e^{+i alpha_c} b2
    db2/dt = -i Omega e^{-i alpha_c} b1 + (i Delta - Gamma2/2) b2

directly in the time domain with an adaptive embedded Runge-Kutta 5(4)
pair (Dormand-Prince), and evaluates the emitted-photon amplitude

    b_out = -i * Integral_0^inf [ b1(t) e^{i (delta_k + omega21/2) t}
                                + b2(t) e^{i (delta_k - omega21/2 - Delta) t} ] dt

by per-step quadrature: on every accepted step the integrand is sampled
at Gauss-Legendre nodes through the integrator's dense output, so the
quadrature order is consistent with the integrator's.  Nothing here
shares algebra with `atomloc.closedform` beyond the equations of motion;
in particular no eigen-decomposition is used.

Step control obeys the local tolerance and is additionally capped at one
twentieth of the fastest phase period (the emission phases above plus
the internal dressed frequency), which prevents phase aliasing in the
oscillatory integral.  Unequal decay rates are accepted here even though
the closed form rejects them.

Batch runs share one adaptive step sequence (the most demanding system
governs); results are deterministic for identical call inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import EmissionQuery, InitialState, SystemParams

__all__ = [
    "IntegrationConfig", "AmplitudeTrace", "NonConvergenceError",
    "integrate_amplitudes", "emitted_amplitude_numeric",
    "emitted_amplitudes_batch", "emitted_amplitudes_multi",
]


class NonConvergenceError(RuntimeError):
    """Raised when t_max is reached with amplitudes above amp_floor."""


@dataclass(frozen=True)
class IntegrationConfig:
    """Adaptive-integration knobs, times in units of 1/Gamma.

    dt is the initial trial step; the controller adapts from there.
    t_max = 60 leaves e^{-30} ~ 1e-13 of the slowest Gamma = 1 envelope,
    below the default amp_floor.
    """

    dt: float = 1e-3
    t_max: float = 60.0
    amp_floor: float = 1e-12
    tol: float = 1e-10

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ValueError(f"dt must be positive (got {self.dt})")
        if not self.t_max > 0:
            raise ValueError(f"t_max must be positive (got {self.t_max})")
        if not 0 < self.amp_floor <= 1e-6:
            raise ValueError(f"amp_floor must lie in (0, 1e-6] (got {self.amp_floor})")
        if not 0 < self.tol <= 1e-6:
            raise ValueError(f"tol must lie in (0, 1e-6] (got {self.tol})")

    @staticmethod
    def for_params(params: SystemParams) -> "IntegrationConfig":
        """Default config rescaled to the slowest decay rate."""
        gmin = min(params.gamma1, params.gamma2)
        if gmin <= 0:
            raise ValueError("decay rates must be positive")
        return IntegrationConfig(t_max=60.0 / gmin)


@dataclass(frozen=True)
class AmplitudeTrace:
    """Accepted-step samples of (b1, b2) and the stop reason."""

    times: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    termination: str  # "amp_floor" or "t_max"

    def norm(self) -> np.ndarray:
        """Excited-state norm |b1|^2 + |b2|^2 at the sample times."""
        return np.abs(self.b1) ** 2 + np.abs(self.b2) ** 2


# --------------------------------------------------------------------------
# Dormand-Prince 5(4) tableau, error weights, and dense-output coefficients.
# --------------------------------------------------------------------------

_A = (
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)
_D = (-12715105075 / 11282082432, 0.0, 87487479700 / 32700410799,
      -10690763975 / 1880347072, 701980252875 / 199316789632,
      -1453857185 / 822651844, 69997945 / 29380423)

# Gauss-Legendre nodes/weights mapped to [0, 1]; order 8 leaves the
# per-step quadrature error far below the dense-output error.
_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)
_GL_T = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W

_SAFETY, _SHRINK, _GROW = 0.9, 0.2, 5.0


def _phase_cap(omega_fast: float, t_max: float) -> float:
    """Max step: a twentieth of the fastest phase period."""
    if omega_fast <= 0:
        return t_max
    return (2.0 * math.pi / omega_fast) / 20.0


def _dopri5(mats: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray],
            y0: np.ndarray, cfg: IntegrationConfig, hmax: float,
            nu: np.ndarray | None, record: bool):
    """Shared-step batched integration core.

    mats   -- (a11, a12, a21, a22), each shape (B,)
    y0     -- initial amplitudes, shape (B, 2)
    nu     -- emission phase rates per channel, shape (B, 2), or None
    record -- keep accepted-step samples

    Returns (integrals (B,2) | None, times, ys, termination).
    """
    a11, a12, a21, a22 = mats

    def rhs(y: np.ndarray) -> np.ndarray:
        out = np.empty_like(y)
        out[:, 0] = a11 * y[:, 0] + a12 * y[:, 1]
        out[:, 1] = a21 * y[:, 0] + a22 * y[:, 1]
        return out

    t = 0.0
    y = y0.astype(complex)
    integrals = None if nu is None else np.zeros_like(y)
    times = [0.0]
    ys = [y.copy()] if record else []
    k1 = rhs(y)
    h = min(cfg.dt, hmax, cfg.t_max)
    hmin = max(1e-14, 1e-12 * cfg.t_max)
    termination = "t_max"

    if float(np.max(np.abs(y))) < cfg.amp_floor:
        return integrals, times, ys, "amp_floor"

    while t < cfg.t_max:
        h = min(h, cfg.t_max - t)
        k2 = rhs(y + h * (_A[0][0] * k1))
        k3 = rhs(y + h * (_A[1][0] * k1 + _A[1][1] * k2))
        k4 = rhs(y + h * (_A[2][0] * k1 + _A[2][1] * k2 + _A[2][2] * k3))
        k5 = rhs(y + h * (_A[3][0] * k1 + _A[3][1] * k2 + _A[3][2] * k3
                          + _A[3][3] * k4))
        k6 = rhs(y + h * (_A[4][0] * k1 + _A[4][1] * k2 + _A[4][2] * k3
                          + _A[4][3] * k4 + _A[4][4] * k5))
        ynew = y + h * (_A[5][0] * k1 + _A[5][2] * k3 + _A[5][3] * k4
                        + _A[5][4] * k5 + _A[5][5] * k6)
        k7 = rhs(ynew)
        errv = h * (_E[0] * k1 + _E[2] * k3 + _E[3] * k4 + _E[4] * k5
                    + _E[5] * k6 + _E[6] * k7)
        # target a tenth of the configured tolerance locally; accumulation
        # over a trace then keeps the end-to-end amplitude error within
        # the 1e-8 budget at default settings
        scale = (0.1 * cfg.tol) * (1.0 + np.maximum(np.abs(y), np.abs(ynew)))
        err = float(np.sqrt(np.mean(np.abs(errv / scale) ** 2)))

        if err <= 1.0:
            if integrals is not None:
                # dense polynomial y(t + theta h), theta in [0, 1]
                ydiff = ynew - y
                bspl = h * k1 - ydiff
                rc4 = ydiff - h * k7 - bspl
                rc5 = h * (_D[0] * k1 + _D[2] * k3 + _D[3] * k4 + _D[4] * k5
                           + _D[5] * k6 + _D[6] * k7)
                th = _GL_T[:, None, None]
                dense = y + th * (ydiff + (1.0 - th)
                                  * (bspl + th * (rc4 + (1.0 - th) * rc5)))
                phase = np.exp(1j * nu * (t + _GL_T[:, None, None] * h))
                integrals += h * np.einsum("g,gbc->bc", _GL_W, dense * phase)
            t += h
            y = ynew
            k1 = k7
            if record:
                times.append(t)
                ys.append(y.copy())
            else:
                times.append(t)
            if float(np.max(np.abs(y))) < cfg.amp_floor:
                termination = "amp_floor"
                break
            factor = _GROW if err == 0.0 else min(
                _GROW, max(_SHRINK, _SAFETY * err ** -0.2))
            h = min(h * factor, hmax)
        else:
            h = max(h * max(_SHRINK, _SAFETY * err ** -0.2), hmin)
            if h <= hmin:
                raise RuntimeError("step size underflow in adaptive integration")

    return integrals, times, ys, termination


def _check_admissible(params: SystemParams) -> None:
    if params.p != 0.0:
        raise ValueError(f"oracle requires p = 0 (got p={params.p})")
    if params.gamma1 <= 0 or params.gamma2 <= 0:
        raise ValueError("decay rates must be positive "
                         f"(gamma1={params.gamma1}, gamma2={params.gamma2})")


def _matrices(params: SystemParams, omegas: np.ndarray):
    a11 = np.full_like(omegas, -0.5 * params.gamma1, dtype=complex)
    a12 = -1j * omegas * np.exp(1j * params.alpha_c)
    a21 = -1j * omegas * np.exp(-1j * params.alpha_c)
    a22 = np.full_like(omegas, 1j * params.delta - 0.5 * params.gamma2,
                       dtype=complex)
    return a11, a12, a21, a22


def integrate_amplitudes(params: SystemParams, init: InitialState, omega: float,
                         cfg: IntegrationConfig | None = None) -> AmplitudeTrace:
    """Integrate (b1, b2) for one Rabi value; samples at accepted steps.

    Terminates once max(|b1|, |b2|) falls below cfg.amp_floor; reports
    termination="t_max" (non-convergence) otherwise.
    """
    cfg = cfg or IntegrationConfig()
    _check_admissible(params)
    om = np.array([float(omega)])
    mats = _matrices(params, om)
    y0 = np.array([init.amplitudes()], dtype=complex)
    wdyn = math.sqrt(4.0 * omega * omega + params.delta ** 2)
    hmax = _phase_cap(wdyn, cfg.t_max)
    _, times, ys, termination = _dopri5(mats, y0, cfg, hmax, None, True)
    arr = np.asarray(ys)
    return AmplitudeTrace(np.asarray(times), arr[:, 0, 0], arr[:, 0, 1],
                          termination)


def integrate_amplitudes_batch(
        cases: Sequence[tuple[SystemParams, InitialState, float]],
        cfg: IntegrationConfig | None = None):
    """Traces for many (params, init, omega) cases on one shared step grid.

    Returns (times, b1s, b2s, termination) with b-arrays shaped
    (num_steps, num_cases).  Used for invariant sweeps where thousands
    of single-trace calls would be needlessly slow.
    """
    cfg = cfg or IntegrationConfig()
    if not cases:
        raise ValueError("need at least one case")
    for params, _, _ in cases:
        _check_admissible(params)
    om = np.array([float(c[2]) for c in cases])
    g1 = np.array([c[0].gamma1 for c in cases])
    g2 = np.array([c[0].gamma2 for c in cases])
    dl = np.array([c[0].delta for c in cases])
    ac = np.array([c[0].alpha_c for c in cases])
    mats = (-0.5 * g1 + 0j, -1j * om * np.exp(1j * ac),
            -1j * om * np.exp(-1j * ac), 1j * dl - 0.5 * g2)
    y0 = np.array([c[1].amplitudes() for c in cases], dtype=complex)
    wdyn = float(np.max(np.sqrt(4.0 * om * om + dl * dl)))
    hmax = _phase_cap(wdyn, cfg.t_max)
    _, times, ys, termination = _dopri5(mats, y0, cfg, hmax, None, True)
    arr = np.asarray(ys)
    return np.asarray(times), arr[:, :, 0], arr[:, :, 1], termination


def emitted_amplitudes_multi(
        cases: Sequence[tuple[SystemParams, InitialState, EmissionQuery, float]],
        cfg: IntegrationConfig | None = None) -> np.ndarray:
    """Emitted-photon amplitudes for a heterogeneous batch of cases.

    Each case is (params, init, query, omega).  All cases are advanced
    with one shared adaptive step sequence, which makes sweeps roughly
    batch-size times cheaper than repeated single calls.
    """
    cfg = cfg or IntegrationConfig()
    if not cases:
        return np.zeros(0, dtype=complex)
    for params, _, _, _ in cases:
        _check_admissible(params)

    om = np.array([float(c[3]) for c in cases])
    g1 = np.array([c[0].gamma1 for c in cases])
    g2 = np.array([c[0].gamma2 for c in cases])
    dl = np.array([c[0].delta for c in cases])
    ac = np.array([c[0].alpha_c for c in cases])
    mats = (-0.5 * g1 + 0j, -1j * om * np.exp(1j * ac),
            -1j * om * np.exp(-1j * ac), 1j * dl - 0.5 * g2)
    y0 = np.array([c[1].amplitudes() for c in cases], dtype=complex)
    nu = np.array([[c[2].delta_k + 0.5 * c[0].omega21,
                    c[2].delta_k - 0.5 * c[0].omega21 - c[0].delta]
                   for c in cases])

    wfast = float(np.max(np.maximum(
        np.max(np.abs(nu), axis=1), np.sqrt(4.0 * om * om + dl * dl))))
    hmax = _phase_cap(wfast, cfg.t_max)
    integrals, _, _, termination = _dopri5(mats, y0, cfg, hmax, nu, False)
    if termination != "amp_floor":
        raise NonConvergenceError(
            f"amplitudes above amp_floor={cfg.amp_floor} at t_max={cfg.t_max}")
    return -1j * (integrals[:, 0] + integrals[:, 1])


def emitted_amplitudes_batch(params: SystemParams, init: InitialState,
                             query: EmissionQuery, omegas,
                             cfg: IntegrationConfig | None = None) -> np.ndarray:
    """Emitted amplitudes for one scenario over many Rabi values."""
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    return emitted_amplitudes_multi(
        [(params, init, query, float(w)) for w in omegas], cfg)


def emitted_amplitude_numeric(params: SystemParams, init: InitialState,
                              omega: float, query: EmissionQuery,
                              cfg: IntegrationConfig | None = None) -> complex:
    """Single-point emitted amplitude by integration plus quadrature.

    Absolute error stays within ~1e-8 for the default config; the tail
    truncated at amp_floor contributes at most ~4*amp_floor/Gamma.
    Raises NonConvergenceError if the trace never reaches amp_floor.
    """
    return complex(emitted_amplitudes_multi(
        [(params, init, query, float(omega))], cfg)[0])
