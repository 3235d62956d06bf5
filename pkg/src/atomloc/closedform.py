"""
Analytic eigenmode solution of the reduced two-amplitude decay dynamics
and the long-time amplitude of the spontaneously emitted photon.

After eliminating the vacuum modes and removing the fast optical phases,
the excited-state amplitudes obey

    db1/dt = -(Gamma/2) b1 - i Omega e^{+i alpha_c} b2
    db2/dt = -i Omega e^{-i alpha_c} b1 + (i Delta - Gamma/2) b2

with a signed, position-dependent Rabi value Omega.  The coupling phase
is split symmetrically between the two equations, which makes the
eigenvalues

    lambda_{1,2} = i Delta/2 - Gamma/2 +- (i/2) sqrt(4 Omega^2 + Delta^2)

independent of alpha_c (trace i Delta - Gamma, determinant
(-Gamma/2)(i Delta - Gamma/2) + Omega^2).  Branch ordering is fixed by
the principal square root, with the "+" branch assigned to lambda1.

Two long-time photon amplitudes are provided:

- `emitted_amplitude` evaluates the exact expression obtained from the
  modal decomposition.  It is the form that agrees with direct numeric
  integration of the equations of motion (see `atomloc.oracle`).
- `emitted_amplitude_paper_form` evaluates the simplified closed form
  that is usually written on paper: denominators linear in Omega, i.e.
  the dressed eigenfrequency sqrt(4 Omega^2 + Delta^2)/2 replaced by
  Omega, and the preparation amplitudes entering through sin/cos swapped
  relative to the initial state cos(xi)|1> + e^{i alpha_p} sin(xi)|2>.
  The two forms coincide at Delta = 0, xi = pi/4; away from that point
  the simplified form shifts the emission resonance from the dressed
  frequency to the bare Rabi value, which visibly reshapes the position
  landscape.  It is kept because the spike/crater/lattice figure presets
  are defined against it.

Both emitted-amplitude routines use unit vacuum coupling constants for
the two decay channels; any constant prefactor is absorbed by the grid
normalization downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import EmissionQuery, InitialState, SystemParams

#: Relative scale below which the two eigenvalues are treated as confluent.
DEGENERACY_RTOL = 1e-9

#: Denominators smaller than this (in units of Gamma) are flagged, not rejected.
NEAR_SINGULAR_FLOOR = 1e-12


def _require_closed_form(params: SystemParams) -> float:
    """Reject parameter sets the closed form does not cover; return Gamma."""
    if params.p != 0.0:
        raise ValueError(f"closed form requires p = 0 (got p={params.p})")
    if params.gamma1 != params.gamma2:
        raise ValueError("closed form requires equal decay rates "
                         f"(gamma1={params.gamma1}, gamma2={params.gamma2})")
    if params.gamma1 <= 0:
        raise ValueError(f"decay rate must be positive (gamma={params.gamma1})")
    return params.gamma1


@dataclass(frozen=True)
class ModalSolution:
    """Eigenvalues and modal coefficients of (b1, b2).

    For distinct eigenvalues

        b1(t) = c1 e^{lambda1 t} + c1p e^{lambda2 t}
        b2(t) = c2 e^{lambda1 t} + c2p e^{lambda2 t}

    and c1 + c1p = b1(0), c2 + c2p = b2(0).  In the confluent branch
    (lambda1 == lambda2 within `DEGENERACY_RTOL`) the representation is
    b_n(t) = (b_n(0) + linear_coeffs[n] * t) e^{lambda t} and the `c`
    pairs hold (b_n(0), 0).
    """

    lambda1: complex
    lambda2: complex
    c1: complex
    c1p: complex
    c2: complex
    c2p: complex
    degenerate: bool
    linear_coeffs: tuple[complex, complex]

    def reconstruct(self, t):
        """Amplitudes (b1, b2) at time(s) t from the modal data."""
        t = np.asarray(t, dtype=float)
        e1 = np.exp(self.lambda1 * t)
        if self.degenerate:
            d1, d2 = self.linear_coeffs
            return ((self.c1 + self.c1p + d1 * t) * e1,
                    (self.c2 + self.c2p + d2 * t) * e1)
        e2 = np.exp(self.lambda2 * t)
        return (self.c1 * e1 + self.c1p * e2,
                self.c2 * e1 + self.c2p * e2)


@dataclass(frozen=True)
class EmittedAmplitude:
    """Long-time photon amplitude and its four resonance terms.

    `channel_terms` holds (channel1/mode1, channel1/mode2, channel2/mode1,
    channel2/mode2); their sum equals `value`.  `near_singular` is set when
    any denominator magnitude drops below `NEAR_SINGULAR_FLOOR`.
    """

    value: complex
    channel_terms: tuple[complex, complex, complex, complex]
    near_singular: bool = False


def eigenrates(params: SystemParams, omega: float) -> tuple[complex, complex]:
    """Complex decay-oscillation rates (lambda1, lambda2) at Rabi value omega."""
    gamma = _require_closed_form(params)
    rad = np.sqrt(complex(4.0 * omega * omega + params.delta * params.delta))
    base = 0.5j * params.delta - 0.5 * gamma
    return complex(base + 0.5j * rad), complex(base - 0.5j * rad)


def modal_solution(params: SystemParams, init: InitialState,
                   omega: float) -> ModalSolution:
    """Solve the two-amplitude dynamics for the given preparation."""
    gamma = _require_closed_form(params)
    l1, l2 = eigenrates(params, omega)
    b10, b20 = init.amplitudes()
    cup = 1j * omega * np.exp(1j * params.alpha_c)    # i Omega e^{+i alpha_c}
    cdn = 1j * omega * np.exp(-1j * params.alpha_c)   # i Omega e^{-i alpha_c}

    dlam = l2 - l1
    if abs(dlam) < DEGENERACY_RTOL * max(1.0, abs(l1), abs(l2)):
        # b_n(t) = (b_n(0) + d_n t) e^{lambda t} with d_n = b_n'(0) - lambda b_n(0)
        db10 = -0.5 * gamma * b10 - cup * b20
        db20 = -cdn * b10 + (1j * params.delta - 0.5 * gamma) * b20
        return ModalSolution(l1, l2, b10, 0j, b20, 0j, True,
                             (complex(db10 - l1 * b10), complex(db20 - l1 * b20)))

    c1 = ((l2 + 0.5 * gamma) * b10 + cup * b20) / dlam
    c1p = ((l1 + 0.5 * gamma) * b10 + cup * b20) / -dlam
    c2 = (cdn * b10 + (l2 + 0.5 * gamma - 1j * params.delta) * b20) / dlam
    c2p = (cdn * b10 + (l1 + 0.5 * gamma - 1j * params.delta) * b20) / -dlam
    return ModalSolution(l1, l2, complex(c1), complex(c1p), complex(c2),
                         complex(c2p), False, (0j, 0j))


def emitted_amplitude(params: SystemParams, init: InitialState, omega: float,
                      query: EmissionQuery) -> EmittedAmplitude:
    """Exact long-time amplitude of the emitted photon.

    Channel-1 terms carry denominators delta_k + omega21/2 - i*lambda_j,
    channel-2 terms delta_k - omega21/2 - Delta - i*lambda_j.  In the
    confluent branch the t*e^{lambda t} part contributes an extra
    squared-denominator term folded into the corresponding mode-1 slot.
    """
    sol = modal_solution(params, init, omega)
    nu1 = query.delta_k + 0.5 * params.omega21
    nu2 = query.delta_k - 0.5 * params.omega21 - params.delta
    d11 = nu1 - 1j * sol.lambda1
    d12 = nu1 - 1j * sol.lambda2
    d21 = nu2 - 1j * sol.lambda1
    d22 = nu2 - 1j * sol.lambda2
    if sol.degenerate:
        lin1, lin2 = sol.linear_coeffs
        terms = ((sol.c1 + sol.c1p) / d11 + 1j * lin1 / d11 ** 2, 0j,
                 (sol.c2 + sol.c2p) / d21 + 1j * lin2 / d21 ** 2, 0j)
    else:
        terms = (sol.c1 / d11, sol.c1p / d12, sol.c2 / d21, sol.c2p / d22)
    near = min(abs(d11), abs(d12), abs(d21), abs(d22)) < NEAR_SINGULAR_FLOOR
    return EmittedAmplitude(complex(sum(terms)), tuple(map(complex, terms)), near)


def emitted_amplitude_paper_form(params: SystemParams, init: InitialState,
                                 omega: float,
                                 query: EmissionQuery) -> EmittedAmplitude:
    """Simplified long-time amplitude with bare-Rabi denominators.

    Evaluates, verbatim,

        (1/2) [ (sin xi - e^{+i a_c} cos xi)/(d_k + w21/2 + Omega + i G/2)
              + (sin xi + e^{+i a_c} cos xi)/(d_k + w21/2 - Omega + i G/2) ]
      + (1/2) [ (cos xi - e^{-i a_c} sin xi)/(d_k - w21/2 - D + Omega + i G/2)
              + (cos xi + e^{-i a_c} sin xi)/(d_k - w21/2 - D - Omega + i G/2) ]

    The pump phase alpha_p does not appear in this form (it is written
    for alpha_p = 0).  Provided for comparison against
    `emitted_amplitude`; exact agreement holds at Delta = 0, xi = pi/4.
    """
    gamma = _require_closed_form(params)
    s, c = np.sin(init.xi), np.cos(init.xi)
    ep = np.exp(1j * params.alpha_c)
    ig = 0.5j * gamma
    d1 = query.delta_k + 0.5 * params.omega21 + omega + ig
    d2 = query.delta_k + 0.5 * params.omega21 - omega + ig
    d3 = query.delta_k - 0.5 * params.omega21 - params.delta + omega + ig
    d4 = query.delta_k - 0.5 * params.omega21 - params.delta - omega + ig
    terms = (0.5 * (s - ep * c) / d1, 0.5 * (s + ep * c) / d2,
             0.5 * (c - np.conj(ep) * s) / d3, 0.5 * (c + np.conj(ep) * s) / d4)
    near = min(abs(d1), abs(d2), abs(d3), abs(d4)) < NEAR_SINGULAR_FLOOR
    return EmittedAmplitude(complex(sum(terms)), tuple(map(complex, terms)), near)


# --------------------------------------------------------------------------
# Vectorized kernels over arrays of Rabi values (used by the grid engine).
# --------------------------------------------------------------------------

def amplitude_general_array(params: SystemParams, init: InitialState,
                            query: EmissionQuery, omega: np.ndarray) -> np.ndarray:
    """`emitted_amplitude(...).value` evaluated elementwise over `omega`."""
    gamma = _require_closed_form(params)
    omega = np.asarray(omega, dtype=float)
    delta = params.delta
    rad = np.sqrt(4.0 * omega * omega + delta * delta + 0j)
    base = 0.5j * delta - 0.5 * gamma
    l1 = base + 0.5j * rad
    l2 = base - 0.5j * rad

    b10, b20 = init.amplitudes()
    cup = 1j * omega * np.exp(1j * params.alpha_c)
    cdn = 1j * omega * np.exp(-1j * params.alpha_c)

    dlam = l2 - l1
    degen = np.abs(dlam) < DEGENERACY_RTOL * np.maximum(
        1.0, np.maximum(np.abs(l1), np.abs(l2)))
    safe = np.where(degen, 1.0, dlam)

    c1 = ((l2 + 0.5 * gamma) * b10 + cup * b20) / safe
    c1p = ((l1 + 0.5 * gamma) * b10 + cup * b20) / -safe
    c2 = (cdn * b10 + (l2 + 0.5 * gamma - 1j * delta) * b20) / safe
    c2p = (cdn * b10 + (l1 + 0.5 * gamma - 1j * delta) * b20) / -safe

    nu1 = query.delta_k + 0.5 * params.omega21
    nu2 = query.delta_k - 0.5 * params.omega21 - delta
    d11 = nu1 - 1j * l1
    d12 = nu1 - 1j * l2
    d21 = nu2 - 1j * l1
    d22 = nu2 - 1j * l2
    amp = c1 / d11 + c1p / d12 + c2 / d21 + c2p / d22

    if np.any(degen):
        db10 = -0.5 * gamma * b10 - cup * b20
        db20 = -cdn * b10 + (1j * delta - 0.5 * gamma) * b20
        lin1 = db10 - l1 * b10
        lin2 = db20 - l1 * b20
        conflu = (b10 / d11 + 1j * lin1 / d11 ** 2
                  + b20 / d21 + 1j * lin2 / d21 ** 2)
        amp = np.where(degen, conflu, amp)
    return amp


def amplitude_paper_array(params: SystemParams, init: InitialState,
                          query: EmissionQuery, omega: np.ndarray) -> np.ndarray:
    """`emitted_amplitude_paper_form(...).value` elementwise over `omega`."""
    gamma = _require_closed_form(params)
    omega = np.asarray(omega, dtype=float)
    s, c = np.sin(init.xi), np.cos(init.xi)
    ep = np.exp(1j * params.alpha_c)
    ig = 0.5j * gamma
    base1 = query.delta_k + 0.5 * params.omega21
    base2 = query.delta_k - 0.5 * params.omega21 - params.delta
    return (0.5 * (s - ep * c) / (base1 + omega + ig)
            + 0.5 * (s + ep * c) / (base1 - omega + ig)
            + 0.5 * (c - np.conj(ep) * s) / (base2 + omega + ig)
            + 0.5 * (c + np.conj(ep) * s) / (base2 - omega + ig))
