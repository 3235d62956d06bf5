"""
Parameter model and unit conventions.

Conventions
-----------
- Every rate and frequency (decay rates, detunings, level splitting, Rabi
  amplitudes) is expressed in units of the common decay rate Gamma, so
  Gamma = 1 is the natural scale and time is measured in 1/Gamma.
- Positions enter only through the dimensionless standing-wave phases
  u = k1*x and v = k2*y; wavenumbers never appear on their own.  The
  principal cell is [-pi, pi] x [-pi, pi].
- All angles (xi, alpha_c, alpha_p) are radians.

The closed-form solver requires equal decay rates and a vanishing
dipole-interference parameter p; `validate` reports violations of these
and related constraints without raising, so callers can decide severity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SystemParams:
    """Atomic and drive constants (rates in units of Gamma, angles in rad)."""

    gamma1: float = 1.0   # decay rate |1> -> |0>
    gamma2: float = 1.0   # decay rate |2> -> |0>
    delta: float = 0.0    # drive detuning, coupling frequency minus |2>-|1> splitting
    omega21: float = 20.0  # splitting of the two upper levels
    alpha_c: float = 0.0  # coupling-field phase
    p: float = 0.0        # dipole-alignment interference parameter


@dataclass(frozen=True)
class StandingWaveField:
    """Rabi amplitudes of the two orthogonal standing waves."""

    omega1: float = 5.0
    omega2: float = 5.0


@dataclass(frozen=True)
class InitialState:
    """Preparation of the upper doublet: cos(xi)|1> + e^{i alpha_p} sin(xi)|2>.

    The amplitude pair has unit norm for every xi by construction.
    """

    xi: float = math.pi / 4
    alpha_p: float = 0.0

    def amplitudes(self) -> tuple[complex, complex]:
        """Initial amplitudes (b1(0), b2(0))."""
        return (complex(math.cos(self.xi)),
                complex(math.cos(self.alpha_p), math.sin(self.alpha_p)) * math.sin(self.xi))


@dataclass(frozen=True)
class EmissionQuery:
    """Detuning delta_k of the detected photon from the mean transition frequency."""

    delta_k: float = 0.0


def rabi_at(field: StandingWaveField, u, v):
    """Signed Rabi value Omega(u, v) = Omega1*sin(u) + Omega2*sin(v).

    Accepts scalars or numpy arrays; exactly 2*pi-periodic in each
    argument up to floating rounding, and odd under (u, v) -> (-u, -v).
    """
    return field.omega1 * np.sin(u) + field.omega2 * np.sin(v)


# --------------------------------------------------------------------------
# Validation
# --------------------------------------------------------------------------

#: Ratio of level splitting to decay rate below which dropping the fast
#: counter-rotating terms becomes questionable.
SPLITTING_RATIO_FLOOR = 10.0


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    severity: str = "error"  # "error" blocks solver paths, "warning" does not


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def errors(self) -> tuple[Violation, ...]:
        return tuple(v for v in self.violations if v.severity == "error")

    @property
    def warnings(self) -> tuple[Violation, ...]:
        return tuple(v for v in self.violations if v.severity == "warning")

    @property
    def ok(self) -> bool:
        """True when no error-level violation is present."""
        return not self.errors

    def __bool__(self) -> bool:
        return self.ok

    def raise_if_errors(self) -> None:
        if self.errors:
            raise ValueError("; ".join(v.message for v in self.errors))


def _finite(*values: float) -> bool:
    return all(math.isfinite(float(x)) for x in values)


def validate(params: SystemParams,
             field: StandingWaveField | None = None,
             init: InitialState | None = None) -> ValidationReport:
    """Check admissibility of a parameter bundle for the solver paths.

    Returns a report rather than raising; an empty report means every
    solver path (closed form, simplified form, numeric oracle) accepts
    the parameters.
    """
    out: list[Violation] = []

    if not _finite(params.gamma1, params.gamma2, params.delta,
                   params.omega21, params.alpha_c, params.p):
        out.append(Violation("nonfinite-parameter",
                             "system parameters must be finite"))
        return ValidationReport(tuple(out))

    if params.gamma1 <= 0 or params.gamma2 <= 0:
        out.append(Violation("nonpositive-decay-rate",
                             f"decay rates must be positive "
                             f"(gamma1={params.gamma1}, gamma2={params.gamma2})"))
    if params.p != 0.0:
        out.append(Violation("interference-unsupported",
                             f"quantum interference unsupported: p must be 0 (got {params.p})"))
    if params.gamma1 != params.gamma2:
        out.append(Violation("unequal-decay-rates",
                             "closed form requires equal decay rates "
                             f"(gamma1={params.gamma1}, gamma2={params.gamma2})"))
    gmax = max(params.gamma1, params.gamma2)
    if gmax > 0 and params.omega21 < SPLITTING_RATIO_FLOOR * gmax:
        out.append(Violation("small-level-splitting",
                             f"omega21={params.omega21} is below {SPLITTING_RATIO_FLOOR}x the "
                             "decay rate; dropping the fast counter-rotating terms "
                             "is then questionable", severity="warning"))

    if field is not None:
        if not _finite(field.omega1, field.omega2):
            out.append(Violation("nonfinite-parameter",
                                 "field amplitudes must be finite"))
        else:
            if field.omega1 < 0 or field.omega2 < 0:
                out.append(Violation("negative-rabi-amplitude",
                                     f"standing-wave amplitudes must be non-negative "
                                     f"(omega1={field.omega1}, omega2={field.omega2})"))

    if init is not None and not _finite(init.xi, init.alpha_p):
        out.append(Violation("nonfinite-parameter",
                             "initial-state angles must be finite"))

    return ValidationReport(tuple(out))
