"""
Property-based tests for the model invariants.

Complements the fixed-value unit tests by sampling the admissible
parameter space: periodicity and parity of the Rabi profile, modal
reconstruction identities, gauge symmetries of the emitted amplitude,
and the metamorphic factorization of grids through Omega.
"""

import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from atomloc import (EmissionQuery, GridSpec, InitialState, StandingWaveField,
                     SystemParams, compute_grid, emitted_amplitude,
                     emitted_amplitude_paper_form, find_peaks, modal_solution,
                     rabi_at)

finite = dict(allow_nan=False, allow_infinity=False)

phases = st.floats(min_value=-4 * math.pi, max_value=4 * math.pi, **finite)
amplitudes = st.floats(min_value=0.0, max_value=20.0, **finite)
gammas = st.floats(min_value=0.4, max_value=2.5, **finite)
deltas = st.floats(min_value=-8.0, max_value=8.0, **finite)
angles = st.floats(min_value=-math.pi, max_value=math.pi, **finite)
xis = st.floats(min_value=0.0, max_value=math.pi, **finite)
rabis = st.floats(min_value=-12.0, max_value=12.0, **finite)
detunings = st.floats(min_value=-25.0, max_value=25.0, **finite)


def system_strategy():
    return st.builds(
        lambda g, d, ac: SystemParams(gamma1=g, gamma2=g, delta=d,
                                      omega21=30.0, alpha_c=ac),
        gammas, deltas, angles)


class TestRabiProfile:
    @given(amplitudes, amplitudes, phases, phases)
    @settings(max_examples=200)
    def test_periodic_in_both_arguments(self, o1, o2, u, v):
        field = StandingWaveField(o1, o2)
        base = rabi_at(field, u, v)
        scale = 1.0 + o1 + o2
        assert abs(rabi_at(field, u + 2 * math.pi, v) - base) < 1e-9 * scale
        assert abs(rabi_at(field, u, v + 2 * math.pi) - base) < 1e-9 * scale

    @given(amplitudes, amplitudes, phases, phases)
    @settings(max_examples=200)
    def test_sine_reflection(self, o1, o2, u, v):
        field = StandingWaveField(o1, o2)
        assert rabi_at(field, math.pi - u, v) == pytest.approx(
            rabi_at(field, u, v), abs=1e-9 * (1 + o1 + o2))

    @given(amplitudes, amplitudes, phases, phases)
    @settings(max_examples=200)
    def test_odd_under_point_reflection(self, o1, o2, u, v):
        field = StandingWaveField(o1, o2)
        assert rabi_at(field, -u, -v) == pytest.approx(
            -rabi_at(field, u, v), abs=1e-12 * (1 + o1 + o2))


class TestModalInvariants:
    @given(system_strategy(), xis, angles, rabis)
    @settings(max_examples=300, deadline=None)
    def test_initial_conditions_and_spectrum(self, params, xi, ap, omega):
        init = InitialState(xi=xi, alpha_p=ap)
        sol = modal_solution(params, init, omega)
        b10, b20 = init.amplitudes()
        assert sol.c1 + sol.c1p == pytest.approx(b10, abs=1e-12)
        assert sol.c2 + sol.c2p == pytest.approx(b20, abs=1e-12)
        g = params.gamma1
        assert sol.lambda1 + sol.lambda2 == pytest.approx(
            1j * params.delta - g, rel=1e-12, abs=1e-12)
        assert sol.lambda1 * sol.lambda2 == pytest.approx(
            (-0.5 * g) * (1j * params.delta - 0.5 * g) + omega * omega,
            rel=1e-12, abs=1e-12)
        assert sol.lambda1.real < 0 and sol.lambda2.real < 0

    @given(system_strategy(), xis, rabis, detunings)
    @settings(max_examples=200, deadline=None)
    def test_sign_phase_gauge_symmetry(self, params, xi, omega, dk):
        init = InitialState(xi=xi)
        query = EmissionQuery(delta_k=dk)
        flipped = dataclasses.replace(params, alpha_c=params.alpha_c + math.pi)
        a = abs(emitted_amplitude(params, init, omega, query).value) ** 2
        b = abs(emitted_amplitude(flipped, init, -omega, query).value) ** 2
        assert a == pytest.approx(b, rel=1e-12, abs=1e-15)

    @given(gammas, angles, rabis, detunings)
    @settings(max_examples=200, deadline=None)
    def test_simplified_form_exact_at_zero_detuning(self, g, ac, omega, dk):
        params = SystemParams(gamma1=g, gamma2=g, delta=0.0, omega21=30.0,
                              alpha_c=ac)
        init = InitialState(xi=math.pi / 4)
        query = EmissionQuery(delta_k=dk)
        a = emitted_amplitude(params, init, omega, query).value
        b = emitted_amplitude_paper_form(params, init, omega, query).value
        assert a == pytest.approx(b, rel=1e-10, abs=1e-12)


class TestGridFactorization:
    @given(system_strategy(), xis, amplitudes, detunings)
    @settings(max_examples=30, deadline=None)
    def test_normalization_and_transpose_symmetry(self, params, xi, o, dk):
        field = StandingWaveField(o, o)
        grid = compute_grid(params, InitialState(xi=xi), field,
                            EmissionQuery(delta_k=dk), GridSpec(nx=11, ny=11))
        assert grid.total_mass() == pytest.approx(1.0, abs=1e-9)
        assert (grid.values >= 0).all()
        # equal field amplitudes: transposed nodes carry equal Omega
        assert np.array_equal(grid.values, grid.values.T)

    @given(scale=st.floats(min_value=0.1, max_value=1000.0, **finite))
    @settings(max_examples=30, deadline=None)
    def test_peak_set_scale_invariance(self, preset_small_grid, scale):
        grid = preset_small_grid
        scaled = dataclasses.replace(grid, values=grid.values * scale)
        assert ([(p.u, p.v) for p in find_peaks(grid).peaks]
                == [(p.u, p.v) for p in find_peaks(scaled).peaks])


@pytest.fixture(scope="module")
def preset_small_grid():
    from atomloc import PRESETS
    return PRESETS["fig2d"].with_grid(nx=41, ny=41).compute()
