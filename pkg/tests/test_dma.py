"""Unit-cell physics, microstrip propagation and weight constraint sets."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dmasim import geometry as geo
from dmasim.dma import (
    BAM,
    LPM,
    DmaWeights,
    MicrostripParams,
    UnitCellParams,
    block_weights,
    lorentzian_polarizability,
    max_dipole_moment,
    project_bam,
    project_lorentzian,
    propagation_matrix,
    wave_domain_combiner,
)
from dmasim.errors import ConfigurationError

complex_strategy = st.complex_numbers(
    max_magnitude=1e3, allow_nan=False, allow_infinity=False
)


def test_polarizability_at_resonance():
    p = UnitCellParams()
    alpha = lorentzian_polarizability(p)
    # at resonance the response is purely reactive: F*w0/(j*Gamma) = -j*2*Q*F
    assert alpha == pytest.approx(-6e-8j, rel=1e-12)


def test_polarizability_off_resonance_real_part():
    p = UnitCellParams(omega=2.0 * np.pi * 3.0e9)
    alpha = lorentzian_polarizability(p)
    assert alpha.real > 0  # below resonance the in-phase part is positive
    assert abs(alpha) < abs(lorentzian_polarizability(UnitCellParams()))


def test_max_dipole_moment_value():
    lam = 299792458.0 / 3.5e9
    assert max_dipole_moment(UnitCellParams(), lam) == pytest.approx(
        0.12162874823219647, rel=1e-12
    )


def test_unit_cell_validation():
    with pytest.raises(ConfigurationError):
        UnitCellParams(f_m=-1.0)
    with pytest.raises(ConfigurationError):
        MicrostripParams(alpha_w=-0.1)


def test_propagation_matrix():
    lay = geo.build_layout(geo.DMA, m=1, n_e=3, wavelength=0.1)
    ms = MicrostripParams(alpha_w=0.13, beta_w=113.8)
    p = propagation_matrix(ms, lay)
    d = (np.arange(3) + 1) * 0.1 / 6.0
    assert np.allclose(np.abs(p), np.exp(-0.13 * d))
    assert np.allclose(np.angle(p), np.angle(np.exp(-1j * 113.8 * d)))


def test_projection_examples():
    # unit input lands on the circle of radius m/2 around j*m/2
    out = project_lorentzian(1.0 + 0.0j, 1.0)
    assert out == pytest.approx(0.4472135954999579 + 0.2763932022500210j, rel=1e-12)
    # the center has no preferred direction; documented tie-break is phase 0
    assert project_lorentzian(0.5j, 1.0) == pytest.approx(0.5 + 0.5j)
    assert project_bam(0.04, 0.09) == 0.0
    assert project_bam(0.05, 0.09) == 0.09  # 0.045 midpoint, tie -> on
    assert project_bam(0.0, 0.09) == 0.0


@settings(max_examples=200, deadline=None)
@given(z=complex_strategy, m_max=st.floats(min_value=1e-3, max_value=10.0))
def test_project_lorentzian_properties(z, m_max):
    w = project_lorentzian(z, m_max)
    center = 1j * m_max / 2.0
    # on the circle, idempotent, inside the amplitude cap
    assert abs(abs(w - center) - m_max / 2.0) < 1e-9 * max(m_max, 1.0)
    w2 = project_lorentzian(w, m_max)
    assert abs(w2 - w) < 1e-9 * max(m_max, 1.0)
    assert abs(w) <= m_max * (1.0 + 1e-9)


@settings(max_examples=200, deadline=None)
@given(z=complex_strategy, m_max=st.floats(min_value=1e-3, max_value=10.0))
def test_project_bam_properties(z, m_max):
    w = project_bam(z, m_max)
    assert w in (0.0 + 0.0j, complex(m_max))
    assert project_bam(w, m_max) == w
    # nearest-point property
    other = m_max if w == 0 else 0.0
    assert abs(z - w) <= abs(z - other) + 1e-12


def test_block_weights_support():
    lay = geo.build_layout(geo.DMA, m=2, n_e=4, wavelength=0.1)
    entries = np.arange(1, 9).astype(complex)
    weights = block_weights(lay, entries, LPM, 1.0)
    assert weights.w.shape == (2, 8)
    assert weights.off_block_norm(lay) == 0.0
    for i, g in enumerate(lay.groups):
        assert np.array_equal(weights.w[i, g], entries[g])


def test_constraint_violation_metric():
    lay = geo.build_layout(geo.DMA, m=1, n_e=2, wavelength=0.1)
    on_circle = project_lorentzian(np.array([1.0 + 2j, -3.0 + 0.5j]), 0.09)
    assert block_weights(lay, on_circle, LPM, 0.09).constraint_violation(lay) < 1e-12
    off = DmaWeights(w=np.array([[0.02 + 0.0j, 0.09 + 0.0j]]), mode=BAM, m_max=0.09)
    assert off.constraint_violation(lay) == pytest.approx(0.02)


def test_wave_domain_combiner():
    lay = geo.build_layout(geo.DMA, m=2, n_e=2, wavelength=0.1)
    w = block_weights(lay, np.ones(4, dtype=complex), LPM, 1.0)
    p = np.array([1.0, 1j, -1.0, -1j])
    g = wave_domain_combiner(w, p)
    assert np.allclose(g, w.w * p[None, :])
    with pytest.raises(ValueError):
        wave_domain_combiner(w, p[:2])
