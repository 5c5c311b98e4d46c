"""Layout construction, capture gains, receive correlation, antenna noise."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dmasim import geometry as geo
from dmasim.errors import ConfigurationError

LAM = 299792458.0 / 3e9


def test_dma_layout_counts_and_pitch():
    lay = geo.build_layout(geo.DMA, aperture=(2.0, 8.0), m=4, wavelength=LAM)
    assert lay.kind == geo.DMA
    assert lay.n == 192 and lay.m == 4 and lay.n_e == 48
    # cells sit at lambda/6 pitch along x, strips at lambda/2 along y
    first = lay.positions[lay.groups[0]]
    assert np.allclose(np.diff(first[:, 0]), LAM / 6.0)
    ys = sorted({p for p in lay.positions[:, 1]})
    assert np.allclose(np.diff(ys), LAM / 2.0)
    # feed distances count from the RF-chain end of the strip
    assert np.allclose(lay.feed_distances[lay.groups[0]], (np.arange(48) + 1) * LAM / 6.0)


def test_dma_custom_cell_count():
    lay = geo.build_layout(geo.DMA, m=2, n_e=5, wavelength=0.1)
    assert lay.n == 10 and lay.group_size == 5


def test_pchp_layout():
    lay = geo.build_layout(geo.PCHP, aperture=(2.0, 8.0), m=4, wavelength=LAM)
    assert lay.n == 64 and lay.m == 4 and lay.group_size == 16
    # half-wavelength grid
    xs = np.unique(np.round(lay.positions[:, 0], 9))
    assert np.allclose(np.diff(xs), LAM / 2.0)


def test_dpa_layout():
    lay = geo.build_layout(geo.DPA, m=4, wavelength=LAM)
    assert lay.n == 4 and lay.m == 4 and lay.group_size == 1


def test_groups_partition_enforced():
    lay = geo.build_layout(geo.DMA, m=2, n_e=3, wavelength=0.1)
    with pytest.raises(ConfigurationError):
        geo.ArrayLayout(
            kind=geo.DMA,
            positions=lay.positions,
            groups=(lay.groups[0], lay.groups[0]),  # overlapping
            capture=lay.capture,
            wavelength=0.1,
        )


def test_bad_inputs():
    with pytest.raises(ConfigurationError):
        geo.build_layout("XYZ", wavelength=0.1)
    with pytest.raises(ConfigurationError):
        geo.build_layout(geo.DMA, aperture=(0.0, 8.0), wavelength=0.1)
    with pytest.raises(ConfigurationError):
        # 4x6=24 patches not divisible by M=5
        geo.build_layout(geo.PCHP, aperture=(2.0, 3.0), m=5, wavelength=0.1)


def test_capture_gains():
    dma = geo.build_layout(geo.DMA, wavelength=LAM)
    pchp = geo.build_layout(geo.PCHP, wavelength=LAM)
    assert dma.capture.power_gain == pytest.approx(1.0471975511965976, rel=1e-12)
    assert pchp.capture.power_gain == pytest.approx(3.582964534981475, rel=1e-12)
    assert dma.capture.amplitude == pytest.approx(np.sqrt(dma.capture.power_gain))
    assert dma.capture.effective_area == pytest.approx(LAM**2 / 12.0)


def test_limits_off_isotropic_capture():
    for kind in (geo.DMA, geo.PCHP, geo.DPA):
        lay = geo.build_layout(kind, wavelength=LAM, hardware_limits=False)
        assert lay.capture.power_gain == pytest.approx(1.0, rel=1e-12)
        assert lay.capture.efficiency == 1.0


def test_capture_validation():
    with pytest.raises(ConfigurationError):
        geo.CaptureModel(efficiency=0.0, effective_area=1.0, wavelength=0.1)
    with pytest.raises(ConfigurationError):
        geo.CaptureModel(efficiency=0.5, effective_area=-1.0, wavelength=0.1)


def test_receive_correlation_values():
    # lambda/6 neighbours: sinc(1/3); lambda/2 neighbours: sinc(1) = 0
    lay = geo.build_layout(geo.DMA, m=2, n_e=2, wavelength=LAM)
    sigma = geo.receive_correlation(lay, psd_clip=False)
    i, j = lay.groups[0][0], lay.groups[0][1]
    assert sigma[i, j] == pytest.approx(0.826993343132688, rel=1e-12)
    k = lay.groups[1][0]
    assert sigma[i, k] == pytest.approx(0.0, abs=1e-15)


def test_receive_correlation_psd_and_symmetry():
    lay = geo.build_layout(geo.DMA, m=4, n_e=12, wavelength=LAM)
    sigma = geo.receive_correlation(lay)
    assert np.allclose(sigma, sigma.T)
    assert np.allclose(np.diag(sigma), 1.0)
    w = np.linalg.eigvalsh(sigma)
    assert w.min() >= -1e-10


def test_antenna_noise_power_oracle():
    val = geo.antenna_noise_power(LAM**2 / 12.0, 20e6, 290.0, LAM)
    assert val == pytest.approx(4.192855530399891e-14, rel=1e-12)
    with pytest.raises(ConfigurationError):
        geo.antenna_noise_power(-1.0, 20e6, 290.0, LAM)


@settings(max_examples=30, deadline=None)
@given(
    m=st.integers(min_value=1, max_value=4),
    n_e=st.integers(min_value=2, max_value=10),
    lam=st.floats(min_value=0.02, max_value=0.3),
)
def test_correlation_psd_property(m, n_e, lam):
    lay = geo.build_layout(geo.DMA, m=m, n_e=n_e, wavelength=lam)
    sigma = geo.receive_correlation(lay)
    assert np.linalg.eigvalsh(sigma).min() >= -1e-10
    assert abs(sigma - sigma.T).max() < 1e-14
