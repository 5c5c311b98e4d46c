"""Aperture layouts, per-element capture gains, receive correlation and antenna noise.

Three receiver front-ends share one layout abstraction:

* DMA  -- N_mu microstrip lines (one per RF chain) spaced half a wavelength
          apart, each carrying N_e unit-cells at lambda/6 pitch.
* PCHP -- patch grid at half-wavelength spacing, one contiguous row block of
          N_s patches per RF chain.
* DPA  -- one patch per RF chain (N = M).

Note on the DMA cell count: with a 2λ x 8λ aperture, M = 4 RF chains and the
stated N_e = 48 cells per strip, 4 strips at λ/2 spacing give N = 192 cells,
which is what we build by default (N configurable via ``n_e``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import BOLTZMANN
from .errors import ConfigurationError

DMA = "DMA"
PCHP = "PCHP"
DPA = "DPA"

# Unit-cell physical size lambda/2 x lambda/6; patch modeled as 6 dBi with 90%
# efficiency relative to the isotropic reference area lambda^2/(4*pi).
DMA_CELL_AREA_FACTOR = 1.0 / 12.0  # x lambda^2
PATCH_AREA_FACTOR = 10.0 ** 0.6 / (4.0 * np.pi)  # x lambda^2
PATCH_EFFICIENCY = 0.9


@dataclass(frozen=True)
class CaptureModel:
    """Per-element power capture relative to an isotropic reference antenna."""

    efficiency: float
    effective_area: float  # m^2
    wavelength: float  # m

    def __post_init__(self):
        if not 0.0 < self.efficiency <= 1.0:
            raise ConfigurationError(f"efficiency must be in (0,1], got {self.efficiency}")
        if self.effective_area <= 0.0:
            raise ConfigurationError("effective area must be positive")

    @property
    def isotropic_reference_area(self) -> float:
        return self.wavelength**2 / (4.0 * np.pi)

    @property
    def power_gain(self) -> float:
        return self.efficiency * self.effective_area / self.isotropic_reference_area

    @property
    def amplitude(self) -> float:
        return math.sqrt(self.power_gain)


@dataclass(frozen=True)
class ArrayLayout:
    kind: str
    positions: np.ndarray  # (N, 3) meters
    groups: tuple  # M index arrays partitioning range(N)
    capture: CaptureModel
    wavelength: float
    feed_distances: np.ndarray | None = None  # (N,) meters, DMA only
    n_e: int | None = field(default=None)  # cells per microstrip, DMA only

    def __post_init__(self):
        n = self.positions.shape[0]
        seen = np.concatenate([np.asarray(g) for g in self.groups])
        if sorted(seen.tolist()) != list(range(n)):
            raise ConfigurationError("groups must partition the element indices exactly")

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @property
    def m(self) -> int:
        return len(self.groups)

    @property
    def group_size(self) -> int:
        return len(self.groups[0])


def build_layout(
    kind: str,
    aperture: tuple[float, float] = (2.0, 8.0),
    m: int = 4,
    wavelength: float = 0.1,
    n_e: int | None = None,
    efficiency: float | None = None,
    effective_area: float | None = None,
    hardware_limits: bool = True,
) -> ArrayLayout:
    """Build an element layout for one front-end kind.

    ``aperture`` is (height, length) in multiples of the carrier wavelength.
    With ``hardware_limits=False`` every element becomes an ideal isotropic
    capturer (efficiency 1, area lambda^2/4pi) so that front-ends differ only
    by their combiner constraints.
    """
    height, length = aperture
    if height <= 0 or length <= 0:
        raise ConfigurationError(f"aperture dimensions must be positive, got {aperture}")
    lam = wavelength

    if kind == DMA:
        n_mu = m
        if n_e is None:
            n_e = int(round(length * 6))  # lambda/6 cell pitch along the strip
        strip_y = np.arange(n_mu) * lam / 2.0
        cell_x = np.arange(n_e) * lam / 6.0
        positions = np.zeros((n_mu * n_e, 3))
        feed = np.zeros(n_mu * n_e)
        for i in range(n_mu):
            sl = slice(i * n_e, (i + 1) * n_e)
            positions[sl, 0] = cell_x
            positions[sl, 1] = strip_y[i]
            feed[sl] = (np.arange(n_e) + 1) * lam / 6.0  # distance from RF-chain end
        groups = tuple(np.arange(i * n_e, (i + 1) * n_e) for i in range(n_mu))
        area = DMA_CELL_AREA_FACTOR * lam**2
        eff = 1.0
    elif kind == PCHP:
        rows = int(round(height * 2))
        cols = int(round(length * 2))
        n = rows * cols
        if n % m != 0:
            raise ConfigurationError(f"PCHP element count {n} not divisible by M={m}")
        xs, ys = np.meshgrid(np.arange(cols) * lam / 2.0, np.arange(rows) * lam / 2.0)
        positions = np.column_stack([xs.ravel(), ys.ravel(), np.zeros(n)])
        n_s = n // m
        groups = tuple(np.arange(i * n_s, (i + 1) * n_s) for i in range(m))
        feed = None
        area = PATCH_AREA_FACTOR * lam**2
        eff = PATCH_EFFICIENCY
    elif kind == DPA:
        n = m
        positions = np.column_stack([np.zeros(n), np.arange(n) * lam / 2.0, np.zeros(n)])
        groups = tuple(np.array([i]) for i in range(n))
        feed = None
        area = PATCH_AREA_FACTOR * lam**2
        eff = PATCH_EFFICIENCY
    else:
        raise ConfigurationError(f"unknown layout kind {kind!r}")

    if effective_area is not None:
        area = effective_area
    if efficiency is not None:
        eff = efficiency
    if not hardware_limits:
        eff = 1.0
        area = lam**2 / (4.0 * np.pi)

    capture = CaptureModel(efficiency=eff, effective_area=area, wavelength=lam)
    ne_field = n_e if kind == DMA else None
    return ArrayLayout(
        kind=kind,
        positions=positions,
        groups=groups,
        capture=capture,
        wavelength=lam,
        feed_distances=feed,
        n_e=ne_field,
    )


def receive_correlation(layout: ArrayLayout, psd_clip: bool = True) -> np.ndarray:
    """sinc-kernel receive correlation, (i,j) -> sinc(2 d_ij / lambda).

    Finite sinc grids can be marginally indefinite in floating point, so
    negative eigenvalues are clipped to zero and the diagonal renormalized.
    """
    if layout.n == 0:
        raise ConfigurationError("layout is empty")
    d = np.linalg.norm(layout.positions[:, None, :] - layout.positions[None, :, :], axis=2)
    sigma = np.sinc(2.0 * d / layout.wavelength)
    if psd_clip:
        w, v = np.linalg.eigh(sigma)
        if w.min() < 0.0:
            w = np.clip(w, 0.0, None)
            sigma = (v * w) @ v.T
            dd = np.sqrt(np.diag(sigma))
            sigma = sigma / np.outer(dd, dd)
    sigma = 0.5 * (sigma + sigma.T)
    np.fill_diagonal(sigma, 1.0)
    return sigma


def antenna_noise_power(
    effective_area: float,
    bandwidth: float,
    temperature: float,
    wavelength: float,
    solid_angle: float = 2.0 * np.pi,
) -> float:
    """External noise power captured per element: k*T*B*(A_eff/lambda^2)*dOmega."""
    if min(effective_area, bandwidth, temperature, wavelength) <= 0:
        raise ConfigurationError("antenna noise inputs must be positive")
    return BOLTZMANN * temperature * bandwidth * (effective_area / wavelength**2) * solid_angle
