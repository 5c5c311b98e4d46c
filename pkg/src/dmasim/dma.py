"""Metasurface front-end physics: Lorentzian unit-cells, microstrip propagation,
constrained weighting matrices and the wave-domain combiner G = W P.

The amplitude cap ``m_max`` is used dimensionlessly inside the signal pipeline;
the field-to-dipole unit chain is absorbed into the per-element capture factor
(see geometry). Its numeric value is what drives the SNR loss and is
configuration-settable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import FREE_SPACE_IMPEDANCE
from .errors import ConfigurationError
from .geometry import ArrayLayout

LPM = "LPM"
BAM = "BAM"


@dataclass(frozen=True)
class UnitCellParams:
    f_m: float = 3.0e-9  # coupling factor, m^3
    q_m: float = 10.0  # quality factor
    omega0: float = 2.0 * np.pi * 3.5e9  # resonance, rad/s
    omega: float | None = None  # operating frequency; defaults to resonance

    def __post_init__(self):
        if self.f_m <= 0 or self.q_m <= 0 or self.omega0 <= 0:
            raise ConfigurationError("unit-cell parameters must be positive")

    @property
    def gamma_m(self) -> float:
        """Damping factor omega0 / (2 Q)."""
        return self.omega0 / (2.0 * self.q_m)

    @property
    def operating_omega(self) -> float:
        return self.omega if self.omega is not None else self.omega0


def lorentzian_polarizability(p: UnitCellParams) -> complex:
    """Magnetic polarizability F w^2 / (w0^2 - w^2 + j Gamma w)."""
    w = p.operating_omega
    den = p.omega0**2 - w**2 + 1j * p.gamma_m * w
    if den == 0:
        raise ZeroDivisionError("polarizability denominator vanishes")
    return p.f_m * w**2 / den


def max_dipole_moment(p: UnitCellParams, wavelength: float) -> float:
    """Amplitude cap at resonance: 2 Q F k0^2 eta0.

    With F = 3e-9 m^3, Q = 10 at 3.5 GHz this evaluates to ~0.122; the
    literature quotes ~0.09 for the same design, so the cap is overridable in
    configuration rather than trusted from the formula alone.
    """
    k0 = 2.0 * np.pi / wavelength
    return 2.0 * p.q_m * p.f_m * k0**2 * FREE_SPACE_IMPEDANCE


@dataclass(frozen=True)
class MicrostripParams:
    alpha_w: float = 0.13  # attenuation, 1/m
    beta_w: float = 113.8  # wavenumber, 1/m

    def __post_init__(self):
        if self.alpha_w < 0 or self.beta_w <= 0:
            raise ConfigurationError("alpha_w must be >= 0 and beta_w > 0")


def propagation_matrix(ms: MicrostripParams, layout: ArrayLayout) -> np.ndarray:
    """Diagonal of exp(-(alpha + j*beta) d) over the feed distances, as a vector."""
    d = layout.feed_distances
    if d is None:
        d = np.zeros(layout.n)
    if np.any(d < 0):
        raise ConfigurationError("feed distances must be nonnegative")
    return np.exp(-(ms.alpha_w + 1j * ms.beta_w) * d)


def project_lorentzian(z: np.ndarray | complex, m_max: float) -> np.ndarray | complex:
    """Nearest point on the circle of radius m_max/2 centered at j*m_max/2.

    The circle center (undefined direction) maps to phase 0, i.e. to
    m_max*(j+1)/2.
    """
    z = np.asarray(z, dtype=complex)
    center = 1j * m_max / 2.0
    v = z - center
    r = np.abs(v)
    unit = np.where(r > 0, v / np.where(r > 0, r, 1.0), 1.0)
    out = center + (m_max / 2.0) * unit
    return out if out.ndim else complex(out)


def project_bam(z: np.ndarray | complex, m_max: float) -> np.ndarray | complex:
    """Nearest of {0, m_max}; ties go to m_max."""
    z = np.asarray(z, dtype=complex)
    keep = np.abs(z - m_max) <= np.abs(z)
    out = np.where(keep, m_max, 0.0).astype(complex)
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class DmaWeights:
    w: np.ndarray  # (M, N) block-diagonal per the layout groups
    mode: str  # LPM or BAM
    m_max: float

    def constraint_violation(self, layout: ArrayLayout) -> float:
        """Max distance of any in-block entry from its constraint set."""
        worst = 0.0
        for i, g in enumerate(layout.groups):
            row = self.w[i, g]
            if self.mode == LPM:
                err = np.abs(np.abs(row - 1j * self.m_max / 2.0) - self.m_max / 2.0)
            else:
                err = np.minimum(np.abs(row), np.abs(row - self.m_max))
            worst = max(worst, float(err.max(initial=0.0)))
        return worst

    def off_block_norm(self, layout: ArrayLayout) -> float:
        mask = np.ones_like(self.w, dtype=bool)
        for i, g in enumerate(layout.groups):
            mask[i, g] = False
        return float(np.abs(self.w[mask]).max(initial=0.0))


def block_weights(layout: ArrayLayout, entries: np.ndarray, mode: str, m_max: float) -> DmaWeights:
    """Assemble an (M, N) block-diagonal weight matrix from per-element entries."""
    w = np.zeros((layout.m, layout.n), dtype=complex)
    for i, g in enumerate(layout.groups):
        w[i, g] = entries[g]
    return DmaWeights(w=w, mode=mode, m_max=m_max)


def wave_domain_combiner(weights: DmaWeights | np.ndarray, p_diag: np.ndarray) -> np.ndarray:
    """G = W P for diagonal P given as a length-N vector."""
    w = weights.w if isinstance(weights, DmaWeights) else weights
    if w.shape[1] != p_diag.shape[0]:
        raise ValueError(f"shape mismatch: W is {w.shape}, P has {p_diag.shape[0]} entries")
    return w * p_diag[None, :]
