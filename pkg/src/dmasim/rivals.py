"""Partially-connected hybrid (phase shifter + Wilkinson tree) and fully digital
baselines, expressed in the same M x N analog-stage shape as the metasurface
front-end.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .geometry import ArrayLayout

MRC = "MRC"
ZF = "ZF"

# Inherent power split of an ideal 2-way combiner; coherent receive combining
# recovers it, so only the excess above this counts as loss by default.
_SPLIT_DB = 10.0 * math.log10(2.0)


@dataclass(frozen=True)
class PchpLossBudget:
    ps_loss_db: float = 5.0
    wilkinson_il_db: float = 3.9  # per 2-way stage, referenced to one input
    strict_il: bool = False  # charge the full IL per stage instead of the excess

    def __post_init__(self):
        if self.ps_loss_db < 0 or self.wilkinson_il_db < 0:
            raise ConfigurationError("losses must be >= 0 dB")


def wilkinson_stages(n_s: int) -> int:
    """Number of cascaded 2-way stages feeding one RF chain."""
    if n_s < 2:
        return 0
    return math.ceil(math.log2(n_s))


def pchp_loss_amplitude(budget: PchpLossBudget, n_s: int) -> float:
    """Per-path amplitude through the phase shifter and the combining tree.

    Each 2-way stage is modeled as (x1+x2)/sqrt(2) times an excess-loss
    amplitude; the inherent 3.01 dB split is recovered by coherent combining.
    With ``strict_il`` the full insertion loss is charged to the signal at
    every stage.
    """
    stages = wilkinson_stages(n_s)
    per_stage_db = budget.wilkinson_il_db if budget.strict_il else max(
        budget.wilkinson_il_db - _SPLIT_DB, 0.0
    )
    total_db = budget.ps_loss_db + stages * per_stage_db
    return 10.0 ** (-total_db / 20.0)


@dataclass(frozen=True)
class PchpWeights:
    a: np.ndarray  # (M, N) block-diagonal, entries amplitude * e^{j phi}
    amplitude: float

    def constraint_violation(self, layout: ArrayLayout) -> float:
        worst = 0.0
        for i, g in enumerate(layout.groups):
            err = np.abs(np.abs(self.a[i, g]) - self.amplitude)
            worst = max(worst, float(err.max(initial=0.0)))
        return worst


def pchp_analog_weights(entries: np.ndarray, layout: ArrayLayout, amplitude: float) -> PchpWeights:
    """Project per-element target entries onto amplitude * unit-circle, blockwise.

    Zero targets take the documented tie-break phase 0.
    """
    mag = np.abs(entries)
    phases = np.where(mag > 0, entries / np.where(mag > 0, mag, 1.0), 1.0)
    a = np.zeros((layout.m, layout.n), dtype=complex)
    for i, g in enumerate(layout.groups):
        a[i, g] = amplitude * phases[g]
    return PchpWeights(a=a, amplitude=amplitude)


def dpa_combiner(h: np.ndarray, noise_cov: np.ndarray, mode: str = MRC) -> np.ndarray:
    """K x N digital combiner for the fully digital array.

    MRC is the noise-whitened matched filter H^H Sigma^-1; ZF additionally
    inverts the whitened Gram matrix so that G H = I.
    """
    n, k = h.shape
    hw = np.linalg.solve(noise_cov, h)  # Sigma^-1 H
    if mode == MRC:
        return hw.conj().T
    if mode == ZF:
        if k > n:
            raise ConfigurationError(f"ZF requires K <= N, got K={k}, N={n}")
        gram = h.conj().T @ hw
        try:
            return np.linalg.solve(gram, hw.conj().T)
        except np.linalg.LinAlgError:
            warnings.warn("rank-deficient channel under ZF; using regularized pseudo-inverse")
            ridge = 1e-12 * np.trace(gram).real / k * np.eye(k)
            return np.linalg.solve(gram + ridge, hw.conj().T)
    raise ConfigurationError(f"unknown DPA combiner mode {mode!r}")
