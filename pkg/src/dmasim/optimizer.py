"""Holography-style alternating design of the constrained analog stage and the
digital combiner.

The loop fits W_D * W_NW * W_analog * P to an unconstrained desired combiner
for a virtual fully digital array at the same aperture (MRC single-user, ZF
multi-user), alternating a constrained analog projection step with a digital
least-squares step, with noise whitening recomputed from the current analog
stage. Rates are always re-evaluated from the SINR expression of the physical
pipeline, never from the fitting objective.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .channel import NoiseSpec
from .dma import BAM, LPM, DmaWeights, block_weights, project_bam, project_lorentzian
from .errors import ConfigurationError
from .geometry import ArrayLayout
from .rivals import MRC, ZF, pchp_analog_weights

log = logging.getLogger(__name__)

DMA_LPM = "dma-lpm"
DMA_BAM = "dma-bam"
PCHP_FE = "pchp"

NZM = "NZM"
CFM = "CFM"

SINGLE_USER = "single_user"
MULTI_USER = "multi_user"


@dataclass
class CombinerSolution:
    analog: np.ndarray  # (M, N) constrained weights (propagation not included)
    g_analog: np.ndarray  # (M, N) analog stage including propagation
    w_digital: np.ndarray  # (K, M), whitener already folded in
    sinr: np.ndarray  # (K,)
    sum_rate: float  # bits/s/Hz
    objective_trace: list = field(default_factory=list)  # per half-step Frobenius objective
    iterations: int = 0
    converged: bool = False
    frontend: str = ""
    mapper: str = ""


def desired_combiner(h: np.ndarray, strategy: str) -> np.ndarray:
    """Unconstrained K x N combiner for the virtual digital array (white noise)."""
    if strategy == MRC:
        return h.conj().T
    if strategy == ZF:
        gram = h.conj().T @ h
        return np.linalg.solve(gram, h.conj().T)
    raise ConfigurationError(f"unknown combiner strategy {strategy!r}")


def sinr(
    g_eff: np.ndarray,
    w_d: np.ndarray,
    h: np.ndarray,
    p_t: float,
    sigma_rx: np.ndarray,
    sigma_ant_sq: float,
    sigma_rf_sq: float,
) -> np.ndarray:
    """Per-user SINR of the combined pipeline.

    ``g_eff`` is the full K x N combiner seen by the channel; ``w_d`` is the
    K x M digital part whose row norms scale the RF-chain noise. The RF-chain
    gain multiplies signal and all noise terms alike and cancels, so it never
    appears.
    """
    s = p_t * np.abs(g_eff @ h) ** 2  # (K users of combiner) x (K transmit)
    signal = np.diag(s)
    interference = s.sum(axis=1) - signal
    ant = sigma_ant_sq * np.einsum("kn,nm,km->k", g_eff, sigma_rx, g_eff.conj()).real
    rf = sigma_rf_sq * np.sum(np.abs(w_d) ** 2, axis=1)
    den = interference + ant + rf
    # an all-zero combiner row carries no signal and no noise: SINR 0, not 0/0
    return np.where(den > 0, signal / np.where(den > 0, den, 1.0), 0.0)


def sum_rate(gamma: np.ndarray) -> float:
    return float(np.sum(np.log2(1.0 + gamma)))


def noise_whitener(
    g_analog: np.ndarray,
    sigma_rx: np.ndarray,
    sigma_ant_sq: float,
    sigma_rf_sq: float,
    cond_limit: float = 1e12,
) -> tuple[np.ndarray, np.ndarray]:
    """Covariance of the per-chain noise and its inverse Hermitian square root."""
    m = g_analog.shape[0]
    sigma_z = sigma_ant_sq * g_analog @ sigma_rx @ g_analog.conj().T + sigma_rf_sq * np.eye(m)
    sigma_z = 0.5 * (sigma_z + sigma_z.conj().T)
    w, v = np.linalg.eigh(sigma_z)
    if w.max() / max(w.min(), np.finfo(float).tiny) > cond_limit:
        ridge = 1e-12 * np.trace(sigma_z).real / m
        log.warning("ill-conditioned noise covariance, adding ridge %.3e", ridge)
        sigma_z = sigma_z + ridge * np.eye(m)
        w, v = np.linalg.eigh(sigma_z)
    w_nw = (v / np.sqrt(w)) @ v.conj().T
    return sigma_z, w_nw


def _constrain(entries: np.ndarray, mode: str, m_max: float) -> np.ndarray:
    """Map raw per-element targets onto the weight constraint set.

    LPM targets are phase information: normalize to the unit circle (zero ->
    phase 0) before projecting onto the Lorentzian circle. BAM is an amplitude
    threshold, so it acts on the raw values.
    """
    if mode == LPM:
        mag = np.abs(entries)
        u = np.where(mag > 0, entries / np.where(mag > 0, mag, 1.0), 1.0)
        return project_lorentzian(u, m_max)
    if mode == BAM:
        return project_bam(entries, m_max)
    raise ConfigurationError(f"unknown weight mode {mode!r}")


def _block_entries(t: np.ndarray, layout: ArrayLayout) -> np.ndarray:
    """Per-element vector taken from the block-diagonal support of an M x N target."""
    entries = np.zeros(layout.n, dtype=complex)
    for i, g in enumerate(layout.groups):
        entries[g] = t[i, g]
    return entries


def nzm_update(
    g_d: np.ndarray,
    g_des: np.ndarray,
    p_diag: np.ndarray,
    layout: ArrayLayout,
    mode: str,
    m_max: float,
) -> DmaWeights:
    """Non-zero mapper: pull the desired combiner back through the digital stage
    and the propagation, then constrain entry-wise on the block support."""
    t = np.linalg.pinv(g_d) @ g_des / p_diag[None, :]
    entries = _constrain(_block_entries(t, layout), mode, m_max)
    return block_weights(layout, entries, mode, m_max)


def cfm_update(
    g_d: np.ndarray,
    g_des: np.ndarray,
    p_diag: np.ndarray,
    layout: ArrayLayout,
    mode: str,
    m_max: float,
) -> DmaWeights:
    """Closed-form mapper: per-entry least-squares scalar before constraining."""
    g = g_des / p_diag[None, :]  # K x N
    entries = np.zeros(layout.n, dtype=complex)
    for i, grp in enumerate(layout.groups):
        col = g_d[:, i]
        denom = float(np.vdot(col, col).real)
        if denom == 0.0:
            # dead digital column: documented tie-break phase 0
            entries[grp] = 1.0
            log.warning("zero digital column %d in closed-form mapper", i)
            continue
        entries[grp] = (col.conj() @ g[:, grp]) / denom
    entries = _constrain(entries, mode, m_max)
    return block_weights(layout, entries, mode, m_max)


_MAPPERS = {NZM: nzm_update, CFM: cfm_update}


def digital_update(
    g_analog: np.ndarray,
    h: np.ndarray,
    w_nw: np.ndarray,
    g_des: np.ndarray,
    mode: str,
) -> np.ndarray:
    """Digital half-step given the analog stage.

    Single-user: whitened matched filter (W_NW G_analog H)^H. Multi-user: the
    least-squares fit G_des (W_NW G_analog)^+, which never increases the
    Frobenius objective.
    """
    a = w_nw @ g_analog
    if mode == SINGLE_USER:
        w_d = (a @ h).conj().T
        # matched-filter direction with the least-squares scale (rates are
        # invariant to the scalar; the fitting objective is not)
        fit = w_d @ a
        denom = float(np.vdot(fit, fit).real)
        if denom > 0:
            w_d = w_d * (np.vdot(fit, g_des) / denom)
        return w_d
    if mode == MULTI_USER:
        return g_des @ np.linalg.pinv(a)
    raise ConfigurationError(f"unknown digital update mode {mode!r}")


def _objective(g_des, w_d, w_nw, g_analog) -> float:
    return float(np.linalg.norm(g_des - w_d @ w_nw @ g_analog))


def _init_entries(
    g_des: np.ndarray,
    p_diag: np.ndarray,
    layout: ArrayLayout,
    mode: str | None,
    m_max: float,
    restart: int,
    rng: np.random.Generator,
) -> np.ndarray:
    if restart == 0:
        # phase-conjugate start: stack the desired rows through the propagation
        entries = (g_des / p_diag[None, :]).sum(axis=0)
        if mode == BAM:
            # channel scale is arbitrary relative to the cap; switch on the
            # better half of the cells instead of thresholding raw magnitudes
            on = np.abs(entries) >= np.median(np.abs(entries))
            entries = np.where(on, m_max, 0.0).astype(complex)
        return entries
    if mode == BAM:
        return np.where(rng.uniform(size=layout.n) < 0.5, m_max, 0.0).astype(complex)
    return np.exp(2j * np.pi * rng.uniform(size=layout.n))


def alternate_optimize(
    h: np.ndarray,
    layout: ArrayLayout,
    frontend: str,
    noise: NoiseSpec,
    sigma_rx: np.ndarray,
    p_t: float,
    mapper: str = NZM,
    strategy: str | None = None,
    m_max: float = 1.0,
    p_diag: np.ndarray | None = None,
    pchp_amplitude: float = 1.0,
    tol: float = 1e-4,
    max_iter: int = 50,
    n_restarts: int = 4,
    rng: np.random.Generator | None = None,
) -> CombinerSolution:
    """Alternating analog/digital combiner design for one channel realization.

    Each restart runs to convergence of the fitting objective; the returned
    solution is the converged iterate of the restart with the lowest final
    objective, re-evaluated in the physical pipeline for SINR and rate.
    """
    if frontend not in (DMA_LPM, DMA_BAM, PCHP_FE):
        raise ConfigurationError(f"unknown frontend {frontend!r}")
    if mapper not in _MAPPERS:
        raise ConfigurationError(f"unknown mapper {mapper!r}")
    k = h.shape[1]
    if strategy is None:
        strategy = MRC if k == 1 else ZF
    digital_mode = SINGLE_USER if (k == 1 and strategy == MRC) else MULTI_USER
    mode = LPM if frontend == DMA_LPM else BAM
    if p_diag is None:
        p_diag = np.ones(layout.n, dtype=complex)
    rng = rng or np.random.default_rng(0)

    g_des = desired_combiner(h, strategy)
    best = None
    trace_all: list[float] = []
    total_iters = 0
    converged_any = False

    for restart in range(max(1, n_restarts)):
        init_mode = None if frontend == PCHP_FE else mode
        entries = _init_entries(g_des, p_diag, layout, init_mode, m_max, restart, rng)
        if frontend == PCHP_FE:
            weights = pchp_analog_weights(entries, layout, pchp_amplitude)
            analog = weights.a
        else:
            entries = _constrain(entries, mode, m_max)
            weights = block_weights(layout, entries, mode, m_max)
            analog = weights.w
        prev_obj = None

        for it in range(max_iter):
            g_analog = analog * p_diag[None, :]
            _, w_nw = noise_whitener(g_analog, sigma_rx, noise.sigma_ant_sq, noise.sigma_rf_sq)
            w_d = digital_update(g_analog, h, w_nw, g_des, digital_mode)
            obj = _objective(g_des, w_d, w_nw, g_analog)
            trace_all.append(obj)
            total_iters += 1
            if not np.isfinite(obj):
                raise RuntimeError(
                    f"non-finite objective at restart {restart} iteration {it} "
                    f"(frontend={frontend}, mapper={mapper}, last objectives "
                    f"{trace_all[-5:]})"
                )
            if prev_obj is not None and abs(prev_obj - obj) <= tol * max(prev_obj, 1e-300):
                converged_any = True
                break
            prev_obj = obj

            # analog half-step toward the desired combiner
            g_d = w_d @ w_nw
            if frontend == PCHP_FE:
                t = (
                    np.linalg.pinv(g_d) @ g_des / p_diag[None, :]
                    if mapper == NZM
                    else _pchp_cfm_target(g_d, g_des, p_diag, layout)
                )
                weights = pchp_analog_weights(_block_entries_like(t, layout), layout, pchp_amplitude)
                analog = weights.a
            else:
                weights = _MAPPERS[mapper](g_d, g_des, p_diag, layout, mode, m_max)
                analog = weights.w
            obj_analog = _objective(g_des, w_d, w_nw, analog * p_diag[None, :])
            trace_all.append(obj_analog)

        # compare restarts by the objective their converged iterate reaches;
        # mid-trajectory iterates are never returned, since the surrogate and
        # the achieved rate can move in opposite directions along the path
        g_analog = analog * p_diag[None, :]
        _, w_nw = noise_whitener(g_analog, sigma_rx, noise.sigma_ant_sq, noise.sigma_rf_sq)
        w_d = digital_update(g_analog, h, w_nw, g_des, digital_mode)
        obj_final = _objective(g_des, w_d, w_nw, g_analog)
        if best is None or obj_final < best[0]:
            best = (obj_final, analog.copy(), g_analog.copy(), w_d.copy(), w_nw.copy())

    _, analog, g_analog, w_d, w_nw = best
    w_d_eff = w_d @ w_nw
    g_eff = w_d_eff @ g_analog
    gamma = sinr(g_eff, w_d_eff, h, p_t, sigma_rx, noise.sigma_ant_sq, noise.sigma_rf_sq)
    return CombinerSolution(
        analog=analog,
        g_analog=g_analog,
        w_digital=w_d_eff,
        sinr=gamma,
        sum_rate=sum_rate(gamma),
        objective_trace=trace_all,
        iterations=total_iters,
        converged=converged_any,
        frontend=frontend,
        mapper=mapper,
    )


def _block_entries_like(t: np.ndarray, layout: ArrayLayout) -> np.ndarray:
    if t.ndim == 2:
        return _block_entries(t, layout)
    return t


def _pchp_cfm_target(g_d, g_des, p_diag, layout) -> np.ndarray:
    """Per-entry closed-form scalars for the hybrid array (same machinery as CFM)."""
    g = g_des / p_diag[None, :]
    entries = np.zeros(layout.n, dtype=complex)
    for i, grp in enumerate(layout.groups):
        col = g_d[:, i]
        denom = float(np.vdot(col, col).real)
        entries[grp] = (col.conj() @ g[:, grp]) / denom if denom > 0 else 1.0
    return entries
