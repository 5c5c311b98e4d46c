"""Receiver power consumption per architecture and energy efficiency.

One RF chain draws LNA + mixer + clock + IQ demodulator + 2x(ADC + driver);
the metasurface additionally pays per-cell DAC/control power plus a static
FPGA core for reconfiguration. Totals are independent of the weight state and
depend on the captured power only through the LNA term.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .geometry import ArrayLayout

DMA_ARCH = "DMA"
PCHP_ARCH = "PCHP"
DPA_ARCH = "DPA"


@dataclass(frozen=True)
class ComponentPowers:
    """Component draw in watts; defaults are typical sub-6 GHz receiver parts."""

    p_slna: float = 0.75  # LNA static term
    p_mix: float = 0.4
    p_iqd: float = 2.2
    p_drv: float = 0.15
    p_adc: float = 0.725
    p_clk: float = 0.1
    p_dac: float = 0.002
    p_ctrl: float = 0.0006
    p_fpga: float = 0.1
    g_lna: float = 10.0 ** 1.25  # linear; chain gain 12.5 dB by default
    eta_lna: float = 0.12

    def __post_init__(self):
        vals = (self.p_slna, self.p_mix, self.p_iqd, self.p_drv, self.p_adc,
                self.p_clk, self.p_dac, self.p_ctrl, self.p_fpga)
        if any(v < 0 for v in vals):
            raise ConfigurationError("component powers must be >= 0")
        if not 0.0 < self.eta_lna <= 1.0:
            raise ConfigurationError("eta_lna must be in (0,1]")


def lna_power(p_in: float, c: ComponentPowers) -> float:
    """max(static, (G-1)/eta * P_in) with P_in the total captured power at the LNA."""
    if p_in < 0:
        raise ConfigurationError("LNA input power must be >= 0")
    return max(c.p_slna, (c.g_lna - 1.0) / c.eta_lna * p_in)


def rf_chain_power(p_in: float, c: ComponentPowers) -> float:
    return lna_power(p_in, c) + c.p_mix + c.p_clk + c.p_iqd + 2.0 * (c.p_adc + c.p_drv)


def dma_config_power(n: int, c: ComponentPowers) -> float:
    """Unit-cell driving circuitry: N (DAC + control line) plus the FPGA core."""
    return n * (c.p_dac + c.p_ctrl) + c.p_fpga


def chain_input_power(p_t: float, beta_avg: float, layout: ArrayLayout) -> float:
    """Captured power entering one LNA: avg pathloss x transmit power x summed
    effective area of the elements feeding that chain."""
    gain = layout.capture.power_gain
    return beta_avg * p_t * gain * layout.group_size


def architecture_power(
    arch: str,
    n: int,
    m: int,
    p_in_per_chain: float,
    c: ComponentPowers | None = None,
) -> float:
    """Total receiver power for one architecture in watts."""
    c = c or ComponentPowers()
    total = m * rf_chain_power(p_in_per_chain, c)
    if arch == DMA_ARCH:
        total += dma_config_power(n, c)
    elif arch not in (PCHP_ARCH, DPA_ARCH):
        raise ConfigurationError(f"unknown architecture {arch!r}")
    return total


def energy_efficiency(rate: float, bandwidth: float, power: float) -> tuple[float, float]:
    """(rate/power, rate*bandwidth/power): rate per watt and bits per joule."""
    if power <= 0:
        raise ConfigurationError("power must be positive")
    return rate / power, rate * bandwidth / power
