"""Kronecker-correlated Rayleigh channels, pathloss, noise powers and channel file I/O.

The sampler follows H = Sigma_rx^{1/2} Hiid Sigma_tx^{1/2} with
Sigma_tx = diag(beta_1..beta_K); square roots are used deliberately so the
stated covariances actually hold. Per-element capture amplitudes multiply the
rows. Externally generated channel matrices (e.g. ray-traced 3GPP-style ones)
are ingested from a small binary or CSV container instead of being synthesized
here.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .constants import BOLTZMANN
from .errors import ChannelFileError, ConfigurationError
from .geometry import ArrayLayout, receive_correlation

CHANNEL_MAGIC = b"DMCH"
CHANNEL_VERSION = 1


@dataclass(frozen=True)
class PathlossModel:
    """Log-distance pathloss PL_dB = a*log10(d_m) + b + c*log10(f_GHz).

    Default coefficients approximate the urban-microcell NLoS tables commonly
    used for sub-6 GHz links; they are configuration, not physics baked into
    the code.
    """

    a: float = 36.7
    b: float = 22.7
    c: float = 26.0
    d_min: float = 10.0
    d_max: float = 2000.0

    def __call__(self, distance: float, f_c: float) -> float:
        return pathloss_umi_nlos(distance, f_c, self)


def pathloss_umi_nlos(distance: float, f_c: float, model: PathlossModel | None = None) -> float:
    """Linear power gain beta = 10^(-PL_dB/10) for one user at ``distance`` meters."""
    model = model or PathlossModel()
    if not model.d_min <= distance <= model.d_max:
        raise ConfigurationError(
            f"distance {distance} m outside pathloss validity range "
            f"[{model.d_min}, {model.d_max}] m"
        )
    f_ghz = f_c / 1e9
    pl_db = model.a * np.log10(distance) + model.b + model.c * np.log10(f_ghz)
    return float(10.0 ** (-pl_db / 10.0))


def rf_noise_power(bandwidth: float, temperature: float, noise_figure_db: float) -> float:
    """Input-referred RF-chain noise power k*T*B*(F - 1)."""
    if noise_figure_db < 0:
        raise ConfigurationError("noise figure must be >= 0 dB")
    return BOLTZMANN * temperature * bandwidth * (10.0 ** (noise_figure_db / 10.0) - 1.0)


@dataclass(frozen=True)
class UserDrop:
    distances: np.ndarray  # (K,) meters
    beta: np.ndarray  # (K,) linear power gains
    seed: int | None = None

    @property
    def k(self) -> int:
        return self.distances.shape[0]


def draw_user_drop(
    k: int,
    f_c: float,
    rng: np.random.Generator,
    r_min: float = 50.0,
    r_max: float = 200.0,
    pathloss: PathlossModel | None = None,
    seed: int | None = None,
) -> UserDrop:
    """Drop K users uniformly (in area) on a ring [r_min, r_max]."""
    u = rng.uniform(size=k)
    distances = np.sqrt(r_min**2 + u * (r_max**2 - r_min**2))
    beta = np.array([pathloss_umi_nlos(d, f_c, pathloss) for d in distances])
    return UserDrop(distances=distances, beta=beta, seed=seed)


@dataclass(frozen=True)
class NoiseSpec:
    sigma_ant_sq: float  # W, per reference element
    sigma_rf_sq: float  # W, input-referred per RF chain

    def __post_init__(self):
        if self.sigma_ant_sq < 0 or self.sigma_rf_sq <= 0:
            raise ConfigurationError("noise powers must be positive")

    def external_covariance(self, sigma_rx: np.ndarray) -> np.ndarray:
        return self.sigma_ant_sq * sigma_rx


@dataclass(frozen=True)
class ChannelRealization:
    h: np.ndarray  # (N, K) complex, includes pathloss and capture gains
    beta: np.ndarray  # (K,)
    sigma_rx: np.ndarray | None = None  # (N, N) correlation that colors H

    @property
    def n(self) -> int:
        return self.h.shape[0]

    @property
    def k(self) -> int:
        return self.h.shape[1]


def correlation_sqrt(sigma_rx: np.ndarray) -> np.ndarray:
    """Hermitian PSD square root of a correlation matrix."""
    w, v = np.linalg.eigh(sigma_rx)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def sample_channel(
    layout: ArrayLayout,
    drop: UserDrop,
    rng: np.random.Generator,
    sigma_rx: np.ndarray | None = None,
    sigma_rx_sqrt: np.ndarray | None = None,
) -> ChannelRealization:
    """Draw one Kronecker Rayleigh realization for ``layout``.

    Deterministic given the generator state; pass ``sigma_rx_sqrt`` to amortize
    the eigendecomposition across Monte Carlo trials.
    """
    if sigma_rx is None:
        sigma_rx = receive_correlation(layout)
    if sigma_rx_sqrt is None:
        sigma_rx_sqrt = correlation_sqrt(sigma_rx)
    n, k = layout.n, drop.k
    h_iid = (rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))) / np.sqrt(2.0)
    h = layout.capture.amplitude * (sigma_rx_sqrt @ h_iid) * np.sqrt(drop.beta)[None, :]
    return ChannelRealization(h=h, beta=drop.beta, sigma_rx=sigma_rx)


# ---------------------------------------------------------------------------
# Channel file container: little-endian binary with a fixed header, or a CSV
# fixture format with one realization per line of "re+imj" entries.
# ---------------------------------------------------------------------------

_HEADER = struct.Struct("<4sHII I")  # magic, version, N, K, count


def export_channels(path: str, realizations: list[np.ndarray]) -> None:
    """Write channel matrices to the binary container (complex64, row-major)."""
    if not realizations:
        raise ChannelFileError("nothing to export")
    n, k = realizations[0].shape
    for idx, h in enumerate(realizations):
        if h.shape != (n, k):
            raise ChannelFileError(f"record {idx}: shape {h.shape} != ({n}, {k})")
    with open(path, "wb") as f:
        f.write(_HEADER.pack(CHANNEL_MAGIC, CHANNEL_VERSION, n, k, len(realizations)))
        for h in realizations:
            f.write(np.ascontiguousarray(h, dtype=np.complex64).tobytes())


def import_channel_file(path: str, expected_n: int | None = None) -> list[ChannelRealization]:
    """Read a channel container (binary or CSV, sniffed by magic bytes)."""
    with open(path, "rb") as f:
        head = f.read(4)
    if head == CHANNEL_MAGIC:
        matrices = _read_binary(path)
    else:
        matrices = _read_csv(path)
    n, k = matrices[0].shape
    if expected_n is not None and n != expected_n:
        raise ChannelFileError(f"channel file has N={n} but the configured layout has N={expected_n}")
    return [
        ChannelRealization(h=h, beta=np.ones(k), sigma_rx=None)
        for h in matrices
    ]


def _read_binary(path: str) -> list[np.ndarray]:
    with open(path, "rb") as f:
        raw = f.read(_HEADER.size)
        if len(raw) < _HEADER.size:
            raise ChannelFileError(f"{path}: truncated header")
        magic, version, n, k, count = _HEADER.unpack(raw)
        if magic != CHANNEL_MAGIC:
            raise ChannelFileError(f"{path}: bad magic {magic!r}")
        if version != CHANNEL_VERSION:
            raise ChannelFileError(f"{path}: unsupported version {version}")
        matrices = []
        rec_bytes = n * k * 8  # complex64
        for idx in range(count):
            buf = f.read(rec_bytes)
            if len(buf) != rec_bytes:
                raise ChannelFileError(f"{path}: record {idx} truncated")
            matrices.append(np.frombuffer(buf, dtype=np.complex64).reshape(n, k).astype(np.complex128))
    if not matrices:
        raise ChannelFileError(f"{path}: empty container")
    return matrices


def _read_csv(path: str) -> list[np.ndarray]:
    with open(path, "r", encoding="utf-8") as f:
        lines = [ln.strip() for ln in f if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ChannelFileError(f"{path}: empty file")
    try:
        n, k = (int(tok) for tok in lines[0].split(","))
    except ValueError as exc:
        raise ChannelFileError(f"{path}: header must be 'N,K', got {lines[0]!r}") from exc
    matrices = []
    for idx, line in enumerate(lines[1:]):
        toks = [t.strip() for t in line.split(",")]
        if len(toks) != n * k:
            raise ChannelFileError(
                f"{path}: record {idx} has {len(toks)} entries, expected {n * k}"
            )
        try:
            vals = np.array([complex(t.replace("i", "j")) for t in toks])
        except ValueError as exc:
            raise ChannelFileError(f"{path}: record {idx} has a malformed entry") from exc
        matrices.append(vals.reshape(n, k))
    if not matrices:
        raise ChannelFileError(f"{path}: no records after header")
    return matrices


def export_channels_csv(path: str, realizations: list[np.ndarray]) -> None:
    n, k = realizations[0].shape
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{n},{k}\n")
        for h in realizations:
            f.write(",".join(f"{z.real:+.9e}{z.imag:+.9e}j" for z in h.ravel()) + "\n")
