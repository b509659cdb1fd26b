"""Sparse geometric THz channel synthesis.

Generates the two reflecting-surface hops (base station to surface,
surface to mobile station) and an optional direct base-to-mobile channel
whose line-of-sight path is blocked. Each hop is a sum of planar-array
outer products: one line-of-sight term plus L reflected terms, with path
gains combining spreading loss, molecular absorption, and (for reflected
paths) the material reflection coefficient.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import DimensionError, InvalidInputError
from .ris import RisState, SPEED_OF_LIGHT

__all__ = [
    "SystemConfig",
    "PathRecord",
    "ChannelRealization",
    "dbi_to_linear",
    "planar_grid",
    "upa_response",
    "los_gain",
    "nlos_gain",
    "generate_channel",
    "draw_realization",
    "cascade",
    "realization_to_json",
    "realization_from_json",
]

# Side length of one reflecting element; sets the surface's grid pitch.
RIS_ELEMENT_SIDE_M = 70e-6

HOPS = ("bs_ris", "ris_ms", "direct")


def dbi_to_linear(gain_dbi: float) -> float:
    """dBi antenna gain to the linear factor applied to path amplitudes."""
    return 10.0 ** (gain_dbi / 10.0)


@dataclass(frozen=True)
class SystemConfig:
    """Scalar physics and dimensioning of one link.

    Powers (rho, delta_sq) and antenna gains (g_t, g_r) are linear; kappa
    is the molecular absorption coefficient in 1/m, xi the reflection
    coefficient of the scattering material, distances in meters. Element
    counts n_bs / n_ris / n_ms are factored into planar grids internally.
    """

    f: float = 1.6e12
    n_bs: int = 64
    n_ris: int = 32
    n_ms: int = 16
    m_bs: int = 6
    m_ms: int = 4
    n_s: int = 1
    rho: float = 10.0
    delta_sq: float = 1.0
    g_t: float = dbi_to_linear(55.0)
    g_r: float = dbi_to_linear(55.0)
    kappa: float = 0.2
    xi: float = 1e-6
    r0: float = 25.0
    r_bar0: float = 10.0
    r_tilde0: float = 20.0
    l_paths: int = 2
    c: float = SPEED_OF_LIGHT

    def __post_init__(self):
        if not self.n_bs > self.m_bs >= self.n_s >= 1:
            raise InvalidInputError("need n_bs > m_bs >= n_s >= 1")
        if not self.n_ms > self.m_ms >= self.n_s:
            raise InvalidInputError("need n_ms > m_ms >= n_s")
        if self.n_ris < 1:
            raise InvalidInputError("n_ris must be >= 1")
        if self.l_paths < 0:
            raise InvalidInputError("l_paths must be >= 0")
        for name in ("f", "rho", "delta_sq", "r0", "r_bar0", "r_tilde0", "c"):
            if getattr(self, name) <= 0:
                raise InvalidInputError(f"{name} must be positive")

    @property
    def wavelength(self) -> float:
        return self.c / self.f

    @property
    def ris_spacing_over_lambda(self) -> float:
        """Surface grid pitch (one element side) in wavelengths."""
        return RIS_ELEMENT_SIDE_M / self.wavelength


def planar_grid(n: int) -> tuple[int, int]:
    """Factor n elements into an (nx, ny) planar grid.

    Perfect squares give a square grid; otherwise nx is the largest
    power-of-two divisor of n not exceeding sqrt(n).
    """
    if n < 1:
        raise InvalidInputError("element count must be >= 1")
    root = math.isqrt(n)
    if root * root == n:
        return root, root
    nx = 1
    while nx * 2 <= root and n % (nx * 2) == 0:
        nx *= 2
    return nx, n // nx


def upa_response(
    theta_az: float,
    theta_el: float,
    nx: int,
    ny: int,
    spacing_over_lambda: float,
) -> np.ndarray:
    """Normalized planar-array response vector, shape (nx*ny, 1).

    The entry for grid index (p, q), flattened p-major, carries phase
    2*pi*spacing*(p*sin(theta_el)*cos(theta_az) + q*cos(theta_el)).
    The result has unit L2 norm.
    """
    if nx < 1 or ny < 1:
        raise InvalidInputError("grid dimensions must be >= 1")
    p = np.arange(nx)[:, None]
    q = np.arange(ny)[None, :]
    phase = (
        2.0
        * math.pi
        * spacing_over_lambda
        * (p * math.sin(theta_el) * math.cos(theta_az) + q * math.cos(theta_el))
    )
    a = np.exp(1j * phase) / math.sqrt(nx * ny)
    return a.reshape(-1, 1)


def los_gain(cfg: SystemConfig, distance: float) -> complex:
    """Line-of-sight path gain: spreading loss, molecular absorption,
    and the propagation phase exp(-j 2 pi f r / c)."""
    if distance <= 0:
        raise InvalidInputError("distance must be positive")
    tau = distance / cfg.c
    amp = cfg.c / (4.0 * math.pi * cfg.f * distance) * math.exp(-0.5 * cfg.kappa * distance)
    return amp * complex(np.exp(-2j * math.pi * cfg.f * tau))


def nlos_gain(cfg: SystemConfig, r1: float, r2: float) -> complex:
    """Reflected path gain over legs r1 (to the reflector) and r2 (from it).

    The arrival time is referenced to the line-of-sight delay:
    tau_ref = tau_los + (r1 + r2 - r0) / c. The material reflection
    coefficient xi multiplies the whole gain.
    """
    if r1 <= 0 or r2 <= 0:
        raise InvalidInputError("reflection leg distances must be positive")
    total = r1 + r2
    tau_los = cfg.r0 / cfg.c
    tau_ref = tau_los + (total - cfg.r0) / cfg.c
    amp = cfg.c / (4.0 * math.pi * cfg.f * total) * math.exp(-0.5 * cfg.kappa * total)
    return amp * complex(np.exp(-2j * math.pi * cfg.f * tau_ref)) * cfg.xi


@dataclass(frozen=True)
class PathRecord:
    """Draw parameters of one propagation path."""

    azimuth_aoa: float
    elevation_aoa: float
    azimuth_aod: float
    elevation_aod: float
    gain: complex
    los: bool
    r1: float
    r2: float


def _hop_layout(cfg: SystemConfig, hop: str):
    half = 0.5
    ris = cfg.ris_spacing_over_lambda
    if hop == "bs_ris":
        return cfg.n_ris, ris, cfg.n_bs, half, cfg.r_bar0, cfg.g_t, True
    if hop == "ris_ms":
        return cfg.n_ms, half, cfg.n_ris, ris, cfg.r_tilde0, cfg.g_r, True
    if hop == "direct":
        # blocked line of sight: reflected paths only, both antenna gains
        return cfg.n_ms, half, cfg.n_bs, half, cfg.r0, cfg.g_t * cfg.g_r, False
    raise InvalidInputError(f"unknown hop {hop!r}; expected one of {HOPS}")


def generate_channel(cfg: SystemConfig, hop: str, seed) -> tuple[np.ndarray, list[PathRecord]]:
    """Draw one hop channel matrix and its per-path records.

    ``hop`` selects dimensions, array spacings, hop distance, and gain:
    'bs_ris' (n_ris x n_bs, transmit gain), 'ris_ms' (n_ms x n_ris,
    receive gain), or 'direct' (n_ms x n_bs, no line-of-sight term,
    L reflected paths over the base-to-mobile distance).

    ``seed`` may be an integer (or anything ``default_rng`` accepts) or an
    existing Generator. Identical seeds give bit-identical matrices. Per
    path the draw order is fixed: arrival azimuth, arrival elevation,
    departure azimuth, departure elevation, then (reflected paths only)
    r1 ~ U[r/2, r] and the excess U[0, r/2] that sets r2.
    """
    n_rx, rx_spacing, n_tx, tx_spacing, r_hop, gain_scale, has_los = _hop_layout(cfg, hop)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)

    rx_grid = planar_grid(n_rx)
    tx_grid = planar_grid(n_tx)
    h = np.zeros((n_rx, n_tx), dtype=np.complex128)
    records: list[PathRecord] = []

    def draw_angles():
        az_aoa = rng.uniform(0.0, 2.0 * math.pi)
        el_aoa = rng.uniform(0.0, math.pi)
        az_aod = rng.uniform(0.0, 2.0 * math.pi)
        el_aod = rng.uniform(0.0, math.pi)
        return az_aoa, el_aoa, az_aod, el_aod

    def add_path(angles, path_gain: complex, amp: float, los: bool, r1: float, r2: float):
        az_aoa, el_aoa, az_aod, el_aod = angles
        a_rx = upa_response(az_aoa, el_aoa, *rx_grid, rx_spacing)
        a_tx = upa_response(az_aod, el_aod, *tx_grid, tx_spacing)
        records.append(
            PathRecord(az_aoa, el_aoa, az_aod, el_aod, complex(path_gain), los, r1, r2)
        )
        return amp * path_gain * gain_scale * (a_rx @ a_tx.conj().T)

    if has_los:
        h += add_path(draw_angles(), los_gain(cfg, r_hop), math.sqrt(n_tx * n_rx), True, r_hop, 0.0)

    if cfg.l_paths > 0:
        amp_nlos = math.sqrt(n_tx * n_rx / cfg.l_paths)
        for _ in range(cfg.l_paths):
            angles = draw_angles()
            r1 = rng.uniform(0.5 * r_hop, r_hop)
            r2 = r_hop - r1 + rng.uniform(0.0, 0.5 * r_hop)
            h += add_path(angles, nlos_gain(cfg, r1, r2), amp_nlos, False, r1, r2)

    return h, records


@dataclass(frozen=True)
class ChannelRealization:
    """One deterministic draw of the two hops plus the direct channel."""

    h1: np.ndarray  # n_ris x n_bs
    h2: np.ndarray  # n_ms x n_ris
    h_direct: Optional[np.ndarray]  # n_ms x n_bs
    path_params: dict = field(default_factory=dict)
    seed: int = 0


def draw_realization(cfg: SystemConfig, seed: int, include_direct: bool = True) -> ChannelRealization:
    """Draw (h1, h2, h_direct) from one seed; hop order is fixed."""
    rng = np.random.default_rng(seed)
    h1, rec1 = generate_channel(cfg, "bs_ris", rng)
    h2, rec2 = generate_channel(cfg, "ris_ms", rng)
    paths = {"bs_ris": rec1, "ris_ms": rec2}
    h_direct = None
    if include_direct:
        h_direct, rec_d = generate_channel(cfg, "direct", rng)
        paths["direct"] = rec_d
    return ChannelRealization(h1=h1, h2=h2, h_direct=h_direct, path_params=paths, seed=seed)


def cascade(h1: np.ndarray, state: RisState, h2: np.ndarray) -> np.ndarray:
    """Effective end-to-end channel h2 @ diag(mu_bar e^{j phi}) @ h1."""
    h1 = np.asarray(h1)
    h2 = np.asarray(h2)
    n = state.n_elements
    if h1.ndim != 2 or h2.ndim != 2 or h1.shape[0] != n or h2.shape[1] != n:
        raise DimensionError(
            f"cascade dims mismatch: h1 {h1.shape}, h2 {h2.shape}, {n} reflecting elements"
        )
    return (h2 * state.reflection_coefficients()[None, :]) @ h1


def _matrix_payload(m: np.ndarray) -> dict:
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in m.ravel(order="C")],
    }


def _matrix_from_payload(d: dict) -> np.ndarray:
    entries = np.array([complex(re, im) for re, im in d["entries"]])
    return entries.reshape((d["rows"], d["cols"]), order="C")


def realization_to_json(real: ChannelRealization) -> str:
    """Self-describing JSON dump (dims plus [re, im] entry pairs)."""
    payload = {
        "seed": real.seed,
        "h1": _matrix_payload(real.h1),
        "h2": _matrix_payload(real.h2),
        "h_direct": None if real.h_direct is None else _matrix_payload(real.h_direct),
        "paths": {
            hop: [
                {
                    "azimuth_aoa": r.azimuth_aoa,
                    "elevation_aoa": r.elevation_aoa,
                    "azimuth_aod": r.azimuth_aod,
                    "elevation_aod": r.elevation_aod,
                    "gain": [r.gain.real, r.gain.imag],
                    "los": r.los,
                    "r1": r.r1,
                    "r2": r.r2,
                }
                for r in recs
            ]
            for hop, recs in real.path_params.items()
        },
    }
    return json.dumps(payload)


def realization_from_json(text: str) -> ChannelRealization:
    d = json.loads(text)
    paths = {
        hop: [
            PathRecord(
                azimuth_aoa=r["azimuth_aoa"],
                elevation_aoa=r["elevation_aoa"],
                azimuth_aod=r["azimuth_aod"],
                elevation_aod=r["elevation_aod"],
                gain=complex(r["gain"][0], r["gain"][1]),
                los=r["los"],
                r1=r["r1"],
                r2=r["r2"],
            )
            for r in recs
        ]
        for hop, recs in d["paths"].items()
    }
    return ChannelRealization(
        h1=_matrix_from_payload(d["h1"]),
        h2=_matrix_from_payload(d["h2"]),
        h_direct=None if d["h_direct"] is None else _matrix_from_payload(d["h_direct"]),
        path_params=paths,
        seed=d["seed"],
    )
