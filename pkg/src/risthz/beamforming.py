"""Fully-digital beamformers, achievable rate, and its trace upper bound.

The rate of the end-to-end channel ``h_e`` with precoder F and combiner W is

    R = log2 | I + rho/(delta^2 Ns) (W^H W)^-1 W^H h_e F F^H h_e^H W |,

evaluated through a Cholesky factor of W^H W so the determinant argument
stays Hermitian positive definite. The optimal digital pair is the first
Ns singular-vector columns of h_e.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics
from .channel import SystemConfig
from .errors import DimensionError, IllConditionedCombinerError, InvalidInputError

__all__ = [
    "HybridBeamformers",
    "optimal_digital_beamformers",
    "achievable_rate",
    "jensen_upper_bound",
]

UNIT_MODULUS_TOL = 1e-12
POWER_TOL = 1e-8
COMBINER_COND_FLOOR = 1e-12


@dataclass
class HybridBeamformers:
    """Analog/digital factor pairs plus their fully-digital references.

    f_rf, w_rf carry unit-modulus entries (one phase shifter per
    antenna/chain pair); f_bb, w_bb are the small digital matrices;
    f_opt, w_opt the unconstrained singular-vector beamformers they
    approximate.
    """

    f_rf: np.ndarray
    f_bb: np.ndarray
    w_rf: np.ndarray
    w_bb: np.ndarray
    f_opt: np.ndarray
    w_opt: np.ndarray

    @property
    def precoder(self) -> np.ndarray:
        return self.f_rf @ self.f_bb

    @property
    def combiner(self) -> np.ndarray:
        return self.w_rf @ self.w_bb

    def validate(self) -> None:
        """Check the analog unit-modulus and precoder power invariants."""
        for name, rf in (("f_rf", self.f_rf), ("w_rf", self.w_rf)):
            if np.abs(np.abs(rf) - 1.0).max() > UNIT_MODULUS_TOL:
                raise InvalidInputError(f"{name} entries are not unit modulus")
        n_s = self.f_bb.shape[1]
        power = np.linalg.norm(self.precoder) ** 2
        if abs(power - n_s) > POWER_TOL * max(1.0, n_s):
            raise InvalidInputError(f"precoder power {power:.3e} != n_s {n_s}")


def _phase_normalize_columns(m: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(m), axis=0)
    pivots = m[idx, np.arange(m.shape[1])]
    mags = np.abs(pivots)
    phases = np.where(mags > 0, pivots / np.where(mags > 0, mags, 1.0), 1.0)
    return m / phases[None, :]


def optimal_digital_beamformers(h_e, n_s: int) -> tuple[np.ndarray, np.ndarray]:
    """First n_s right/left singular vectors of the cascaded channel.

    Returns (f_opt, w_opt); columns are orthonormal, so the precoder power
    ||f_opt||_F^2 = n_s holds exactly. Columns are phase-normalized so the
    largest-magnitude entry of each is real positive.
    """
    h_e = numerics.as_matrix(h_e, "h_e")
    if n_s < 1 or n_s > min(h_e.shape):
        raise InvalidInputError(
            f"n_s={n_s} exceeds the rank budget min{h_e.shape} of the channel"
        )
    u, _, v = numerics.svd(h_e)
    f_opt = _phase_normalize_columns(v[:, :n_s].copy())
    w_opt = _phase_normalize_columns(u[:, :n_s].copy())
    return f_opt, w_opt


def achievable_rate(h_e, f, w, cfg: SystemConfig) -> float:
    """Spectral efficiency (bits/s/Hz) of the link for precoder f, combiner w.

    The stream count is f's column count; transmit power splits uniformly
    across streams. Raises IllConditionedCombinerError when w^H w is
    numerically singular.
    """
    h_e = numerics.as_matrix(h_e, "h_e")
    f = numerics.as_matrix(f, "f")
    w = numerics.as_matrix(w, "w")
    if f.shape[1] != w.shape[1]:
        raise DimensionError(f"stream counts differ: f {f.shape}, w {w.shape}")
    if h_e.shape != (w.shape[0], f.shape[0]):
        raise DimensionError(
            f"h_e {h_e.shape} not conformable with w {w.shape}, f {f.shape}"
        )
    n_s = f.shape[1]
    gram = w.conj().T @ w
    eigs = np.linalg.eigvalsh(gram)
    if eigs[0] <= COMBINER_COND_FLOOR * max(eigs[-1], 1e-300):
        raise IllConditionedCombinerError("w^H w is singular beyond tolerance")
    chol = np.linalg.cholesky(gram)
    t = w.conj().T @ h_e @ f
    x = np.linalg.solve(chol, t)
    snr_per_stream = cfg.rho / (cfg.delta_sq * n_s)
    m = np.eye(n_s) + snr_per_stream * (x @ x.conj().T)
    # m is Hermitian with eigenvalues >= 1; log-det via its Cholesky factor
    diag = np.diagonal(np.linalg.cholesky(m))
    return float(2.0 * np.sum(np.log2(diag.real)))


def jensen_upper_bound(h_e, cfg: SystemConfig) -> float:
    """Trace bound N_s log2(1 + rho/(delta^2 N_s) tr(h_e h_e^H)) on the rate."""
    h_e = numerics.as_matrix(h_e, "h_e")
    n_s = cfg.n_s
    energy = float(np.linalg.norm(h_e) ** 2)
    return n_s * float(np.log2(1.0 + cfg.rho / (cfg.delta_sq * n_s) * energy))
