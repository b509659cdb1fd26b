"""Alternating optimization: column-by-column hybrid factorization and a
one-at-a-time discrete phase search.

The factorization writes each fully-digital beamformer column either
exactly as d_max * (p + q) with two unit-modulus columns, or (when RF
chains are scarce) approximately as its mean amplitude times its
elementwise phases; the columns with the least amplitude variance take
the approximation. The phase search sweeps the reflecting elements in
ascending order, scoring every admissible angle with the determinant
proxy log2 |c (P_n + phi Q_n + conj(phi) Q_n^H)| and keeping the argmax.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import numerics
from .beamforming import HybridBeamformers, achievable_rate, optimal_digital_beamformers
from .channel import SystemConfig, cascade
from .errors import DegenerateChannelError, InfeasibleSplitError, InvalidInputError
from .ris import RisState

__all__ = [
    "CbcPlan",
    "constant_magnitude_split",
    "cbc_factor",
    "compute_pq",
    "linear_search_phases",
    "ao_optimize",
    "AoResult",
]


@dataclass(frozen=True)
class CbcPlan:
    """Which beamformer columns were factored exactly vs approximately."""

    exact_columns: tuple
    approx_columns: tuple
    d_max: np.ndarray
    variances: np.ndarray


def constant_magnitude_split(col, d_max: float) -> tuple[np.ndarray, np.ndarray]:
    """Write an arbitrary column as d_max * (p + q) with |p_i| = |q_i| = 1.

    p_i = exp(j(angle_i + theta_i)), q_i = exp(j(angle_i - theta_i)) with
    theta_i = arccos(|col_i| / (2 d_max)); feasible whenever every entry
    magnitude is at most 2 d_max, which holds when d_max is the column max.
    """
    c = np.asarray(col, dtype=np.complex128).ravel()
    if d_max <= 0:
        raise InfeasibleSplitError("d_max must be positive")
    ratio = np.abs(c) / (2.0 * d_max)
    if np.any(ratio > 1.0 + 1e-12):
        raise InfeasibleSplitError("some entries exceed 2*d_max; split infeasible")
    theta = np.arccos(np.clip(ratio, 0.0, 1.0))
    ang = np.angle(c)
    return np.exp(1j * (ang + theta)), np.exp(1j * (ang - theta))


def _amplitude_variance(col: np.ndarray) -> float:
    amps = np.abs(col)
    mean_amp = amps.sum() / col.size
    return float(np.sum((amps - mean_amp) ** 2))


def cbc_factor(
    f_opt, m_chains: int, normalize: bool = True
) -> tuple[np.ndarray, np.ndarray, CbcPlan]:
    """Factor an N x Ns digital beamformer into N x M analog and M x Ns digital parts.

    With M >= 2 Ns every column gets the exact two-vector split and the
    reconstruction is exact; with Ns <= M < 2 Ns the (2 Ns - M) columns of
    least amplitude variance fall back to the single-column approximation
    d_l = ||col||_1 / N times the elementwise phases. Unused analog
    columns are all-ones (their digital rows are zero). ``normalize``
    rescales the digital part so ||rf @ bb||_F^2 = Ns, as required for a
    precoder; pass False for a combiner.
    """
    f = numerics.as_matrix(f_opt, "f_opt")
    n, n_s = f.shape
    if m_chains < n_s:
        raise InvalidInputError(f"m_chains={m_chains} cannot carry {n_s} streams")

    d_max = np.abs(f).max(axis=0)
    variances = np.array([_amplitude_variance(f[:, l]) for l in range(n_s)])

    if m_chains >= 2 * n_s:
        approx = ()
    else:
        n_approx = 2 * n_s - m_chains
        approx = tuple(int(i) for i in np.argsort(variances, kind="stable")[:n_approx])
    exact = tuple(l for l in range(n_s) if l not in approx)

    rf = np.ones((n, m_chains), dtype=np.complex128)
    bb = np.zeros((m_chains, n_s), dtype=np.complex128)
    col = 0
    for l in range(n_s):
        if l in approx:
            rf[:, col] = np.exp(1j * np.angle(f[:, l]))
            bb[col, l] = np.abs(f[:, l]).sum() / n
            col += 1
        else:
            p, q = constant_magnitude_split(f[:, l], d_max[l])
            rf[:, col] = p
            rf[:, col + 1] = q
            bb[col, l] = d_max[l]
            bb[col + 1, l] = d_max[l]
            col += 2

    if normalize:
        bb *= math.sqrt(n_s) / np.linalg.norm(rf @ bb)

    return rf, bb, CbcPlan(exact, approx, d_max, variances)


def compute_pq(
    n: int, h1_bar: np.ndarray, h2_bar: np.ndarray, phases, mu_bar: float
) -> tuple[np.ndarray, np.ndarray]:
    """Constant matrices of the single-variable determinant objective.

    ``h1_bar`` and ``h2_bar`` hold one Ns-vector per reflecting element
    (columns), from h1_bar = (h1 @ f)^H and h2_bar = w^H @ h2. With
    S_n = sum_{i != n} phi_i h2_i h1_i^H over the complex reflection
    coefficients phi_i = mu_bar e^{j phase_i}:

        P_n = mu_bar^2 ||h1_n||^2 h2_n h2_n^H + S_n S_n^H
        Q_n = h2_n h1_n^H S_n^H

    so that P_n + phi_n Q_n + conj(phi_n) Q_n^H is the cascade Gram.
    """
    phases = np.asarray(phases, dtype=float)
    phi = mu_bar * np.exp(1j * phases)
    t = (h2_bar * phi[None, :]) @ h1_bar.conj().T
    outer_n = np.outer(h2_bar[:, n], h1_bar[:, n].conj())
    s_n = t - phi[n] * outer_n
    p_n = (
        mu_bar**2
        * float(np.linalg.norm(h1_bar[:, n]) ** 2)
        * np.outer(h2_bar[:, n], h2_bar[:, n].conj())
        + s_n @ s_n.conj().T
    )
    q_n = outer_n @ s_n.conj().T
    return p_n, q_n


def linear_search_phases(
    h1,
    h2,
    f,
    w,
    cfg: SystemConfig,
    ris: RisState,
    trace_path=None,
    outer_iter: int = 0,
) -> tuple[RisState, np.ndarray]:
    """One ascending sweep of per-element exhaustive phase selection.

    For each element the current angle is among the scanned candidates, so
    the recorded determinant proxy never decreases within the sweep.
    Candidates whose Gram is rank deficient score -inf and are skipped; if
    an element has no finite-scoring candidate its incumbent is retained,
    and if that happens for every candidate of every element the channel
    is degenerate for this stream count and an error is raised.
    """
    h1 = numerics.as_matrix(h1, "h1")
    h2 = numerics.as_matrix(h2, "h2")
    f = numerics.as_matrix(f, "f")
    w = numerics.as_matrix(w, "w")
    n_s = f.shape[1]
    n = ris.n_elements
    mu = ris.mu_bar
    scale = cfg.rho / (cfg.delta_sq * n_s)

    h1_bar = (h1 @ f).conj().T  # (n_s, n): column j is the j-th element's vector
    h2_bar = w.conj().T @ h2

    phases = ris.phases.copy()
    phi = mu * np.exp(1j * phases)
    t = (h2_bar * phi[None, :]) @ h1_bar.conj().T

    history = np.empty(n)
    any_finite = False
    trace_rows = []
    for idx in range(n):
        outer_idx = np.outer(h2_bar[:, idx], h1_bar[:, idx].conj())
        s_idx = t - phi[idx] * outer_idx
        p_idx = (
            mu**2
            * float(np.linalg.norm(h1_bar[:, idx]) ** 2)
            * np.outer(h2_bar[:, idx], h2_bar[:, idx].conj())
            + s_idx @ s_idx.conj().T
        )
        q_idx = outer_idx @ s_idx.conj().T

        def score_of(angle: float) -> float:
            cand = mu * np.exp(1j * angle)
            gram = p_idx + cand * q_idx + np.conj(cand) * q_idx.conj().T
            return numerics.hermitian_logdet2(scale * gram)

        # score the incumbent first; ties keep it, avoiding pointless churn
        best_angle = float(phases[idx])
        best_score = score_of(best_angle)
        for angle in ris.phase_set:
            if angle == best_angle:
                continue
            score = score_of(float(angle))
            if score > best_score:
                best_score = score
                best_angle = float(angle)
        if math.isfinite(best_score):
            any_finite = True
            phases[idx] = best_angle
            phi[idx] = mu * np.exp(1j * best_angle)
            t = s_idx + phi[idx] * outer_idx
        history[idx] = best_score
        if trace_path is not None:
            trace_rows.append((outer_iter, idx, math.degrees(phases[idx]), best_score))

    if not any_finite:
        raise DegenerateChannelError(
            "every candidate scored -inf: the cascade Gram is rank deficient "
            f"for n_s={n_s}"
        )

    if trace_path is not None:
        with open(trace_path, "a", newline="") as fh:
            writer = csv.writer(fh)
            if fh.tell() == 0:
                writer.writerow(["outer_iter", "element_index", "chosen_phase_deg", "r_tilde"])
            for row in trace_rows:
                writer.writerow([row[0], row[1], f"{row[2]:.9g}", f"{row[3]:.9g}"])

    return ris.with_phases(phases, quantized=True), history


@dataclass
class AoResult:
    """Outcome of the alternating loop."""

    beams: HybridBeamformers
    state: RisState
    rate: float
    rate_history: np.ndarray


def _factorize(h1, h2, cfg: SystemConfig, state: RisState) -> HybridBeamformers:
    h_e = cascade(h1, state, h2)
    f_opt, w_opt = optimal_digital_beamformers(h_e, cfg.n_s)
    f_rf, f_bb, _ = cbc_factor(f_opt, cfg.m_bs, normalize=True)
    w_rf, w_bb, _ = cbc_factor(w_opt, cfg.m_ms, normalize=False)
    return HybridBeamformers(f_rf, f_bb, w_rf, w_bb, f_opt, w_opt)


def ao_optimize(
    h1,
    h2,
    cfg: SystemConfig,
    ris_template: RisState,
    max_outer: int = 10,
    tol: float = 1e-3,
    trace_path=None,
) -> AoResult:
    """Alternate hybrid factorization and the discrete phase search.

    Starts from all-zero phases. Each outer iteration refactors the
    beamformers for the current cascade, runs one full phase sweep with
    the hybrid products, and evaluates the hybrid rate on the updated
    cascade; the loop stops after ``max_outer`` iterations or when the
    rate improves by less than ``tol``. ``max_outer=0`` returns the hybrid
    factorization of the initial cascade only.
    """
    state = ris_template.with_phases(
        np.zeros(ris_template.n_elements), quantized=True
    )
    beams = _factorize(h1, h2, cfg, state)
    rate = achievable_rate(cascade(h1, state, h2), beams.precoder, beams.combiner, cfg)

    if max_outer <= 0:
        return AoResult(beams, state, rate, np.asarray([rate]))

    history = []
    for k in range(max_outer):
        state, _ = linear_search_phases(
            h1, h2, beams.precoder, beams.combiner, cfg, state,
            trace_path=trace_path, outer_iter=k,
        )
        # refactorize for the updated phases so the reported rate, the
        # returned beams, and the returned state stay consistent
        beams = _factorize(h1, h2, cfg, state)
        new_rate = achievable_rate(
            cascade(h1, state, h2), beams.precoder, beams.combiner, cfg
        )
        history.append(new_rate)
        converged = abs(new_rate - rate) < tol
        rate = new_rate
        if converged:
            break

    return AoResult(beams, state, rate, np.asarray(history))
