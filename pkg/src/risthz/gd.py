"""Phase-shift optimization by gradient descent on the cascaded energy.

The objective is f(phi) = -||h2 Phi(phi) h1||_F^2, expressed through a
reduced N x N coupling matrix so the N^2 x N^2 Kronecker quadratic form
is never materialized: with G1 = h1 h1^H and G2 = h2^H h2,

    b_eff[p, q] = -conj(G1[p, q]) * G2[p, q]
    f(phi)      = mu_bar^2 * Re(x^H b_eff x),   x = exp(j phi).

Two steppers share the descent loop: an adaptive step from the
second-order Taylor expansion of the objective along the gradient ray,
and a constant step calibrated once at the start.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import numerics
from .beamforming import achievable_rate, optimal_digital_beamformers
from .channel import SystemConfig, cascade
from .errors import DimensionError, InvalidInputError
from .ris import RisState, quantize_phases

__all__ = [
    "build_coupling",
    "objective",
    "gradient",
    "step_quadratic",
    "adaptive_step",
    "calibrate_fixed_step",
    "a_gd_optimize",
    "c_gd_optimize",
    "GdResult",
]


def build_coupling(h1, h2) -> np.ndarray:
    """Reduced Hermitian coupling matrix of the cascaded energy.

    Entry (p, q) equals the full Kronecker quadratic-form matrix
    -(h1^T kron h2)^H (h1^T kron h2) sampled at row (p-1)N+p and column
    (q-1)N+q, computed directly from the two small Gram matrices.
    """
    h1 = numerics.as_matrix(h1, "h1")
    h2 = numerics.as_matrix(h2, "h2")
    if h1.shape[0] != h2.shape[1]:
        raise DimensionError(
            f"h1 has {h1.shape[0]} reflecting rows but h2 has {h2.shape[1]} columns"
        )
    g1 = h1 @ h1.conj().T
    g2 = h2.conj().T @ h2
    return -(g1.conj() * g2)


def objective(b_eff: np.ndarray, phases: np.ndarray, mu_bar: float) -> float:
    """Quadratic-form value mu_bar^2 x^H b_eff x = -||h2 Phi h1||_F^2."""
    x = np.exp(1j * np.asarray(phases, dtype=float))
    return float(mu_bar**2 * np.real(x.conj() @ (b_eff @ x)))


def gradient(b_eff: np.ndarray, phases: np.ndarray, mu_bar: float) -> np.ndarray:
    """Gradient of the objective with respect to each phase.

    Component n is 2 mu_bar^2 Im{conj(x_n) (b_eff x)_n}; the diagonal of
    b_eff is real so it contributes nothing.
    """
    x = np.exp(1j * np.asarray(phases, dtype=float))
    return 2.0 * mu_bar**2 * np.imag(np.conj(x) * (b_eff @ x))


def step_quadratic(
    b_eff: np.ndarray, phases: np.ndarray, grad: np.ndarray, mu_bar: float
) -> tuple[float, float, float]:
    """Taylor coefficients (c0, c1, c2) of f(phi - lambda*grad) in lambda.

    Expanding exp(j lambda (g_p - g_q)) to second order inside the pair sum
    gives a quadratic c0 + c1 lambda + c2 lambda^2; when ``grad`` is the
    exact gradient, c1 equals -||grad||^2.
    """
    x = np.exp(1j * np.asarray(phases, dtype=float))
    g = np.asarray(grad, dtype=float)
    m = b_eff * (np.conj(x)[:, None] * x[None, :])
    c0 = float(mu_bar**2 * m.sum().real)
    c1 = float(-2.0 * mu_bar**2 * (g @ m.imag.sum(axis=1)))
    rows = m.real.sum(axis=1)
    c2 = float(-(mu_bar**2) * ((g**2) @ rows - g @ m.real @ g))
    return c0, c1, c2


def adaptive_step(
    b_eff: np.ndarray, phases: np.ndarray, grad: np.ndarray, mu_bar: float
) -> float:
    """Step size minimizing the local quadratic model along -grad.

    Returns -c1/(2 c2) when the model is convex, |c1|/|c2| when concave,
    and a bounded fallback 1/(1 + ||grad||_inf) when the curvature
    vanishes (e.g. at a stationary point).
    """
    _, c1, c2 = step_quadratic(b_eff, phases, grad, mu_bar)
    if c2 > 0.0:
        return -c1 / (2.0 * c2)
    if c2 < 0.0:
        return abs(c1) / abs(c2)
    return 1.0 / (1.0 + float(np.max(np.abs(grad))))


def calibrate_fixed_step(b_eff: np.ndarray, mu_bar: float) -> float:
    """One-shot constant-step calibration from the all-zero start.

    Evaluates the objective after a single step lambda = 10^-k / ||g0||_inf
    for k = 1..6 and keeps the best-scoring lambda.
    """
    n = b_eff.shape[0]
    phases0 = np.zeros(n)
    g0 = gradient(b_eff, phases0, mu_bar)
    g_inf = float(np.max(np.abs(g0)))
    if g_inf == 0.0:
        return 1.0
    best_lam, best_f = None, math.inf
    for k in range(1, 7):
        lam = 10.0**-k / g_inf
        f_val = objective(b_eff, phases0 - lam * g0, mu_bar)
        if f_val < best_f:
            best_lam, best_f = lam, f_val
    return best_lam


@dataclass
class GdResult:
    """Outcome of one descent run.

    ``history`` is the incumbent cascaded energy (-f) per iteration,
    nondecreasing with length max_iter + 1. ``rate_history``, when
    collected, is the running-best achievable rate of the quantized
    incumbent at each iteration.
    """

    state: RisState
    rate: float
    history: np.ndarray
    rate_history: Optional[np.ndarray] = None
    steps: Optional[np.ndarray] = None


def _incumbent_rate(h1, h2, cfg, template: RisState, phases: np.ndarray) -> float:
    state = template.with_phases(
        quantize_phases(phases, template.phase_set), quantized=True
    )
    h_e = cascade(h1, state, h2)
    f_opt, w_opt = optimal_digital_beamformers(h_e, cfg.n_s)
    return achievable_rate(h_e, f_opt, w_opt, cfg)


def _descend(
    h1,
    h2,
    cfg: SystemConfig,
    ris_template: RisState,
    max_iter: int,
    step_rule: Callable[[np.ndarray, np.ndarray, np.ndarray, float], float],
    collect_rates: bool,
    trace_path,
) -> GdResult:
    b_eff = build_coupling(h1, h2)
    mu = ris_template.mu_bar
    phases = np.zeros(ris_template.n_elements)

    best_energy = -objective(b_eff, phases, mu)
    best_phases = phases.copy()
    history = [best_energy]
    steps = []
    rate_hist = None
    if collect_rates:
        rate_hist = [_incumbent_rate(h1, h2, cfg, ris_template, best_phases)]

    trace_rows = []
    for i in range(max_iter):
        grad = gradient(b_eff, phases, mu)
        lam = step_rule(b_eff, phases, grad, mu)
        phases = phases - lam * grad
        f_new = objective(b_eff, phases, mu)
        if -f_new > best_energy:
            best_energy = -f_new
            best_phases = phases.copy()
        history.append(best_energy)
        steps.append(lam)
        if collect_rates:
            rate_hist.append(
                max(rate_hist[-1], _incumbent_rate(h1, h2, cfg, ris_template, best_phases))
            )
        if trace_path is not None:
            trace_rows.append((i, lam, f_new, best_energy))

    quantized = ris_template.with_phases(
        quantize_phases(best_phases, ris_template.phase_set), quantized=True
    )
    h_e = cascade(h1, quantized, h2)
    f_opt, w_opt = optimal_digital_beamformers(h_e, cfg.n_s)
    rate = achievable_rate(h_e, f_opt, w_opt, cfg)

    if trace_path is not None:
        with open(trace_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "step", "objective", "incumbent"])
            for row in trace_rows:
                writer.writerow([row[0]] + [f"{v:.9g}" for v in row[1:]])

    return GdResult(
        state=quantized,
        rate=rate,
        history=np.asarray(history),
        rate_history=None if rate_hist is None else np.asarray(rate_hist),
        steps=np.asarray(steps),
    )


def a_gd_optimize(
    h1,
    h2,
    cfg: SystemConfig,
    ris_template: RisState,
    max_iter: int = 15,
    collect_rates: bool = False,
    trace_path=None,
) -> GdResult:
    """Adaptive-step descent from the all-zero phase vector.

    Each iteration recomputes the Taylor-quadratic step, updates the
    phases, and tracks the best cascaded energy seen so far; the incumbent
    is quantized once at the end, and the rate is evaluated with fresh
    singular-vector beamformers on the quantized cascade.
    """
    return _descend(
        h1, h2, cfg, ris_template, max_iter,
        lambda b, p, g, mu: adaptive_step(b, p, g, mu),
        collect_rates, trace_path,
    )


def c_gd_optimize(
    h1,
    h2,
    cfg: SystemConfig,
    ris_template: RisState,
    fixed_step: Optional[float] = None,
    max_iter: int = 12,
    collect_rates: bool = False,
    trace_path=None,
) -> GdResult:
    """Constant-step variant of the same descent loop.

    ``fixed_step=None`` calibrates the step once via
    :func:`calibrate_fixed_step` before iterating.
    """
    if fixed_step is None:
        lam = calibrate_fixed_step(build_coupling(h1, h2), ris_template.mu_bar)
    elif fixed_step < 0:
        raise InvalidInputError("fixed_step must be nonnegative")
    else:
        lam = fixed_step
    return _descend(
        h1, h2, cfg, ris_template, max_iter,
        lambda b, p, g, mu: lam,
        collect_rates, trace_path,
    )
