"""Closed-form complex-multiplication counts for the optimizers.

All counts are exact Python integers (arbitrary precision), since the
gradient-method totals reach ~1e25 at large element counts and would
overflow 64-bit arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidInputError

__all__ = [
    "CostModel",
    "cost_cbc",
    "cost_linear_search",
    "cost_ao",
    "cost_a_gd",
    "cost_c_gd",
]


@dataclass(frozen=True)
class CostModel:
    """Dimensioning and iteration counts entering the cost formulas."""

    n_bs: int
    n_ms: int
    n_ris: int
    m_bs: int
    n_s: int
    b: int = 3
    i_a: int = 15
    i_c: int = 12
    i_o: int = 3

    def __post_init__(self):
        for name in ("n_bs", "n_ms", "n_ris", "m_bs", "n_s", "b"):
            if getattr(self, name) < 1:
                raise InvalidInputError(f"{name} must be >= 1")
        for name in ("i_a", "i_c", "i_o"):
            if getattr(self, name) < 0:
                raise InvalidInputError(f"{name} must be >= 0")


def cost_cbc(m: CostModel) -> int:
    """Multiplications of one column-by-column factorization (both sides)."""
    return (
        m.n_bs * m.m_bs * m.n_s
        + 2 * m.n_bs * m.n_s
        + m.n_bs
        + m.n_ms * m.n_s
        + m.n_ms
    )


def cost_linear_search(m: CostModel) -> int:
    """Multiplications of one full discrete phase sweep."""
    return 2 ** (m.b + 1) * m.n_ris**2 * m.n_s**2 + 2**m.b * m.n_ris * m.n_s**3


def cost_ao(m: CostModel) -> int:
    """Alternating loop: i_o repetitions of factorization plus sweep."""
    return m.i_o * (cost_cbc(m) + cost_linear_search(m))


def cost_a_gd(m: CostModel) -> int:
    """Adaptive-step descent: (5/2) i_a N^2 plus the coupling-matrix setup.

    The half-integer per-iteration term is rounded up.
    """
    per_iter = 5 * m.i_a * m.n_ris**2
    return (per_iter + 1) // 2 + 2 * m.n_bs**3 * m.n_ms**3 * m.n_ris**6


def cost_c_gd(m: CostModel) -> int:
    """Constant-step descent: i_c N^2 plus the same setup term."""
    return m.i_c * m.n_ris**2 + 2 * m.n_bs**3 * m.n_ms**3 * m.n_ris**6
