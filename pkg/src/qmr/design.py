"""Index thresholds, contrast bound and regime hypothesis checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError

__all__ = ["DesignBounds", "RegimeFlags", "delta_bound", "design_bounds", "index_bounds", "regime_check"]


@dataclass(frozen=True)
class DesignBounds:
    eps_loc: float
    gamma1: float
    gamma2: float
    n1: int
    n2: int
    beta: float | None
    n1_clamped: bool = False
    n2_clamped: bool = False


def _check_inputs(eps_loc, gamma1, gamma2):
    if not (0 < eps_loc < 1):
        raise DomainError(f"eps_loc must lie in (0, 1), got {eps_loc!r}")
    if not (0 < gamma1 < 1):
        raise DomainError(f"gamma1 must lie in (0, 1), got {gamma1!r}")
    if not gamma2 > 1 or not math.isfinite(gamma2):
        raise DomainError(f"gamma2 must exceed 1, got {gamma2!r}")


def _raw_index_bounds(eps_loc, gamma1, gamma2) -> tuple[int, int]:
    le = math.log(eps_loc)
    n1 = math.floor((le / math.log(gamma1) - 3) / 2) + 1
    n2 = math.floor((1 - le / math.log(gamma2)) / 2) + 1
    return n1, n2


def index_bounds(eps_loc: float, gamma1: float, gamma2: float) -> tuple[int, int]:
    """Smallest mode indices that localize to level ``eps_loc`` inside and outside.

    Values below 1 are clamped to 1; :func:`design_bounds` reports the clamp.
    """
    _check_inputs(eps_loc, gamma1, gamma2)
    n1, n2 = _raw_index_bounds(eps_loc, gamma1, gamma2)
    return max(n1, 1), max(n2, 1)


def delta_bound(eps_loc: float, gamma1: float, gamma2: float) -> float:
    """Largest contrast ``δ`` for which ``n ≥ 1/δ`` already implies localization."""
    _check_inputs(eps_loc, gamma1, gamma2)
    if not eps_loc < gamma1:
        raise DomainError("the contrast bound needs eps_loc < gamma1")
    le, l1, l2 = math.log(eps_loc), math.log(gamma1), math.log(gamma2)
    return min(2 * l1 / (le - l1), 2 * l2 / (3 * l2 - le))


def design_bounds(eps_loc: float, gamma1: float, gamma2: float) -> DesignBounds:
    _check_inputs(eps_loc, gamma1, gamma2)
    n1, n2 = _raw_index_bounds(eps_loc, gamma1, gamma2)
    beta = delta_bound(eps_loc, gamma1, gamma2) if eps_loc < gamma1 else None
    return DesignBounds(eps_loc, gamma1, gamma2, max(n1, 1), max(n2, 1), beta, n1 < 1, n2 < 1)


@dataclass(frozen=True)
class RegimeFlags:
    thm31: bool  # localization: n >= max(n1, n2)
    cor32: bool  # delta <= beta and n >= 1/delta
    thm41: bool  # surface resonance: n >= max(n1, n2, 1/delta^2)
    prop41: bool  # n >= 1/delta^2
    thm42: bool  # stress concentration: n >= max(n1, n2, 1/delta)
    prop43: bool  # n >= 1/delta
    prop44: bool  # n >= 1/delta and delta <= beta


def regime_check(n: int, delta: float, eps_loc: float, gamma1: float, gamma2: float) -> RegimeFlags:
    """Evaluate every hypothesis on ``(n, δ)`` for the given shells.

    Reciprocal thresholds are compared exactly as ``n·δ ≥ 1`` and ``n·δ² ≥ 1``
    in rational arithmetic on the binary value of ``δ``.
    """
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    if not (0 < delta < 1):
        raise DomainError("delta must lie in (0, 1)")
    n1, n2 = index_bounds(eps_loc, gamma1, gamma2)
    d = Fraction(delta)
    big = n >= max(n1, n2)
    inv = n * d >= 1
    inv2 = n * d * d >= 1
    small_contrast = eps_loc < gamma1 and delta <= delta_bound(eps_loc, gamma1, gamma2)
    flags = RegimeFlags(
        thm31=big,
        cor32=small_contrast and inv,
        thm41=big and inv2,
        prop41=inv2,
        thm42=big and inv,
        prop43=inv,
        prop44=inv and small_contrast,
    )
    assert not flags.thm41 or flags.prop41
    assert not flags.thm42 or flags.prop43
    assert not flags.prop41 or flags.prop43
    return flags
