"""Spherical Bessel and Hankel functions and associated Legendre functions.

Plain evaluations follow the textbook definitions.  The solver works with
*scaled* radial functions instead, in which the small-argument magnitude
has been divided out::

    j_n(z) = z**n / (2n+1)!! * jhat_n(z)
    h_n(z) = (2n-1)!! / (i z**(n+1)) * hhat_n(z)

Both ``jhat_n`` and ``hhat_n`` tend to 1 as ``z -> 0``, so products that
appear in the mode system stay of order one even when ``z**n`` underflows.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DomainError, SingularityError

__all__ = [
    "RadialPair",
    "ScaledRadialPair",
    "assoc_legendre_pair",
    "double_factorial",
    "log_double_factorial",
    "normalized_legendre",
    "radial_pair",
    "radial_traction",
    "scaled_radial_pair",
    "scaled_traction",
    "small_arg_series",
    "sph_bessel_j",
    "sph_bessel_j_scaled",
    "sph_hankel1",
    "sph_hankel1_scaled",
]

Kind = Literal["bessel_j", "hankel1"]

N_MAX = 200
Z_MAX = 1.0e3


@dataclass(frozen=True)
class RadialPair:
    """A radial function value and its derivative with respect to the argument."""

    value: complex
    derivative: complex


@dataclass(frozen=True)
class ScaledRadialPair:
    """Scaled value and scaled ``z * f'(z)`` sharing one magnitude factor.

    For ``kind="bessel_j"`` the factor is ``z**n/(2n+1)!!``; for
    ``kind="hankel1"`` it is ``(2n-1)!!/(i z**(n+1))``.
    """

    value: complex
    z_derivative: complex


def double_factorial(k: int) -> float:
    """``k!!`` for ``k >= -1`` as a float (``(-1)!! = 0!! = 1``)."""
    if k < -1:
        raise DomainError(f"double factorial undefined for {k}")
    out = 1.0
    for j in range(k, 0, -2):
        out *= j
    return out


def log_double_factorial(k: int) -> float:
    """Natural log of ``k!!`` for odd ``k >= -1``."""
    if k < -1 or (k >= 0 and k % 2 == 0):
        raise DomainError(f"log_double_factorial expects an odd k >= -1, got {k}")
    if k <= 1:
        return 0.0
    # (2p-1)!! = (2p)! / (2^p p!)
    p = (k + 1) // 2
    return math.lgamma(2 * p + 1) - p * math.log(2.0) - math.lgamma(p + 1)


def _check_order(n: int) -> int:
    if isinstance(n, bool) or int(n) != n:
        raise DomainError(f"order must be an integer, got {n!r}")
    n = int(n)
    if n < 0 or n > N_MAX:
        raise DomainError(f"order {n} outside supported range 0..{N_MAX}")
    return n


def _check_arg(z: complex) -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"argument must be finite, got {z!r}")
    if abs(z) > Z_MAX:
        raise DomainError(f"|z| = {abs(z):g} exceeds the supported bound {Z_MAX:g}")
    return z


def _finite(value: complex, what: str) -> complex:
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise DomainError(f"{what} is not representable in double precision")
    return value


# ---------------------------------------------------------------- Bessel j_n


def _jhat_series(n: int, z: complex, shift: int | None = None) -> complex:
    """Power series of ``jhat_n`` summed to machine precision.

    With ``shift`` given, term ``k`` is weighted by ``n + 2k + shift``: this
    yields the scaled ``z j_n'`` (shift 0) or ``z j_n' - j_n`` (shift -1)
    without the cancellation a difference of two sums would suffer.
    """
    w = -0.5 * z * z
    term = 1.0 + 0.0j
    total = term if shift is None else (n + shift) * term
    for k in range(1, 400):
        term *= w / (k * (2 * n + 2 * k + 1))
        weighted = term if shift is None else (n + 2 * k + shift) * term
        total += weighted
        if abs(weighted) <= 1e-17 * abs(total):
            break
    return total


def _j_miller(n: int, z: complex) -> complex:
    """``j_n(z)`` by downward (Miller) recurrence normalised with ``j_0`` or ``j_1``."""
    size = max(n, abs(z))
    start = int(size + 30 + 4 * math.sqrt(size))
    f_next, f_cur = 0.0j, 1e-30 + 0.0j
    keep = 0.0j
    f0 = f1 = 0.0j
    for k in range(start, 0, -1):
        f_prev = (2 * k + 1) / z * f_cur - f_next
        f_next, f_cur = f_cur, f_prev
        if k - 1 == n:
            keep = f_cur
        if abs(f_cur) > 1e250:
            f_next *= 1e-250
            f_cur *= 1e-250
            keep *= 1e-250
        if k == 1:
            f0, f1 = f_cur, f_next
    j0 = cmath.sin(z) / z
    j1 = cmath.sin(z) / (z * z) - cmath.cos(z) / z
    if abs(j0) >= abs(j1):
        return keep * (j0 / f0)
    return keep * (j1 / f1)


def _use_series(n: int, z: complex) -> bool:
    return abs(z) < max(1, n) / 4.0


def _j_prefactor(n: int, z: complex) -> complex:
    pref = 1.0 + 0.0j
    for j in range(1, n + 1):
        pref *= z / (2 * j + 1)
    return pref


def sph_bessel_j(n: int, z: complex) -> complex:
    """Spherical Bessel function ``j_n(z)`` for ``0 <= n <= 200``, ``|z| <= 1e3``."""
    n = _check_order(n)
    z = _check_arg(z)
    if _use_series(n, z):
        return _finite(_j_prefactor(n, z) * _jhat_series(n, z), "j_n(z)")
    return _finite(_j_miller(n, z), "j_n(z)")


def sph_bessel_j_scaled(n: int, z: complex) -> complex:
    """``jhat_n(z) = j_n(z) (2n+1)!! / z**n``, equal to 1 at the origin."""
    n = _check_order(n)
    z = _check_arg(z)
    if _use_series(n, z):
        return _jhat_series(n, z)
    log_pref = n * cmath.log(z) - log_double_factorial(2 * n + 1)
    return _finite(_j_miller(n, z) * cmath.exp(-log_pref), "jhat_n(z)")


# ---------------------------------------------------------------- Hankel h_n


def _hhat_closed(n: int, z: complex) -> complex:
    """``hhat_n(z) = exp(iz) * sum_j b_j (-iz)**j`` with ``b_0 = 1``.

    This is the textbook finite closed form of ``h_n`` with the terms taken
    in reverse order; every term is bounded by ``|z|**j / j!``.
    """
    u = -1j * z
    b = 1.0
    total = 1.0 + 0.0j
    power = 1.0 + 0.0j
    for j in range(n):
        b *= 2.0 * (n - j) / ((2 * n - j) * (j + 1))
        power *= u
        total += b * power
    return cmath.exp(1j * z) * total


# Above this modulus the closed-form sum starts to cancel; upward recurrence
# from the exact h_0, h_1 is used instead (it is stable for h_n).
_CLOSED_FORM_RADIUS = 2.0


def _hhat_upward(n: int, z: complex) -> complex:
    e = cmath.exp(1j * z)
    prev, cur = e, e * (1 - 1j * z)
    if n == 0:
        return prev
    z2 = z * z
    for k in range(1, n):
        prev, cur = cur, cur - z2 * prev / ((2 * k + 1) * (2 * k - 1))
    return cur


def _h_upward(n: int, z: complex) -> complex:
    e = cmath.exp(1j * z)
    prev = -1j * e / z
    cur = -e * (z + 1j) / (z * z)
    if n == 0:
        return prev
    for k in range(1, n):
        prev, cur = cur, (2 * k + 1) / z * cur - prev
        if not cmath.isfinite(cur):
            break
    return cur


def sph_hankel1(n: int, z: complex) -> complex:
    """Spherical Hankel function of the first kind ``h_n(z) = j_n(z) + i y_n(z)``."""
    n = _check_order(n)
    z = _check_arg(z)
    if z == 0:
        raise SingularityError("h_n is singular at z = 0")
    if abs(z) > _CLOSED_FORM_RADIUS:
        return _finite(_h_upward(n, z), "h_n(z)")
    log_pref = log_double_factorial(2 * n - 1) - (n + 1) * cmath.log(z)
    if log_pref.real > 700.0:
        raise DomainError(f"h_{n}({z}) overflows double precision; use the scaled form")
    return _finite(cmath.exp(log_pref) / 1j * _hhat_closed(n, z), "h_n(z)")


def sph_hankel1_scaled(n: int, z: complex) -> complex:
    """``hhat_n(z) = h_n(z) i z**(n+1) / (2n-1)!!``, equal to 1 at the origin."""
    n = _check_order(n)
    z = _check_arg(z)
    if abs(z) > _CLOSED_FORM_RADIUS:
        return _finite(_hhat_upward(n, z), "hhat_n(z)")
    return _finite(_hhat_closed(n, z), "hhat_n(z)")


# ---------------------------------------------------------------- pairs


def _check_kind(kind: str) -> str:
    if kind not in ("bessel_j", "hankel1"):
        raise DomainError(f"unknown radial kind {kind!r}")
    return kind


def radial_pair(kind: Kind, n: int, z: complex) -> RadialPair:
    """Value and derivative ``f_n'(z) = f_{n-1}(z) - (n+1)/z f_n(z)`` (``-f_1`` at n=0)."""
    _check_kind(kind)
    n = _check_order(n)
    f = sph_bessel_j if kind == "bessel_j" else sph_hankel1
    value = f(n, z)
    if n == 0:
        return RadialPair(value, -f(1, z))
    if complex(z) == 0:
        # only reachable for j_n, whose derivative at 0 is 1/3 for n = 1
        return RadialPair(value, 1.0 / 3.0 + 0.0j if n == 1 else 0.0j)
    z = complex(z)
    if kind == "bessel_j" and _use_series(n, z):
        return RadialPair(value, _j_prefactor(n, z) / z * _jhat_series(n, z, shift=0))
    return RadialPair(value, f(n - 1, z) - (n + 1) / z * value)


def radial_traction(kind: Kind, n: int, z: complex) -> complex:
    """``z f_n'(z) - f_n(z)``, the radial factor of the shear traction of ``f_n T_n^m``.

    For ``j_1`` the two terms cancel to ``O(z³)``; the series keeps full
    relative accuracy there.
    """
    _check_kind(kind)
    n = _check_order(n)
    z = _check_arg(complex(z))
    if kind == "bessel_j" and n >= 1 and _use_series(n, z):
        return _finite(_j_prefactor(n, z) * _jhat_series(n, z, shift=-1), "z j_n' - j_n")
    pair = radial_pair(kind, n, z)
    return z * pair.derivative - pair.value


def scaled_traction(kind: Kind, n: int, z: complex) -> complex:
    """Scaled ``z f_n' - f_n``, i.e. ``z_derivative - value`` of :func:`scaled_radial_pair`."""
    _check_kind(kind)
    n = _check_order(n)
    z = complex(z)
    if kind == "bessel_j" and n >= 1 and _use_series(n, z):
        return _jhat_series(n, z, shift=-1)
    pair = scaled_radial_pair(kind, n, z)
    return pair.z_derivative - pair.value


def scaled_radial_pair(kind: Kind, n: int, z: complex) -> ScaledRadialPair:
    """Scaled value and scaled ``z f_n'(z)`` (see :class:`ScaledRadialPair`)."""
    _check_kind(kind)
    n = _check_order(n)
    z = complex(z)
    if kind == "bessel_j":
        v = sph_bessel_j_scaled(n, z)
        if n == 0:
            return ScaledRadialPair(v, -z * z * sph_bessel_j_scaled(1, z) / 3.0)
        if _use_series(n, z):
            return ScaledRadialPair(v, _jhat_series(n, z, shift=0))
        return ScaledRadialPair(v, (2 * n + 1) * sph_bessel_j_scaled(n - 1, z) - (n + 1) * v)
    v = sph_hankel1_scaled(n, z)
    if n == 0:
        return ScaledRadialPair(v, -sph_hankel1_scaled(1, z))
    return ScaledRadialPair(v, z * z * sph_hankel1_scaled(n - 1, z) / (2 * n - 1) - (n + 1) * v)


def small_arg_series(kind: Kind, n: int, z: complex, order: int) -> complex:
    """Truncated small-argument expansion, kept as an independent test oracle.

    ``order`` is 2 or 4 (highest power of ``z`` kept inside the bracket).
    """
    _check_kind(kind)
    n = _check_order(n)
    z = complex(z)
    if order not in (2, 4):
        raise DomainError("order must be 2 or 4")
    if abs(z) >= 0.5:
        raise DomainError("small_arg_series requires |z| < 0.5")
    z2 = z * z
    if kind == "bessel_j":
        br = 1 - z2 / (2 * (2 * n + 3))
        if order == 4:
            br += z2 * z2 / (8 * (2 * n + 3) * (2 * n + 5))
        pref = 1.0 + 0.0j
        for j in range(1, n + 1):
            pref *= z / (2 * j + 1)
        return pref * br
    if z == 0:
        raise SingularityError("h_n is singular at z = 0")
    if n == 0:
        br = 1 + 1j * z - z2 / 2
        if order == 4:
            br += -1j * z2 * z / 6 + z2 * z2 / 24
    elif n == 1:
        br = 1 + z2 / 2
        if order == 4:
            br += 1j * z2 * z / 3 - z2 * z2 / 8
    else:
        br = 1 + z2 / (2 * (2 * n - 1))
        if order == 4:
            br += z2 * z2 / (8 * (2 * n - 1) * (2 * n - 3))
    return double_factorial(2 * n - 1) / (1j * z ** (n + 1)) * br


# ---------------------------------------------------------------- Legendre


def _as_array(theta):
    t = np.asarray(theta, dtype=float)
    if np.any((t < 0.0) | (t > math.pi)) or not np.all(np.isfinite(t)):
        raise DomainError("theta must lie in [0, pi]")
    return t


def _norm_sectoral_over_sin(m: int, s: np.ndarray) -> np.ndarray:
    """``Pbar_m^m / sin(theta)`` for ``m >= 1`` (finite at the poles)."""
    val = np.full_like(s, 1.0 / math.sqrt(4.0 * math.pi))
    for k in range(1, m + 1):
        factor = math.sqrt((2 * k + 1) / (2.0 * k))
        val = val * factor * (s if k > 1 else 1.0)
    return val


def _norm_column(n: int, m: int, x: np.ndarray, seed: np.ndarray):
    """Run the normalised degree recurrence from ``seed = (.)_m^m`` up to ``n``.

    Returns the values at degrees ``n`` and ``n-1`` (zero when ``n-1 < m``).
    """
    if n < m:
        z = np.zeros_like(x)
        return z, z
    prev = np.zeros_like(x)
    cur = seed
    for k in range(m + 1, n + 1):
        a = math.sqrt((4.0 * k * k - 1.0) / (k * k - m * m))
        b = math.sqrt(((k - 1.0) ** 2 - m * m) / (4.0 * (k - 1.0) ** 2 - 1.0))
        prev, cur = cur, a * (x * cur - b * prev)
    return cur, prev


def normalized_legendre(n: int, m: int, theta):
    """Normalised Legendre data used by the harmonics module.

    Returns a dict with ``P`` = C_n^m P_n^m(cos θ), ``dP`` its θ-derivative,
    ``d2P`` the second θ-derivative and, for ``m >= 1``, ``Q`` = P/sin θ and
    ``dQ`` its θ-derivative.  ``C_n^m = sqrt((2n+1)/(4π) (n-m)!/(n+m)!)``.
    No Condon–Shortley phase.  ``Q`` is finite at the poles; ``d2P`` and
    ``dQ`` use ``1/sin θ`` and are meant for interior angles.
    """
    if m < 0 or m > n:
        raise DomainError(f"need 0 <= m <= n, got n={n}, m={m}")
    t = _as_array(theta)
    x = np.cos(t)
    s = np.sin(t)
    nn = n * (n + 1)
    if m == 0:
        p0, _ = _norm_column(n, 0, x, np.full_like(x, 1.0 / math.sqrt(4.0 * math.pi)))
        if n == 0:
            zero = np.zeros_like(x)
            return {"P": p0, "dP": zero, "d2P": zero}
        q1, _ = _norm_column(n, 1, x, _norm_sectoral_over_sin(1, s))
        root = math.sqrt(nn)
        dp = -root * s * q1
        d2p = root * x * q1 - nn * p0
        return {"P": p0, "dP": dp, "d2P": d2p}
    q, q_prev = _norm_column(n, m, x, _norm_sectoral_over_sin(m, s))
    p = s * q
    dp = n * x * q - math.sqrt((2 * n + 1) * (n * n - m * m) / (2 * n - 1.0)) * q_prev
    with np.errstate(divide="ignore", invalid="ignore"):
        d2p = -(x * dp - m * m * q) / s - nn * p
        dq = (dp - x * q) / s
    return {"P": p, "dP": dp, "d2P": d2p, "Q": q, "dQ": dq}


def _log_norm(n: int, m: int) -> float:
    return 0.5 * (
        math.log((2 * n + 1) / (4.0 * math.pi)) + math.lgamma(n - m + 1) - math.lgamma(n + m + 1)
    )


def assoc_legendre_pair(n: int, m: int, theta: float) -> tuple[float, float]:
    """``P_n^m(cos θ)`` and ``d/dθ P_n^m(cos θ)`` without the Condon–Shortley phase."""
    if isinstance(n, bool) or int(n) != n or int(n) < 0:
        raise DomainError(f"degree must be a non-negative integer, got {n!r}")
    if int(m) != m or m < 0 or m > n:
        raise DomainError(f"order m={m} must satisfy 0 <= m <= n={n}")
    n, m = int(n), int(m)
    data = normalized_legendre(n, m, float(theta))
    inv = math.exp(-_log_norm(n, m))
    p = float(data["P"]) * inv
    dp = float(data["dP"]) * inv
    if not (math.isfinite(p) and math.isfinite(dp)):
        raise DomainError(f"P_{n}^{m} is not representable in double precision")
    return p, dp
