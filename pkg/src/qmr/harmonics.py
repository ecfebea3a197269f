"""Spherical harmonics, the tangential harmonics T_n^m and sphere quadrature.

Conventions
-----------
* ``Y_n^m = C_n^m P_n^{|m|}(cos θ) e^{imφ}`` with a positive normalisation
  ``C_n^m`` and no Condon–Shortley phase.
* ``T_n^m = ∇_S Y_n^m × r̂ = A_θ θ̂ + A_φ φ̂`` with
  ``A_θ = i m Y_n^m / sin θ`` and ``A_φ = -C_n^m e^{imφ} ∂_θ P_n^{|m|}``.
* Gradients are stored as ``G[i, j] = ∂_j u_i`` in Cartesian components.

Vectors come back with a trailing axis of length 3 and matrices with two
trailing axes of length 3, so every routine broadcasts over angle arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

import numpy as np

from .errors import DomainError, ResolutionError, SingularityError
from .specfun import normalized_legendre, radial_pair

__all__ = [
    "AngularConstants",
    "FrameCoeffs",
    "SphereQuadrature",
    "SphericalPoint",
    "angular_constants",
    "frame_vectors",
    "grad_radial_vsh",
    "sph_harmonic",
    "sphere_quadrature",
    "vsh_angular_gradient",
    "vsh_frame",
    "vsh_T",
]

RADIAL_NODES = 32


@dataclass(frozen=True)
class SphericalPoint:
    r: float
    theta: float
    phi: float

    def __post_init__(self):
        if not math.isfinite(self.r) or self.r < 0:
            raise DomainError(f"radius must be finite and non-negative, got {self.r}")
        if not 0.0 <= self.theta <= math.pi:
            raise DomainError(f"theta must be in [0, pi], got {self.theta}")
        if not math.isfinite(self.phi):
            raise DomainError("phi must be finite")

    @classmethod
    def from_cartesian(cls, x) -> "SphericalPoint":
        x = np.asarray(x, dtype=float)
        r = float(np.linalg.norm(x))
        if r == 0.0:
            return cls(0.0, 0.0, 0.0)
        theta = math.acos(max(-1.0, min(1.0, x[2] / r)))
        phi = math.atan2(x[1], x[0]) % (2 * math.pi)
        return cls(r, theta, phi)

    def cartesian(self) -> np.ndarray:
        st = math.sin(self.theta)
        return self.r * np.array(
            [st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)]
        )


@dataclass(frozen=True)
class FrameCoeffs:
    a_theta: complex
    a_phi: complex


def frame_vectors(theta, phi):
    """Unit vectors ``(r̂, θ̂, φ̂)``, each with a trailing Cartesian axis."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    rhat = np.stack(np.broadcast_arrays(st * cp, st * sp, ct), axis=-1)
    that = np.stack(np.broadcast_arrays(ct * cp, ct * sp, -st), axis=-1)
    phat = np.stack(np.broadcast_arrays(-sp, cp, np.zeros_like(st * cp)), axis=-1)
    return rhat, that, phat


def _check_mode(n: int, m: int, *, vector: bool = False) -> None:
    if int(n) != n or n < 0:
        raise DomainError(f"degree must be a non-negative integer, got {n!r}")
    if vector and n < 1:
        raise DomainError("vector harmonics need n >= 1")
    if int(m) != m or abs(m) > n:
        raise DomainError(f"order m={m} must satisfy |m| <= n={n}")


def sph_harmonic(n: int, m: int, theta, phi):
    """``Y_n^m(θ, φ)``; scalar inputs give a Python complex."""
    _check_mode(n, m)
    leg = normalized_legendre(n, abs(m), theta)
    out = leg["P"] * np.exp(1j * m * np.asarray(phi, dtype=float))
    return complex(out) if np.ndim(out) == 0 else out


# ------------------------------------------------------------------ T_n^m


def _frame_parts(n: int, m: int, theta, phi):
    """A_θ, A_φ and the tangential block of r∇T in the (θ̂, φ̂) frame."""
    am = abs(m)
    leg = normalized_legendre(n, am, theta)
    e = np.exp(1j * m * np.asarray(phi, dtype=float))
    x = np.cos(np.asarray(theta, dtype=float))
    a_phi = -e * leg["dP"]
    b_pt = -e * leg["d2P"]
    if am == 0:
        zero = np.zeros_like(a_phi)
        a_theta = zero
        b_tt = zero
        b_pp = zero
        # cot θ · A_φ with A_φ ∝ sin θ, written without the division
        q1 = normalized_legendre(n, 1, theta)["Q"]
        b_tp = -math.sqrt(n * (n + 1)) * x * q1 * e
    else:
        a_theta = 1j * m * e * leg["Q"]
        b_tt = 1j * m * e * leg["dQ"]
        b_pp = -b_tt
        with np.errstate(divide="ignore", invalid="ignore"):
            b_tp = e * (x * leg["dP"] - m * m * leg["Q"]) / np.sin(theta)
    return a_theta, a_phi, b_tt, b_tp, b_pt, b_pp


def vsh_frame(n: int, m: int, theta: float, phi: float) -> FrameCoeffs:
    """``(A_θ, A_φ)`` of ``T_n^m`` at one direction (pole values are the analytic limits)."""
    _check_mode(n, m, vector=True)
    leg = normalized_legendre(n, abs(m), float(theta))
    e = complex(np.exp(1j * m * float(phi)))
    a_theta = 1j * m * e * float(leg["Q"]) if m else 0j
    return FrameCoeffs(a_theta, -e * float(leg["dP"]))


def vsh_T(n: int, m: int, theta, phi) -> np.ndarray:
    """Cartesian components of ``T_n^m``; broadcasts over angle arrays."""
    _check_mode(n, m, vector=True)
    leg = normalized_legendre(n, abs(m), theta)
    e = np.exp(1j * m * np.asarray(phi, dtype=float))
    a_theta = 1j * m * e * leg["Q"] if m else np.zeros_like(e)
    a_phi = -e * leg["dP"]
    _, that, phat = frame_vectors(theta, phi)
    return a_theta[..., None] * that + a_phi[..., None] * phat


def _outer(u, v):
    return u[..., :, None] * v[..., None, :]


def vsh_angular_gradient(n: int, m: int, theta, phi) -> np.ndarray:
    """``r ∇T_n^m`` in Cartesian components (independent of r).

    Entries follow ``G[i, j] = ∂_j T_i``.  Poles are excluded because the
    spherical frame degenerates there.
    """
    _check_mode(n, m, vector=True)
    theta = np.asarray(theta, dtype=float)
    if np.any(np.sin(theta) == 0.0):
        raise DomainError("vsh_angular_gradient is evaluated away from the poles")
    a_t, a_p, b_tt, b_tp, b_pt, b_pp = _frame_parts(n, m, theta, phi)
    rhat, that, phat = frame_vectors(theta, phi)
    g = -a_t[..., None, None] * _outer(rhat, that)
    g = g - a_p[..., None, None] * _outer(rhat, phat)
    g = g + b_tt[..., None, None] * _outer(that, that)
    g = g + b_tp[..., None, None] * _outer(that, phat)
    g = g + b_pt[..., None, None] * _outer(phat, that)
    g = g + b_pp[..., None, None] * _outer(phat, phat)
    return g


def grad_radial_vsh(
    kind: Literal["bessel_j", "hankel1"], k: complex, n: int, m: int, point: SphericalPoint
) -> np.ndarray:
    """``∇(f_n(k r) T_n^m)`` at ``point`` as a complex 3×3 Cartesian matrix.

    ``∇(f T) = k f_n'(kr) T ⊗ r̂ + (f_n(kr)/r) · r∇T``.
    """
    _check_mode(n, m, vector=True)
    k = complex(k)
    if k == 0:
        raise DomainError("wavenumber must be nonzero")
    r = point.r
    if r == 0.0:
        if kind == "hankel1":
            raise SingularityError("h_n(kr) T_n^m is singular at the origin")
        # linear in x for n = 1, vanishing gradient otherwise
        f_over_r = k / 3.0 if n == 1 else 0.0
        df = f_over_r
    else:
        pair = radial_pair(kind, n, k * r)
        f_over_r = pair.value / r
        df = k * pair.derivative
    theta = point.theta
    if math.sin(theta) == 0.0:
        raise DomainError("grad_radial_vsh is evaluated away from the poles")
    rhat, _, _ = frame_vectors(theta, point.phi)
    t = vsh_T(n, m, theta, point.phi)
    return df * _outer(t, rhat) + f_over_r * vsh_angular_gradient(n, m, theta, point.phi)


# ------------------------------------------------------------------ quadrature


@dataclass(frozen=True)
class SphereQuadrature:
    """Tensor rules: Gauss–Legendre in cos θ, uniform in φ, Gauss–Legendre in r."""

    n_max: int
    theta: np.ndarray
    theta_weights: np.ndarray
    phi: np.ndarray
    phi_weights: np.ndarray
    radial_reference: tuple = field(repr=False, default=())

    @property
    def angles(self):
        """Flattened ``(theta, phi, weight)`` arrays for the surface rule."""
        th, ph = np.meshgrid(self.theta, self.phi, indexing="ij")
        w = np.outer(self.theta_weights, self.phi_weights)
        return th.ravel(), ph.ravel(), w.ravel()

    def radial(self, r_lo: float, r_hi: float):
        """Nodes and weights of the radial rule mapped to ``[r_lo, r_hi]``."""
        x, w = self.radial_reference
        half = 0.5 * (r_hi - r_lo)
        return r_lo + half * (x + 1.0), half * w

    def require(self, n: int) -> None:
        if n > self.n_max:
            raise ResolutionError(
                f"mode n={n} exceeds the design order n_max={self.n_max} of this rule"
            )


@lru_cache(maxsize=64)
def sphere_quadrature(n_max: int) -> SphereQuadrature:
    """Quadrature exact for products of two modes of degree ≤ ``n_max``."""
    if int(n_max) != n_max or n_max < 1:
        raise DomainError("n_max must be a positive integer")
    n_theta = 2 * n_max + 16
    n_phi = 4 * n_max + 16
    x, w = np.polynomial.legendre.leggauss(n_theta)
    order = np.argsort(-x)  # increasing theta
    theta = np.arccos(x[order])
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    arrays = (theta, w[order], phi, np.full(n_phi, 2 * np.pi / n_phi))
    for a in arrays:
        a.setflags(write=False)
    xr, wr = np.polynomial.legendre.leggauss(RADIAL_NODES)
    xr.setflags(write=False)
    wr.setflags(write=False)
    return SphereQuadrature(n_max, *arrays, radial_reference=(xr, wr))


# ------------------------------------------------------------------ constants


@dataclass(frozen=True)
class AngularConstants:
    """Angular integrals for the sectoral mode ``m = n`` scaled by ``|f|²``.

    ``c1``, ``c2``, ``c3`` integrate the P, Q and M densities of the stress
    analysis literally, against ``dθ dφ``.  ``surface`` holds the four
    sub-integrals ∫|A_θ|², ∫|A_φ|², ∫|∂_θA_θ|², ∫|∂_θA_φ|² against the
    surface measure ``sin θ dθ dφ``.
    """

    n: int
    c1: float
    c2: float
    c3: float
    surface: dict


def _theta_rule(n: int):
    x, w = np.polynomial.legendre.leggauss(4 * n + 40)
    return 0.5 * np.pi * (x + 1.0), 0.5 * np.pi * w


def angular_constants(n: int, f_amplitude: complex = 1.0, quad: SphereQuadrature | None = None):
    """Quadrature of the angular densities for ``T_n^n`` (see :class:`AngularConstants`)."""
    if int(n) != n or n < 1:
        raise DomainError("angular_constants needs n >= 1")
    n = int(n)
    if quad is None:
        quad = sphere_quadrature(max(n, 1))
    quad.require(n)
    f2 = abs(complex(f_amplitude)) ** 2

    # the m = n integrands depend on φ only through |e^{inφ}| = 1
    theta, w = _theta_rule(n)
    s, c = np.sin(theta), np.cos(theta)
    a_t, a_p, b_tt, b_tp, b_pt, b_pp = _frame_parts(n, n, theta, 0.0)
    leg = normalized_legendre(n, n, theta)
    d_phi_at = 1j * n * a_t
    d_phi_ap = 1j * n * a_p
    p_density = np.abs(a_t) ** 2 + np.abs(a_p) ** 2 * s
    q_density = (
        np.abs(b_tt) ** 2
        + np.abs(b_pt) ** 2 * s
        + (np.abs(d_phi_at - c * a_p) ** 2 + np.abs(d_phi_ap + c * a_t) ** 2) / s
    )
    extra = (
        2.0
        * np.abs(leg["d2P"])
        * np.abs((-n * n * leg["Q"] + c * leg["dP"]) / s)
        + np.abs(a_p * (1j * n + c) / s) ** 2
    ) * s
    m_density = q_density + extra
    two_pi = 2.0 * np.pi
    c1 = two_pi * float(np.sum(w * p_density))
    c2 = two_pi * float(np.sum(w * q_density))
    c3 = two_pi * float(np.sum(w * m_density))

    th, ph, ws = quad.angles
    at, ap, btt, _, bpt, _ = _frame_parts(n, n, th, ph)
    surface = {
        "A_theta": float(np.sum(ws * np.abs(at) ** 2)) * f2,
        "A_phi": float(np.sum(ws * np.abs(ap) ** 2)) * f2,
        "dA_theta": float(np.sum(ws * np.abs(btt) ** 2)) * f2,
        "dA_phi": float(np.sum(ws * np.abs(bpt) ** 2)) * f2,
    }
    return AngularConstants(n, c1 * f2, c2 * f2, c3 * f2, surface)
