"""Per-mode transmission problem for the T_n^m channel of a unit-ball inclusion.

For each degree ``n`` the interior and exterior single-layer densities
``(φ1, φ2)`` solve a 2×2 system whose entries come from the spectra of the
single-layer and Neumann–Poincaré operators on the sphere.  The entries are
of order one; only the right-hand side carries the tiny factor
``S = k_s**n/(2n+1)!!``, which is split off into ``scale_log = ln S``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

from .errors import DomainError, NearSingularError, NumericalError
from .harmonics import SphericalPoint, frame_vectors, vsh_angular_gradient, vsh_T
from .media import DerivedParams
from .specfun import log_double_factorial, radial_pair, radial_traction, scaled_radial_pair, scaled_traction

__all__ = [
    "FieldSample",
    "IncidentSpec",
    "ModeCoefficients",
    "ModeSystem",
    "RadialProfile",
    "assemble_mode_system",
    "det_leading",
    "eval_field",
    "eval_field_scaled",
    "radial_profile",
    "solve_mode_asymptotic",
    "solve_mode_exact",
    "transmission_residual",
]

Region = Literal["incident", "interior", "scattered", "total_interior"]

NEAR_SINGULAR = 1e-14
_RADIUS_SLACK = 1e-12


@dataclass(frozen=True)
class IncidentSpec:
    """Incident shear wave ``Σ_m f_{n,m} j_n(k_s r) T_n^m``."""

    n: int
    coefficients: tuple  # f_{n,m} for m = -n..n

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"incident degree must be >= 1, got {self.n!r}")
        coeffs = tuple(complex(c) for c in self.coefficients)
        if len(coeffs) != 2 * self.n + 1:
            raise DomainError(f"expected {2 * self.n + 1} coefficients, got {len(coeffs)}")
        if not any(coeffs):
            raise DomainError("at least one incident coefficient must be nonzero")
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def sectoral(cls, n: int, f: complex = 1.0) -> "IncidentSpec":
        """Only the ``m = n`` coefficient is nonzero."""
        c = [0j] * (2 * n + 1)
        c[-1] = complex(f)
        return cls(n, tuple(c))

    @classmethod
    def uniform(cls, n: int, f: complex = 1.0) -> "IncidentSpec":
        """Every ``m`` carries the same coefficient."""
        return cls(n, (complex(f),) * (2 * n + 1))

    def f(self, m: int) -> complex:
        return self.coefficients[m + self.n]

    @property
    def orders(self) -> tuple:
        return tuple(range(-self.n, self.n + 1))

    @property
    def active_orders(self) -> tuple:
        return tuple(m for m in self.orders if self.f(m) != 0)

    def scaled(self, c: complex) -> "IncidentSpec":
        return IncidentSpec(self.n, tuple(c * x for x in self.coefficients))


@dataclass(frozen=True)
class ModeSystem:
    n: int
    a11: complex
    a12: complex
    a21: complex
    a22: complex
    rhs: tuple  # (b1, b2) mantissas per m, in units of exp(scale_log)
    scale_log: float

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a21, self.a22]])

    @property
    def det(self) -> complex:
        return self.a11 * self.a22 - self.a12 * self.a21


@dataclass(frozen=True)
class ModeCoefficients:
    """Densities ``φ1, φ2`` per ``m``; true values are ``mantissa * exp(scale_log)``."""

    n: int
    phi1: tuple
    phi2: tuple
    scale_log: float
    method: Literal["exact", "asymptotic"]
    degenerate_leading_order: bool = False

    def values(self) -> tuple[np.ndarray, np.ndarray]:
        s = math.exp(self.scale_log)
        return np.array(self.phi1) * s, np.array(self.phi2) * s

    def rescaled(self, scale_log: float) -> "ModeCoefficients":
        """Same densities expressed with a different common factor."""
        c = math.exp(self.scale_log - scale_log)
        return replace(
            self,
            phi1=tuple(p * c for p in self.phi1),
            phi2=tuple(p * c for p in self.phi2),
            scale_log=scale_log,
        )


@dataclass(frozen=True)
class FieldSample:
    value: np.ndarray
    gradient: np.ndarray
    region: str


def _incident_scale_log(n: int, params: DerivedParams) -> float:
    return n * math.log(params.k_s) - log_double_factorial(2 * n + 1)


def det_leading(n: int, delta: float, mu: float) -> float:
    """Leading-order determinant ``(δ(n+2)+n-1)/(μ(2n+1)²)``."""
    return (delta * (n + 2) + n - 1) / (mu * (2 * n + 1) ** 2)


def assemble_mode_system(n: int, params: DerivedParams, spec: IncidentSpec | None = None) -> ModeSystem:
    """Entries of the 2×2 mode system and, if ``spec`` is given, its right-hand sides."""
    if int(n) != n or n < 1:
        raise DomainError("n must be >= 1")
    k, kt = params.k_s, params.kt_s
    mu, mu_t = params.mu, params.mu_t
    jt = scaled_radial_pair("bessel_j", n, kt)
    ht = scaled_radial_pair("hankel1", n, kt)
    jb = scaled_radial_pair("bessel_j", n, k)
    hb = scaled_radial_pair("hankel1", n, k)
    w = 2 * n + 1
    a11 = -jt.value * ht.value / (w * mu_t)
    a12 = jb.value * hb.value / (w * mu)
    a21 = -ht.value * scaled_traction("bessel_j", n, kt) / w
    a22 = jb.value * scaled_traction("hankel1", n, k) / w
    rhs = ()
    if spec is not None:
        if spec.n != n:
            raise DomainError("incident degree does not match the mode system")
        tj = scaled_traction("bessel_j", n, k)
        rhs = tuple((spec.f(m) * jb.value, spec.f(m) * mu * tj) for m in spec.orders)
    return ModeSystem(n, a11, a12, a21, a22, rhs, _incident_scale_log(n, params))


def solve_mode_exact(spec: IncidentSpec, params: DerivedParams) -> ModeCoefficients:
    """Direct solve of the mode system for every ``m``."""
    sysm = assemble_mode_system(spec.n, params, spec)
    det = sysm.det
    entry_scale = max(abs(sysm.a11), abs(sysm.a12), abs(sysm.a21), abs(sysm.a22)) ** 2
    if not abs(det) >= NEAR_SINGULAR * entry_scale:
        raise NearSingularError(
            f"mode n={spec.n} is resonant-degenerate: |det|/scale = {abs(det) / entry_scale:.3e}"
        )
    phi1, phi2 = [], []
    for b1, b2 in sysm.rhs:
        phi1.append((sysm.a22 * b1 - sysm.a12 * b2) / det)
        phi2.append((sysm.a11 * b2 - sysm.a21 * b1) / det)
    return ModeCoefficients(spec.n, tuple(phi1), tuple(phi2), sysm.scale_log, "exact")


def solve_mode_asymptotic(spec: IncidentSpec, params: DerivedParams) -> ModeCoefficients:
    """Leading-order densities as ω → 0.

    The common factor ``ω^n ρ^{n/2} μ^{-n/2} / (2n-1)!!`` is kept in ``scale_log``.
    """
    n = spec.n
    delta, mu, rho = params.delta, params.mu, params.rho
    d = delta * (n + 2) + n - 1
    scale_log = (
        n * math.log(params.omega) + 0.5 * n * (math.log(rho) - math.log(mu)) - log_double_factorial(2 * n - 1)
    )
    phi1 = tuple(-f * (2 * n + 1) * mu / d for f in spec.coefficients)
    phi2 = tuple(f * (n - 1) * (1 - delta) * mu / d for f in spec.coefficients)
    return ModeCoefficients(n, phi1, phi2, scale_log, "asymptotic", degenerate_leading_order=(n == 1))


# ------------------------------------------------------------------ fields


@dataclass(frozen=True)
class RadialProfile:
    """Amplitude ``a_m(r) = weights[m] * g(r) * exp(scale_log)`` of each ``T_n^m``.

    ``g`` and ``dg`` return the profile and its r-derivative, and ``g_over_r``
    returns ``g(r)/r`` (finite at the origin for the regular profiles).
    """

    n: int
    kind: str
    k: float
    coef: complex
    weights: tuple
    scale_log: float
    region: str = field(default="")

    def _pairs(self, r):
        z = self.k * np.asarray(r, dtype=float)
        pairs = [scaled_radial_pair(self.kind, self.n, complex(zi)) for zi in np.ravel(z)]
        v = np.array([p.value for p in pairs]).reshape(np.shape(z))
        d = np.array([p.z_derivative for p in pairs]).reshape(np.shape(z))
        return v, d

    def evaluate(self, r):
        """``(g(r), g'(r), g(r)/r)`` as complex arrays."""
        r = np.asarray(r, dtype=float)
        v, d = self._pairs(r)
        n = self.n
        if self.kind == "bessel_j":
            rn1 = r ** (n - 1)
            return self.coef * r * rn1 * v, self.coef * rn1 * d, self.coef * rn1 * v
        rn2 = r ** (-(n + 2))
        return self.coef * r * rn2 * v, self.coef * rn2 * d, self.coef * rn2 * v


def radial_profile(
    region: Region, spec: IncidentSpec, params: DerivedParams, coeffs: ModeCoefficients | None = None
) -> RadialProfile:
    """Radial profile of one field region, with ``exp(scale_log)`` split off."""
    n = spec.n
    scale_log = _incident_scale_log(n, params)
    w = 2 * n + 1
    if region == "incident":
        return RadialProfile(n, "bessel_j", params.k_s, 1.0, spec.coefficients, scale_log, region)
    if coeffs is None:
        raise DomainError(f"region {region!r} needs mode coefficients")
    if coeffs.n != n:
        raise DomainError("coefficients and incident spec have different degrees")
    c = coeffs.rescaled(scale_log)
    if region in ("interior", "total_interior"):
        ht = scaled_radial_pair("hankel1", n, params.kt_s).value
        return RadialProfile(n, "bessel_j", params.kt_s, -ht / (w * params.mu_t), c.phi1, scale_log, region)
    if region == "scattered":
        jb = scaled_radial_pair("bessel_j", n, params.k_s).value
        return RadialProfile(n, "hankel1", params.k_s, -jb / (w * params.mu), c.phi2, scale_log, region)
    raise DomainError(f"unknown region {region!r}")


def _check_radius(region: str, r: float) -> None:
    if region in ("interior", "total_interior") and r > 1 + _RADIUS_SLACK:
        raise DomainError(f"{region} field is defined for r <= 1, got r={r}")
    if region == "scattered" and r < 1 - _RADIUS_SLACK:
        raise DomainError(f"scattered field is defined for r >= 1, got r={r}")


def eval_field_scaled(region, spec, params, coeffs, point: SphericalPoint):
    """Field sample in units of ``exp(scale_log)``; returns ``(FieldSample, scale_log)``."""
    _check_radius(region, point.r)
    prof = radial_profile(region, spec, params, coeffs)
    g, dg, g_r = prof.evaluate(np.array([point.r]))
    g, dg, g_r = complex(g[0]), complex(dg[0]), complex(g_r[0])
    value = np.zeros(3, dtype=complex)
    grad = np.zeros((3, 3), dtype=complex)
    on_axis = math.sin(point.theta) == 0.0
    rhat, _, _ = frame_vectors(point.theta, point.phi)
    for m, wgt in zip(spec.orders, prof.weights):
        if wgt == 0:
            continue
        t = vsh_T(spec.n, m, point.theta, point.phi)
        value += wgt * g * t
        if on_axis:
            continue
        grad += wgt * (dg * np.outer(t, rhat) + g_r * vsh_angular_gradient(spec.n, m, point.theta, point.phi))
    if on_axis:
        grad[:] = np.nan
    label = {"scattered": "exterior", "total_interior": "interior"}.get(region, region)
    return FieldSample(value, grad, label), prof.scale_log


def eval_field(region, spec, params, coeffs, point: SphericalPoint) -> FieldSample:
    """Field value and gradient at a point (gradient is NaN exactly on the polar axis)."""
    sample, scale_log = eval_field_scaled(region, spec, params, coeffs, point)
    s = math.exp(scale_log)
    return FieldSample(sample.value * s, sample.gradient * s, sample.region)


# ------------------------------------------------------------------ residuals


def transmission_residual(spec: IncidentSpec, params: DerivedParams, coeffs: ModeCoefficients):
    """Relative residuals of trace and traction continuity at r = 1.

    Uses the unscaled special functions and the shear traction
    ``μ (∂_r - 1/r)`` of each field, independently of the assembled matrix.
    """
    n = spec.n
    k, kt = params.k_s, params.kt_s
    mu, mu_t = params.mu, params.mu_t
    jk = radial_pair("bessel_j", n, k)
    hk = radial_pair("hankel1", n, k)
    jt = radial_pair("bessel_j", n, kt)
    ht = radial_pair("hankel1", n, kt)
    phi1, phi2 = coeffs.values()
    f = np.array(spec.coefficients)
    c_int = -1j * kt * ht.value / mu_t * phi1
    c_sc = -1j * k * jk.value / mu * phi2
    u_int = c_int * jt.value
    u_sc = c_sc * hk.value
    u_inc = f * jk.value
    t_int = mu_t * c_int * radial_traction("bessel_j", n, kt)
    t_sc = mu * c_sc * radial_traction("hankel1", n, k)
    t_inc = mu * f * radial_traction("bessel_j", n, k)
    arrays = (u_int, u_sc, u_inc, t_int, t_sc, t_inc)
    if not all(np.all(np.isfinite(a)) for a in arrays):
        raise NumericalError("transmission residual is not representable at this (n, ω)")
    # normalise by the largest contribution: for n = 1 the incident traction
    # alone cancels to higher order in k
    den_u = max(np.linalg.norm(a) for a in arrays[:3])
    den_t = max(np.linalg.norm(a) for a in arrays[3:])
    if den_u == 0 or den_t == 0:
        raise NumericalError("incident trace underflows; residual undefined")
    trace = float(np.linalg.norm(u_int - u_sc - u_inc) / den_u)
    traction = float(np.linalg.norm(t_int - t_sc - t_inc) / den_t)
    return trace, traction
