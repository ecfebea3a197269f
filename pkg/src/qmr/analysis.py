"""Shell norms, localization and surface-resonance ratios, stress energies.

Every field produced by the solver carries a common factor ``exp(scale_log)``
that underflows double precision for large ``n``.  Norms are therefore
returned as :class:`ScaledValue` pairs and all ratios are formed on mantissas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import integrate

from .errors import DomainError, UnsupportedModeError
from .harmonics import SphereQuadrature, frame_vectors, sphere_quadrature, vsh_angular_gradient, vsh_T
from .media import DerivedParams
from .solver import IncidentSpec, ModeCoefficients, RadialProfile, radial_profile
from .specfun import log_double_factorial

__all__ = [
    "LocalizationReport",
    "NormOracles",
    "ResonanceReport",
    "ScaledValue",
    "ShellSpec",
    "StressReport",
    "closed_form_norm_oracles",
    "localization_ratios",
    "resonance_ratios",
    "shell_norm_sq",
    "shell_trace_integral",
    "stress_energies",
]

Quantity = Literal["value", "gradient"]

LOCALIZATION_SLACK = 10.0
_EDGE = 1e-12


@dataclass(frozen=True)
class ScaledValue:
    """Nonnegative real ``mantissa * exp(log_scale)``."""

    mantissa: float
    log_scale: float

    @property
    def value(self) -> float:
        if self.mantissa == 0:
            return 0.0
        return self.mantissa * math.exp(self.log_scale)

    @property
    def log10_scale(self) -> float:
        return self.log_scale / math.log(10.0)

    def normalized(self) -> "ScaledValue":
        """Equivalent pair with the mantissa in [1, 10) (zero stays zero)."""
        if self.mantissa == 0:
            return ScaledValue(0.0, 0.0)
        e = math.floor(math.log10(abs(self.mantissa)))
        return ScaledValue(self.mantissa / 10.0**e, self.log_scale + e * math.log(10.0))

    def __truediv__(self, other: "ScaledValue") -> float:
        if other.mantissa == 0:
            raise ZeroDivisionError("ratio with a zero norm")
        return self.mantissa / other.mantissa * math.exp(self.log_scale - other.log_scale)


@dataclass(frozen=True)
class ShellSpec:
    gamma1: float
    gamma2: float
    R: float = 2.0

    def __post_init__(self):
        if not (0 < self.gamma1 < 1 < self.gamma2 < self.R):
            raise DomainError(
                f"shells need 0 < gamma1 < 1 < gamma2 < R, got ({self.gamma1}, {self.gamma2}, {self.R})"
            )


# ------------------------------------------------------------------ shell integrals


def _check_shell(region: str, r_lo: float, r_hi: float) -> None:
    if not (0 <= r_lo <= r_hi):
        raise DomainError(f"need 0 <= r_lo <= r_hi, got ({r_lo}, {r_hi})")
    if region in ("interior", "total_interior", "incident") and r_hi > 1 + _EDGE:
        raise DomainError(f"{region} shells must lie in r <= 1")
    if region == "scattered" and r_lo < 1 - _EDGE:
        raise DomainError("scattered shells must lie in r >= 1")


def _angular_fields(spec: IncidentSpec, weights, quad: SphereQuadrature):
    """``Σ w_m T_n^m`` and ``Σ w_m r∇T_n^m`` on the surface nodes."""
    th, ph, w = quad.angles
    t = np.zeros(th.shape + (3,), dtype=complex)
    g = np.zeros(th.shape + (3, 3), dtype=complex)
    for m, c in zip(spec.orders, weights):
        if c == 0:
            continue
        t += c * vsh_T(spec.n, m, th, ph)
        g += c * vsh_angular_gradient(spec.n, m, th, ph)
    rhat = frame_vectors(th, ph)[0]
    return t, g, rhat, w


def _tensor_gradient(prof: RadialProfile, spec, quad, r_lo, r_hi):
    """Gradient mantissas on the full (r, θ, φ) tensor grid, with volume weights."""
    r, wr = quad.radial(r_lo, r_hi)
    gv, dg, g_r = prof.evaluate(r)
    t, ag, rhat, wa = _angular_fields(spec, prof.weights, quad)
    outer = t[:, :, None] * rhat[:, None, :]
    grad = dg[:, None, None, None] * outer[None] + g_r[:, None, None, None] * ag[None]
    vol = (wr * r**2)[:, None] * wa[None, :]
    return grad, vol


def _quadrature_norm(prof, spec, quad, r_lo, r_hi, quantity) -> float:
    if quantity == "value":
        r, wr = quad.radial(r_lo, r_hi)
        gv, _, _ = prof.evaluate(r)
        t, _, _, wa = _angular_fields(spec, prof.weights, quad)
        field = gv[:, None, None] * t[None]
        vol = (wr * r**2)[:, None] * wa[None, :]
        return float(np.sum(vol * np.sum(np.abs(field) ** 2, axis=-1)))
    grad, vol = _tensor_gradient(prof, spec, quad, r_lo, r_hi)
    return float(np.sum(vol * np.sum(np.abs(grad) ** 2, axis=(-2, -1))))


def _radial_integral(fn, r_lo, r_hi) -> float:
    val, _ = integrate.quad(fn, r_lo, r_hi, epsabs=0.0, epsrel=1e-13, limit=200)
    return float(val)


def _fast_norm(prof, spec, r_lo, r_hi, quantity) -> float:
    """Separable route: angular constants times one-dimensional radial integrals."""
    n = spec.n
    nn = n * (n + 1)
    wsum = sum(abs(w) ** 2 for w in prof.weights)

    def parts(r):
        g, dg, g_r = prof.evaluate(np.array([r]))
        return complex(g[0]), complex(dg[0]), complex(g_r[0])

    if quantity == "value":
        radial = _radial_integral(lambda r: abs(parts(r)[0]) ** 2 * r * r, r_lo, r_hi)
        return nn * wsum * radial
    # ∫|T|² dΩ = n(n+1) and ∫|r∇T|² dΩ = n²(n+1)²; the cross term vanishes
    radial_d = _radial_integral(lambda r: abs(parts(r)[1]) ** 2 * r * r, r_lo, r_hi)
    radial_0 = _radial_integral(lambda r: abs(parts(r)[2]) ** 2 * r * r, r_lo, r_hi)
    return wsum * (nn * radial_d + nn * nn * radial_0)


def shell_norm_sq(
    region: str,
    spec: IncidentSpec,
    params: DerivedParams,
    coeffs: ModeCoefficients | None,
    r_lo: float,
    r_hi: float,
    quad: SphereQuadrature | None = None,
    *,
    quantity: Quantity = "value",
    method: Literal["quadrature", "fast"] = "quadrature",
) -> ScaledValue:
    """``∫_{r_lo<|x|<r_hi} |field|²`` (or ``|∇field|²``) as a scaled value."""
    _check_shell(region, r_lo, r_hi)
    if quantity not in ("value", "gradient"):
        raise DomainError(f"unknown quantity {quantity!r}")
    prof = radial_profile(region, spec, params, coeffs)
    log_scale = 2 * prof.scale_log
    if r_lo == r_hi:
        return ScaledValue(0.0, log_scale)
    if method == "fast":
        return ScaledValue(_fast_norm(prof, spec, r_lo, r_hi, quantity), log_scale)
    if method != "quadrature":
        raise DomainError(f"unknown method {method!r}")
    quad = quad or sphere_quadrature(spec.n)
    quad.require(spec.n)
    return ScaledValue(_quadrature_norm(prof, spec, quad, r_lo, r_hi, quantity), log_scale)


def shell_trace_integral(region, spec, params, coeffs, r_lo, r_hi, quad=None, *, method="quadrature") -> ScaledValue:
    """``∫ tr(∇u ∇ū)`` over a shell, signed (returned mantissa may be negative).

    ``"quadrature"`` integrates the tensor product directly.  ``"boundary"``
    uses that, for divergence-free tangential fields ``u = g(r) Σ w_m T_n^m``,
    the integral reduces to ``-n(n+1) Σ|w_m|² [r |g(r)|²]`` between the radii.
    """
    _check_shell(region, r_lo, r_hi)
    prof = radial_profile(region, spec, params, coeffs)
    log_scale = 2 * prof.scale_log
    if method == "boundary":
        g, _, _ = prof.evaluate(np.array([r_lo, r_hi]))
        wsum = sum(abs(w) ** 2 for w in prof.weights)
        nn = spec.n * (spec.n + 1)
        val = -nn * wsum * (r_hi * abs(g[1]) ** 2 - r_lo * abs(g[0]) ** 2)
        return ScaledValue(float(val), log_scale)
    quad = quad or sphere_quadrature(spec.n)
    quad.require(spec.n)
    grad, vol = _tensor_gradient(prof, spec, quad, r_lo, r_hi)
    tr = np.einsum("...ij,...ji->...", grad, np.conj(grad))
    return ScaledValue(float(np.real(np.sum(vol * tr))), log_scale)


# ------------------------------------------------------------------ localization


@dataclass(frozen=True)
class LocalizationReport:
    interior_ratio: float
    exterior_ratio: float
    eps_loc_target: float
    tolerance: float
    pass_interior: bool
    pass_exterior: bool

    @property
    def passed(self) -> bool:
        return self.pass_interior and self.pass_exterior


def localization_ratios(
    spec, params, coeffs, shells: ShellSpec, eps_loc: float, quad=None, *, method="quadrature"
) -> LocalizationReport:
    """Fraction of the field energy left away from the inclusion boundary."""
    if not (0 < eps_loc < 1):
        raise DomainError("eps_loc must lie in (0, 1)")
    kw = dict(quad=quad, method=method)
    inner = shell_norm_sq("total_interior", spec, params, coeffs, 0.0, shells.gamma1, **kw)
    ball = shell_norm_sq("total_interior", spec, params, coeffs, 0.0, 1.0, **kw)
    outer = shell_norm_sq("scattered", spec, params, coeffs, shells.gamma2, shells.R, **kw)
    annulus = shell_norm_sq("scattered", spec, params, coeffs, 1.0, shells.R, **kw)
    r_in = inner / ball
    r_ex = outer / annulus
    tol = eps_loc * (1 + LOCALIZATION_SLACK * params.omega**2)
    return LocalizationReport(r_in, r_ex, eps_loc, tol, r_in <= tol, r_ex <= tol)


# ------------------------------------------------------------------ closed-form oracles


@dataclass(frozen=True)
class NormOracles:
    """Leading-order shell norms.

    ``K``, ``K_prime``, ``G``, ``G_prime`` are the constants exactly as
    printed; each already contains a factor ``4π`` that double-counts the
    solid angle.  The ``*_norm`` fields are the leading norms themselves and
    use the constants divided by that factor.
    """

    n: int
    K: ScaledValue
    K_prime: ScaledValue
    G: ScaledValue
    G_prime: ScaledValue
    incident_norm: ScaledValue
    interior_inner_norm: ScaledValue
    interior_norm: ScaledValue
    exterior_outer_norm: ScaledValue
    exterior_norm: ScaledValue
    correction_ratio: float
    degenerate_leading_order: bool
    solid_angle_factor: float = 4 * math.pi


def closed_form_norm_oracles(n: int, params: DerivedParams, shells: ShellSpec, f_norm_sq: float = 1.0) -> NormOracles:
    """Leading-order norms of ``u`` and ``u^s`` for ``Σ_m |f_{n,m}|² = f_norm_sq``."""
    if int(n) != n or n < 1:
        raise DomainError("n must be >= 1")
    if f_norm_sq <= 0:
        raise DomainError("f_norm_sq must be positive")
    d, mu, rho, om = params.delta, params.mu, params.rho, params.omega
    dd = d * (n + 2) + n - 1
    L = math.log
    lf = log_double_factorial
    lpow = n * (L(rho) - L(mu))  # ρ^n μ^{-n}
    four_pi = 4 * math.pi
    K = ScaledValue(four_pi * n * (n + 1) * d**2 * f_norm_sq / ((2 * n + 3) * dd**2), lpow - 2 * lf(2 * n - 1))
    K_prime = ScaledValue(
        four_pi * n * (n + 1) * d**2 * f_norm_sq / dd**2,
        lpow + L(rho) - L(mu) - lf(2 * n + 3) - lf(2 * n - 1),
    )
    G = ScaledValue(
        four_pi * n * (n + 1) * (n - 1) ** 2 * (1 - d) ** 2 * f_norm_sq / (dd**2 * (2 * n - 1)),
        lpow - 2 * lf(2 * n + 1),
    )
    G_prime = ScaledValue(
        four_pi * n * (n + 1) * ((1 - n) + d * (n + 1)) ** 2 * f_norm_sq / (dd**2 * (2 * n - 1)),
        0.5 * (n + 2) * (L(rho) - L(mu)) - lf(2 * n + 3) - lf(2 * n + 1),
    )
    w2n = 2 * n * L(om)
    g1, g2, R = shells.gamma1, shells.gamma2, shells.R

    def leading(const: ScaledValue, factor: float) -> ScaledValue:
        return ScaledValue(const.mantissa / four_pi * factor, const.log_scale + w2n)

    p = 2 * n - 1
    incident = ScaledValue(
        n * (n + 1) * f_norm_sq / (2 * n + 3), w2n + lpow - 2 * lf(2 * n + 1)
    )
    return NormOracles(
        n=n,
        K=K,
        K_prime=K_prime,
        G=G,
        G_prime=G_prime,
        incident_norm=incident,
        interior_inner_norm=leading(K, g1 ** (2 * n + 3)),
        interior_norm=leading(K, 1.0),
        exterior_outer_norm=leading(G, g2**-p - R**-p),
        exterior_norm=leading(G, 1.0 - R**-p),
        correction_ratio=(K_prime / K) * om**2,
        degenerate_leading_order=(n == 1),
    )


# ------------------------------------------------------------------ resonance and stress


def _require_sectoral(spec: IncidentSpec) -> None:
    if spec.active_orders != (spec.n,):
        raise UnsupportedModeError("surface-resonance analysis is defined for the m = n mode only")


@dataclass(frozen=True)
class ResonanceReport:
    interior_sq_ratio: float
    exterior_sq_ratio: float
    bound_interior: float
    bound_exterior: float
    pass_interior: bool
    pass_exterior: bool
    leading_interior_printed: float

    @property
    def passed(self) -> bool:
        return self.pass_interior and self.pass_exterior


def resonance_bounds(n: int, delta: float) -> tuple[float, float]:
    return n * n * delta * delta / (16 * math.pi), n * n / (81 * math.pi)


def resonance_ratios(spec, params, coeffs, shells: ShellSpec, quad=None) -> ResonanceReport:
    """Squared gradient norms near the boundary relative to ``‖u^i‖²`` on the ball."""
    _require_sectoral(spec)
    n, d = spec.n, params.delta
    ui = shell_norm_sq("incident", spec, params, None, 0.0, 1.0, quad)
    gi = shell_norm_sq("total_interior", spec, params, coeffs, shells.gamma1, 1.0, quad, quantity="gradient")
    ge = shell_norm_sq("scattered", spec, params, coeffs, 1.0, shells.gamma2, quad, quantity="gradient")
    ri, re = gi / ui, ge / ui
    bi, be = resonance_bounds(n, d)
    dd = d * (n + 2) + n - 1
    printed = (
        n * (2 * n + 1) * (2 * n + 3) * (2 * n * n - 2 * n + 1) * d * d
        * (1 - shells.gamma1 ** (2 * n + 1)) / (4 * math.pi * (n + 1) * dd * dd)
    )
    return ResonanceReport(ri, re, bi, be, ri >= bi, re >= be, printed)


@dataclass(frozen=True)
class StressReport:
    e_interior: float
    e_exterior: float
    bound_interior: float
    bound_exterior: float
    pass_interior: bool
    pass_exterior: bool
    consistency_gap: float

    @property
    def passed(self) -> bool:
        return self.pass_interior and self.pass_exterior


def stress_bounds(n: int, delta: float) -> tuple[float, float]:
    return 4 * n * n * delta / (27 * math.pi), n * n / (81 * math.pi)


def _direct_energy(prof, spec, quad, r_lo, r_hi, lam, mu) -> float:
    grad, vol = _tensor_gradient(prof, spec, quad, r_lo, r_hi)
    div = np.einsum("...ii->...", grad)
    eye = np.eye(3)
    sigma = lam * div[..., None, None] * eye + mu * (grad + np.swapaxes(grad, -1, -2))
    dens = np.sum(sigma * np.conj(grad), axis=(-2, -1))
    return float(np.real(np.sum(vol * dens)))


def _simplified_energy(region, spec, params, coeffs, r_lo, r_hi, mu) -> float:
    """``μ(‖∇u‖² + ∫tr(∇u∇ū))`` via the separable norm and the boundary identity."""
    g2 = shell_norm_sq(region, spec, params, coeffs, r_lo, r_hi, quantity="gradient", method="fast")
    tr = shell_trace_integral(region, spec, params, coeffs, r_lo, r_hi, method="boundary")
    return mu * (g2.mantissa + tr.mantissa)


def stress_energies(spec, params, coeffs, shells: ShellSpec, quad=None) -> StressReport:
    """``∫ σ(u):∇ū`` on the two boundary shells, relative to ``‖u^i‖²`` on the ball.

    The interior uses the inclusion's Lamé parameters, the exterior the
    background ones.
    """
    _require_sectoral(spec)
    n, d = spec.n, params.delta
    quad = quad or sphere_quadrature(n)
    quad.require(n)
    ui = shell_norm_sq("incident", spec, params, None, 0.0, 1.0, quad)
    pin = radial_profile("total_interior", spec, params, coeffs)
    pex = radial_profile("scattered", spec, params, coeffs)
    g1, g2 = shells.gamma1, shells.gamma2
    e_in = _direct_energy(pin, spec, quad, g1, 1.0, params.lambda_t, params.mu_t)
    e_ex = _direct_energy(pex, spec, quad, 1.0, g2, params.lam, params.mu)
    s_in = _simplified_energy("total_interior", spec, params, coeffs, g1, 1.0, params.mu_t)
    s_ex = _simplified_energy("scattered", spec, params, coeffs, 1.0, g2, params.mu)
    gap = max(abs(e_in - s_in) / abs(e_in), abs(e_ex - s_ex) / abs(e_ex))
    # all four energies share the incident field's squared scale
    rel = math.exp(2 * pin.scale_log - ui.log_scale) / ui.mantissa
    ri, re = e_in * rel, e_ex * rel
    bi, be = stress_bounds(n, d)
    return StressReport(ri, re, bi, be, ri >= bi, re >= be, gap)
