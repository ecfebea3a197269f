"""Background medium, high-contrast profile and derived wavenumbers."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import ConfigurationError

__all__ = [
    "BackgroundMedium",
    "ContrastProfile",
    "DerivedParams",
    "RegimeWarning",
    "derive_parameters",
]

#: frequencies at or above this value are outside the sub-wavelength regime
OMEGA_SUBWAVELENGTH = 0.1


class RegimeWarning(UserWarning):
    """Inputs leave the asymptotic regime; results are still computed."""


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        raise ConfigurationError(f"{name} must be a positive finite number, got {value!r}")
    return value


@dataclass(frozen=True)
class BackgroundMedium:
    lam: float = 1.0
    mu: float = 1.0
    rho: float = 1.0

    def __post_init__(self):
        _positive("mu", self.mu)
        _positive("rho", self.rho)
        if not math.isfinite(self.lam) or 3 * self.lam + 2 * self.mu <= 0:
            raise ConfigurationError("strong convexity requires 3*lambda + 2*mu > 0")


@dataclass(frozen=True)
class ContrastProfile:
    delta: float
    eps_rho: float

    def __post_init__(self):
        for name in ("delta", "eps_rho"):
            v = float(getattr(self, name))
            if not (0.0 < v < 1.0):
                raise ConfigurationError(f"{name} must lie in (0, 1), got {v!r}")
        if self.delta >= self.eps_rho:
            raise ConfigurationError(
                f"tau = sqrt(delta/eps_rho) must be < 1 (delta={self.delta}, eps_rho={self.eps_rho})"
            )

    @property
    def tau(self) -> float:
        return math.sqrt(self.delta / self.eps_rho)


@dataclass(frozen=True)
class DerivedParams:
    background: BackgroundMedium
    contrast: ContrastProfile
    omega: float
    k_s: float
    k_p: float
    kt_s: float
    kt_p: float
    lambda_t: float
    mu_t: float
    rho_t: float
    c_s: float
    c_p: float
    in_regime: bool

    # convenience aliases used throughout the solver
    @property
    def mu(self) -> float:
        return self.background.mu

    @property
    def lam(self) -> float:
        return self.background.lam

    @property
    def rho(self) -> float:
        return self.background.rho

    @property
    def delta(self) -> float:
        return self.contrast.delta

    @property
    def tau(self) -> float:
        return self.contrast.tau


def derive_parameters(
    bg: BackgroundMedium, contrast: ContrastProfile, omega: float
) -> DerivedParams:
    """Wavenumbers, speeds and interior Lamé data at angular frequency ``omega``.

    A :class:`RegimeWarning` is emitted when ``omega >= 0.1``.
    """
    omega = _positive("omega", omega)
    lam, mu, rho = bg.lam, bg.mu, bg.rho
    tau = contrast.tau
    c_s = math.sqrt(mu / rho)
    c_p = math.sqrt((lam + 2 * mu) / rho)
    k_s = omega / c_s
    k_p = omega / c_p
    lambda_t = lam / contrast.delta
    mu_t = mu / contrast.delta
    rho_t = rho / contrast.eps_rho
    # the interior is a scaled copy of the background, so convexity carries over
    assert 3 * lambda_t + 2 * mu_t > 0 and mu_t > 0
    in_regime = omega < OMEGA_SUBWAVELENGTH
    if not in_regime:
        warnings.warn(
            f"omega={omega} is not small; the sub-wavelength asymptotics may not apply",
            RegimeWarning,
            stacklevel=2,
        )
    return DerivedParams(
        background=bg,
        contrast=contrast,
        omega=omega,
        k_s=k_s,
        k_p=k_p,
        kt_s=tau * k_s,
        kt_p=tau * k_p,
        lambda_t=lambda_t,
        mu_t=mu_t,
        rho_t=rho_t,
        c_s=c_s,
        c_p=c_p,
        in_regime=in_regime,
    )
