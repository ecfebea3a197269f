import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmr.errors import DomainError, ResolutionError, SingularityError
from qmr.harmonics import (
    SphericalPoint,
    angular_constants,
    frame_vectors,
    grad_radial_vsh,
    sph_harmonic,
    sphere_quadrature,
    vsh_angular_gradient,
    vsh_frame,
    vsh_T,
)
from qmr.specfun import normalized_legendre, radial_pair

RNG = np.random.default_rng(7)


def random_points(k, r=(0.3, 2.0)):
    return [
        SphericalPoint(float(RNG.uniform(*r)), float(RNG.uniform(0.05, math.pi - 0.05)), float(RNG.uniform(0, 2 * math.pi)))
        for _ in range(k)
    ]


# ---------------------------------------------------------------- points and frame


def test_point_validation_and_roundtrip():
    with pytest.raises(DomainError):
        SphericalPoint(-1.0, 0.5, 0.0)
    with pytest.raises(DomainError):
        SphericalPoint(1.0, 4.0, 0.0)
    p = SphericalPoint(1.3, 0.4, 5.0)
    q = SphericalPoint.from_cartesian(p.cartesian())
    assert (q.r, q.theta, q.phi) == pytest.approx((p.r, p.theta, p.phi), rel=1e-14)


def test_frame_is_orthonormal_and_right_handed():
    r, t, f = frame_vectors(0.8, 2.1)
    m = np.stack([r, t, f])
    assert np.allclose(m @ m.T, np.eye(3), atol=1e-15)
    assert np.allclose(np.cross(r, t), f, atol=1e-15)


# ---------------------------------------------------------------- scalar harmonics


def test_sph_harmonic_examples():
    assert sph_harmonic(0, 0, 1.0, 2.0) == pytest.approx(1 / math.sqrt(4 * math.pi))
    assert sph_harmonic(0, 0, 1.0, 2.0) == pytest.approx(0.282095, abs=1e-6)
    assert sph_harmonic(1, 0, 0.0, 0.0) == pytest.approx(math.sqrt(3 / (4 * math.pi)))
    assert abs(sph_harmonic(1, 0, 0.0, 0.0) - 0.488603) < 1e-6
    with pytest.raises(DomainError):
        sph_harmonic(2, 3, 0.1, 0.1)


def test_sph_harmonic_orthonormal():
    quad = sphere_quadrature(10)
    th, ph, w = quad.angles
    modes = [(n, m) for n in range(0, 11) for m in range(-n, n + 1)]
    y = np.stack([sph_harmonic(n, m, th, ph) for n, m in modes])
    gram = (y * w) @ np.conj(y).T
    assert np.max(np.abs(gram - np.eye(len(modes)))) < 1e-12


def test_no_condon_shortley_phase():
    # P_1^1(cos θ) = +sin θ in this convention, so Y_1^1 is positive at φ = 0
    assert sph_harmonic(1, 1, math.pi / 2, 0.0).real > 0


# ---------------------------------------------------------------- quadrature


def test_quadrature_basic_integrals():
    quad = sphere_quadrature(6)
    th, ph, w = quad.angles
    assert np.sum(w) == pytest.approx(4 * math.pi, rel=1e-13)
    for k in range(1, len(quad.phi)):
        assert abs(np.sum(quad.phi_weights * np.exp(1j * k * quad.phi))) < 1e-12
    y = sph_harmonic(3, 2, th, ph)
    assert np.sum(w * np.abs(y) ** 2) == pytest.approx(1.0, rel=1e-12)
    r, wr = quad.radial(0.0, 1.0)
    assert np.sum(wr * r**4) * 4 * math.pi == pytest.approx(4 * math.pi / 5, rel=1e-14)
    assert 4 * math.pi / 5 == pytest.approx(2.513274, abs=1e-6)


def test_quadrature_sizes_and_immutability():
    quad = sphere_quadrature(5)
    assert len(quad.theta) == 2 * 5 + 16
    assert len(quad.phi) == 4 * 5 + 16
    assert len(quad.radial(1.0, 2.0)[0]) == 32
    with pytest.raises(ValueError):
        quad.theta[0] = 0.0
    with pytest.raises(ResolutionError):
        quad.require(6)


# ---------------------------------------------------------------- T_n^m


def test_T_norm_and_orthogonality():
    quad = sphere_quadrature(15)
    th, ph, w = quad.angles
    modes = [(n, m) for n in range(1, 16) for m in range(-n, n + 1)]
    t = np.stack([vsh_T(n, m, th, ph) for n, m in modes])
    gram = np.einsum("apk,bpk,p->ab", t, np.conj(t), w)
    expected = np.diag([float(n * (n + 1)) for n, _ in modes])
    assert np.max(np.abs(gram - expected)) <= 1e-10 * 240
    assert gram[modes.index((2, 1)), modes.index((2, 1))].real == pytest.approx(6.0, rel=1e-10)


def test_T_is_tangential():
    for p in random_points(100):
        n = int(RNG.integers(1, 10))
        m = int(RNG.integers(-n, n + 1))
        rhat = frame_vectors(p.theta, p.phi)[0]
        assert abs(np.dot(vsh_T(n, m, p.theta, p.phi), rhat)) < 1e-12


def test_vsh_frame_example_and_reconstruction():
    fc = vsh_frame(1, 1, math.pi / 2, 0.0)
    # C_1^1 P_1^1(0) = +sqrt(3/(8π)) without the Condon–Shortley phase
    assert fc.a_theta == pytest.approx(0.345494j, abs=1e-6)
    assert abs(vsh_frame(3, 3, 0.7, 0.0).a_theta) == pytest.approx(abs(vsh_frame(3, 3, 0.7, 2.2).a_theta), rel=1e-14)
    for _ in range(1000):
        n = int(RNG.integers(1, 12))
        m = int(RNG.integers(-n, n + 1))
        th, ph = float(RNG.uniform(0.01, math.pi - 0.01)), float(RNG.uniform(0, 2 * math.pi))
        fc = vsh_frame(n, m, th, ph)
        _, that, phat = frame_vectors(th, ph)
        rec = fc.a_theta * that + fc.a_phi * phat
        assert np.max(np.abs(rec - vsh_T(n, m, th, ph))) <= 1e-11 * max(1.0, np.max(np.abs(rec)))


def test_pole_limits():
    for n in (1, 2, 5):
        for m in range(-n, n + 1):
            fc = vsh_frame(n, m, 0.0, 0.3)
            assert np.isfinite(fc.a_theta) and np.isfinite(fc.a_phi)
            if abs(m) >= 2:
                assert fc.a_theta == 0 and fc.a_phi == 0
            near = vsh_frame(n, m, 1e-7, 0.3)
            assert abs(near.a_theta - fc.a_theta) < 1e-5 * max(1, abs(fc.a_theta))


def test_legendre_convention_audit():
    # d/dθ P_n^n = +n P_n^{n-1} and P_n^n / sin θ = +(2n-1) P_{n-1}^{n-1}
    from qmr.specfun import assoc_legendre_pair

    for n in range(1, 16):
        for th in (0.3, 1.1, 2.4):
            p, dp = assoc_legendre_pair(n, n, th)
            q, _ = assoc_legendre_pair(n, n - 1, th)
            assert dp == pytest.approx(n * q, rel=1e-10)
            if n >= 2:
                r, _ = assoc_legendre_pair(n - 1, n - 1, th)
                assert p / math.sin(th) == pytest.approx((2 * n - 1) * r, rel=1e-10)


# ---------------------------------------------------------------- gradients


def _fd_gradient(fn, point, h=1e-5):
    x = point.cartesian()
    cols = []
    for j in range(3):
        e = np.eye(3)[j] * h
        cols.append((fn(SphericalPoint.from_cartesian(x + e)) - fn(SphericalPoint.from_cartesian(x - e))) / (2 * h))
    return np.stack(cols, axis=1)


@pytest.mark.parametrize("kind", ["bessel_j", "hankel1"])
def test_gradient_matches_finite_differences(kind):
    for p in random_points(20, r=(0.5, 2.0)):
        n = int(RNG.integers(1, 6))
        m = int(RNG.integers(-n, n + 1))
        k = 0.3
        g = grad_radial_vsh(kind, k, n, m, p)
        fd = _fd_gradient(lambda q: radial_pair(kind, n, k * q.r).value * vsh_T(n, m, q.theta, q.phi), p)
        assert np.max(np.abs(g - fd)) <= 1e-6 * np.max(np.abs(g))


@pytest.mark.parametrize("kind", ["bessel_j", "hankel1"])
def test_gradient_block_structure_and_divergence(kind):
    for p in random_points(30):
        n = int(RNG.integers(1, 9))
        m = int(RNG.integers(-n, n + 1))
        k = float(RNG.uniform(0.1, 2.0))
        g = grad_radial_vsh(kind, k, n, m, p)
        rhat = frame_vectors(p.theta, p.phi)[0]
        t = vsh_T(n, m, p.theta, p.phi)
        rp = radial_pair(kind, n, k * p.r)
        scale = max(1.0, np.max(np.abs(g)))
        # r̂ᵀ G = -(f/r) Tᵀ   and   G r̂ = k f' T
        assert np.max(np.abs(rhat @ g + rp.value / p.r * t)) <= 1e-11 * scale
        assert np.max(np.abs(g @ rhat - k * rp.derivative * t)) <= 1e-11 * scale
        assert abs(np.trace(g)) <= 1e-10 * scale


def test_gradient_errors_and_origin():
    with pytest.raises(SingularityError):
        grad_radial_vsh("hankel1", 1.0, 2, 1, SphericalPoint(0.0, 0.5, 0.0))
    with pytest.raises(DomainError):
        grad_radial_vsh("bessel_j", 0.0, 2, 1, SphericalPoint(1.0, 0.5, 0.0))
    g0 = grad_radial_vsh("bessel_j", 1.0, 3, 1, SphericalPoint(0.0, 0.5, 0.0))
    assert np.all(g0 == 0)
    with pytest.raises(DomainError):
        vsh_angular_gradient(2, 1, 0.0, 0.0)


def test_angular_gradient_surface_integral():
    quad = sphere_quadrature(10)
    th, ph, w = quad.angles
    for n in range(1, 11):
        for m in (-n, 0, n):
            g = vsh_angular_gradient(n, m, th, ph)
            val = np.sum(w * np.sum(np.abs(g) ** 2, axis=(-2, -1)))
            assert val == pytest.approx((n * (n + 1)) ** 2, rel=1e-12)


# ---------------------------------------------------------------- angular constants


def test_surface_identities_that_hold():
    for n in range(1, 16):
        s = angular_constants(n).surface
        assert s["A_theta"] == pytest.approx(n * n + n / 2, rel=1e-12)
        assert s["A_phi"] == pytest.approx(n / 2, rel=1e-12)


def test_surface_derivative_integrals_direct_values():
    # closed forms obtained by integrating the sectoral Legendre functions
    for n in range(1, 16):
        s = angular_constants(n).surface
        assert s["dA_theta"] == pytest.approx(n * (n - 1) * (2 * n + 1) / 4, rel=1e-11, abs=1e-12)
        assert s["dA_phi"] == pytest.approx(n * (3 * n + 1) / 4, rel=1e-11)


def test_angular_constants_examples_and_asymptotics():
    c1 = angular_constants(1).surface
    assert (c1["A_theta"], c1["A_phi"]) == pytest.approx((1.5, 0.5), rel=1e-12)
    c = angular_constants(20)
    assert abs(c.c1 / 400 - 1) < 0.15
    assert abs(c.c2 / 20**4 - 1) < 0.15
    assert c.c3 >= c.c2 >= 0
    scaled = angular_constants(4, f_amplitude=2 - 1j)
    base = angular_constants(4)
    assert scaled.c1 == pytest.approx(5 * base.c1, rel=1e-14)


def test_angular_constants_resolution():
    with pytest.raises(ResolutionError):
        angular_constants(8, quad=sphere_quadrature(4))
    with pytest.raises(DomainError):
        angular_constants(0)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 20), data=st.data(), th=st.floats(0.05, 3.09), ph=st.floats(0, 6.28))
def test_T_magnitude_phi_independent(n, data, th, ph):
    m = data.draw(st.integers(-n, n))
    a = np.linalg.norm(vsh_T(n, m, th, ph))
    b = np.linalg.norm(vsh_T(n, m, th, 0.0))
    assert a == pytest.approx(b, rel=1e-12, abs=1e-14)


def test_normalized_m0_branch_consistent():
    # m = 0 uses P̄_n^1 for the θ-derivative; compare against finite differences
    th = np.array([0.4, 1.3])
    leg = normalized_legendre(6, 0, th)
    h = 1e-6
    fd = (normalized_legendre(6, 0, th + h)["P"] - normalized_legendre(6, 0, th - h)["P"]) / (2 * h)
    assert np.allclose(leg["dP"], fd, rtol=1e-7)
